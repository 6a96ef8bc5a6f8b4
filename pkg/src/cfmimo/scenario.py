"""Immutable network snapshot: geometry, path loss, correlation, pilots, noise.

A Scenario bundles everything the per-block channel sampler consumes: AP and
UE positions on a disk, three-slope COST-Hata large-scale gains, Gaussian
local-scattering correlation matrices for half-wavelength uniform linear
arrays, a round-robin pilot assignment, and the receiver noise power.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Thermal noise floor at room temperature.
NOISE_PSD_DBM_PER_HZ = -174.0

# Tolerances for correlation-matrix sanity checks.
HERMITIAN_RTOL = 1e-12
EIGENVALUE_FLOOR_RTOL = 1e-10


@dataclass(frozen=True)
class PathlossParams:
    """Three-slope COST-Hata parameters.

    Defaults follow the classic cell-free parameterization: 1.9 GHz carrier,
    15 m AP height, 1.65 m UE height, slope breakpoints at 10 m and 50 m.
    The inner breakpoint doubles as the minimum-distance floor. Log-normal
    shadowing is off by default (shadow_sigma_db = 0).
    """

    carrier_mhz: float = 1900.0
    ap_height_m: float = 15.0
    ue_height_m: float = 1.65
    d0_m: float = 10.0
    d1_m: float = 50.0
    shadow_sigma_db: float = 0.0

    def fixed_term_db(self):
        """Distance-independent loss term of the COST-Hata formula."""
        lf = math.log10(self.carrier_mhz)
        return (
            46.3
            + 33.9 * lf
            - 13.82 * math.log10(self.ap_height_m)
            - (1.1 * lf - 0.7) * self.ue_height_m
            + (1.56 * lf - 0.8)
        )


@dataclass(frozen=True)
class NetworkConfig:
    """Static parameters of one network deployment.

    Defaults are the full-scale reference setup (64 four-antenna APs on a
    1 km disk serving 10 users); the shipped profiles override them.
    """

    L: int = 64                    # number of APs
    N_a: int = 4                   # antennas per AP
    K: int = 10                    # number of single-antenna users
    radius_m: float = 1000.0       # coverage disk radius
    p_u: float = 0.2               # UE transmit power budget [W]
    bandwidth_hz: float = 5e6
    noise_figure_db: float = 9.0
    tau_c: int = 200               # channel uses per coherence block
    tau_p: int = 5                 # pilot channel uses
    tau_u: int = 195               # data channel uses
    asd_deg: float = 10.0          # angular standard deviation
    seed: int = 0
    pathloss: PathlossParams = field(default_factory=PathlossParams)
    ap_layout: str = "random"      # "random" or "grid" (grid is for regression tests)

    @property
    def M(self):
        """Total number of service antennas."""
        return self.L * self.N_a

    def validate(self):
        for name in ("L", "N_a", "K", "tau_c", "tau_p", "tau_u", "seed"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise ConfigurationError(name, f"must be an integer, got {v!r}")
        for name in ("L", "N_a", "K", "tau_c", "tau_p", "tau_u"):
            if getattr(self, name) < 1:
                raise ConfigurationError(name, f"must be positive, got {getattr(self, name)}")
        for name in ("radius_m", "p_u", "bandwidth_hz", "asd_deg"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, f"must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise ConfigurationError("seed", f"must be nonnegative, got {self.seed}")
        if self.tau_c != self.tau_p + self.tau_u:
            raise ConfigurationError(
                "tau_c",
                f"coherence block must split into pilots plus data: "
                f"tau_c={self.tau_c} != tau_p+tau_u={self.tau_p + self.tau_u}",
            )
        if self.ap_layout not in ("random", "grid"):
            raise ConfigurationError("ap_layout", f"must be 'random' or 'grid', got {self.ap_layout!r}")
        # Advisory only: a small antenna surplus degrades favorable propagation and
        # makes local ZF degenerate, which is a legitimate operating point to study.
        if self.M < 2 * self.K:
            warnings.warn(
                f"M = {self.M} service antennas does not substantially exceed "
                f"K = {self.K} users; expect degraded combining performance",
                stacklevel=2,
            )


@dataclass(frozen=True, eq=False)
class Scenario:
    """One immutable network snapshot (geometry and channel statistics)."""

    config: NetworkConfig
    ap_positions: np.ndarray       # (L, 2) meters
    ue_positions: np.ndarray       # (K, 2) meters
    beta: np.ndarray               # (K, L) large-scale gains, linear
    R: np.ndarray                  # (K, L, N_a, N_a) spatial correlation matrices
    pilot_of: np.ndarray           # (K,) pilot index per user
    copilot_sets: tuple            # per user: tuple of users sharing its pilot
    sigma_z2: float                # noise power [W]

    @classmethod
    def from_parts(cls, config, ap_positions, ue_positions, beta, R, pilot_of, sigma_z2):
        """Assemble and validate a snapshot; arrays are frozen in place."""
        copilot = copilot_sets(pilot_of)
        scn = cls(
            config=config,
            ap_positions=np.asarray(ap_positions, dtype=float),
            ue_positions=np.asarray(ue_positions, dtype=float),
            beta=np.asarray(beta, dtype=float),
            R=np.asarray(R, dtype=complex),
            pilot_of=np.asarray(pilot_of, dtype=int),
            copilot_sets=copilot,
            sigma_z2=float(sigma_z2),
        )
        scn.validate()
        for arr in (scn.ap_positions, scn.ue_positions, scn.beta, scn.R, scn.pilot_of):
            arr.setflags(write=False)
        return scn

    def validate(self):
        cfg = self.config
        K, L, N_a = cfg.K, cfg.L, cfg.N_a
        if self.R.shape != (K, L, N_a, N_a):
            raise ConfigurationError("R", f"expected shape {(K, L, N_a, N_a)}, got {self.R.shape}")
        if self.beta.shape != (K, L):
            raise ConfigurationError("beta", f"expected shape {(K, L)}, got {self.beta.shape}")
        if not self.sigma_z2 > 0:
            raise ConfigurationError("sigma_z2", "noise power must be positive")

        herm_gap = np.abs(self.R - self.R.conj().swapaxes(-1, -2)).max(axis=(-1, -2))
        scale = np.abs(self.R).max(axis=(-1, -2))
        if np.any(herm_gap > HERMITIAN_RTOL * scale):
            raise ConfigurationError("R", "correlation matrices are not Hermitian within tolerance")

        eigs = np.linalg.eigvalsh(self.R)
        trace = np.trace(self.R, axis1=-2, axis2=-1).real
        if np.any(eigs.min(axis=-1) < -EIGENVALUE_FLOOR_RTOL * trace):
            raise ConfigurationError("R", "correlation matrices are not positive semidefinite")

        diag = np.diagonal(self.R, axis1=-2, axis2=-1)
        if not np.allclose(diag.real, self.beta[..., None], rtol=1e-9, atol=0.0):
            raise ConfigurationError("R", "diagonal entries must equal the large-scale gain")
        if np.any(np.abs(diag.imag) > 1e-12 * np.maximum(self.beta[..., None], 1e-300)):
            raise ConfigurationError("R", "diagonal entries must be real")

        if self.pilot_of.shape != (K,):
            raise ConfigurationError("pilot_of", f"expected shape {(K,)}, got {self.pilot_of.shape}")
        if np.any(self.pilot_of < 0) or np.any(self.pilot_of >= cfg.tau_p):
            raise ConfigurationError("pilot_of", "pilot indices must lie in [0, tau_p)")
        for k, group in enumerate(self.copilot_sets):
            if k not in group:
                raise ConfigurationError("copilot_sets", f"user {k} missing from its own pilot group")


def noise_power(bandwidth_hz, noise_figure_db):
    """Receiver noise power in watts for a -174 dBm/Hz thermal floor."""
    if not bandwidth_hz > 0:
        raise ConfigurationError("bandwidth_hz", f"must be positive, got {bandwidth_hz}")
    dbm = NOISE_PSD_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)


def pathloss_db(d_m, params=None):
    """Large-scale channel gain in dB (negative) at 2-D distance ``d_m`` meters.

    Three-slope model: 35 dB/decade beyond d1, 20 dB/decade between d0 and d1,
    constant below d0. Distances under the d0 floor are clamped, which makes
    the gain continuous and monotonically non-increasing everywhere.
    """
    if params is None:
        params = PathlossParams()
    scalar = np.isscalar(d_m)
    d_km = np.maximum(np.asarray(d_m, dtype=float), params.d0_m) / 1000.0
    d1_km = params.d1_m / 1000.0
    fixed = params.fixed_term_db()
    loss = np.where(
        d_km > d1_km,
        fixed + 35.0 * np.log10(d_km),
        fixed + 15.0 * math.log10(d1_km) + 20.0 * np.log10(d_km),
    )
    return float(-loss) if scalar else -loss


def _scattering_kernel(N_a, phi, asd_rad):
    """Per-pair phase/spread factors of the Gaussian local scattering model.

    Accepts scalar or array ``phi`` (nominal azimuths); returns an array with
    two trailing antenna axes. Antennas are half-wavelength spaced.
    """
    delta = np.arange(N_a)[:, None] - np.arange(N_a)[None, :]
    phi = np.asarray(phi, dtype=float)[..., None, None]
    phase = np.exp(1j * np.pi * delta * np.sin(phi))
    spread = np.exp(-0.5 * (asd_rad * np.pi * delta * np.cos(phi)) ** 2)
    return phase * spread


def local_scattering_R(N_a, phi, asd, beta):
    """Spatial correlation matrix for a half-wavelength ULA, Gaussian angle spread.

    Entry (m, n) equals beta * exp(j*pi*(m-n)*sin(phi)) *
    exp(-(asd^2/2) * (pi*(m-n)*cos(phi))^2), so the diagonal is exactly beta
    and asd -> 0 collapses to the rank-one steering-vector outer product.

    Parameters
    ----------
    N_a : int, antennas
    phi : float, nominal azimuth [rad]
    asd : float, angular standard deviation [rad], >= 0
    beta : float, large-scale gain (linear), > 0
    """
    if N_a < 1:
        raise ConfigurationError("N_a", f"must be positive, got {N_a}")
    if not beta > 0:
        raise ConfigurationError("beta", f"must be positive, got {beta}")
    if asd < 0:
        raise ConfigurationError("asd", f"must be nonnegative, got {asd}")
    return beta * _scattering_kernel(N_a, phi, asd)


def assign_pilots(K, tau_p):
    """Round-robin pilot map: user k uses pilot k mod tau_p."""
    if K < 1 or tau_p < 1:
        raise ConfigurationError("tau_p", "K and tau_p must be positive")
    return np.arange(K) % tau_p


def copilot_sets(pilot_of):
    """Per-user tuples of users sharing the same pilot (self included)."""
    pilot_of = np.asarray(pilot_of)
    return tuple(
        tuple(np.flatnonzero(pilot_of == pilot_of[k]).tolist())
        for k in range(pilot_of.shape[0])
    )


def _uniform_disk(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _grid_in_disk(n, radius):
    # Square grid inscribed in the disk; deterministic, used for regression tests.
    side = math.ceil(math.sqrt(n))
    half = radius / math.sqrt(2.0)
    coords = np.linspace(-half, half, side) if side > 1 else np.zeros(1)
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack((xx.ravel()[:n], yy.ravel()[:n]))


def build_scenario(config):
    """Draw one network snapshot. Pure function of (config, config.seed).

    AP and UE positions are uniform on the disk (APs optionally on a grid),
    gains come from the three-slope path-loss model on 2-D distances, and
    each correlation matrix uses the geometric AP-to-UE azimuth as nominal
    angle. All APs share one array orientation.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)

    if config.ap_layout == "grid":
        ap_pos = _grid_in_disk(config.L, config.radius_m)
    else:
        ap_pos = _uniform_disk(rng, config.L, config.radius_m)
    ue_pos = _uniform_disk(rng, config.K, config.radius_m)

    diff = ue_pos[:, None, :] - ap_pos[None, :, :]      # (K, L, 2)
    dist = np.hypot(diff[..., 0], diff[..., 1])
    gain_db = pathloss_db(dist, config.pathloss)
    if config.pathloss.shadow_sigma_db > 0:
        gain_db = gain_db + rng.normal(0.0, config.pathloss.shadow_sigma_db, size=dist.shape)
    beta = 10.0 ** (gain_db / 10.0)

    phi = np.arctan2(diff[..., 1], diff[..., 0])        # azimuth AP -> UE
    asd_rad = math.radians(config.asd_deg)
    R = beta[..., None, None] * _scattering_kernel(config.N_a, phi, asd_rad)

    pilots = assign_pilots(config.K, config.tau_p)
    sigma_z2 = noise_power(config.bandwidth_hz, config.noise_figure_db)
    return Scenario.from_parts(config, ap_pos, ue_pos, beta, R, pilots, sigma_z2)
