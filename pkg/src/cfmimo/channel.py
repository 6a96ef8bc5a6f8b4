"""Per-coherence-block channel realizations and LMMSE estimation.

The pilot phase is simulated explicitly: each block draws true channels,
forms the despread pilot observation shared by all co-pilot users, and
applies the LMMSE filter to it. This preserves the cross-correlation between
co-pilot users' estimates, which sampling estimates directly from their
marginal distribution would lose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericDomainError

_SQRT_HALF = np.sqrt(0.5)


def _crandn(rng, shape):
    """Standard circularly-symmetric complex Gaussian draws."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * _SQRT_HALF


def matrix_sqrt_psd(R):
    """Hermitian PSD square root via eigendecomposition.

    Slightly negative eigenvalues (roundoff from near-singular correlation
    matrices at small angle spread) are clipped to zero.
    """
    R = np.asarray(R)
    gap = np.abs(R - R.conj().swapaxes(-1, -2)).max()
    if gap > 1e-12 * max(np.abs(R).max(), 1e-300):
        raise NumericDomainError("matrix square root requires a Hermitian input")
    w, V = np.linalg.eigh(R)
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)[..., None, :]) @ V.conj().swapaxes(-1, -2)


def sample_channel(R, rng, size=None):
    """Draw correlated Rayleigh channel vector(s) h ~ CN(0, R).

    Returns shape (N_a,) or (size, N_a) when ``size`` is given.
    """
    S = matrix_sqrt_psd(R)
    n = S.shape[-1]
    if size is None:
        return S @ _crandn(rng, n)
    return _crandn(rng, (size, n)) @ S.T


def error_covariance(R, Gamma, p_u, tau_p):
    """LMMSE estimation-error covariance: R minus the estimate covariance.

    Hermitian PSD whenever Gamma is the despread-pilot covariance matching R.
    """
    R = np.asarray(R, dtype=complex)
    Gamma = np.asarray(Gamma, dtype=complex)
    try:
        X = np.linalg.solve(Gamma, R)
    except np.linalg.LinAlgError as err:
        raise NumericDomainError(f"singular pilot covariance: {err}") from err
    theta = R - p_u * tau_p * (R @ X)
    return 0.5 * (theta + theta.conj().swapaxes(-1, -2))


@dataclass(frozen=True, eq=False)
class EstimationModel:
    """Deterministic per-scenario estimation quantities, precomputed once.

    ``pilot_cov`` is the per-pilot-symbol covariance of the despread pilot
    observation; ``est_map`` maps that observation to the LMMSE estimate.
    """

    sqrt_R: np.ndarray          # (K, L, N_a, N_a)
    pilot_cov: np.ndarray       # (K, L, N_a, N_a)
    est_map: np.ndarray         # (K, L, N_a, N_a) = sqrt(p_u) R pilot_cov^-1
    err_cov: np.ndarray         # (K, L, N_a, N_a)
    pilot_matrix: np.ndarray    # (tau_p, K) 0/1 membership


@dataclass(frozen=True, eq=False)
class ChannelState:
    """One coherence-block realization with its LMMSE estimates."""

    h: np.ndarray               # (K, L, N_a) true channels
    h_hat: np.ndarray           # (K, L, N_a) estimates
    err_cov: np.ndarray         # (K, L, N_a, N_a)
    pilot_cov: np.ndarray       # (K, L, N_a, N_a)
    block_seed: object = None


def estimation_model(scn):
    """Precompute pilot covariances, LMMSE filters and error covariances."""
    cfg = scn.config
    K, L, N_a, tau_p = cfg.K, cfg.L, cfg.N_a, cfg.tau_p
    p_u = cfg.p_u

    membership = np.zeros((tau_p, K))
    membership[scn.pilot_of, np.arange(K)] = 1.0

    eye = np.eye(N_a)
    per_pilot = p_u * tau_p * np.einsum("tk,klab->tlab", membership, scn.R) + scn.sigma_z2 * eye
    pilot_cov = per_pilot[scn.pilot_of]                       # (K, L, N_a, N_a)

    try:
        X = np.linalg.solve(pilot_cov, scn.R)                 # pilot_cov^-1 R
    except np.linalg.LinAlgError as err:
        raise NumericDomainError(f"singular pilot covariance: {err}") from err
    est_map = np.sqrt(p_u) * X.conj().swapaxes(-1, -2)        # sqrt(p_u) R pilot_cov^-1
    err_cov = scn.R - np.sqrt(p_u) * tau_p * (est_map @ scn.R)
    err_cov = 0.5 * (err_cov + err_cov.conj().swapaxes(-1, -2))

    trace = np.trace(scn.R, axis1=-2, axis2=-1).real
    min_eig = np.linalg.eigvalsh(err_cov).min(axis=-1)
    if np.any(min_eig < -1e-10 * trace - 1e-30):
        raise NumericDomainError("error covariance lost positive semidefiniteness")

    sqrt_R = matrix_sqrt_psd(scn.R)
    return EstimationModel(
        sqrt_R=sqrt_R,
        pilot_cov=pilot_cov,
        est_map=est_map,
        err_cov=err_cov,
        pilot_matrix=membership,
    )


def realize_block(scn, rng, model=None):
    """Sample one coherence block and estimate all channels.

    ``rng`` may be a Generator or anything ``np.random.default_rng`` accepts
    (int seed, SeedSequence); seeds are recorded on the returned state so a
    block can be reproduced exactly. Pass a precomputed ``model`` when
    generating many blocks from the same scenario.
    """
    if model is None:
        model = estimation_model(scn)
    if isinstance(rng, np.random.Generator):
        gen, block_seed = rng, None
    else:
        gen, block_seed = np.random.default_rng(rng), rng

    cfg = scn.config
    K, L, N_a, tau_p = cfg.K, cfg.L, cfg.N_a, cfg.tau_p

    w = _crandn(gen, (K, L, N_a))
    h = np.einsum("klab,klb->kla", model.sqrt_R, w)

    # Despread pilot observation per (pilot, AP): sum of co-pilot channels
    # scaled by sqrt(p_u)*tau_p plus noise of covariance tau_p*sigma_z2*I.
    noise = np.sqrt(tau_p * scn.sigma_z2) * _crandn(gen, (tau_p, L, N_a))
    y_pilot = np.sqrt(cfg.p_u) * tau_p * np.einsum("tk,kla->tla", model.pilot_matrix, h) + noise

    h_hat = np.einsum("klab,klb->kla", model.est_map, y_pilot[scn.pilot_of])
    return ChannelState(
        h=h,
        h_hat=h_hat,
        err_cov=model.err_cov,
        pilot_cov=model.pilot_cov,
        block_seed=block_seed,
    )
