"""SINR and spectral-efficiency evaluation.

Centralized combining is scored by an instantaneous SINR per realization;
distributed combining by a statistical SINR built from Monte-Carlo moments
of the per-AP soft estimates. Both are exposed as a ratio whose numerator
and denominator are (close to) linear in the power coefficients, which is
the surface the max-min power control operates on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combining import build_combiner, _check_eta
from .channel import estimation_model, realize_block
from .errors import MomentInconsistencyError

PRELOG_FORMS = ("data", "block")
DISTRIBUTED_SINR_FORMS = ("per-ap", "uatf")


@dataclass(frozen=True, eq=False)
class SinrLinearization:
    """Per-user SINR coefficients, linear in the power vector.

    gamma_k(eta) = eta_k * gain_k /
        (sum_{k' != k} eta_k' (cross[k,k'] + err[k,k']) + eta_k err[k,k] + noise_k)

    ``cross`` holds squared coherent cross gains with a zero diagonal, ``err``
    the estimation-error quadratic forms, and ``noise`` the combiner-weighted
    noise floor scaled by 1/p_u.
    """

    gain: np.ndarray    # (K,)
    cross: np.ndarray   # (K, K), zero diagonal
    err: np.ndarray     # (K, K)
    noise: np.ndarray   # (K,)

    def __post_init__(self):
        if np.any(self.gain < 0) or np.any(self.cross < 0) or np.any(self.err < 0):
            raise ValueError("SINR coefficients must be nonnegative")
        if np.any(self.noise <= 0):
            raise ValueError("noise terms must be positive")


@dataclass(frozen=True, eq=False)
class DistributedMoments:
    """Monte-Carlo moments of per-AP soft estimates for distributed combining."""

    mean_gain: np.ndarray         # (K, L) complex: E[v_kl^H h_hat_kl]
    second_cross: np.ndarray      # (K, K, L): E[|v_kl^H h_hat_k'l|^2]
    err_quad: np.ndarray          # (K, K, L): E[v_kl^H err_cov_k'l v_kl]
    norm2: np.ndarray             # (K, L): E[||v_kl||^2]
    second_cross_sum: np.ndarray  # (K, K): E[|sum_l v_kl^H h_hat_k'l|^2]
    n_samples: int


def linearize_sinr(combiners, state, p_u, sigma_z2):
    """Extract the power-linear SINR coefficients of a centralized combiner set.

    Exact: evaluating the coefficient ratio reproduces the instantaneous SINR
    for every power vector.
    """
    if combiners.is_local:
        raise ValueError("linearization requires a centralized combiner set")
    D = combiners.vectors                      # (K, M)
    K = D.shape[0]
    Hrows = state.h_hat.reshape(K, -1)
    G = D.conj() @ Hrows.T                     # G[k, k'] = d_k^H h_hat_k'
    gain = np.abs(np.diagonal(G)) ** 2
    cross = np.abs(G) ** 2
    np.fill_diagonal(cross, 0.0)

    Dl = D.reshape(state.h_hat.shape)          # (K, L, N_a)
    err = np.einsum("kla,tlab,klb->kt", Dl.conj(), state.err_cov, Dl).real
    err = np.clip(err, 0.0, None)              # PSD forms; clip roundoff dust
    noise = (sigma_z2 / p_u) * np.sum(np.abs(D) ** 2, axis=1)
    return SinrLinearization(gain=gain, cross=cross, err=err, noise=noise)


def centralized_sinr(lin, eta):
    """Instantaneous per-user SINR at power coefficients eta (all in [0, 1])."""
    eta = _check_eta(eta, lin.gain.shape[0])
    denom = (lin.cross + lin.err) @ eta + lin.noise
    return eta * lin.gain / denom


def block_local_moments(state, vectors):
    """Single-block moment contributions for a local combiner set's vectors."""
    V = vectors                                           # (K, L, N_a)
    inner = np.einsum("kla,tla->ktl", V.conj(), state.h_hat)
    mean_gain = np.einsum("kkl->kl", inner)               # own-channel inner products
    second_cross = np.abs(inner) ** 2
    second_cross_sum = np.abs(inner.sum(axis=2)) ** 2
    err_quad = np.einsum("kla,tlab,klb->ktl", V.conj(), state.err_cov, V).real
    norm2 = np.sum(np.abs(V) ** 2, axis=2)
    return mean_gain, second_cross, err_quad, norm2, second_cross_sum


def estimate_distributed_moments(scn, combiner_kind, eta, n_blocks, rng, model=None):
    """Average the distributed-SINR moment terms over fresh channel blocks.

    Local MMSE combiners are rebuilt per draw at the given eta; the other
    local kinds ignore eta. Accumulation is a sum over a preallocated block
    axis, so the result does not depend on evaluation order.
    """
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    if model is None:
        model = estimation_model(scn)
    rng = np.random.default_rng(rng)
    cfg = scn.config
    K, L = cfg.K, cfg.L

    acc = [
        np.zeros((n_blocks, K, L), dtype=complex),
        np.zeros((n_blocks, K, K, L)),
        np.zeros((n_blocks, K, K, L)),
        np.zeros((n_blocks, K, L)),
        np.zeros((n_blocks, K, K)),
    ]
    for b in range(n_blocks):
        state = realize_block(scn, rng, model)
        combiner = build_combiner(combiner_kind, state, cfg.p_u, scn.sigma_z2, eta=eta)
        if not combiner.is_local:
            raise ValueError(f"{combiner_kind!r} is not a local combiner kind")
        for slot, term in zip(acc, block_local_moments(state, combiner.vectors)):
            slot[b] = term

    return DistributedMoments(
        mean_gain=acc[0].mean(axis=0),
        second_cross=acc[1].mean(axis=0),
        err_quad=acc[2].mean(axis=0),
        norm2=acc[3].mean(axis=0),
        second_cross_sum=acc[4].mean(axis=0),
        n_samples=n_blocks,
    )


def _distributed_terms(mom, p_u, sigma_z2, form):
    if form not in DISTRIBUTED_SINR_FORMS:
        raise ValueError(f"unknown distributed SINR form {form!r}")
    gain = np.abs(mom.mean_gain.sum(axis=1)) ** 2             # |sum_l E[.]|^2
    own_per_ap = np.sum(np.abs(mom.mean_gain) ** 2, axis=1)   # sum_l |E[.]|^2
    err_sum = mom.err_quad.sum(axis=2)
    noise = (sigma_z2 / p_u) * mom.norm2.sum(axis=1)
    if form == "per-ap":
        cross2 = mom.second_cross.sum(axis=2)
    else:
        cross2 = mom.second_cross_sum
    return gain, own_per_ap, cross2, err_sum, noise


def distributed_sinr(mom, eta, p_u, sigma_z2, form="per-ap"):
    """Statistical per-user SINR for distributed combining.

    The default "per-ap" form sums second moments AP by AP and subtracts
    eta_k^2 * sum_l |E[v^H h_hat]|^2. The "uatf" form is the standard
    use-and-forget bound: coherent second moments of the summed soft
    estimates minus eta_k * |sum_l E[v^H h_hat]|^2. The two coincide at full
    power for pilot-isolated users.
    """
    gain, own_per_ap, cross2, err_sum, noise = _distributed_terms(mom, p_u, sigma_z2, form)
    eta = _check_eta(eta, gain.shape[0])
    interference = (cross2 + err_sum) @ eta
    if form == "per-ap":
        denom = interference - eta**2 * own_per_ap + noise
    else:
        denom = interference - eta * gain + noise
    if np.any(denom <= 0):
        raise MomentInconsistencyError(
            "statistical SINR denominator is nonpositive; increase the number "
            "of Monte-Carlo blocks"
        )
    return eta * gain / denom


def distributed_linearization(mom, p_u, sigma_z2, form="per-ap"):
    """Map distributed moments onto the power-linear SINR coefficient surface.

    For "uatf" the mapping is exact for every power vector. For "per-ap" the
    own-power term is quadratic, so its linear stand-in
    err[k,k] = sum_l (E[|.|^2] - |E[.]|^2) + err_quad is exact at full power
    and optimistic by at most (eta_k - eta_k^2) * sum_l |E[.]|^2 elsewhere.
    Both diagonals are nonnegative sample variances by construction.
    """
    gain, own_per_ap, cross2, err_sum, noise = _distributed_terms(mom, p_u, sigma_z2, form)
    cross = cross2.copy()
    err = err_sum.copy()
    K = gain.shape[0]
    idx = np.arange(K)
    if form == "per-ap":
        err[idx, idx] += cross[idx, idx] - own_per_ap
    else:
        err[idx, idx] += cross[idx, idx] - gain
    err = np.clip(err, 0.0, None)
    cross[idx, idx] = 0.0
    return SinrLinearization(gain=gain, cross=cross, err=err, noise=noise)


def prelog_factor(tau_p, tau_u, form="data"):
    """Pilot-overhead prelog: 1 - tau_p/tau_u ("data") or 1 - tau_p/tau_c ("block")."""
    if form not in PRELOG_FORMS:
        raise ValueError(f"unknown prelog form {form!r}")
    if tau_p < 1 or tau_u < 1:
        raise ValueError("tau_p and tau_u must be positive")
    if form == "data":
        if tau_p >= tau_u:
            raise ValueError(
                f"the data-referenced prelog needs tau_p < tau_u, got {tau_p} >= {tau_u}"
            )
        return 1.0 - tau_p / tau_u
    return tau_u / (tau_p + tau_u)


def spectral_efficiency(gamma, tau_p, tau_u, form="data"):
    """Spectral efficiency in bits per channel use: prelog * log2(1 + gamma)."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SINR must be nonnegative")
    se = prelog_factor(tau_p, tau_u, form) * np.log2(1.0 + gamma)
    return float(se) if se.ndim == 0 else se
