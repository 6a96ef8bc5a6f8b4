"""Receive combining vectors, centralized (length M) and local (length N_a per AP).

All builders are deterministic functions of the channel state and their
parameters. MMSE-style combiners go through Hermitian positive-definite
linear solves; no explicit matrix inverse is formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateCombinerError

CENTRALIZED_KINDS = ("mr", "zf", "rzf", "mmse")
LOCAL_KINDS = ("local-mr", "local-zf", "local-rzf", "local-mmse")
ALL_KINDS = CENTRALIZED_KINDS + LOCAL_KINDS

# Beyond this condition number a pseudo-inverse would mostly amplify noise.
COND_LIMIT = 1e10


@dataclass(frozen=True, eq=False)
class CombinerSet:
    """Combining vectors for all users.

    ``vectors`` has shape (K, M) for centralized kinds and (K, L, N_a) for
    local kinds. ``alpha`` records the regularization of centralized RZF.
    """

    kind: str
    vectors: np.ndarray
    alpha: float = None

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown combiner kind {self.kind!r}")
        if not np.all(np.isfinite(self.vectors.view(float))):
            raise DegenerateCombinerError(f"{self.kind} produced non-finite vectors")

    @property
    def is_local(self):
        return self.kind.startswith("local-")


def stacked_estimates(state):
    """Estimates stacked over APs: row k is the length-M vector for user k."""
    K = state.h_hat.shape[0]
    return state.h_hat.reshape(K, -1)


def _condition(Hcols):
    """2-norm condition number of (stacked) channel matrices, via SVD.

    Computed on the matrix itself rather than its Gram, which would square
    the condition number and saturate at the fp noise floor around 1e8.
    """
    s = np.linalg.svd(Hcols, compute_uv=False)
    lo = s[..., -1]
    hi = s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(lo > 0, hi / np.maximum(lo, 1e-300), np.inf)


def mr_centralized(state):
    """Maximal ratio: the combining vector is the estimated channel itself."""
    return CombinerSet("mr", stacked_estimates(state).copy())


def zf_centralized(state, cond_limit=COND_LIMIT):
    """Zero forcing via the pseudo-inverse of the estimated channel matrix.

    Satisfies d_k^H h_hat_k' = delta(k, k') whenever the M x K estimate
    matrix has full column rank.
    """
    Hrows = stacked_estimates(state)            # rows are h_hat_k^T
    K, M = Hrows.shape
    if K > M:
        raise DegenerateCombinerError(
            f"zero forcing needs at least as many antennas as users (M={M} < K={K})",
            condition=np.inf,
        )
    cond = float(_condition(Hrows.T))
    if not np.isfinite(cond) or cond > cond_limit:
        raise DegenerateCombinerError(
            f"estimated channel matrix is rank deficient (condition ~ {cond:.2e})",
            condition=cond,
        )
    G = Hrows.conj() @ Hrows.T                  # Gram of the column-stacked estimates
    A = np.linalg.solve(G, Hrows.conj())
    return CombinerSet("zf", A.conj())


def rzf_centralized(state, alpha):
    """Regularized zero forcing with ridge term alpha > 0 on the Gram matrix."""
    if not alpha > 0:
        raise ValueError(f"regularization must be positive, got {alpha}")
    Hrows = stacked_estimates(state)
    K = Hrows.shape[0]
    G = Hrows.conj() @ Hrows.T + alpha * np.eye(K)
    A = np.linalg.solve(G, Hrows.conj())
    return CombinerSet("rzf", A.conj(), alpha=float(alpha))


def mmse_centralized(state, eta, p_u, sigma_z2):
    """MMSE combining from the Wiener-Hopf solution at power coefficients eta.

    Solves (p_u sum_k' eta_k' (h_hat h_hat^H + err_cov) + sigma_z2 I) d = h_hat
    with one Cholesky factorization shared by all users.
    """
    eta = _check_eta(eta, state.h_hat.shape[0])
    Hrows = stacked_estimates(state)
    K, M = Hrows.shape
    L, N_a = state.h_hat.shape[1], state.h_hat.shape[2]

    Z = p_u * (Hrows.T * eta) @ Hrows.conj()
    theta_sum = p_u * np.einsum("k,klab->lab", eta, state.err_cov)
    for l in range(L):
        s = slice(l * N_a, (l + 1) * N_a)
        Z[s, s] += theta_sum[l]
    Z[np.diag_indices_from(Z)] += sigma_z2

    factor = cho_factor(Z, lower=True, check_finite=False)
    D = cho_solve(factor, Hrows.T, check_finite=False)   # (M, K)
    return CombinerSet("mmse", D.T)


def local_mr(state):
    """Per-AP maximal ratio: v_kl is the local channel estimate."""
    return CombinerSet("local-mr", state.h_hat.copy())


def _local_stack(state):
    # (L, N_a, K): column k of slab l is the local estimate of user k at AP l.
    return state.h_hat.transpose(1, 2, 0)


def local_zf(state, cond_limit=COND_LIMIT):
    """Per-AP zero forcing; requires N_a >= K with full-rank local estimates."""
    K, L, N_a = state.h_hat.shape
    if N_a < K:
        raise DegenerateCombinerError(
            f"local zero forcing needs N_a >= K per AP (N_a={N_a} < K={K})",
            condition=np.inf,
        )
    Hl = _local_stack(state)
    cond = float(_condition(Hl).max())
    if not np.isfinite(cond) or cond > cond_limit:
        raise DegenerateCombinerError(
            f"a local channel matrix is rank deficient (condition ~ {cond:.2e})",
            condition=cond,
        )
    G = np.einsum("lak,laj->lkj", Hl.conj(), Hl)
    X = np.linalg.solve(G, np.broadcast_to(np.eye(K), (L, K, K)))
    V = Hl @ X                                   # (L, N_a, K)
    return CombinerSet("local-zf", V.transpose(2, 0, 1).copy())


def local_rzf(state, sigma_z2):
    """Per-AP RZF; the ridge term is fixed to the noise power."""
    K, L, N_a = state.h_hat.shape
    Hl = _local_stack(state)
    G = np.einsum("lak,laj->lkj", Hl.conj(), Hl) + sigma_z2 * np.eye(K)
    X = np.linalg.solve(G, np.broadcast_to(np.eye(K), (L, K, K)))
    V = Hl @ X
    return CombinerSet("local-rzf", V.transpose(2, 0, 1).copy())


def local_mmse(state, eta, p_u, sigma_z2):
    """Per-AP MMSE combining from local estimates and error covariances."""
    K, L, N_a = state.h_hat.shape
    eta = _check_eta(eta, K)
    Z = p_u * np.einsum("k,kla,klb->lab", eta, state.h_hat, state.h_hat.conj())
    Z += p_u * np.einsum("k,klab->lab", eta, state.err_cov)
    Z += sigma_z2 * np.eye(N_a)
    V = np.linalg.solve(Z, _local_stack(state))  # (L, N_a, K)
    return CombinerSet("local-mmse", V.transpose(2, 0, 1).copy())


def build_combiner(kind, state, p_u, sigma_z2, eta=None, rzf_alpha=None):
    """Dispatch by canonical kind name; eta defaults to full power."""
    K = state.h_hat.shape[0]
    if eta is None:
        eta = np.ones(K)
    if kind == "mr":
        return mr_centralized(state)
    if kind == "zf":
        return zf_centralized(state)
    if kind == "rzf":
        return rzf_centralized(state, sigma_z2 if rzf_alpha is None else rzf_alpha)
    if kind == "mmse":
        return mmse_centralized(state, eta, p_u, sigma_z2)
    if kind == "local-mr":
        return local_mr(state)
    if kind == "local-zf":
        return local_zf(state)
    if kind == "local-rzf":
        return local_rzf(state, sigma_z2)
    if kind == "local-mmse":
        return local_mmse(state, eta, p_u, sigma_z2)
    raise ValueError(f"unknown combiner kind {kind!r}")


def _check_eta(eta, K):
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (K,):
        raise ValueError(f"eta must have shape {(K,)}, got {eta.shape}")
    if np.any(eta < 0) or np.any(eta > 1):
        raise ValueError("power coefficients must lie in [0, 1]")
    return eta
