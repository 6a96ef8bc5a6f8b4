"""Universal max-min power control over the power-linear SINR coefficients.

Bisection on the target SINR with a convex feasibility check. The check
rewrites each constraint gamma_k(eta) >= gamma_t as a standard interference
function and iterates its fixed point from zero, which converges monotonically
to the minimal feasible power vector whenever one exists. No external solver
is needed; the routine works for any combining scheme that provides a
SinrLinearization, including the distributed ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .performance import centralized_sinr

FIXED_POINT_MAX_ITERS = 500
FIXED_POINT_TOL = 1e-12

_FEASIBLE, _EXCEEDED, _STALLED, _NONMONOTONE = 0, 1, 2, 3


def _fixed_point_kernel(A, b, max_iters, tol):
    # Iterate x <- A x + b from x = 0 with A, b >= 0. The sequence is
    # componentwise non-decreasing; any decrease means broken inputs.
    K = b.shape[0]
    x = np.zeros(K)
    xn = np.zeros(K)
    for it in range(max_iters):
        delta = 0.0
        high = False
        for i in range(K):
            s = b[i]
            for j in range(K):
                s += A[i, j] * x[j]
            xn[i] = s
            d = s - x[i]
            if d < -1e-12:
                return _NONMONOTONE, x.copy(), it + 1
            if d > delta:
                delta = d
            if s > 1.0:
                high = True
        if high:
            return _EXCEEDED, xn.copy(), it + 1
        if delta <= tol:
            return _FEASIBLE, xn.copy(), it + 1
        x, xn = xn, x
    return _STALLED, x.copy(), max_iters


try:  # pragma: no cover - exercised whenever numba is installed
    from numba import njit

    _fixed_point = njit(cache=True)(_fixed_point_kernel)
except ImportError:  # pragma: no cover
    _fixed_point = _fixed_point_kernel


@dataclass(frozen=True, eq=False)
class BisectionTrace:
    """Record of one max-min run: one step per bisection iteration."""

    steps: tuple        # (gamma_min, gamma_max, gamma_t, feasible) per iteration
    eta: np.ndarray     # returned power coefficients
    gamma: float        # min-user SINR achieved at eta


def feasibility_check(lin, gamma_t, max_iters=FIXED_POINT_MAX_ITERS, tol=FIXED_POINT_TOL):
    """Minimal power vector meeting gamma_k >= gamma_t for all k, or None.

    Declares infeasibility as soon as an iterate component exceeds 1, or when
    any own-gain margin gain_k - gamma_t*err[k,k] is nonpositive. Hitting the
    iteration cap without settling also counts as infeasible, which keeps the
    surrounding bisection conservative.
    """
    if gamma_t < 0:
        raise ValueError(f"target SINR must be nonnegative, got {gamma_t}")
    K = lin.gain.shape[0]
    if gamma_t == 0:
        return np.zeros(K)
    margin = lin.gain - gamma_t * np.diagonal(lin.err)
    if np.any(margin <= 0):
        return None
    coupling = lin.cross + lin.err
    coupling = coupling - np.diag(np.diagonal(coupling))
    A = gamma_t * coupling / margin[:, None]
    b = gamma_t * lin.noise / margin
    status, x, _ = _fixed_point(A, b, max_iters, tol)
    if status == _NONMONOTONE:
        raise RuntimeError("fixed-point iterate decreased; coefficients violate assumptions")
    return x if status == _FEASIBLE else None


def sinr_upper_bound(state, p_u, sigma_z2):
    """Initial bisection ceiling: the best user's matched-filter SNR.

    max_k p_u * sum_l ||h_hat_kl||^2 / sigma_z2 upper-bounds the SINR of any
    combiner by the Cauchy-Schwarz inequality.
    """
    energy = np.sum(np.abs(state.h_hat) ** 2, axis=(1, 2))
    return float(p_u * energy.max() / sigma_z2)


def _linearization_upper_bound(lin):
    # gamma_k <= gain_k / noise_k for every feasible power vector.
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(lin.noise > 0, lin.gain / lin.noise, 0.0)
    return float(ratios.max())


def maxmin_bisection(
    lin,
    epsilon,
    p_u=None,
    sigma_z2=None,
    state=None,
    gamma_max=None,
    max_iters=FIXED_POINT_MAX_ITERS,
    tol=FIXED_POINT_TOL,
):
    """Maximize the worst user's SINR over power coefficients in [0, 1].

    Bisects the target SINR until the bracket width drops below ``epsilon``.
    The ceiling comes from ``state`` (matched-filter SNR bound) when given,
    else from the linearization itself. The last feasible vector is rescaled
    so its largest entry hits the power cap, which can only raise SINRs.

    Returns (eta, BisectionTrace) with min_k gamma_k(eta) within epsilon of
    the optimum.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if gamma_max is None:
        if state is not None:
            gamma_max = sinr_upper_bound(state, p_u, sigma_z2)
        else:
            gamma_max = _linearization_upper_bound(lin)

    K = lin.gain.shape[0]
    g_lo, g_hi = 0.0, float(gamma_max)
    eta_best = np.ones(K)     # full power: always feasible at the trivial target
    steps = []
    while g_hi - g_lo > epsilon:
        g_t = 0.5 * (g_lo + g_hi)
        eta = feasibility_check(lin, g_t, max_iters=max_iters, tol=tol)
        feasible = eta is not None
        steps.append((g_lo, g_hi, g_t, feasible))
        if feasible:
            g_lo = g_t
            eta_best = eta
        else:
            g_hi = g_t

    peak = eta_best.max()
    if peak > 0:
        eta_best = eta_best / peak
    gamma_star = float(centralized_sinr(lin, eta_best).min())
    return eta_best, BisectionTrace(steps=tuple(steps), eta=eta_best, gamma=gamma_star)
