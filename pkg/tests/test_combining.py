import numpy as np
import pytest

from cfmimo.channel import ChannelState
from cfmimo.combining import (
    build_combiner,
    local_mmse,
    local_mr,
    local_rzf,
    local_zf,
    mmse_centralized,
    mr_centralized,
    rzf_centralized,
    zf_centralized,
)
from cfmimo.errors import DegenerateCombinerError
from conftest import synthetic_state

P_U = 1.0
SIGMA2 = 0.5


def state_from_matrix(Hcols, err_scale=0.0, rng=None):
    """ChannelState whose stacked estimate matrix equals the given (M, K) array."""
    M, K = Hcols.shape
    h_hat = Hcols.T.reshape(K, 1, M)
    if err_scale > 0:
        st = synthetic_state(rng, K, 1, M, err_scale=err_scale)
        return ChannelState(h=h_hat.copy(), h_hat=h_hat, err_cov=st.err_cov, pilot_cov=st.pilot_cov)
    err = np.zeros((K, 1, M, M), dtype=complex)
    return ChannelState(h=h_hat.copy(), h_hat=h_hat, err_cov=err, pilot_cov=err.copy())


# ---------------------------------------------------------------------------
# maximal ratio
# ---------------------------------------------------------------------------

def test_mr_copies_estimates(rng):
    st = synthetic_state(rng, K=3, L=2, N_a=2)
    comb = mr_centralized(st)
    np.testing.assert_array_equal(comb.vectors, st.h_hat.reshape(3, -1))


def test_mr_basis_vector():
    H = np.array([[1.0], [1j]])
    comb = mr_centralized(state_from_matrix(H))
    np.testing.assert_array_equal(comb.vectors[0], np.array([1.0, 1j]))


# ---------------------------------------------------------------------------
# zero forcing
# ---------------------------------------------------------------------------

def test_zf_identity_channel():
    comb = zf_centralized(state_from_matrix(np.eye(3, dtype=complex)))
    np.testing.assert_allclose(comb.vectors, np.eye(3), atol=1e-12)


def test_zf_nulling_identity(rng):
    for _ in range(20):
        st = synthetic_state(rng, K=3, L=4, N_a=2)
        comb = zf_centralized(st)
        G = comb.vectors.conj() @ st.h_hat.reshape(3, -1).T
        off = G - np.eye(3)
        assert np.abs(off).max() <= 1e-8


def test_zf_matches_least_squares_oracle(rng):
    H = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    comb = zf_centralized(state_from_matrix(H))
    for k in range(2):
        # minimum-norm solution of H^H d = e_k, via SVD-based lstsq
        d_ref, *_ = np.linalg.lstsq(H.conj().T, np.eye(2)[k], rcond=None)
        np.testing.assert_allclose(comb.vectors[k], d_ref, atol=1e-10)


def test_zf_raises_when_underdetermined(rng):
    st = synthetic_state(rng, K=4, L=1, N_a=2)
    with pytest.raises(DegenerateCombinerError) as exc:
        zf_centralized(st)
    assert exc.value.condition == np.inf


def test_zf_raises_on_rank_deficiency():
    col = np.array([1.0, 2.0, 3.0, 4.0])
    H = np.column_stack([col, col * (1 + 1e-14)])
    with pytest.raises(DegenerateCombinerError) as exc:
        zf_centralized(state_from_matrix(H.astype(complex)))
    assert exc.value.condition > 1e10 or not np.isfinite(exc.value.condition)


# ---------------------------------------------------------------------------
# regularized zero forcing
# ---------------------------------------------------------------------------

def test_rzf_identity_channel_unit_alpha():
    comb = rzf_centralized(state_from_matrix(np.eye(3, dtype=complex)), alpha=1.0)
    np.testing.assert_allclose(comb.vectors, 0.5 * np.eye(3), atol=1e-12)


def test_rzf_converges_to_zf(rng):
    st = synthetic_state(rng, K=3, L=4, N_a=2)
    d_zf = zf_centralized(st).vectors
    scale = np.linalg.norm(st.h_hat) ** 2
    err = {}
    for rel in (1e-4, 1e-6):
        d = rzf_centralized(st, alpha=rel * scale).vectors
        err[rel] = np.linalg.norm(d - d_zf) / np.linalg.norm(d_zf)
    assert err[1e-6] < 1e-4
    # first-order convergence: shrinking alpha by 100x shrinks the gap ~100x
    assert err[1e-6] <= err[1e-4] / 10


def test_rzf_large_alpha_approaches_mr(rng):
    st = synthetic_state(rng, K=3, L=4, N_a=2)
    scale = np.linalg.norm(st.h_hat) ** 2
    alpha = 1e8 * scale
    d = rzf_centralized(st, alpha=alpha).vectors
    np.testing.assert_allclose(alpha * d, st.h_hat.reshape(3, -1), rtol=1e-6)


def test_rzf_rejects_nonpositive_alpha(rng):
    st = synthetic_state(rng, K=2, L=2, N_a=2)
    with pytest.raises(ValueError):
        rzf_centralized(st, alpha=0.0)


# ---------------------------------------------------------------------------
# centralized MMSE
# ---------------------------------------------------------------------------

def test_mmse_zero_power_reduces_to_scaled_mr(rng):
    st = synthetic_state(rng, K=3, L=2, N_a=2)
    comb = mmse_centralized(st, np.zeros(3), P_U, SIGMA2)
    np.testing.assert_allclose(comb.vectors, st.h_hat.reshape(3, -1) / SIGMA2, atol=1e-12)


def test_mmse_single_user_no_error_is_collinear_with_mr(rng):
    st = synthetic_state(rng, K=1, L=2, N_a=3)
    st = ChannelState(h=st.h, h_hat=st.h_hat, err_cov=np.zeros_like(st.err_cov),
                      pilot_cov=st.pilot_cov)
    d = mmse_centralized(st, np.ones(1), P_U, SIGMA2).vectors[0]
    h = st.h_hat.reshape(-1)
    cos = abs(d.conj() @ h) / (np.linalg.norm(d) * np.linalg.norm(h))
    assert cos == pytest.approx(1.0, abs=1e-12)


def test_mmse_rejects_eta_out_of_range(rng):
    st = synthetic_state(rng, K=2, L=2, N_a=2)
    with pytest.raises(ValueError):
        mmse_centralized(st, np.array([0.5, 1.5]), P_U, SIGMA2)


# ---------------------------------------------------------------------------
# local combiners
# ---------------------------------------------------------------------------

def test_local_mr_single_ap_equals_centralized(rng):
    st = synthetic_state(rng, K=3, L=1, N_a=4)
    loc = local_mr(st)
    cen = mr_centralized(st)
    np.testing.assert_array_equal(loc.vectors.reshape(3, -1), cen.vectors)
    assert loc.is_local and not cen.is_local


def test_local_zf_pseudo_inverse_identity(rng):
    st = synthetic_state(rng, K=2, L=3, N_a=4)
    comb = local_zf(st)
    for l in range(3):
        V = comb.vectors[:, l, :].T        # (N_a, K)
        H = st.h_hat[:, l, :].T
        np.testing.assert_allclose(V.conj().T @ H, np.eye(2), atol=1e-8)


def test_local_zf_raises_when_underdetermined(rng):
    st = synthetic_state(rng, K=4, L=2, N_a=2)
    with pytest.raises(DegenerateCombinerError):
        local_zf(st)


def test_local_rzf_approaches_local_zf_at_small_noise(rng):
    st = synthetic_state(rng, K=2, L=2, N_a=4)
    vz = local_zf(st).vectors
    vr = local_rzf(st, sigma_z2=1e-12).vectors
    np.testing.assert_allclose(vr, vz, rtol=1e-6)


def test_local_mmse_single_user_no_error_collinear(rng):
    st = synthetic_state(rng, K=1, L=2, N_a=3)
    st = ChannelState(h=st.h, h_hat=st.h_hat, err_cov=np.zeros_like(st.err_cov),
                      pilot_cov=st.pilot_cov)
    comb = local_mmse(st, np.ones(1), P_U, SIGMA2)
    for l in range(2):
        v = comb.vectors[0, l]
        h = st.h_hat[0, l]
        cos = abs(v.conj() @ h) / (np.linalg.norm(v) * np.linalg.norm(h))
        assert cos == pytest.approx(1.0, abs=1e-12)


def test_build_combiner_dispatch(rng):
    st = synthetic_state(rng, K=2, L=2, N_a=3)
    for kind, shape in [
        ("mr", (2, 6)), ("zf", (2, 6)), ("rzf", (2, 6)), ("mmse", (2, 6)),
        ("local-mr", (2, 2, 3)), ("local-zf", (2, 2, 3)),
        ("local-rzf", (2, 2, 3)), ("local-mmse", (2, 2, 3)),
    ]:
        comb = build_combiner(kind, st, P_U, SIGMA2)
        assert comb.kind == kind
        assert comb.vectors.shape == shape
    with pytest.raises(ValueError):
        build_combiner("dirty-paper", st, P_U, SIGMA2)
