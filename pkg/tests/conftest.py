import numpy as np
import pytest

from cfmimo.channel import ChannelState
from cfmimo.scenario import NetworkConfig, Scenario


def crandn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_psd(rng, n, scale=1.0):
    a = crandn(rng, (n, n))
    m = scale * (a @ a.conj().T) / n
    return 0.5 * (m + m.conj().T)


def synthetic_state(rng, K, L, N_a, err_scale=0.1, h_scale=1.0):
    """A ChannelState with random estimates and random PSD error covariances.

    Good enough for combiner/SINR algebra tests that never touch the pilot
    phase itself.
    """
    h_hat = h_scale * crandn(rng, (K, L, N_a))
    err_cov = np.empty((K, L, N_a, N_a), dtype=complex)
    pilot_cov = np.empty_like(err_cov)
    for k in range(K):
        for l in range(L):
            err_cov[k, l] = random_psd(rng, N_a, scale=err_scale * h_scale**2)
            pilot_cov[k, l] = np.eye(N_a)
    return ChannelState(h=h_hat.copy(), h_hat=h_hat, err_cov=err_cov, pilot_cov=pilot_cov)


def mini_scenario(L=2, N_a=2, K=2, tau_p=2, beta=1.0, p_u=1.0, sigma_z2=0.5, seed=0):
    """Hand-built scenario with flat correlation (beta * I) for channel tests."""
    cfg = NetworkConfig(
        L=L, N_a=N_a, K=K, tau_c=200, tau_p=tau_p, tau_u=200 - tau_p,
        p_u=p_u, seed=seed,
    )
    beta_arr = np.full((K, L), beta, dtype=float)
    R = np.zeros((K, L, N_a, N_a), dtype=complex)
    R[..., np.arange(N_a), np.arange(N_a)] = beta
    pilots = np.arange(K) % tau_p
    pos_ap = np.zeros((L, 2))
    pos_ue = np.zeros((K, 2))
    return Scenario.from_parts(cfg, pos_ap, pos_ue, beta_arr, R, pilots, sigma_z2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
