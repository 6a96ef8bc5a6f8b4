import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfmimo.errors import ConfigurationError
from cfmimo.scenario import (
    NetworkConfig,
    PathlossParams,
    assign_pilots,
    build_scenario,
    copilot_sets,
    local_scattering_R,
    noise_power,
    pathloss_db,
)

# Independent evaluation of the documented three-slope formula at 1 km
# (fixed term recomputed by hand from the raw constants).
GAIN_1KM_DB = -140.71508370390842


def small_config(**kw):
    defaults = dict(L=4, N_a=2, K=4, tau_c=200, tau_p=2, tau_u=198, seed=3)
    defaults.update(kw)
    return NetworkConfig(**defaults)


# ---------------------------------------------------------------------------
# noise power
# ---------------------------------------------------------------------------

def test_noise_power_definition_1hz():
    # -174 dBm in watts
    assert noise_power(1.0, 0.0) == pytest.approx(10 ** (-20.4), rel=1e-12)


def test_noise_power_5mhz_9db():
    # -174 + 10log10(5e6) + 9 = -98.01 dBm; exactly 5e-13/sqrt(10) W
    assert noise_power(5e6, 9.0) == pytest.approx(5e-13 / math.sqrt(10), rel=1e-12)
    assert noise_power(5e6, 9.0) == pytest.approx(1.5811388300841896e-13, rel=1e-12)


def test_noise_power_1mhz_0db():
    assert noise_power(1e6, 0.0) == pytest.approx(10 ** (-14.4), rel=1e-12)


def test_noise_power_rejects_bad_bandwidth():
    with pytest.raises(ConfigurationError):
        noise_power(0.0, 9.0)


# ---------------------------------------------------------------------------
# path loss
# ---------------------------------------------------------------------------

def test_pathloss_1km_matches_hand_evaluation():
    assert pathloss_db(1000.0) == pytest.approx(GAIN_1KM_DB, abs=1e-9)


def test_pathloss_continuous_at_breakpoints():
    params = PathlossParams()
    for bp in (params.d0_m, params.d1_m):
        below = pathloss_db(bp * (1 - 1e-12), params)
        above = pathloss_db(bp * (1 + 1e-12), params)
        assert abs(below - above) < 1e-9


@settings(max_examples=200)
@given(
    d=st.floats(min_value=0.0, max_value=1e5),
    factor=st.floats(min_value=1.0, max_value=100.0),
)
def test_pathloss_non_increasing(d, factor):
    assert pathloss_db(d * factor) <= pathloss_db(d) + 1e-12


@settings(max_examples=100)
@given(d=st.floats(min_value=10.001, max_value=1e5))
def test_pathloss_strictly_decreasing_above_floor(d):
    assert pathloss_db(1.01 * d) < pathloss_db(d)


def test_pathloss_clamped_below_floor():
    assert pathloss_db(0.0) == pathloss_db(10.0)
    assert pathloss_db(3.0) == pathloss_db(10.0)


# ---------------------------------------------------------------------------
# local scattering correlation
# ---------------------------------------------------------------------------

def test_scattering_single_antenna():
    R = local_scattering_R(1, 0.7, 0.2, beta=3.5)
    assert R.shape == (1, 1)
    assert R[0, 0] == pytest.approx(3.5)


def test_scattering_zero_spread_is_rank_one():
    phi, beta, n = 0.4, 2.0, 4
    R = local_scattering_R(n, phi, 0.0, beta)
    steering = np.exp(1j * np.pi * np.arange(n) * np.sin(phi))
    expected = beta * np.outer(steering, steering.conj())
    np.testing.assert_allclose(R, expected, atol=1e-12)
    assert np.linalg.matrix_rank(R, tol=1e-9) == 1


@settings(max_examples=50)
@given(
    n=st.integers(min_value=1, max_value=6),
    phi=st.floats(min_value=-np.pi, max_value=np.pi),
    asd=st.floats(min_value=1e-3, max_value=0.6),
    beta=st.floats(min_value=1e-14, max_value=10.0),
)
def test_scattering_hermitian_psd_unit_diagonal(n, phi, asd, beta):
    R = local_scattering_R(n, phi, asd, beta)
    np.testing.assert_allclose(R, R.conj().T, atol=1e-14 * beta)
    assert np.trace(R).real / n == pytest.approx(beta, rel=1e-12)
    assert np.linalg.eigvalsh(R).min() >= -1e-10 * np.trace(R).real


# ---------------------------------------------------------------------------
# pilots
# ---------------------------------------------------------------------------

def test_pilot_pairs_half_reuse():
    pilots = assign_pilots(10, 5)
    groups = copilot_sets(pilots)
    assert groups[0] == (0, 5)
    assert groups[7] == (2, 7)
    counts = np.bincount(pilots)
    assert np.all(counts == 2)


def test_pilot_identity_when_enough_pilots():
    pilots = assign_pilots(3, 3)
    assert copilot_sets(pilots) == ((0,), (1,), (2,))


def test_pilot_round_robin_reuse():
    pilots = assign_pilots(4, 2)
    assert copilot_sets(pilots) == ((0, 2), (1, 3), (0, 2), (1, 3))


@settings(max_examples=60)
@given(K=st.integers(min_value=1, max_value=40), tau_p=st.integers(min_value=1, max_value=12))
def test_pilot_sets_partition_users(K, tau_p):
    pilots = assign_pilots(K, tau_p)
    groups = copilot_sets(pilots)
    union = sorted({u for g in groups for u in g})
    assert union == list(range(K))
    for k, g in enumerate(groups):
        assert k in g
        for other in g:
            assert tuple(groups[other]) == tuple(g)


# ---------------------------------------------------------------------------
# scenario construction
# ---------------------------------------------------------------------------

def test_build_scenario_deterministic():
    cfg = small_config()
    a = build_scenario(cfg)
    b = build_scenario(cfg)
    for x, y in (
        (a.ap_positions, b.ap_positions),
        (a.ue_positions, b.ue_positions),
        (a.beta, b.beta),
        (a.R, b.R),
        (a.pilot_of, b.pilot_of),
    ):
        assert np.array_equal(x, y)
    assert a.sigma_z2 == b.sigma_z2


def test_build_scenario_different_seeds_differ():
    a = build_scenario(small_config(seed=1))
    b = build_scenario(small_config(seed=2))
    assert not np.array_equal(a.ue_positions, b.ue_positions)


def test_scenario_invariants_hold():
    scn = build_scenario(small_config(K=10, tau_p=5, tau_u=195))
    # validation runs at construction; re-run explicitly for good measure
    scn.validate()
    diag = np.diagonal(scn.R, axis1=-2, axis2=-1).real
    assert np.allclose(diag, scn.beta[..., None], rtol=1e-9)
    counts = np.bincount(scn.pilot_of)
    assert np.all(counts == 2)


def test_scenario_positions_inside_disk():
    cfg = small_config(L=16, K=12, radius_m=700.0)
    scn = build_scenario(cfg)
    assert np.all(np.hypot(*scn.ap_positions.T) <= cfg.radius_m + 1e-9)
    assert np.all(np.hypot(*scn.ue_positions.T) <= cfg.radius_m + 1e-9)


def test_grid_layout_is_deterministic_and_seed_independent():
    a = build_scenario(small_config(ap_layout="grid", seed=1))
    b = build_scenario(small_config(ap_layout="grid", seed=9))
    assert np.array_equal(a.ap_positions, b.ap_positions)
    assert not np.array_equal(a.ue_positions, b.ue_positions)


def test_scenario_arrays_are_frozen():
    scn = build_scenario(small_config())
    with pytest.raises(ValueError):
        scn.beta[0, 0] = 1.0


def test_shadow_fading_changes_gains():
    base = small_config()
    shadowed = small_config(pathloss=PathlossParams(shadow_sigma_db=8.0))
    a = build_scenario(base)
    b = build_scenario(shadowed)
    assert not np.allclose(a.beta, b.beta, rtol=1e-6, atol=0.0)


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "kw,field",
    [
        (dict(tau_c=100), "tau_c"),
        (dict(K=0), "K"),
        (dict(L=-1), "L"),
        (dict(p_u=0.0), "p_u"),
        (dict(radius_m=-5.0), "radius_m"),
        (dict(ap_layout="hex"), "ap_layout"),
        (dict(seed=-1), "seed"),
    ],
)
def test_invalid_config_names_field(kw, field):
    with pytest.raises(ConfigurationError) as exc:
        small_config(**kw).validate()
    assert exc.value.field == field


def test_antenna_surplus_is_warn_only():
    cfg = NetworkConfig(L=1, N_a=2, K=4, tau_c=200, tau_p=2, tau_u=198)
    with pytest.warns(UserWarning):
        cfg.validate()
