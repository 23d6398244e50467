import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tworay import (
    SPEED_OF_LIGHT,
    DistanceInterval,
    DomainError,
    LinkGeometry,
    RadioConfig,
    WorstCaseKind,
    local_minimum_count,
    null_distance,
    path_lengths,
    phase_shift,
    receive_power_single,
    received_power,
    worst_case_power_single,
)
from tworay.units import to_db

F_477 = 10 * SPEED_OF_LIGHT / (2 * math.pi)  # omega / c = 10
OMEGA_10 = 10 * SPEED_OF_LIGHT
OMEGA_24 = 2 * math.pi * 2.4e9


def textbook_power(d, omega, geom, p_t=1.0, rho=1.0):
    los, reflected = path_lengths(d, geom)
    phi = omega / SPEED_OF_LIGHT * (reflected - los)
    return p_t * (SPEED_OF_LIGHT / (2 * omega)) ** 2 * (
        1 / los**2 + rho**2 / reflected**2 - 2 * rho * np.cos(phi) / (los * reflected)
    )


def test_config_validation():
    for kwargs in ({"f1": 0}, {"f1": 1e9, "theta": 1.5}, {"f1": 1e9, "rho": -0.1}, {"f1": 1e9, "p_t": -1},
                   {"f1": 1e9, "delta_f": -1}):
        with pytest.raises(DomainError):
            RadioConfig(**kwargs)
    with pytest.raises(DomainError):
        DistanceInterval(10, 10)
    with pytest.raises(DomainError):
        DistanceInterval(0, 10)


@pytest.mark.parametrize("d,expected", [(30.0, -50.0), (100.0, -60.0)])
def test_power_low_band(ground, d, expected):
    cfg = RadioConfig(F_477)
    assert to_db(receive_power_single(d, OMEGA_10, ground, cfg)) == pytest.approx(expected, abs=0.5)


def test_power_at_third_null(ground, wifi):
    d3 = null_distance(3, OMEGA_24, ground)
    assert to_db(receive_power_single(d3, OMEGA_24, ground, wifi)) == pytest.approx(-124.7, abs=0.05)


@given(d=st.floats(0.5, 1e4), rho=st.floats(0, 1))
def test_matches_textbook_form(ground, d, rho):
    # away from the deepest nulls the cosine form is accurate enough to compare
    ours = received_power(d, OMEGA_10, ground, rho=rho)
    ref = textbook_power(d, OMEGA_10, ground, rho=rho)
    assert ours == pytest.approx(ref, rel=1e-6, abs=1e-9 * abs(ref) + 1e-6 * (SPEED_OF_LIGHT / (2 * OMEGA_10 * d)) ** 2)


@given(d=st.floats(0.1, 1e5), rho=st.floats(0, 1))
def test_power_not_below_smooth_term(ground, d, rho):
    los, reflected = path_lengths(d, ground)
    floor = (SPEED_OF_LIGHT / (2 * OMEGA_24)) ** 2 * (1 / los - rho / reflected) ** 2
    assert received_power(d, OMEGA_24, ground, rho=rho) >= floor * (1 - 1e-12)


def test_no_reflection_is_free_space(ground):
    cfg = RadioConfig(2.4e9, rho=0.0)
    d = np.array([5.0, 50.0, 500.0])
    los, _ = path_lengths(d, ground)
    np.testing.assert_allclose(receive_power_single(d, OMEGA_24, ground, cfg),
                               (SPEED_OF_LIGHT / (2 * OMEGA_24 * los)) ** 2, rtol=1e-14)


def test_rejects_zero_distance(ground, wifi):
    with pytest.raises(DomainError):
        receive_power_single(0.0, OMEGA_24, ground, wifi)


def test_null_count(ground):
    assert local_minimum_count(OMEGA_10, ground) == 4
    assert local_minimum_count(OMEGA_24, ground) == 24
    assert local_minimum_count(1.0, ground) == 0


def test_null_distances(ground):
    got = [null_distance(k, OMEGA_10, ground) for k in range(1, 5)]
    np.testing.assert_allclose(got, [46.7, 21.6, 12.3, 6.5], atol=0.05)
    assert null_distance(3, OMEGA_24, ground) == pytest.approx(79.4, abs=0.05)


@pytest.mark.parametrize("omega", [OMEGA_10, OMEGA_24, 2 * math.pi * 5.8e9])
def test_null_phase_is_multiple_of_two_pi(ground, omega):
    for k in range(1, local_minimum_count(omega, ground) + 1):
        d = null_distance(k, omega, ground)
        if d is None or d == 0:
            continue
        assert phase_shift(d, omega, ground) == pytest.approx(2 * math.pi * k, rel=1e-9)


def test_null_index_out_of_range(ground):
    for k in (0, 5):
        with pytest.raises(DomainError):
            null_distance(k, OMEGA_10, ground)


def test_cosine_term_is_one_at_nulls(ground):
    # with rho = 1 only the smooth term survives at a null
    for k in range(1, 5):
        d = null_distance(k, OMEGA_10, ground)
        los, reflected = path_lengths(d, ground)
        smooth = (SPEED_OF_LIGHT / (2 * OMEGA_10)) ** 2 * (1 / los - 1 / reflected) ** 2
        assert received_power(d, OMEGA_10, ground) == pytest.approx(smooth, rel=1e-6)


def test_farthest_null_is_deepest(ground):
    ds = [null_distance(k, OMEGA_24, ground) for k in range(1, 25)]
    powers = [received_power(d, OMEGA_24, ground) for d in ds if d]
    assert all(a < b for a, b in zip(powers, powers[1:]))


def test_rho_one_is_worst_at_a_null(ground):
    d = null_distance(3, OMEGA_24, ground)
    los, reflected = path_lengths(d, ground)
    rho = np.linspace(0, reflected / los, 20001)
    p = np.array([received_power(d, OMEGA_24, ground, rho=r) for r in rho])
    assert rho[np.argmin(p)] == pytest.approx(reflected / los, abs=1e-4)
    assert p.min() < 1e-10 * p.max()
    inside = rho <= 1
    assert np.all(np.diff(p[inside]) < 0)


def test_worst_case_low_band(ground):
    cfg = RadioConfig(F_477)
    wc = worst_case_power_single(DistanceInterval(30, 100), OMEGA_10, ground, cfg)
    assert to_db(wc.power) == pytest.approx(-97, abs=0.3)
    assert wc.kind is WorstCaseKind.LOCAL_MINIMUM and wc.null_index == 1
    assert wc.at_distance == pytest.approx(46.7, abs=0.05)


def test_worst_case_high_band(ground, wifi):
    wc = worst_case_power_single(DistanceInterval(30, 100), OMEGA_24, ground, wifi)
    assert to_db(wc.power) == pytest.approx(-125, abs=0.3)
    assert wc.null_index == 3 and wc.at_distance == pytest.approx(79.4, abs=0.05)


@pytest.mark.parametrize("rho,expected,kind", [
    (0.1, -79.4, WorstCaseKind.UPPER_ENDPOINT),
    (0.5, -84.1, WorstCaseKind.LOCAL_MINIMUM),
])
def test_worst_case_weak_reflection(ground, rho, expected, kind):
    cfg = RadioConfig(2.4e9, rho=rho)
    wc = worst_case_power_single(DistanceInterval(30, 100), OMEGA_24, ground, cfg)
    assert to_db(wc.power) == pytest.approx(expected, abs=0.3)
    assert wc.kind is kind


def test_weak_reflection_endpoints(ground):
    cfg = RadioConfig(2.4e9, rho=0.1)
    assert to_db(receive_power_single(30.0, OMEGA_24, ground, cfg)) == pytest.approx(-69.2, abs=0.05)
    assert to_db(receive_power_single(100.0, OMEGA_24, ground, cfg)) == pytest.approx(-79.4, abs=0.05)


def test_unrefined_candidate_not_below_refined(ground, wifi):
    iv = DistanceInterval(30, 100)
    raw = worst_case_power_single(iv, OMEGA_24, ground, wifi, refine=False)
    fine = worst_case_power_single(iv, OMEGA_24, ground, wifi)
    assert fine.power <= raw.power
    assert to_db(raw.power) - to_db(fine.power) < 0.05


@settings(max_examples=20, deadline=None)
@given(
    h_tx=st.floats(2, 40), h_rx=st.floats(1, 10), f=st.floats(2e8, 6e9),
    d_min=st.floats(5, 200), span=st.floats(1.2, 5), rho=st.floats(0.2, 1),
)
def test_worst_case_matches_grid(h_tx, h_rx, f, d_min, span, rho):
    geom = LinkGeometry(h_tx, h_rx)
    cfg = RadioConfig(f, rho=rho)
    iv = DistanceInterval(d_min, d_min * span)
    wc = worst_case_power_single(iv, cfg.omega1, geom, cfg)
    grid = receive_power_single(np.geomspace(iv.d_min, iv.d_max, 10**6), cfg.omega1, geom, cfg)
    assert wc.power <= grid.min() * (1 + 1e-9)
    assert to_db(grid.min()) - to_db(wc.power) < 0.01
    assert iv.d_min <= wc.at_distance <= iv.d_max
