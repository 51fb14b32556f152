import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import frozen
from hardyz import DomainError, NuPoint, WindowSpec, enumerate_window, solve_nu_point, theta, theta_residual
from hardyz.nupoints import canonical_target, expected_count, mean_gap, solve_nu_array, window_arrays

taus = st.floats(-math.pi, math.pi)


@pytest.mark.parametrize("nu", sorted(frozen.GRAM))
def test_gram_points_match_reference(nu):
    p = solve_nu_point(nu, 0.0)
    assert p == NuPoint(nu, 0.0, p.t)
    assert abs(p.t - frozen.GRAM[nu]) <= 1e-10 * frozen.GRAM[nu]


def test_first_gram_point():
    assert solve_nu_point(1).t == pytest.approx(23.1702827, abs=1e-7)


def test_theta_at_solved_point_is_target():
    p = solve_nu_point(100, 0.0)
    assert abs(theta(p.t).value - 100 * math.pi) <= 1e-10 * 100 * math.pi


@given(st.integers(1, 10**6))
def test_shared_endpoints_are_bit_identical(k):
    a = solve_nu_point(2 * k, math.pi / 2).t
    b = solve_nu_point(2 * k + 1, -math.pi / 2).t
    assert a == b


@given(st.integers(2, 10**7), taus)
def test_canonical_target_preserves_phase(nu, tau):
    cn, ct = canonical_target(nu, tau)
    assert -math.pi / 2 < ct <= math.pi / 2
    assert abs((cn - nu) * math.pi + (ct - tau)) <= 1e-15 * max(1.0, abs(tau)) + 4e-16


@given(st.integers(30, 2 * 10**7), taus)
def test_round_trip_residual(nu, tau):
    p = solve_nu_point(nu, tau)
    r = abs(theta_residual(p))
    assert r <= 1e-10 * (math.pi * nu + tau)
    # 1e-9 where a double can get that close; past t ~ 2e6 one ulp of t moves
    # theta by more than 2e-9, and the solver returns the nearest double
    step = np.spacing(p.t)
    assert r <= max(1e-9, 0.5 * theta(p.t).deriv * step * (1 + 1e-6))
    for q in (p.t - step, p.t + step):
        assert r <= abs(theta_residual(NuPoint(nu, tau, q)))


@given(st.integers(30, 10**7), taus, taus)
def test_monotone_in_nu_and_tau(nu, t1, t2):
    ts = solve_nu_array(np.array([nu, nu + 1, nu + 2]), t1)
    assert np.all(np.diff(ts) > 0)
    if t1 != t2:
        lo, hi = sorted([t1, t2])
        assert solve_nu_point(nu, lo).t <= solve_nu_point(nu, hi).t


def test_solver_is_deterministic():
    nus = np.arange(10**5, 10**5 + 5000)
    assert np.array_equal(solve_nu_array(nus, 0.3), solve_nu_array(nus, 0.3))


def test_solver_bit_identical_across_threads(threads):
    nus = np.arange(2 * 10**5, 2 * 10**5 + 7000)
    threads(1)
    one = solve_nu_array(nus, -1.1)
    threads(4)
    assert np.array_equal(one, solve_nu_array(nus, -1.1))


@pytest.mark.parametrize("nu, tau", [(0, 0.0), (-3, 0.0), (10, 3.5), (10, math.nan)])
def test_solver_rejects_bad_input(nu, tau):
    with pytest.raises(DomainError):
        solve_nu_point(nu, tau)


def test_small_targets_use_the_log_gamma_path():
    # pi * 1 - pi = 0 lies below theta(50); the point is mpmath's g_0
    p = solve_nu_point(1, -math.pi)
    with mpmath.workdps(30):
        assert p.t == pytest.approx(float(mpmath.grampoint(0)), abs=1e-9)


@pytest.mark.parametrize(
    "T, H, parity", [(999.0, 10.0, "all"), (1e4, 0.0, "all"), (1e4, 2e4, "all"), (1e4, 10.0, "both")]
)
def test_window_spec_validation(T, H, parity):
    with pytest.raises(DomainError):
        WindowSpec(T, H, parity)


def test_window_count_and_gaps(desk_window):
    pts = enumerate_window(desk_window, 0.0)
    expected = expected_count(1e6, 1e3)
    assert expected == pytest.approx(1906.3, abs=0.1)
    assert abs(len(pts) - expected) <= 2
    ts = np.array([p.t for p in pts])
    assert np.all(ts >= 1e6) and np.all(ts <= 1e6 + 1e3)
    gaps = np.diff(ts)
    assert np.all(np.abs(gaps / mean_gap(1e6) - 1) <= 0.05)


@pytest.mark.parametrize("tau", [0.0, 1.0, -math.pi / 2])
def test_parity_split_partitions_window(tau):
    w = WindowSpec(2e5, 300.0)
    all_nu = {p.nu for p in enumerate_window(w, tau)}
    even = {p.nu for p in enumerate_window(WindowSpec(2e5, 300.0, "even"), tau)}
    odd = {p.nu for p in enumerate_window(WindowSpec(2e5, 300.0, "odd"), tau)}
    assert even | odd == all_nu and not even & odd
    assert all(n % 2 == 0 for n in even) and all(n % 2 == 1 for n in odd)


def test_edge_points_included_left_excluded_right():
    t0 = solve_nu_point(10**5, 0.0).t
    t1 = solve_nu_point(10**5 + 40, 0.0).t
    pts = enumerate_window(WindowSpec(t0, t1 - t0), 0.0)
    assert pts[0].nu == 10**5
    assert pts[-1].nu == 10**5 + 39


@given(st.floats(5e4, 5e6), st.floats(10.0, 500.0), taus)
def test_adjacent_windows_partition_a_range(T, H, tau):
    whole = [p.nu for p in enumerate_window(WindowSpec(T, 2 * H), tau)]
    left = [p.nu for p in enumerate_window(WindowSpec(T, H), tau)]
    right = [p.nu for p in enumerate_window(WindowSpec(T + H, H), tau)]
    assert left + right == whole


@pytest.mark.parametrize("x", [math.pi / 8, math.pi / 4, math.pi / 2])
def test_window_width_law(desk_window, x):
    nus, _ = window_arrays(WindowSpec(1e6, 1e3, "even"), 0.0)
    widths = solve_nu_array(nus, x) - solve_nu_array(nus, -x)
    law = 4 * x / math.log(1e6 / (2 * math.pi))
    assert np.all(np.abs(widths / law - 1) <= 0.05)
