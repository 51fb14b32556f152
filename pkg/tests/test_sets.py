import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import frozen
from hardyz import DisjointIntervalSet, DomainError, WindowSpec, build_sets, enumerate_window, measure, sign_partition
from hardyz.special import rs_z_array

W = WindowSpec(1e6, 1e3)


@st.composite
def interval_sets(draw, lo=0.0, hi=100.0):
    pts = draw(st.lists(st.floats(lo, hi, allow_subnormal=False), min_size=0, max_size=20, unique=True))
    pts = sorted(pts)
    if len(pts) % 2:
        pts = pts[:-1]
    return DisjointIntervalSet(list(zip(pts[0::2], pts[1::2])))


# -- DisjointIntervalSet -----------------------------------------------------------


def test_measure_examples():
    assert measure(DisjointIntervalSet()) == 0
    assert measure(DisjointIntervalSet([(0, 1), (2, 3)])) == 2


@pytest.mark.parametrize("bad", [[(1, 0)], [(0, 2), (1, 3)], [(2, 3), (0, 1)], [(0, 1, 2)]])
def test_rejects_malformed_intervals(bad):
    with pytest.raises(ValueError):
        DisjointIntervalSet(bad)


def test_touching_intervals_are_allowed():
    s = DisjointIntervalSet([(0, 1), (1, 2)])
    assert len(s) == 2 and s.measure() == 2


@given(interval_sets(), st.floats(0, 100), st.floats(0, 100))
def test_clip_is_idempotent_and_shrinks(s, a, b):
    a, b = min(a, b), max(a, b)
    c = s.clip(a, b)
    assert c.clip(a, b) == c
    assert c.measure() <= s.measure()
    assert all(a <= lo and hi <= b for lo, hi in c)


@given(interval_sets(), interval_sets())
def test_inclusion_exclusion(s, t):
    u, i = s.union(t), s.intersection(t)
    assert u.measure() + i.measure() == pytest.approx(s.measure() + t.measure(), abs=1e-9)
    assert i.measure() <= min(s.measure(), t.measure()) + 1e-12


@given(interval_sets(), interval_sets())
def test_disjointness_is_symmetric(s, t):
    assert s.is_disjoint(t) == t.is_disjoint(s)
    assert s.is_disjoint(t) == (s.intersection(t).measure() == 0)


@given(interval_sets())
def test_self_intersection_and_union(s):
    assert s.intersection(s) == s
    assert s.union(s).measure() == pytest.approx(s.measure())


@given(interval_sets(), st.lists(st.floats(0, 100), max_size=10))
def test_split_keeps_measure_and_points(s, pts):
    t = s.split_at(pts)
    assert t.measure() == pytest.approx(s.measure(), abs=1e-12)
    probe = np.linspace(0, 100, 301)
    assert np.array_equal(s.contains(probe), t.contains(probe))


# -- G1, G2 --------------------------------------------------------------------------


@given(st.floats(1e-3, math.pi / 2, exclude_max=True))
def test_g1_and_g2_are_disjoint(x):
    g1, g2 = build_sets(WindowSpec(3e5, 200.0), x)
    assert g1.is_disjoint(g2)


def test_half_pi_sets_tile_the_window():
    g1, g2 = build_sets(W, math.pi / 2)
    assert abs(g1.measure() + g2.measure() - W.H) <= 1e-9
    assert g1.union(g2).measure() == pytest.approx(W.H, abs=1e-9)


@pytest.mark.parametrize("x", [math.pi / 8, math.pi / 4, math.pi / 2])
def test_measure_law(x):
    g1, g2 = build_sets(W, x)
    assert abs(g1.measure() - x * W.H / math.pi) <= 5 * x
    assert abs(g2.measure() - x * W.H / math.pi) <= 5 * x


def test_g1_half_pi_is_half_the_window():
    g1, _ = build_sets(W, math.pi / 2)
    assert g1.measure() == pytest.approx(W.H / 2, rel=0.02)


def test_sets_stay_inside_the_window():
    g1, g2 = build_sets(W, 1.0, 0.5)
    for s in (g1, g2):
        assert s.lo[0] >= W.T and s.hi[-1] <= W.T + W.H


@pytest.mark.parametrize("x", [0.0, -0.1, math.pi / 2 + 1e-6, math.nan])
def test_build_sets_rejects_bad_half_width(x):
    with pytest.raises(DomainError):
        build_sets(W, x)


def test_centres_are_even_and_odd_nu_points():
    g1, g2 = build_sets(W, 0.3)
    even = [p.t for p in enumerate_window(WindowSpec(W.T, W.H, "even"))]
    odd = [p.t for p in enumerate_window(WindowSpec(W.T, W.H, "odd"))]
    assert np.all(g1.contains(even)) and not np.any(g1.contains(odd))
    assert np.all(g2.contains(odd)) and not np.any(g2.contains(even))


# -- sign partition ----------------------------------------------------------------


def test_interval_without_sign_change():
    z1, z2, z3 = frozen.ZEROS_NEAR_1E4
    p = sign_partition(DisjointIntervalSet([(z1 + 0.1, z2 - 0.1)]))
    assert p.zeros.size == 0
    assert len(p.plus) + len(p.minus) == 1


def test_single_zero_located():
    p = sign_partition(DisjointIntervalSet([(9998.5, 9999.5)]))
    assert p.zeros.size == 1
    # the Riemann-Siegel remainder near 1e4, divided by |Z'| at the zero
    assert abs(p.zeros[0] - frozen.ZEROS_NEAR_1E4[1]) <= 1e-6
    assert len(p.plus) == len(p.minus) == 1


@pytest.mark.parametrize("density", [32, 16, 8])
def test_lehmer_pair_is_resolved(density):
    a, b = frozen.LEHMER_PAIR
    p = sign_partition(DisjointIntervalSet([(a - 0.5, b + 0.5)]), samples_per_gap=density)
    assert p.zeros.size == 2
    assert np.allclose(p.zeros, [a, b], atol=1e-5)
    assert p.zeros[1] - p.zeros[0] == pytest.approx(b - a, abs=1e-5)


@pytest.fixture(scope="module")
def window_partition():
    s = DisjointIntervalSet([(W.T, W.T + W.H)])
    return s, sign_partition(s)


def test_partition_conserves_measure(window_partition):
    s, p = window_partition
    assert p.plus.measure() + p.minus.measure() == pytest.approx(s.measure(), rel=1e-6)
    assert p.plus.is_disjoint(p.minus)


def test_partition_signs_at_midpoints(window_partition):
    _, p = window_partition
    assert np.all(rs_z_array(0.5 * (p.plus.lo + p.plus.hi)) > 0)
    assert np.all(rs_z_array(0.5 * (p.minus.lo + p.minus.hi)) < 0)


def test_zeros_change_sign(window_partition):
    _, p = window_partition
    z = p.zeros
    left, right = rs_z_array(z - 1e-8), rs_z_array(z + 1e-8)
    assert np.all(left * right < 0)
    # |Z| at a zero is no more than the bisection width times |Z'|
    assert np.all(np.abs(rs_z_array(z)) <= 1e-9 * 50)


def test_zero_count_matches_nu_point_count(window_partition):
    _, p = window_partition
    n_nu = len(enumerate_window(W, 0.0))
    assert abs(p.zeros.size - n_nu) <= 5


def test_zero_count_stable_under_fourfold_sampling(window_partition):
    s, p = window_partition
    fine = sign_partition(s, samples_per_gap=128)
    assert fine.zeros.size == p.zeros.size


def test_doubling_density_barely_moves_zeros():
    s = DisjointIntervalSet([(W.T, W.T + 60.0)])
    a = sign_partition(s).zeros
    b = sign_partition(s, samples_per_gap=64).zeros
    assert a.size == b.size
    assert np.max(np.abs(a - b)) < 1e-8


def test_empty_partition():
    p = sign_partition(DisjointIntervalSet())
    assert p.plus.is_empty() and p.minus.is_empty() and p.zeros.size == 0
