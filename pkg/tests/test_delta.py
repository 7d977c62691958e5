import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trialmap import EvaluationError, InputError, compute_delta_map, export_delta_map, summarize_wtl
from trialmap.cpmap import CPMap, GridSpec
from trialmap.delta import DeltaMap


def cp(values, **kw):
    return CPMap(np.array(values, dtype=float), **kw)


def test_rcr_spot_values():
    d = compute_delta_map(cp([[0.10, 0.04], [0.2, 0.2]]), cp([[0.05, 0.06], [0.2, 0.1]]))
    assert d.cell(1, 1) == 0.5
    assert d.cell(2, 1) == pytest.approx(-0.5, abs=1e-15)
    assert d.cell(1, 2) == 0.0
    assert f"{d.cell(1, 1):.6f}" == "0.500000"


def test_self_comparison_all_zero():
    m = cp([[0.1, np.nan], [0.3, 0.0]])
    d = compute_delta_map(m, m)
    defined = d.grid[~np.isnan(d.grid)]
    assert (defined == 0).all() and defined.size == 2
    assert summarize_wtl(d).tie == 1.0


def test_undefined_rules():
    ref = cp([[np.nan, 0.0], [0.2, 0.2]])
    test = cp([[0.1, 0.1], [np.nan, 0.1]])
    d = compute_delta_map(ref, test)
    assert math.isnan(d.cell(1, 1))
    assert math.isnan(d.cell(2, 1))
    assert math.isnan(d.cell(1, 2))
    assert d.cell(2, 2) == 0.5
    assert d.zero_ref_cells == 1


def test_wtl_by_hand():
    d = DeltaMap(np.array([[0.2, -0.3], [0.0, 5e-6]]), epsilon=1e-5)
    s = summarize_wtl(d)
    assert (s.win, s.tie, s.lose, s.defined_cells) == (0.25, 0.5, 0.25, 4)
    assert s.line() == "win=0.250000 tie=0.500000 lose=0.250000 defined=4"


def test_wtl_band_edges():
    eps = 1e-5
    d = DeltaMap(np.array([[eps, -eps], [eps / 2, np.nan]]), epsilon=eps)
    s = summarize_wtl(d)
    assert (s.win, s.tie, s.lose, s.defined_cells) == (1 / 3, 1 / 3, 1 / 3, 3)


def test_wtl_all_zero():
    s = summarize_wtl(DeltaMap(np.zeros((3, 3))))
    assert (s.win, s.tie, s.lose) == (0.0, 1.0, 0.0)


def test_wtl_needs_defined_cells():
    with pytest.raises(EvaluationError):
        summarize_wtl(DeltaMap(np.full((2, 2), np.nan)))


def test_epsilon_must_be_positive():
    with pytest.raises(InputError):
        DeltaMap(np.zeros((2, 2)), epsilon=0.0)


def test_mismatched_maps():
    with pytest.raises(InputError, match="shapes"):
        compute_delta_map(cp(np.zeros((2, 2))), cp(np.zeros((3, 3))))
    with pytest.raises(InputError, match="metric"):
        compute_delta_map(cp(np.zeros((2, 2)), metric_kind="eer"), cp(np.zeros((2, 2)), metric_kind="min_dcf"))
    with pytest.raises(InputError, match="ordering"):
        compute_delta_map(cp(np.zeros((2, 2)), ordering="a"), cp(np.zeros((2, 2)), ordering="b"))
    with pytest.raises(InputError, match="grid specs"):
        compute_delta_map(
            cp(np.zeros((2, 2)), grid_spec=GridSpec(2, 1)), cp(np.zeros((2, 2)), grid_spec=GridSpec(2, 5))
        )


def test_export_layout():
    d = DeltaMap(np.array([[0.5, np.nan], [-0.25, 0.0]]))
    assert export_delta_map(d) == "x_frac,0.500000,1.000000\n1.000000,-0.250000,0.000000\n0.500000,0.500000,NA\n"


cell = st.one_of(st.none(), st.just(0.0), st.floats(1e-3, 1.0))


@st.composite
def map_pairs(draw):
    m = draw(st.integers(2, 5))
    a = draw(st.lists(cell, min_size=m * m, max_size=m * m))
    # test cells are either equal to ref or clearly away from the tie band
    factors = draw(st.lists(st.sampled_from([1.0, 0.5, 0.9, 1.1, 2.0]), min_size=m * m, max_size=m * m))
    b = [None if x is None else x * f for x, f in zip(a, factors)]
    to_grid = lambda v: np.array([np.nan if x is None else x for x in v]).reshape(m, m)
    return to_grid(a), to_grid(b)


@given(map_pairs())
def test_swap_antisymmetry(pair):
    a, b = pair
    ab = compute_delta_map(cp(a), cp(b))
    ba = compute_delta_map(cp(b), cp(a))
    both = ~np.isnan(ab.grid) & ~np.isnan(ba.grid)
    if not both.any():
        return
    x, y = ab.grid[both], ba.grid[both]
    eps = 1e-5
    assert np.count_nonzero(x >= eps) == np.count_nonzero(y <= -eps)
    assert np.count_nonzero(x <= -eps) == np.count_nonzero(y >= eps)
    assert np.count_nonzero(np.abs(x) < eps) == np.count_nonzero(np.abs(y) < eps)


@given(map_pairs(), st.floats(0.01, 100))
def test_rcr_scale_invariance(pair, c):
    a, b = pair
    d1 = compute_delta_map(cp(a), cp(b))
    d2 = compute_delta_map(cp(a * c), cp(b * c))
    assert np.array_equal(np.isnan(d1.grid), np.isnan(d2.grid))
    mask = ~np.isnan(d1.grid)
    assert np.allclose(d1.grid[mask], d2.grid[mask], rtol=0, atol=1e-12)


@given(map_pairs())
def test_wtl_sums_to_one(pair):
    d = compute_delta_map(cp(pair[0]), cp(pair[1]))
    if np.isnan(d.grid).all():
        return
    s = summarize_wtl(d)
    assert abs(s.win + s.tie + s.lose - 1.0) <= 1e-12
    assert min(s.win, s.tie, s.lose) >= 0
