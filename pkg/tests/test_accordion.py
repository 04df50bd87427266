import pytest

from taylorlam.accordion import (
    CHECKPOINTS, HEAD_REDEX_ROWS, a_star_cut, approximant_offset, approximant_path,
    case_start, checkpoint_patterns, cycle_rows, depth_restricted_negative_search,
    head_cycle_trace, layer_rigidity, positive_control, taylor_layers,
    technique1_search, technique2_search,
)
from taylorlam.beta import head_reduce
from taylorlam.kit import APP_TT, a_star_d, accordion, accordion_star, p_second, succ_n
from taylorlam.resource import normalize_term, resource_reducts
from taylorlam.semiring import BOOL
from taylorlam.syntax import BOTTOM, app, cut_below, truncate
from taylorlam.taylor import taylor_truncated


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_cycle_completes_with_checkpoints_in_order(n):
    r = head_cycle_trace(n, 500)
    assert r.status == "ok"
    assert r.checkpoints_in_order()
    assert r.trace.end == app(p_second(), succ_n(n + 1))
    assert len(r.trace) == 12 + 9 * n


@pytest.mark.parametrize("n", [0, 1, 2])
def test_every_row_is_visited_in_order(n):
    r = head_cycle_trace(n, 500)
    assert [(row, j) for row, j, _ in r.row_hits] == [(row, j) for row, j, _ in cycle_rows(n)]
    steps = [k for _, _, k in r.row_hits]
    assert steps == sorted(steps)


def test_first_checkpoints_at_index_zero():
    r = head_cycle_trace(0, 500)
    assert [row for row, _, _ in r.hits] == [2, 3, 13, 21, 23, 24]
    assert [row for row, _, _ in checkpoint_patterns(1)] == list(CHECKPOINTS)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_head_redex_inventory(n):
    """Exactly four reducts along the cycle are a bare (λb.M)N."""
    r = head_cycle_trace(n, 500)
    rows = [row for row, _, k in r.row_hits if k in r.head_redex_states]
    assert rows == list(HEAD_REDEX_ROWS)
    assert len(r.head_redex_states) == 4


def test_cycle_runs_out_of_fuel_cleanly():
    r = head_cycle_trace(1, 5)
    assert r.status == "exhausted" and len(r.trace) == 5


def test_accordion_reaches_the_cycle():
    tr = head_reduce(accordion(), 1)
    assert tr.end == app(p_second(), succ_n(0))


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_approximant_path(d):
    r = approximant_path(d)
    assert r.status == "ok"
    assert r.trace.end == a_star_d(d)
    assert r.trace.is_valid()
    assert len(r.marks) == d + 1
    assert r.depth0_between == [True] * d
    assert r.offset == d
    assert cut_below(r.trace.end, d) == truncate(accordion_star(), d)
    assert cut_below(r.trace.end, d + 1) != truncate(accordion_star(), d + 1)


def test_offset_of_a_star_truncation():
    assert approximant_offset(truncate(accordion_star(), 5), limit=5) == 5


@pytest.mark.parametrize("case", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [0, 1])
def test_case_searches_standard(case, n):
    r = depth_restricted_negative_search(case, n, budget=10)
    assert r.found is None and r.complete
    assert r.status == "no counterexample within budget"


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("n", [0, 1])
def test_technique1(k, n):
    r = technique1_search(k, n, budget=10)
    assert r.status == "no counterexample within budget"


@pytest.mark.parametrize("n", [0, 1, 2])
def test_technique2_base_case(n):
    assert technique2_search(0, n, budget=10).found is None


def test_technique2_rejects_bad_k():
    with pytest.raises(ValueError):
        technique2_search(3, 1)
    with pytest.raises(ValueError):
        case_start(5, 0)


def test_breadth_first_cross_check():
    """Plain breadth-first search at a small budget agrees with the
    standard-reduction search."""
    for r in (technique1_search(0, 0, 4, mode="breadth-first"),
              depth_restricted_negative_search(2, 0, 4, mode="breadth-first")):
        assert r.found is None and r.complete


def test_positive_control():
    for mode in ("breadth-first", "standard"):
        r = positive_control(mode=mode)
        assert r.found is not None and r.status == "found"
        assert r.found.is_valid()
        assert r.found.end.fun == APP_TT


def test_report_json():
    js = technique1_search(0, 0, 3).to_json()
    assert js["status"] == "no counterexample within budget"
    assert js["trace"] is None and js["budget"] == 3


def test_layers():
    assert a_star_cut(0) == app(APP_TT, BOTTOM)
    full, layer = taylor_layers(0, 12)
    assert full == layer and layer
    full1, layer1 = taylor_layers(1, 12)
    assert layer1.support() == full1.support() - full.support()


def test_layer_elements_keep_their_depth_under_reduction():
    rows = layer_rigidity(3, 14)
    assert len(rows) == 6
    assert all(ok for *_, ok in rows)


def test_layer_normal_forms_vanish():
    # every approximant ends in an applicator fed the empty bag
    for d in range(3):
        _, layer = taylor_layers(d, 14)
        assert all(not normalize_term(t) for t in layer.support())


def test_layer_reducts_are_not_just_the_start():
    _, layer1 = taylor_layers(1, 14)
    assert sum(len(resource_reducts(t)) for t in layer1.support()) > len(layer1)


def test_layers_boolean():
    assert all(ok for *_, ok in layer_rigidity(2, 12, BOOL))
    assert taylor_truncated(a_star_cut(1), 10, BOOL).sum.support() == \
        taylor_truncated(a_star_cut(1), 10).sum.support()
