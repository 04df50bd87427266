import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taylorlam.beta import (
    HNF, HeadRedex, NotARedex, Trace, beta_step, enumerate_redexes, head_form,
    head_internal_split, head_redex_position, head_reduce, normalize,
    reachable, reassemble, reduce_with, redex_info, replay, search,
    standard_search, trace_from_json, validate_min_depth,
)
from taylorlam.kit import OMEGA, Y
from taylorlam.syntax import Hole, app, match, parse_term, print_term, size, var

from conftest import lam_terms

P = parse_term


def test_root_step():
    assert beta_step(P(r"(\x.x)y"), ()) == var("y")
    assert beta_step(P(r"(\x.(x)x)\y.y"), ()) == P(r"(\y.y)\y.y")


def test_step_substitutes_without_capture():
    assert beta_step(P(r"(\x.\y.(x)y)y"), ()) == P(r"\z.(y)z")


def test_not_a_redex():
    with pytest.raises(NotARedex):
        beta_step(P("(x)y"), ())
    with pytest.raises(NotARedex):
        redex_info(P(r"(\x.x)y"), ("A",))


def test_redex_depths_and_kinds():
    t = P(r"(\x.x)(\y.y)z")
    infos = {r.position: r for r in enumerate_redexes(t)}
    assert set(infos) == {(), ("A",)}
    assert infos[()].depth == 0 and infos[()].is_head
    assert infos[("A",)].depth == 1 and not infos[("A",)].is_head
    assert head_redex_position(P(r"\a.((\x.x)y)z")) == ("B", "F")


def test_head_reduce_and_normalize():
    tr = head_reduce(P(r"((\x.\y.x)a)(\z.z)b"), 10)
    assert tr.end == var("a") and len(tr) == 2 and not tr.exhausted
    tr = normalize(P(r"(f)(\x.x)y"), 10)
    assert tr.end == P("(f)y")
    assert [s.redex.depth for s in tr.steps] == [1]


def test_fuel_exhaustion_is_reported():
    tr = normalize(OMEGA, 7)
    assert tr.exhausted and len(tr) == 7 and tr.end == OMEGA


def test_min_depth_strategy():
    t = P(r"(\x.x)(\y.y)z")
    tr = reduce_with(t, "lo", 10, min_depth=1)
    assert tr.end == P(r"(\x.x)z")
    assert validate_min_depth(tr, 1)
    assert not validate_min_depth(normalize(t, 10), 1)


def test_fixpoint_unfolds_at_increasing_depth():
    t = app(Y, var("f"))
    tr = replay(t, [(), (), ("A",), ("A", "A")])
    assert [s.redex.depth for s in tr.steps] == [0, 0, 1, 2]
    pattern = app(var("f"), app(var("f"), app(var("f"), Hole("M"))))
    assert match(pattern, tr.end) is not None


def test_trace_json_roundtrip():
    t = P(r"(\x.(x)x)(\y.y)z")
    tr = normalize(t, 10)
    data = json.loads(tr.dumps())
    assert data[0]["position"] == ""
    assert {"position", "depth", "kind", "term"} <= set(data[0])
    back = trace_from_json(t, data)
    assert back.positions() == tr.positions() and back.end == tr.end
    assert back.is_valid()


def test_invalid_trace_detected():
    t = P(r"(\x.x)y")
    tr = replay(t, [()])
    tr.steps[0] = type(tr.steps[0])(tr.steps[0].redex, var("z"))
    assert not tr.is_valid()


def test_head_form_and_reassemble():
    t = P(r"\a.((\x.x)y)z")
    hf = head_form(t)
    assert isinstance(hf, HeadRedex)
    assert reassemble(hf) == t
    hf2 = head_form(P(r"\a.(a)(b)c"))
    assert isinstance(hf2, HNF)
    assert reassemble(hf2) == P(r"\a.(a)(b)c")


@given(lam_terms(9))
def test_head_form_reassembles(t):
    assert reassemble(head_form(t)) == t


@given(lam_terms(8))
def test_every_enumerated_redex_fires(t):
    for info in enumerate_redexes(t):
        assert redex_info(t, info.position) == info
        beta_step(t, info.position)


@given(lam_terms(8), st.data())
def test_replayed_traces_are_valid(t, data):
    positions = []
    cur = t
    for _ in range(3):
        rs = enumerate_redexes(cur)
        if not rs or size(cur) > 40:
            break
        p = data.draw(st.sampled_from(rs)).position
        positions.append(p)
        cur = beta_step(cur, p)
    tr = replay(t, positions)
    assert tr.is_valid() and tr.end == cur


@given(lam_terms(8))
def test_head_then_internal_split(t):
    tr = head_reduce(t, 5)
    split = head_internal_split(tr)
    assert split is not None
    h, i = split
    assert len(h) == len(tr) and len(i) == 0


def test_search_finds_shortest():
    t = P(r"(\x.(x)x)(\y.y)z")
    rep = search(t, lambda u: u == P("(z)z"), 5)
    assert rep.found is not None and rep.found.end == P("(z)z")
    # firing the argument first saves a step
    assert len(rep.found) == 2
    assert rep.status == "found"


def test_search_respects_state_cap():
    rep = search(app(Y, var("f")), lambda u: False, 50, max_states=30)
    assert rep.found is None and rep.max_states_hit
    assert rep.status == "state-cap-reached"


def test_reachable_distances():
    d = reachable(P(r"(\x.x)(\y.y)z"), 3)
    assert d[P("z")] == 2
    assert d[P(r"(\y.y)z")] == 1


@settings(max_examples=60)
@given(lam_terms(8), st.integers(0, 3))
def test_standard_search_agrees_with_breadth_first(t, budget):
    """Standard sequences are complete for reachability: a target reachable
    within b steps is reachable by a standard sequence, possibly longer.
    Conversely whatever standard search finds is a genuine reduct."""
    reach = reachable(t, budget, max_states=3000)
    for target in list(reach)[:6]:
        rep = standard_search(t, target, budget + 4)
        if rep.found is not None:
            assert rep.found.is_valid() and rep.found.end == target
    for target in list(reach)[:3]:
        rep = standard_search(t, target, 30)
        assert rep.found is not None


@settings(max_examples=60)
@given(lam_terms(8), st.integers(0, 3))
def test_standard_search_hits_are_reachable(t, budget):
    pattern = Hole("M")
    rep = standard_search(t, app(var("x"), pattern), budget)
    if rep.found is not None:
        assert rep.found.is_valid()
        assert match(app(var("x"), pattern), rep.found.end) is not None
        assert len(rep.found) <= budget


def test_standard_search_internal_only_skips_root_head_steps():
    t = P(r"(\x.(f)x)(\y.y)z")
    target = P("(f)z")
    assert standard_search(t, target, 4).found is not None
    assert standard_search(t, target, 4, internal_only=True).found is None
    internal = standard_search(t, P(r"(\x.(f)x)z"), 4, internal_only=True)
    assert internal.found is not None
    assert all(not s.redex.is_head for s in internal.found.steps)


def test_trace_extend():
    t = P(r"(\x.x)(\y.y)z")
    a = replay(t, [()])
    b = replay(a.end, [()])
    assert a.extend(b).end == P("z")
    with pytest.raises(ValueError):
        b.extend(a)
    assert print_term(Trace(t).end) == print_term(t)
