import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from taylorlam.acceptance import corrupted_coefficients
from taylorlam.beta import replay
from taylorlam.conservativity import (
    MalformedEvidence, certified_size, commutation_check, evidence_from_trace,
    extract_reduction, mashup_check, verify_stratified,
)
from taylorlam.gen import random_beta_trace
from taylorlam.kit import OMEGA, Y
from taylorlam.resource import parse_rterm
from taylorlam.syntax import app, parse_system, parse_term, var
from taylorlam.taylor import canonical_approximant, taylor_truncated

from conftest import lam_terms

P, R = parse_term, parse_rterm


def test_mashup_needs_fuel_for_reduction():
    m = P(r"(\x.x)y")
    assert mashup_check(m, R("y"), 0) is None
    d = mashup_check(m, R("y"), 1)
    assert d is not None and d.is_valid() and d.rule == "var"


def test_mashup_through_bags():
    m = P(r"(f)(\x.x)y")
    d = mashup_check(m, R("(f)[y,y]"), 1)
    assert d is not None and d.is_valid()
    assert mashup_check(m, R("(f)[z]"), 3) is None


@settings(max_examples=60)
@given(lam_terms(6))
def test_mashup_is_reflexive(m):
    for s in taylor_truncated(m, 8).sum.support():
        d = mashup_check(m, s, 0)
        assert d is not None and d.is_valid()


def test_extract_examples():
    tr = extract_reduction(P(r"(\x.(x)x)y"), P("(y)y"), 8)
    assert tr is not None and tr.end == P("(y)y") and tr.is_valid()
    assert extract_reduction(OMEGA, var("y"), 4) is None


def test_extract_follows_nested_reductions():
    m = P(r"\z.(f)((\x.x)z)(\y.y)z")
    n = P(r"\z.(f)(z)z")
    tr = extract_reduction(m, n, 8)
    assert tr is not None and tr.end == n
    assert len(tr) == 2


def test_extract_longer_random_traces():
    rng = random.Random(7)
    lengths = set()
    for _ in range(40):
        tr = random_beta_trace(rng, 11, 4, tries=300)
        lengths.add(len(tr))
        got = extract_reduction(tr.start, tr.end, 8)
        assert got is not None and got.is_valid() and got.end == tr.end
    assert max(lengths) >= 3


def test_certified_size():
    assert certified_size([], 5) == 5
    assert certified_size([0], 6) == 2
    assert certified_size([0, 0], 6) == 0
    assert certified_size([1], 3) == 0
    assert certified_size([1], 4) == 1


def test_commutation_at_small_bound_certifies_nothing():
    r = commutation_check(P(r"(\x.(x)x)\y.y"), 6, 10)
    assert r.status == "ok" and r.certified == []
    assert r.agree and r.stable


def test_commutation_example():
    r = commutation_check(P(r"(\x.(x)x)\y.y"), 14, 10)
    assert r.normal_form == P(r"\y.y")
    assert r.certified == [(R(r"\y.y"), Fraction(1))]
    assert r.agree and r.stable
    js = r.to_json()
    assert js["certified"] == [{"term": r"\y.y", "coeff": "1"}]


def test_commutation_detects_corruption():
    with corrupted_coefficients():
        r = commutation_check(P(r"(\x.(x)x)\y.y"), 14, 10)
    assert not r.agree
    assert commutation_check(P(r"(\x.(x)x)\y.y"), 14, 10).agree


def test_commutation_reports_exhaustion():
    r = commutation_check(OMEGA, 8, 5)
    assert r.status == "exhausted"


@settings(max_examples=40)
@given(lam_terms(6))
def test_commutation_on_random_normalizing_terms(m):
    r = commutation_check(m, 10, 30)
    if r.status == "ok":
        assert r.agree and r.stable


def _fixpoint_evidence(target="X = (f)X", stages=((), ()), more=(("A",), ("A", "A"))):
    positions = [list(stages)] + [[p] for p in more]
    return evidence_from_trace(positions, app(Y, var("f")), parse_system(target), 10)


def test_stratified_evidence_for_fixpoint():
    e = _fixpoint_evidence()
    v = verify_stratified(e)
    assert v.ok and v.verified_to_stage == 3


def test_stratified_evidence_wrong_target():
    v = verify_stratified(_fixpoint_evidence("X = (g)X"))
    assert not v.ok
    assert any("target" in f for f in v.failures)


def test_stratified_evidence_depth_violation():
    e = _fixpoint_evidence()
    e.stages[0], e.stages[1] = e.stages[1], e.stages[0]
    v = verify_stratified(e)
    assert not v.ok
    assert any("depth 0 < 1" in f for f in v.failures)


def test_malformed_evidence_raises():
    e = _fixpoint_evidence()
    e.stages[0].witnesses.pop()
    with pytest.raises(MalformedEvidence):
        verify_stratified(e)
    e = _fixpoint_evidence()
    w = e.stages[1].witnesses[0]
    w.mapping.pop(next(iter(w.mapping)))
    with pytest.raises(MalformedEvidence):
        verify_stratified(e)


def test_canonical_approximant_of_extract_target():
    n = P(r"(y)y")
    assert canonical_approximant(n) == R("(y)[y]")
    assert replay(P(r"(\x.(x)x)y"), [()]).end == n
