from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taylorlam.resource import (
    EMPTY, Bag, NotAResourceRedex, RFree, RSum, ResourceParseError, bag,
    contract_r, enumerate_rredexes, metrics, msubst, msubst_literal,
    normalize_sum, normalize_term, occurrences, parse_resource, parse_rterm,
    print_rterm, rapp, rdepth, resource_step, restrict_below_depth, rlam,
    rsize, sum_step,
)
from taylorlam.semiring import BOOL, RAT

from conftest import resource_terms

R = parse_rterm


def test_parse_print():
    for text in [r"\x.(x)[y,y]", "(x)1", r"(\x.x)[y]", "(f)[x,(g)1]"]:
        assert print_rterm(R(text)) == text
    assert parse_resource("1") == EMPTY
    assert parse_resource("[x,y]") == bag(RFree("x"), RFree("y"))
    with pytest.raises(ResourceParseError):
        R("(x)[y")


def test_bags_are_multisets():
    assert R("(f)[x,y]") == R("(f)[y,x]")
    assert R("(f)[x,x]") != R("(f)[x]")
    assert bag(RFree("x"), RFree("y")).counts() == bag(RFree("y"), RFree("x")).counts()


def test_metrics():
    assert metrics(R("x")) == (1, 0)
    assert metrics(R("(x)[y]")) == (3, 1)
    # the bag is not a node, the empty bag has depth 0
    assert metrics(R("(x)1")) == (2, 1)
    assert rdepth(R("(x)[(y)[z]]")) == 2


def test_multilinear_substitution_examples():
    a, b = RFree("a"), RFree("b")
    s = msubst(R("(x)[x]"), "x", bag(a, b))
    assert s == RSum.from_pairs([(R("(a)[b]"), Fraction(1)), (R("(b)[a]"), Fraction(1))])
    # equal bag elements collapse into one addend with weight 2!
    s = msubst(R("(x)[x]"), "x", bag(a, a))
    assert s == RSum.single(R("(a)[a]"), Fraction(2))
    # arity mismatch gives the empty sum
    assert not msubst(R("(x)[x]"), "x", bag(a))
    assert not msubst(R("(x)[x]"), "x", bag(a, a, a))


def test_reduction_examples():
    assert normalize_term(R(r"(\x.(x)[x])[y,y]")) == RSum.single(R("(y)[y]"), Fraction(2))
    assert not normalize_term(R(r"(\x.(x)[x])[\x.(x)[x]]"))
    assert not resource_step(R(r"(\x.x)[y,y]"), ())
    assert contract_r(R(r"(\x.x)[y]")) == RSum.single(R("y"))
    with pytest.raises(NotAResourceRedex):
        resource_step(R("(x)[y]"), ())


def test_redex_positions_name_bag_elements():
    t = R(r"(f)[(\x.x)[y],(\x.x)[z]]")
    ps = enumerate_rredexes(t)
    assert len(ps) == 2 and all(p[0].startswith("A") for p in ps)
    out = RSum.zero()
    for p in ps:
        out = out + resource_step(t, p)
    assert out.support() == {R(r"(f)[y,(\x.x)[z]]"), R(r"(f)[(\x.x)[y],z]")}


def test_sum_printing_and_zero():
    assert str(RSum.zero()) == "0"
    s = RSum.from_pairs([(R("x"), Fraction(1, 2)), (R("y"), Fraction(1))])
    assert str(s) == "1/2*x + 1*y"
    assert not (s + s.scale(Fraction(-1)))


def test_restriction_below_depth():
    s = RSum.from_pairs([(R("x"), 1), (R("(x)1"), 1), (R("(x)[(y)1]"), 1)])
    assert not restrict_below_depth(s, 0)
    assert restrict_below_depth(s, 1).support() == {R("x")}
    assert restrict_below_depth(s, 2).support() == {R("x"), R("(x)1")}


def test_sum_step_keeps_other_addends():
    s = RSum.from_pairs([(R(r"(\x.x)[y]"), Fraction(3)), (R("z"), Fraction(1))])
    out = sum_step(s, R(r"(\x.x)[y]"), ())
    assert out == RSum.from_pairs([(R("y"), Fraction(3)), (R("z"), Fraction(1))])


@given(resource_terms(10))
def test_print_parse_roundtrip(t):
    assert parse_rterm(print_rterm(t)) == t


@given(resource_terms(10))
def test_every_step_shrinks(t):
    for p in enumerate_rredexes(t):
        for u in resource_step(t, p).support():
            assert rsize(u) < rsize(t)


@settings(max_examples=200)
@given(resource_terms(11))
def test_strategies_agree(t):
    assert normalize_term(t, "lo") == normalize_term(t, "li")


@given(resource_terms(10))
def test_normal_forms_are_normal(t):
    for u in normalize_term(t).support():
        assert not enumerate_rredexes(u)


@given(resource_terms(10))
def test_boolean_support_matches_rational_support(t):
    assert normalize_term(t, sr=BOOL).support() == normalize_term(t, sr=RAT).support()


@given(resource_terms(9))
def test_normalizing_one_step_reduct_is_invariant(t):
    nf = normalize_term(t)
    for p in enumerate_rredexes(t):
        assert normalize_sum(resource_step(t, p)) == nf


@st.composite
def body_and_bag(draw):
    u = draw(resource_terms(7, free=("x", "y")))
    body = rlam("x", u).body
    n = occurrences(body)
    elems = draw(st.lists(resource_terms(3, free=("a", "b")), min_size=n, max_size=n))
    return u, body, Bag(elems)


@settings(max_examples=200)
@given(body_and_bag())
def test_msubst_matches_literal_oracle(case):
    u, body, b = case
    s = msubst(u, "x", b)
    assert s == msubst_literal(body, b)
    if len(b) <= 5:
        assert s.mass() == factorial(len(b))


@given(body_and_bag(), resource_terms(2, free=("a",)))
def test_msubst_mismatch_is_zero(case, extra):
    u, _, b = case
    assert not msubst(u, "x", Bag(list(b) + [extra]))


def test_bag_union_and_size():
    b = bag(RFree("x"), RFree("y"))
    assert rsize(b) == 2
    assert rsize(rapp(RFree("f"), RFree("x"), RFree("y"))) == 4
