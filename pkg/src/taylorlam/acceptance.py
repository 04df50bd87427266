"""The release gate: ten checks covering the resource calculus, the Taylor
expansion, conservativity and the Accordion experiments.

Each check returns a :class:`CriterionResult`. ``run_all`` drives them for the
``selftest`` command and the test suite. Randomized checks draw from a
``random.Random`` seeded by the caller, so results are reproducible.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterator, Optional

from . import conservativity
from .accordion import (
    approximant_path, head_cycle_trace, layer_rigidity, positive_control,
    technique1_search, technique2_search,
)
from .beta import enumerate_redexes
from .conservativity import commutation_check, extract_reduction
from .gen import (
    all_resource_terms, random_beta_trace, random_redex_term, random_term, resource_terms,
)
from .kit import a_star_d, accordion_star
from .resource import (
    Bag, RAbs, RApp, RFree, RSum, clear_memo, msubst, msubst_literal, normalize_term,
    parse_rterm, print_rterm, rlam, rsize,
)
from .semiring import RAT, Semiring
from .syntax import cut_below, parse_term, truncate
from .taylor import (
    simulation_agrees, self_coherent, taylor_by_promotion, taylor_coeff,
    taylor_truncated,
)

DEFAULT_SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: Optional[bool]             # None when skipped
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.passed is None:
            return "skipped"
        return "pass" if self.passed else "FAIL"

    def line(self) -> str:
        return f"[{self.status:>7}] {self.number:2d}. {self.title}: {self.detail} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        # no timings here: JSON output must not change between runs
        return {"number": self.number, "title": self.title, "status": self.status,
                "detail": self.detail}


# ---------------------------------------------------------------------------
# 1. confluence of resource normalization

def confluence(sr: Semiring = RAT, max_size: int = 8) -> CriterionResult:
    clear_memo()
    checked = mismatches = 0
    first_bad = None
    for t in all_resource_terms(max_size):
        a = normalize_term(t, "lo", sr)
        b = normalize_term(t, "li", sr)
        checked += 1
        if a != b:
            mismatches += 1
            first_bad = first_bad or t
    detail = f"{checked} terms of size <= {max_size}, {mismatches} mismatches"
    return CriterionResult(1, "lo/li normal forms agree", mismatches == 0, detail,
                           data={"first_mismatch": None if first_bad is None else print_rterm(first_bad)})


# ---------------------------------------------------------------------------
# 2. multilinear substitution mass

def _bag_of(rng: random.Random, n: int) -> Bag:
    pool = [t for k in (1, 2, 3) for t in resource_terms(k, 0, ("y", "z"))]
    return Bag(rng.choice(pool) for _ in range(n))


def substitution_mass(sr: Semiring = RAT, seed: int = DEFAULT_SEED,
                      max_size: int = 5, max_occ: int = 4) -> CriterionResult:
    rng = random.Random(seed)
    x = RFree("x")
    checked = failures = 0
    for u in all_resource_terms(max_size):
        n = _count(u, x)
        if n > max_occ:
            continue
        b = _bag_of(rng, n)
        s = msubst(u, "x", b, sr)
        lit = msubst_literal(rlam("x", u).body, b, sr)
        ok = s.mass() == factorial(n) and s == lit
        for m in (n - 1, n + 1):
            if m >= 0:
                ok = ok and not msubst(u, "x", _bag_of(rng, m), sr)
        checked += 1
        failures += not ok
    detail = f"{checked} terms, mass n! and literal oracle; {failures} failures"
    return CriterionResult(2, "multilinear substitution mass", failures == 0, detail)


def _count(u, x) -> int:
    if u == x:
        return 1
    if type(u) is RAbs:
        return _count(u.body, x)
    if type(u) is RApp:
        return _count(u.head, x) + sum(_count(e, x) for e in u.bag)
    return 0


# ---------------------------------------------------------------------------
# 3. Taylor coefficients

def taylor_coefficients(sr: Semiring = RAT, seed: int = DEFAULT_SEED,
                        terms: int = 50, pairs: int = 100, size_bound: int = 8
                        ) -> CriterionResult:
    rng = random.Random(seed)
    problems = []
    m0 = parse_term("(x)y")
    c = taylor_coeff(m0, parse_rterm("(x)[y,y]"), sr)
    if c != sr.inv_int(2):
        problems.append(f"(x)[y,y] under (x)y has coefficient {c}")
    elements = 0
    sample = [random_term(rng, 6) for _ in range(terms)]
    for m in sample:
        T = taylor_truncated(m, size_bound, sr).sum
        oracle = taylor_by_promotion(m, size_bound, sr)
        if T != oracle:
            problems.append(f"support or coefficients differ for {m}")
        for s, cs in T.items():
            elements += 1
            if taylor_coeff(m, s, sr) != cs or oracle.coeff(s) != cs:
                problems.append(f"coefficient of {s} in {m}")
    for _ in range(pairs):
        m, m2 = rng.choice(sample), rng.choice(sample)
        T = taylor_truncated(m, size_bound, sr).sum
        for s in taylor_truncated(m2, size_bound, sr).sum.terms:
            if taylor_coeff(m, s, sr) != T.coeff(s):
                problems.append(f"cross pair coefficient of {s}")
    detail = f"{terms} terms, {elements} support elements, {pairs} cross pairs; {len(problems)} problems"
    return CriterionResult(3, "Taylor coefficients", not problems, detail)


# ---------------------------------------------------------------------------
# 4. uniform simulation of beta steps

def uniform_simulation(sr: Semiring = RAT, seed: int = DEFAULT_SEED,
                       cases: int = 100, size_bound: int = 10) -> CriterionResult:
    rng = random.Random(seed)
    failures = nonempty = 0
    for _ in range(cases):
        m = random_redex_term(rng, 6)
        p = rng.choice(enumerate_redexes(m)).position
        T = taylor_truncated(m, size_bound, sr)
        agree, region, w = simulation_agrees(m, p, size_bound, sr)
        functional = set(w.mapping) == T.sum.support() and all(
            isinstance(v, RSum) for v in w.mapping.values())
        ok = agree and functional and self_coherent(T.sum)
        failures += not ok
        nonempty += region > 0
    detail = f"{cases} (term, redex) pairs, {nonempty} with nonempty certified region; {failures} failures"
    return CriterionResult(4, "uniform simulation", failures == 0, detail)


# ---------------------------------------------------------------------------
# 5. finite conservativity

def finite_conservativity(seed: int = DEFAULT_SEED, cases: int = 100, fuel: int = 8,
                          max_size: int = 6, max_len: int = 4) -> CriterionResult:
    rng = random.Random(seed)
    ok = 0
    lengths: dict[int, int] = {}
    for _ in range(cases):
        tr = random_beta_trace(rng, max_size, max_len, tries=200)
        lengths[len(tr)] = lengths.get(len(tr), 0) + 1
        got = extract_reduction(tr.start, tr.end, fuel)
        if got is not None and got.is_valid() and got.start == tr.start and got.end == tr.end:
            ok += 1
    hist = ", ".join(f"{n} of length {k}" for k, n in sorted(lengths.items()))
    detail = f"{ok}/{cases} traces recovered with fuel {fuel} ({hist})"
    return CriterionResult(5, "reduction extraction", ok == cases, detail)


# ---------------------------------------------------------------------------
# 6. commutation desk-check

# Each entry pairs a normalizing term with a size bound large enough for the
# worst-case preimage bounds to certify at least one approximant.
COMMUTATION_CORPUS: tuple[tuple[str, int], ...] = (
    (r"(\x.x)y", 8),
    (r"(\x.(x)x)\y.y", 18),
    (r"((\x.\y.x)z)w", 14),
    (r"((\x.\y.y)z)w", 14),
    (r"(\x.(f)x)y", 10),
    (r"(\x.(x)(x)y)\z.z", 26),
    (r"\z.(\x.x)z", 10),
    (r"(f)(\x.x)y", 12),
    (r"(\x.\y.(y)x)z", 12),
    (r"(\x.(x)y)\z.(z)z", 18),
    (r"((\x.x)\y.y)z", 14),
    (r"(\f.(f)(f)x)\y.y", 26),
    (r"(\x.(\y.y)x)z", 14),
    (r"(\x.(x)x)y", 10),
    (r"((\x.\y.(x)y)f)a", 18),
    (r"(f)(\x.(x)x)y", 12),
    (r"(\x.\y.x)(\z.z)w", 18),
    (r"(\x.(g)(x)x)y", 10),
    (r"(\x.(x)z)\y.(f)y", 18),
    (r"(\x.(f)(f)x)(\y.y)a", 22),
)


def commutation(sr: Semiring = RAT, fuel: int = 50) -> CriterionResult:
    bad = []
    certified = 0
    for text, K in COMMUTATION_CORPUS:
        r = commutation_check(parse_term(text), K, fuel, sr)
        certified += len(r.certified)
        if r.status != "ok" or not (r.agree and r.stable and r.certified):
            bad.append(text)
    detail = (f"{len(COMMUTATION_CORPUS)} terms, {certified} certified approximants; "
              f"{len(bad)} disagreements")
    return CriterionResult(6, "nf(T(M)) = T(nf(M)) on certified regions", not bad, detail,
                           data={"failing": bad})


def _corrupt(S: RSum) -> RSum:
    if not S:
        return S
    t = min(S.terms, key=lambda u: (rsize(u), u._key))
    terms = dict(S.terms)
    if S.sr is RAT:
        terms[t] = terms[t] * 2
    else:
        del terms[t]
    return RSum(terms, S.sr)


@contextmanager
def corrupted_coefficients() -> Iterator[None]:
    """Corrupt the smallest coefficient of every normalized expansion."""
    old = conservativity.COEFF_MUTATION
    conservativity.COEFF_MUTATION = _corrupt
    try:
        yield
    finally:
        conservativity.COEFF_MUTATION = old


# ---------------------------------------------------------------------------
# 7-10. the Accordion

def accordion_cycle(fuel: int = 500) -> CriterionResult:
    notes, ok = [], True
    for n in (0, 1, 2):
        r = head_cycle_trace(n, fuel)
        good = r.status == "ok" and r.checkpoints_in_order()
        ok = ok and good
        notes.append(f"n={n}: {len(r.trace)} steps, {len(r.hits)} checkpoints")
    return CriterionResult(7, "Accordion head-reduction cycle", ok, "; ".join(notes))


def accordion_stretching(fuel: int = 5000) -> CriterionResult:
    astar = accordion_star()
    notes, ok = [], True
    for d in (0, 1, 2):
        r = approximant_path(d, fuel)
        good = (r.status == "ok" and r.trace.end == a_star_d(d) and r.offset >= 0
                and cut_below(r.trace.end, r.offset) == truncate(astar, r.offset)
                and len(r.depth0_between) == d and all(r.depth0_between))
        ok = ok and good
        notes.append(f"d={d}: offset {r.offset}, {len(r.trace)} steps")
    return CriterionResult(8, "approximants A*_d reached with depth-0 steps", ok,
                           "; ".join(notes))


def negative_searches(budget: int = 10) -> CriterionResult:
    reports = [technique1_search(k, n, budget) for k in (0, 1) for n in (0, 1)]
    reports += [technique2_search(0, n, budget) for n in (0, 1)]
    control = positive_control()
    clean = all(r.found is None and r.complete for r in reports)
    ok = clean and control.found is not None
    detail = (f"{len(reports)} searches: "
              f"{'no counterexample within budget' if clean else 'counterexample found'}"
              f" (budget {budget}); positive control {control.status}")
    return CriterionResult(9, "bounded negative searches", ok, detail)


def layers(sr: Semiring = RAT, size_bound: int = 14) -> CriterionResult:
    rows = layer_rigidity(3, size_bound, sr)
    ok = all(r[4] for r in rows)
    sizes = ", ".join(f"(d={d},k={k}: {a}/{b})" for d, k, a, b, _ in rows)
    return CriterionResult(10, "Taylor layers keep their depth", ok,
                           f"size bound {size_bound}, no reduct or normal form of T_d "
                           f"meets T_d+k; |T_d|/|T_d+k| {sizes}")


# ---------------------------------------------------------------------------

MASS_CRITERIA = (2, 3)


def criteria(sr: Semiring = RAT, seed: int = DEFAULT_SEED
             ) -> list[tuple[int, str, Callable[[], CriterionResult]]]:
    return [
        (1, "lo/li normal forms agree", lambda: confluence(sr)),
        (2, "multilinear substitution mass", lambda: substitution_mass(sr, seed)),
        (3, "Taylor coefficients", lambda: taylor_coefficients(sr, seed)),
        (4, "uniform simulation", lambda: uniform_simulation(sr, seed)),
        (5, "reduction extraction", lambda: finite_conservativity(seed)),
        (6, "nf(T(M)) = T(nf(M)) on certified regions", lambda: commutation(sr)),
        (7, "Accordion head-reduction cycle", accordion_cycle),
        (8, "approximants A*_d reached with depth-0 steps", accordion_stretching),
        (9, "bounded negative searches", negative_searches),
        (10, "Taylor layers keep their depth", lambda: layers(sr)),
    ]


def run_one(number: int, sr: Semiring = RAT, seed: int = DEFAULT_SEED) -> CriterionResult:
    for k, title, fn in criteria(sr, seed):
        if k != number:
            continue
        if sr is not RAT and k in MASS_CRITERIA:
            return CriterionResult(k, title, None, f"needs exact rationals, skipped under {sr.name}")
        t0 = time.perf_counter()
        r = fn()
        r.seconds = time.perf_counter() - t0
        return r
    raise ValueError(f"no criterion {number}")


def run_all(sr: Semiring = RAT, seed: int = DEFAULT_SEED, mutate: bool = False,
            only: Optional[list[int]] = None) -> list[CriterionResult]:
    numbers = only or [k for k, _, _ in criteria(sr, seed)]
    if mutate:
        with corrupted_coefficients():
            return [run_one(k, sr, seed) for k in numbers]
    return [run_one(k, sr, seed) for k in numbers]
