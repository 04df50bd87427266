"""The Accordion experiments: the head-reduction cycle with its checkpoints,
the scripted paths A ->* A*_d, bounded negative searches and the Taylor
layers of A*.

Rows of the head-reduction cycle are numbered 0..24. Row 0 is
(P'')(succ)^n⌜0⌝ and row 24 is (P'')(succ)^{n+1}⌜0⌝. Rows 5-7, 10-11 and
14-18 are families indexed by j = n..1 and only occur when n >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .beta import (
    HeadRedex, RedexInfo, Step, Trace, beta_step, head_form,
    head_redex_position, redex_info, search, standard_search,
)
from .kit import (
    APP_FF, APP_TT, FF, TT, _fill, a_star_d, accordion, accordion_star, church,
    p_prime, p_second, power, q1_n, q2_n, q_n, q_open, succ_n,
)
from .resource import RSum, normalize_term, resource_reducts
from .semiring import RAT, Semiring
from .syntax import (
    BOTTOM, Hole, Term, app, cut_below, lam, match, subterm_at, truncate, var,
)
from .taylor import taylor_truncated

CHECKPOINTS = (2, 3, 5, 10, 13, 21, 23, 24)
HEAD_REDEX_ROWS = (2, 3, 21, 23)


def _p_open_body(phi: Term) -> Term:
    """λn.(⟨tt⟩)((n)⟨ff⟩)Q_{phi,n}"""
    body = _fill(r"(ATT)((n)AFF)QPHI", ATT=APP_TT, AFF=APP_FF,
                 QPHI=q_open(phi, var("n")))
    return lam("n", body)


def _succ_unfolded(k: int) -> Term:
    """λf.λx.((succ)^k⌜0⌝)f (f)x, one head step away from (succ)^{k+1}⌜0⌝"""
    return lam("f", lam("x", app(succ_n(k), var("f"), app(var("f"), var("x")))))


def cycle_rows(n: int) -> list[tuple[int, Optional[int], Term]]:
    """The rows of the cycle at index n as (row, j, term), in order."""
    P2, Qn, Q1, Q2 = p_second(), q_n(n), q1_n(n), q2_n(n)
    nxt = app(P2, succ_n(n + 1))
    ffs = lambda k: [FF] * k
    rows: list[tuple[int, Optional[int], Term]] = [
        (0, None, app(P2, succ_n(n))),
        (1, None, app(p_prime(), P2, succ_n(n))),
        (2, None, app(_p_open_body(P2), succ_n(n))),
        (3, None, app(APP_TT, app(succ_n(n), APP_FF, Qn))),
        (4, None, app(succ_n(n), APP_FF, Qn, TT)),
    ]
    for j in range(n, 0, -1):
        rest = power(APP_FF, n - j, Qn)
        rows += [
            (5, j, app(_succ_unfolded(j - 1), APP_FF, rest, TT)),
            (6, j, app(lam("x", app(succ_n(j - 1), APP_FF, app(APP_FF, var("x")))), rest, TT)),
            (7, j, app(succ_n(j - 1), APP_FF, app(APP_FF, rest), TT)),
        ]
    rows += [
        (8, None, app(church(0), APP_FF, power(APP_FF, n, Qn), TT)),
        (9, None, app(lam("x", var("x")), power(APP_FF, n, Qn), TT)),
    ]
    for j in range(n, 0, -1):
        rows += [
            (10, j, app(APP_FF, power(APP_FF, j - 1, Qn), *ffs(n - j), TT)),
            (11, j, app(power(APP_FF, j - 1, Qn), FF, *ffs(n - j), TT)),
        ]
    rows += [
        (12, None, app(Qn, *ffs(n), TT)),
        (13, None, app(Q2, *ffs(n), TT)),
    ]
    b_body = lam("b", app(var("b"), nxt, Q2))
    for j in range(n, 0, -1):
        rows += [
            (14, j, app(Q1, Q2, *ffs(j), TT)),
            (15, j, app(b_body, FF, *ffs(j - 1), TT)),
            (16, j, app(FF, nxt, Q2, *ffs(j - 1), TT)),
            (17, j, app(lam("y", var("y")), Q2, *ffs(j - 1), TT)),
            (18, j, app(Q2, *ffs(j - 1), TT)),
        ]
    rows += [
        (19, None, app(Q2, TT)),
        (20, None, app(Q1, Q2, TT)),
        (21, None, app(b_body, TT)),
        (22, None, app(TT, nxt, Q2)),
        (23, None, app(lam("y", nxt), Q2)),
        (24, None, nxt),
    ]
    return rows


def checkpoint_patterns(n: int) -> list[tuple[int, Optional[int], Term]]:
    return [r for r in cycle_rows(n) if r[0] in CHECKPOINTS]


@dataclass
class CycleReport:
    n: int
    trace: Trace
    completed: bool
    exhausted: bool
    hits: list[tuple[int, Optional[int], int]] = field(default_factory=list)
    row_hits: list[tuple[int, Optional[int], int]] = field(default_factory=list)
    head_redex_states: list[int] = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.completed:
            return "ok"
        return "exhausted" if self.exhausted else "mismatch"

    def checkpoints_in_order(self) -> bool:
        expected = [(r, j) for r, j, _ in checkpoint_patterns(self.n)]
        return [(r, j) for r, j, _ in self.hits] == expected

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "n": self.n,
            "steps": len(self.trace),
            "checkpoints": [{"row": r, "j": j, "step": k} for r, j, k in self.hits],
            "checkpoints_in_order": self.checkpoints_in_order(),
            "head_redex_rows": [r for r, j, k in self.row_hits if k in self.head_redex_states],
        }


def head_cycle_trace(n: int, fuel: int) -> CycleReport:
    """Head-reduce (P'')(succ)^n⌜0⌝ until it reaches (P'')(succ)^{n+1}⌜0⌝."""
    rows = cycle_rows(n)
    start, goal = rows[0][2], rows[-1][2]
    tr = Trace(start)
    cur = start
    completed = exhausted = False
    while True:
        if cur == goal and tr.steps:
            completed = True
            break
        p = head_redex_position(cur)
        if p is None:
            break
        if len(tr.steps) >= fuel:
            exhausted = True
            break
        cur = beta_step(cur, p)
        tr.steps.append(Step(RedexInfo(p, 0, True), cur))
    rep = CycleReport(n, tr, completed, exhausted)
    index: dict[Term, list[tuple[int, Optional[int]]]] = {}
    for r, j, t in rows:
        index.setdefault(t, []).append((r, j))
    seen = set()
    for k, t in enumerate(tr.terms()):
        for r, j in index.get(t, ()):
            if (r, j) in seen:
                continue
            seen.add((r, j))
            rep.row_hits.append((r, j, k))
            if r in CHECKPOINTS:
                rep.hits.append((r, j, k))
        hf = head_form(t)
        if isinstance(hf, HeadRedex) and not hf.binders and not hf.tail_args:
            rep.head_redex_states.append(k)
    return rep


# ---------------------------------------------------------------------------
# the approximant family

@dataclass
class ApproximantPath:
    d: int
    trace: Trace
    marks: list[int]                  # index of the state matching A*_k, k = 0..d
    depth0_between: list[bool]        # a depth-0 redex fires between marks k, k+1
    offset: int                       # largest D with agreeing truncations
    exhausted: bool = False

    @property
    def status(self) -> str:
        return "exhausted" if self.exhausted else "ok"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "d": self.d,
            "steps": len(self.trace),
            "marks": self.marks,
            "depth0_between": self.depth0_between,
            "offset": self.offset,
            "trace": self.trace.to_json() if len(self.trace) < 400 else None,
        }


def _head_until(cur: Term, goal: Term, fuel: int, prefix=()) -> tuple[list[Step], bool]:
    """Head-reduce the subterm at ``prefix`` until the whole term is ``goal``."""
    steps: list[Step] = []
    while cur != goal:
        sub = subterm_at(cur, prefix)
        p = head_redex_position(sub)
        if p is None or len(steps) >= fuel:
            return steps, False
        pos = tuple(prefix) + p
        info = redex_info(cur, pos)
        cur = beta_step(cur, pos)
        steps.append(Step(info, cur))
    return steps, True


def approximant_offset(endpoint: Term, limit: int = 64) -> int:
    """Largest D such that the endpoint and A* coincide once both are cut
    below applicative depth D."""
    astar = accordion_star()
    D = -1
    while D + 1 <= limit and cut_below(endpoint, D + 1) == truncate(astar, D + 1):
        D += 1
    return D


def approximant_path(d: int, fuel: int = 5000) -> ApproximantPath:
    """A ->* A*_0 ->* A*_1 ... ->* A*_d. Each leg head-reduces to row 3 of the
    cycle at index k, then head-reduces inside the argument of ⟨tt⟩ until
    (⟨ff⟩)^k Q_k appears."""
    tr = Trace(accordion())
    marks: list[int] = []
    exhausted = False
    for k in range(d + 1):
        row3 = app(APP_TT, app(succ_n(k), APP_FF, q_n(k)))
        steps, ok = _head_until(tr.end, row3, fuel - len(tr))
        tr.steps += steps
        if ok:
            steps, ok = _head_until(tr.end, a_star_d(k), fuel - len(tr), ("A",))
            tr.steps += steps
        if not ok:
            exhausted = True
            break
        marks.append(len(tr))
    between = []
    for a, b in zip(marks, marks[1:]):
        between.append(any(s.redex.depth == 0 for s in tr.steps[a:b]))
    offset = approximant_offset(tr.end) if not exhausted else -1
    return ApproximantPath(d, tr, marks, between, offset, exhausted)


# ---------------------------------------------------------------------------
# bounded negative searches

HOLE = Hole("M")


@dataclass
class NegativeSearchReport:
    name: str
    params: dict
    budget: int
    mode: str                          # standard | breadth-first
    found: Optional[Trace]
    explored: int
    complete: bool = True              # false when a state cap cut the search
    negative: bool = True              # a hit refutes the expectation

    @property
    def status(self) -> str:
        if self.found is not None:
            return "counterexample" if self.negative else "found"
        if not self.complete:
            return "state-cap-reached"
        return "no counterexample within budget" if self.negative else "not found within budget"

    def to_json(self) -> dict:
        return {
            "name": self.name, "params": self.params, "budget": self.budget,
            "mode": self.mode, "status": self.status, "explored": self.explored,
            "trace": None if self.found is None else self.found.to_json(),
        }


def _ff_tower(k: int, base: Term) -> Term:
    return power(APP_FF, k, base)


def case_start(case: int, n: int) -> Term:
    """The four head reducts of A shaped (λb.M)N, at cycle index n."""
    nxt = app(p_second(), succ_n(n + 1))
    if case == 1:
        return app(_p_open_body(p_second()), succ_n(n))
    if case == 2:
        return app(APP_TT, app(succ_n(n), APP_FF, q_n(n)))
    if case == 3:
        return app(lam("b", app(var("b"), nxt, q2_n(n))), TT)
    if case == 4:
        return app(lam("y", nxt), q2_n(n))
    raise ValueError("case ranges over 1..4")


def _run(name, params, start, pattern, budget, mode, internal_only=False,
         state_cap=200_000, negative=True) -> NegativeSearchReport:
    if mode == "standard":
        rep = standard_search(start, pattern, budget, internal_only=internal_only)
        return NegativeSearchReport(name, params, budget, mode, rep.found,
                                    rep.subproblems, True, negative)
    if mode == "breadth-first":
        rep = search(start, lambda u: match(pattern, u) is not None, budget,
                     max_states=state_cap, internal_only=internal_only)
        return NegativeSearchReport(name, params, budget, mode, rep.found,
                                    rep.states, not rep.max_states_hit, negative)
    raise ValueError(f"unknown mode {mode!r}")


def depth_restricted_negative_search(case: int, n: int, budget: int = 10,
                                     mode: str = "standard", state_cap: int = 200_000
                                     ) -> NegativeSearchReport:
    """From the case-th head-redex state at index n, look for an internal
    reduction to (⟨tt⟩)(⟨ff⟩)^{n+1}M."""
    pattern = app(APP_TT, _ff_tower(n + 1, HOLE))
    return _run(f"case{case}", {"case": case, "n": n}, case_start(case, n),
                pattern, budget, mode, internal_only=True, state_cap=state_cap)


def technique1_search(k: int, n: int, budget: int = 10, mode: str = "standard",
                      state_cap: int = 200_000) -> NegativeSearchReport:
    """(⟨ff⟩)^k Q_n ->* (⟨ff⟩)^{k+1} M within budget?"""
    return _run("technique1", {"k": k, "n": n}, _ff_tower(k, q_n(n)),
                _ff_tower(k + 1, HOLE), budget, mode, state_cap=state_cap)


def technique2_search(k: int, n: int, budget: int = 10, mode: str = "standard",
                      state_cap: int = 200_000) -> NegativeSearchReport:
    """(succ)^{n-k}⌜0⌝ ⟨ff⟩ (⟨ff⟩)^k Q_n ->* (⟨ff⟩)^{n+1} M within budget?"""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    start = app(succ_n(n - k), APP_FF, _ff_tower(k, q_n(n)))
    return _run("technique2", {"k": k, "n": n}, start, _ff_tower(n + 1, HOLE),
                budget, mode, state_cap=state_cap)


def positive_control(budget: int = 20, mode: str = "breadth-first",
                     state_cap: int = 200_000) -> NegativeSearchReport:
    """A reduct of A headed by ⟨tt⟩ does exist."""
    return _run("positive-control", {}, accordion(), app(APP_TT, HOLE), budget,
                mode, negative=False, state_cap=state_cap)


# ---------------------------------------------------------------------------
# Taylor layers of A*

def a_star_cut(d: int) -> Term:
    """(⟨tt⟩)(⟨ff⟩)^d ⊥"""
    return app(APP_TT, _ff_tower(d, BOTTOM))


def taylor_layers(d: int, size_bound: int, sr: Semiring = RAT) -> tuple[RSum, RSum]:
    """T'_d = T((⟨tt⟩)(⟨ff⟩)^d ⊥) truncated by size, and the layer
    T_d = T'_d minus the support of T'_{d-1}."""
    cur = taylor_truncated(a_star_cut(d), size_bound, sr).sum
    if d == 0:
        return cur, cur
    prev = taylor_truncated(a_star_cut(d - 1), size_bound, sr).sum
    return cur, cur.filter(lambda t: t not in prev.terms)


def layer_rigidity(max_total: int = 3, size_bound: int = 14, sr: Semiring = RAT
                   ) -> list[tuple[int, int, int, int, bool]]:
    """For d + k <= max_total, k > 0: (d, k, |T_d|, |T_{d+k}|, disjoint).

    ``disjoint`` says that no resource reduct of a T_d element, normal
    forms included, lies in the support of T_{d+k}."""
    layers = {d: taylor_layers(d, size_bound, sr)[1] for d in range(max_total + 1)}
    reach = {}
    for d, L in layers.items():
        supp = set()
        for t in L.terms:
            supp |= resource_reducts(t, sr)
            supp |= normalize_term(t, sr=sr).support()
        reach[d] = supp
    out = []
    for d in range(max_total + 1):
        for k in range(1, max_total - d + 1):
            target = layers[d + k].support()
            out.append((d, k, len(layers[d]), len(target), not (reach[d] & target)))
    return out


def layer_normal_forms(d: int, size_bound: int = 14, sr: Semiring = RAT) -> RSum:
    """Normal form of the whole layer T_d."""
    from .resource import normalize_sum
    return normalize_sum(taylor_layers(d, size_bound, sr)[1])
