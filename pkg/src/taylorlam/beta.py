"""Beta-reduction: redexes with depths, steps, head forms, head reduction,
depth-restricted traces and bounded exhaustive search."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .syntax import (
    Abs, App, Hole, Term, format_position, match, parse_position, print_term,
    replace_at, subst_bound, subterm_at,
)
from .syntax import _min_loose


class NotARedex(ValueError):
    pass


@dataclass(frozen=True)
class RedexInfo:
    position: tuple[str, ...]
    depth: int
    is_head: bool

    @property
    def kind(self) -> str:
        return "head" if self.is_head else "internal"


@dataclass(frozen=True)
class Step:
    redex: RedexInfo
    term: Term


@dataclass
class Trace:
    start: Term
    steps: list[Step] = field(default_factory=list)
    exhausted: bool = False

    @property
    def end(self) -> Term:
        return self.steps[-1].term if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def terms(self) -> list[Term]:
        return [self.start] + [s.term for s in self.steps]

    def positions(self) -> list[tuple[str, ...]]:
        return [s.redex.position for s in self.steps]

    def extend(self, other: "Trace") -> "Trace":
        if other.start != self.end:
            raise ValueError("traces do not compose")
        return Trace(self.start, self.steps + other.steps, other.exhausted)

    def is_valid(self) -> bool:
        cur = self.start
        for st in self.steps:
            info = redex_info(cur, st.redex.position)
            if info != st.redex or beta_step(cur, st.redex.position) != st.term:
                return False
            cur = st.term
        return True

    def to_json(self) -> list[dict]:
        return [
            {"position": format_position(s.redex.position),
             "depth": s.redex.depth,
             "kind": s.redex.kind,
             "term": print_term(s.term)}
            for s in self.steps
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def replay(start: Term, positions: Iterable[Sequence[str]]) -> Trace:
    """Fire the given positions in order, recomputing depths and head flags."""
    tr = Trace(start)
    cur = start
    for p in positions:
        p = tuple(p)
        info = redex_info(cur, p)
        cur = beta_step(cur, p)
        tr.steps.append(Step(info, cur))
    return tr


def trace_from_json(start: Term, data: list[dict]) -> Trace:
    return replay(start, [parse_position(d["position"]) for d in data])


# ---------------------------------------------------------------------------

def head_redex_position(t: Term) -> Optional[tuple[str, ...]]:
    path: list[str] = []
    while type(t) is Abs:
        path.append("B")
        t = t.body
    fpath = []
    while type(t) is App:
        fpath.append(t)
        t = t.fun
    if not fpath or type(t) is not Abs:
        return None
    # the innermost application of the spine is the head redex
    return tuple(path) + ("F",) * (len(fpath) - 1)


def redex_info(t: Term, p: Sequence[str]) -> RedexInfo:
    p = tuple(p)
    sub = subterm_at(t, p)
    if type(sub) is not App or type(sub.fun) is not Abs:
        raise NotARedex(f"no redex at {format_position(p)!r}")
    return RedexInfo(p, sum(1 for q in p if q == "A"), p == head_redex_position(t))


def enumerate_redexes(t: Term) -> list[RedexInfo]:
    """All redexes in leftmost-outermost (pre-order) order."""
    head = head_redex_position(t)
    out: list[RedexInfo] = []

    def go(u: Term, path: tuple[str, ...], depth: int):
        tp = type(u)
        if tp is Abs:
            go(u.body, path + ("B",), depth)
        elif tp is App:
            if type(u.fun) is Abs:
                out.append(RedexInfo(path, depth, path == head))
            go(u.fun, path + ("F",), depth)
            go(u.arg, path + ("A",), depth + 1)

    go(t, (), 0)
    return out


def contract(redex: Term) -> Term:
    if type(redex) is not App or type(redex.fun) is not Abs:
        raise NotARedex("not a redex")
    return subst_bound(redex.fun.body, redex.arg)


def beta_step(t: Term, p: Sequence[str]) -> Term:
    try:
        sub = subterm_at(t, p)
    except ValueError as e:
        raise NotARedex(str(e)) from None
    return replace_at(t, tuple(p), contract(sub))


def _lo_position(t: Term, min_depth: int = 0) -> Optional[tuple[str, ...]]:
    def go(u: Term, path: tuple[str, ...], depth: int):
        tp = type(u)
        if tp is Abs:
            return go(u.body, path + ("B",), depth)
        if tp is App:
            if type(u.fun) is Abs and depth >= min_depth:
                return path
            r = go(u.fun, path + ("F",), depth)
            if r is not None:
                return r
            return go(u.arg, path + ("A",), depth + 1)
        return None

    return go(t, (), 0)


# ---------------------------------------------------------------------------
# head forms

@dataclass(frozen=True)
class HNF:
    binders: tuple[str, ...]
    head: Term
    args: tuple[Term, ...]


@dataclass(frozen=True)
class HeadRedex:
    binders: tuple[str, ...]
    redex_fun: Abs
    redex_arg: Term
    tail_args: tuple[Term, ...]


HeadForm = HNF | HeadRedex


def head_form(t: Term) -> HeadForm:
    """Decompose ``t`` as an hnf or around its head redex.

    The head of an HNF is the variable (Var index relative to the binders
    listed, or Free), or Bottom acting as a pseudo-head.
    """
    binders = []
    while type(t) is Abs:
        binders.append(t.name)
        t = t.body
    args = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    if type(t) is Abs and args:
        return HeadRedex(tuple(binders), t, args[0], tuple(args[1:]))
    return HNF(tuple(binders), t, tuple(args))


def reassemble(hf: HeadForm) -> Term:
    if isinstance(hf, HNF):
        body = hf.head
        for a in hf.args:
            body = App(body, a)
    else:
        body = App(hf.redex_fun, hf.redex_arg)
        for a in hf.tail_args:
            body = App(body, a)
    for name in reversed(hf.binders):
        body = Abs(body, name)
    return body


def head_reduce(t: Term, fuel: int) -> Trace:
    """Fire head redexes until an hnf is reached or fuel runs out."""
    tr = Trace(t)
    cur = t
    while True:
        p = head_redex_position(cur)
        if p is None:
            return tr
        if len(tr.steps) >= fuel:
            tr.exhausted = True
            return tr
        cur = beta_step(cur, p)
        tr.steps.append(Step(RedexInfo(p, 0, True), cur))


def normalize(t: Term, fuel: int) -> Trace:
    """Leftmost-outermost reduction; ``exhausted`` is set when fuel runs out."""
    tr = Trace(t)
    cur = t
    while True:
        p = _lo_position(cur)
        if p is None:
            return tr
        if len(tr.steps) >= fuel:
            tr.exhausted = True
            return tr
        info = redex_info(cur, p)
        cur = beta_step(cur, p)
        tr.steps.append(Step(info, cur))


def reduce_with(t: Term, strategy: str, fuel: int, min_depth: int = 0) -> Trace:
    if strategy == "head":
        return head_reduce(t, fuel)
    if strategy != "lo":
        raise ValueError(f"unknown strategy {strategy!r}")
    tr = Trace(t)
    cur = t
    while True:
        p = _lo_position(cur, min_depth)
        if p is None:
            return tr
        if len(tr.steps) >= fuel:
            tr.exhausted = True
            return tr
        info = redex_info(cur, p)
        cur = beta_step(cur, p)
        tr.steps.append(Step(info, cur))


def validate_min_depth(tr: Trace, d: int) -> bool:
    return all(s.redex.depth >= d for s in tr.steps)


def head_internal_split(tr: Trace) -> Optional[tuple[Trace, Trace]]:
    """Split a trace already shaped as head steps then internal steps."""
    k = 0
    while k < len(tr.steps) and tr.steps[k].redex.is_head:
        k += 1
    if any(s.redex.is_head for s in tr.steps[k:]):
        return None
    head = Trace(tr.start, tr.steps[:k])
    return head, Trace(head.end, tr.steps[k:])


# ---------------------------------------------------------------------------
# bounded exhaustive search

@dataclass
class SearchReport:
    found: Optional[Trace]
    states: int
    complete: bool          # frontier emptied before the budget was reached
    budget: int
    max_states_hit: bool = False

    @property
    def status(self) -> str:
        if self.found is not None:
            return "found"
        if self.max_states_hit:
            return "state-cap-reached"
        return "none-within-budget"


def search(t: Term, goal: Callable[[Term], bool], budget: int,
           min_depth: int = 0, max_states: Optional[int] = None,
           internal_only: bool = False) -> SearchReport:
    """Breadth-first search over all reduction sequences of length <= budget
    firing only redexes of depth >= min_depth (and never a head redex when
    ``internal_only``). Terms are deduplicated up to alpha, so the returned
    witness is a shortest one."""
    parent: dict[Term, Optional[tuple[Term, RedexInfo]]] = {t: None}
    if goal(t):
        return SearchReport(Trace(t), 1, True, budget)
    frontier = [t]
    for _ in range(budget):
        nxt = []
        for u in frontier:
            for info in enumerate_redexes(u):
                if info.depth < min_depth or (internal_only and info.is_head):
                    continue
                v = beta_step(u, info.position)
                if v in parent:
                    continue
                parent[v] = (u, info)
                if goal(v):
                    return SearchReport(_rebuild(parent, v), len(parent), False, budget)
                nxt.append(v)
                if max_states is not None and len(parent) >= max_states:
                    return SearchReport(None, len(parent), False, budget, True)
        if not nxt:
            return SearchReport(None, len(parent), True, budget)
        frontier = nxt
    return SearchReport(None, len(parent), False, budget)


def _rebuild(parent, v: Term) -> Trace:
    steps = []
    while parent[v] is not None:
        u, info = parent[v]
        steps.append(Step(info, v))
        v = u
    steps.reverse()
    return Trace(v, steps)


def bounded_search(t: Term, goal: Callable[[Term], bool], budget: int,
                   min_depth: int = 0) -> Optional[Trace]:
    return search(t, goal, budget, min_depth).found


def reachable(t: Term, budget: int, min_depth: int = 0,
              max_states: Optional[int] = None) -> dict[Term, int]:
    """Every reduct within ``budget`` steps with its distance, in BFS order.
    With ``max_states`` the exploration stops once that many are known."""
    dist = {t: 0}
    frontier = [t]
    for k in range(1, budget + 1):
        nxt = []
        for u in frontier:
            for info in enumerate_redexes(u):
                if info.depth < min_depth:
                    continue
                v = beta_step(u, info.position)
                if v not in dist:
                    dist[v] = k
                    nxt.append(v)
                    if max_states is not None and len(dist) >= max_states:
                        return dist
        if not nxt:
            break
        frontier = nxt
    return dist


# ---------------------------------------------------------------------------
# search over standard reductions

def _components(hf: HeadForm) -> list[tuple[tuple[str, ...], Term, int]]:
    """Subterms an internal reduction may touch: (relative path, term,
    extra binders), listed left to right."""
    nb = len(hf.binders)
    pre = ("B",) * nb
    if isinstance(hf, HeadRedex):
        args = (hf.redex_arg,) + hf.tail_args
        m = len(args)
        out = [(pre + ("F",) * m + ("B",), hf.redex_fun.body, nb + 1)]
    else:
        args = hf.args
        m = len(args)
        out = []
    for i, a in enumerate(args):
        out.append((pre + ("F",) * (m - 1 - i) + ("A",), a, nb))
    return out


def _same_frame(hf: HeadForm, pf: HeadForm) -> bool:
    if len(hf.binders) != len(pf.binders) or type(hf) is not type(pf):
        return False
    if isinstance(hf, HeadRedex):
        return len(hf.tail_args) == len(pf.tail_args)
    return len(hf.args) == len(pf.args) and hf.head == pf.head


class _StandardSearch:
    """Shortest standard reduction from a term to a pattern instance.

    A standard reduction head-reduces first and then reduces the components
    of the resulting head form independently, each again in standard order.
    Every reduction can be rearranged into a standard one with the same
    endpoints, so the family is complete for reachability, although the
    rearranged sequence may be longer. The budget bounds its length."""

    def __init__(self, naive_cap: int):
        self.memo: dict = {}
        self.naive_cap = naive_cap
        self.calls = 0

    def best(self, t: Term, p: Term, level: int, budget: int,
             allow_head: bool = True) -> Optional[tuple[int, list]]:
        key = (t, p, level, budget, allow_head)
        if key in self.memo:
            return self.memo[key]
        self.calls += 1
        r = self._best(t, p, level, budget, allow_head)
        self.memo[key] = r
        return r

    def _naive(self, t, p, level, budget):
        rep = search(t, lambda u: match(p, u, level=level) is not None,
                     budget, max_states=self.naive_cap)
        if rep.found is None:
            return None
        return len(rep.found), list(rep.found.positions())

    def _best(self, t, p, level, budget, allow_head):
        if match(p, t, level=level) is not None:
            return 0, []
        pf = head_form(p)
        if type(p) is Hole or (isinstance(pf, HNF) and type(pf.head) is Hole):
            return self._naive(t, p, level, budget) if allow_head else None
        comps_p = _components(pf)
        best: Optional[tuple[int, list]] = None
        cur, head_steps = t, []
        h = 0
        while True:
            if best is not None and h >= best[0]:
                break
            hf = head_form(cur)
            if _same_frame(hf, pf):
                total, steps = h, list(head_steps)
                for (path, sub, extra), (_, psub, _) in zip(_components(hf), comps_p):
                    r = self.best(sub, psub, level + extra, budget - total)
                    if r is None:
                        break
                    total += r[0]
                    steps += [path + q for q in r[1]]
                else:
                    if best is None or total < best[0]:
                        best = (total, steps)
            pos = head_redex_position(cur)
            if pos is None or not allow_head or h >= budget:
                break
            head_steps.append(pos)
            cur = beta_step(cur, pos)
            h += 1
        return best


@dataclass
class StandardSearchReport:
    found: Optional[Trace]
    budget: int
    subproblems: int

    @property
    def status(self) -> str:
        return "found" if self.found is not None else "none-within-budget"


def standard_search(t: Term, pattern: Term, budget: int,
                    internal_only: bool = False,
                    naive_cap: int = 200_000) -> StandardSearchReport:
    """Look for a standard reduction of length <= budget from ``t`` to a term
    matching ``pattern``. With ``internal_only`` no head step is fired at
    the root. Holes whose context is not rigid fall back to breadth-first
    search capped at ``naive_cap`` states."""
    eng = _StandardSearch(naive_cap)
    r = eng.best(t, pattern, 0, budget, allow_head=not internal_only)
    tr = None if r is None else replay(t, r[1])
    return StandardSearchReport(tr, budget, eng.calls)
