"""Conservativity of approximant reduction over finite beta-reduction.

``mashup_check`` searches for a derivation of M ◃ s (s approximates some
reduct of M); ``extract_reduction`` turns a derivation for the canonical
approximant of N into an actual trace M ->* N. ``commutation_check``
compares the normal form of a truncated expansion with the expansion of the
normal form, and ``verify_stratified`` checks finite evidence of an
infinitary uniform resource reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .beta import Trace, normalize, reachable, replay
from .resource import (
    Bag, RAbs, RApp, RFree, RSum, RTerm, RVar, normalize_sum, rdepth,
    restrict_below_depth, rsize,
)
from .semiring import RAT, Semiring
from .syntax import Abs, App, Free, Term, Var
from .taylor import (
    BundleWitness, TruncatedExpansion, canonical_approximant,
    certified_preimage_bound, self_coherent, taylor_truncated,
)

DEFAULT_STATE_CAP = 20_000

# Test hook: when set, applied to nf(T(M)) before the commutation comparison.
# The self-test uses it to corrupt a coefficient and watch the check fail.
COEFF_MUTATION: Optional[Callable[[RSum], RSum]] = None


# ---------------------------------------------------------------------------
# mashup

@dataclass(frozen=True)
class MashupDerivation:
    rule: str                        # var | abs | app | bag
    term: Term
    target: object                   # RTerm or Bag
    trace: Optional[Trace]           # term ->* shape, absent for bags
    premises: tuple["MashupDerivation", ...] = ()

    def is_valid(self) -> bool:
        if self.rule == "bag":
            return (len(self.premises) == len(self.target)
                    and all(p.term == self.term and p.is_valid() for p in self.premises))
        tr = self.trace
        if tr is None or tr.start != self.term or not tr.is_valid():
            return False
        end = tr.end
        if self.rule == "var":
            return _var_matches(end, self.target)
        if self.rule == "abs":
            return (type(end) is Abs and len(self.premises) == 1
                    and self.premises[0].term == end.body and self.premises[0].is_valid())
        if self.rule == "app":
            return (type(end) is App and len(self.premises) == 2
                    and self.premises[0].term == end.fun
                    and self.premises[1].term == end.arg
                    and all(p.is_valid() for p in self.premises))
        return False


def _var_matches(t: Term, s: RTerm) -> bool:
    if type(s) is RVar:
        return type(t) is Var and t.index == s.index
    return type(t) is Free and t.name == s.name


def _shape(s: RTerm) -> Callable[[Term], bool]:
    tp = type(s)
    if tp is RAbs:
        return lambda t: type(t) is Abs
    if tp is RApp:
        return lambda t: type(t) is App
    return lambda t: _var_matches(t, s)


class _Mashup:
    def __init__(self, fuel: int, state_cap: int):
        self.fuel = fuel
        self.cap = state_cap
        self.reach_memo: dict = {}
        self.memo: dict = {}

    def reducts(self, m: Term) -> list[tuple[Term, int]]:
        if m not in self.reach_memo:
            self.reach_memo[m] = list(reachable(m, self.fuel, max_states=self.cap).items())
        return self.reach_memo[m]

    def check(self, m: Term, s) -> Optional[MashupDerivation]:
        key = (m, s)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = None          # guards against re-entry on the same pair
        r = self._check(m, s)
        self.memo[key] = r
        return r

    def _check(self, m: Term, s) -> Optional[MashupDerivation]:
        if type(s) is Bag:
            prem = []
            for t in s:
                d = self.check(m, t)
                if d is None:
                    return None
                prem.append(d)
            return MashupDerivation("bag", m, s, None, tuple(prem))
        ok = _shape(s)
        for u, _dist in self.reducts(m):
            if not ok(u):
                continue
            if type(s) is RAbs:
                d = self.check(u.body, s.body)
                if d is None:
                    continue
                return MashupDerivation("abs", m, s, self._trace(m, u), (d,))
            if type(s) is RApp:
                d1 = self.check(u.fun, s.head)
                if d1 is None:
                    continue
                d2 = self.check(u.arg, s.bag)
                if d2 is None:
                    continue
                return MashupDerivation("app", m, s, self._trace(m, u), (d1, d2))
            return MashupDerivation("var", m, s, self._trace(m, u))
        return None

    def _trace(self, m: Term, u: Term) -> Trace:
        from .beta import search
        rep = search(m, lambda v: v == u, self.fuel, max_states=self.cap)
        assert rep.found is not None
        return rep.found


def mashup_check(m: Term, s, fuel: int,
                 state_cap: int = DEFAULT_STATE_CAP) -> Optional[MashupDerivation]:
    """A derivation of m ◃ s whose reduction premises each use at most
    ``fuel`` steps, or None when there is none within fuel."""
    return _Mashup(fuel, state_cap).check(m, s)


def _lift(prefix: tuple[str, ...], tr: Trace) -> list[tuple[str, ...]]:
    return [prefix + p for p in tr.positions()]


def _stitch(d: MashupDerivation) -> list[tuple[str, ...]]:
    """Positions of a reduction from d.term to the lambda term whose
    canonical approximant is d.target."""
    out = list(d.trace.positions())
    if d.rule == "abs":
        out += [("B",) + p for p in _stitch(d.premises[0])]
    elif d.rule == "app":
        out += [("F",) + p for p in _stitch(d.premises[0])]
        bag_d = d.premises[1]
        if len(bag_d.premises) != 1:
            raise ValueError("canonical approximants have singleton bags")
        out += [("A",) + p for p in _stitch(bag_d.premises[0])]
    return out


def extract_reduction(m: Term, n: Term, fuel: int,
                      state_cap: int = DEFAULT_STATE_CAP) -> Optional[Trace]:
    """A trace m ->* n built from a mashup derivation of m ◃ ⌈n⌉."""
    d = mashup_check(m, canonical_approximant(n), fuel, state_cap)
    if d is None:
        return None
    tr = replay(m, _stitch(d))
    if tr.end != n:
        raise AssertionError("extracted trace misses its target")
    return tr


# ---------------------------------------------------------------------------
# commutation of normalization with Taylor expansion

def _preimage_bound(depths: Sequence[int], size: int) -> int:
    for d in reversed(depths):
        size = 2 * size + 2 if d == 0 else 4 * size
    return size


def certified_size(depths: Sequence[int], size_bound: int) -> int:
    """Largest result size whose every preimage along a trace firing redexes
    of the given depths fits in ``size_bound`` (-1 if none)."""
    k = -1
    while _preimage_bound(depths, k + 1) <= size_bound:
        k += 1
        if k > size_bound:
            break
    return k


@dataclass
class CommutationReport:
    status: str                        # ok | exhausted
    term: Term
    normal_form: Optional[Term] = None
    steps: int = 0
    certified_size: int = -1
    certified: list = field(default_factory=list)   # (term, coefficient)
    agree: bool = False
    stable: bool = False
    outside: dict = field(default_factory=dict)     # informative only

    def to_json(self) -> dict:
        from .resource import print_rterm
        from .syntax import print_term
        return {
            "status": self.status,
            "normal_form": None if self.normal_form is None else print_term(self.normal_form),
            "steps": self.steps,
            "certified_size": self.certified_size,
            "certified": [{"term": print_rterm(t), "coeff": str(c)} for t, c in self.certified],
            "agree": self.agree,
            "stable": self.stable,
            "outside_region": self.outside,
        }


def _region_compare(m: Term, nf: Term, size_bound: int, k: int, sr: Semiring):
    T = taylor_truncated(m, size_bound, sr)
    lhs = normalize_sum(T.sum)
    if COEFF_MUTATION is not None:
        lhs = COEFF_MUTATION(lhs)
    rhs = taylor_truncated(nf, size_bound, sr).sum
    inside = lambda t: rsize(t) <= k
    return lhs.filter(inside), rhs.filter(inside), lhs, rhs


def commutation_check(m: Term, size_bound: int, fuel: int,
                      sr: Semiring = RAT) -> CommutationReport:
    tr = normalize(m, fuel)
    if tr.exhausted:
        return CommutationReport("exhausted", m, steps=len(tr))
    nf = tr.end
    depths = [s.redex.depth for s in tr.steps]
    k = certified_size(depths, size_bound)
    l_in, r_in, lhs, rhs = _region_compare(m, nf, size_bound, k, sr)
    agree = l_in == r_in
    # the same region must come out identical from a larger truncation
    l2, r2, _, _ = _region_compare(m, nf, size_bound + 2, k, sr)
    stable = agree and l2 == l_in and r2 == r_in
    outside = {"lhs_only": len(lhs.support() - rhs.support()),
               "rhs_only": len(rhs.support() - lhs.support())}
    return CommutationReport("ok", m, nf, len(tr), k, r_in.items(), agree, stable, outside)


# ---------------------------------------------------------------------------
# stratified evidence

class MalformedEvidence(ValueError):
    pass


@dataclass
class Stage:
    sums: list[RSum]                   # U_d = sums[0] -> ... -> sums[-1] = U_{d+1}
    witnesses: list[BundleWitness]


@dataclass
class StratifiedEvidence:
    stages: list[Stage]
    target: RSum
    size_bound: int

    @property
    def depth(self) -> int:
        return len(self.stages)

    def stage_sums(self) -> list[RSum]:
        if not self.stages:
            return []
        return [st.sums[0] for st in self.stages] + [self.stages[-1].sums[-1]]


@dataclass
class StratifiedVerdict:
    ok: bool
    verified_to_stage: int
    failures: list[str]


def verify_stratified(e: StratifiedEvidence) -> StratifiedVerdict:
    """Check the recorded prefix: stage d fires bundles of depth >= d only,
    each bundle carries its source to the next sum on the certified region,
    and every stage sum agrees with the target strictly below depth d."""
    failures: list[str] = []
    for d, st in enumerate(e.stages):
        if len(st.sums) != len(st.witnesses) + 1:
            raise MalformedEvidence(f"stage {d}: sums and witnesses do not line up")
        if not self_coherent(st.sums[0]):
            failures.append(f"stage {d}: source sum is not uniform")
        for j, w in enumerate(st.witnesses):
            src, dst = st.sums[j], st.sums[j + 1]
            if set(w.mapping) != src.support():
                raise MalformedEvidence(f"stage {d}, bundle {j}: witness domain "
                                        "differs from the support")
            if w.redex.depth < d:
                failures.append(f"stage {d}, bundle {j}: depth {w.redex.depth} < {d}")
            pushed = w.pushed(src)
            if pushed.filter(w.certified) != dst.filter(w.certified):
                failures.append(f"stage {d}, bundle {j}: pushed sum differs")
        if restrict_below_depth(st.sums[0], d) != restrict_below_depth(e.target, d):
            failures.append(f"stage {d}: differs from the target below depth {d}")
    D = len(e.stages)
    sums = e.stage_sums()
    if sums and restrict_below_depth(sums[-1], D) != restrict_below_depth(e.target, D):
        failures.append(f"stage {D}: differs from the target below depth {D}")
    return StratifiedVerdict(not failures, D, failures)


def evidence_from_trace(stages: Sequence[Sequence[Sequence[str]]], start: Term,
                        target, size_bound: int, sr: Semiring = RAT
                        ) -> StratifiedEvidence:
    """Simulate a staged beta-trace (stage d lists the positions fired at
    stage d) on truncated expansions."""
    from .taylor import bundle_beta_step
    m = start
    T = taylor_truncated(m, size_bound, sr)
    out = []
    for positions in stages:
        sums, ws = [T.sum], []
        for p in positions:
            m, T, w = bundle_beta_step(m, p, T)
            sums.append(T.sum)
            ws.append(w)
        out.append(Stage(sums, ws))
    V = taylor_truncated(target, size_bound, sr).sum
    return StratifiedEvidence(out, V, size_bound)
