"""Taylor expansion of lambda terms into sums of resource terms.

Coefficients are computed by recursion on the resource term, so regular
systems are unfolded only as far as the approximant reaches. Supports are
enumerated by walking the lambda term under a size budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Optional, Sequence, Union

from .beta import RedexInfo, beta_step, redex_info
from .resource import (
    EMPTY, Bag, RAbs, RApp, RFree, RSum, RTerm, RVar, contract_r, rsize,
)
from .semiring import RAT, Semiring
from .syntax import (
    Abs, App, Bottom, Free, Ref, RegularSystem, Term, Var, subterm_at,
)

Source = Union[Term, RegularSystem]


def _root(m: Source) -> tuple[Term, Optional[RegularSystem]]:
    if isinstance(m, RegularSystem):
        return m.root_term(), m
    return m, None


# ---------------------------------------------------------------------------
# coefficients

def taylor_coeff(m: Source, s: RTerm, sr: Semiring = RAT):
    t, sys = _root(m)
    return _coeff(t, s, sys, sr)


def _coeff(t: Term, s: RTerm, sys, sr: Semiring):
    if sys is not None and type(t) is Ref:
        t = sys.resolve(t)
    ts, tt = type(s), type(t)
    if ts is RVar:
        return sr.one if tt is Var and t.index == s.index else sr.zero
    if ts is RFree:
        return sr.one if tt is Free and t.name == s.name else sr.zero
    if ts is RAbs:
        return _coeff(t.body, s.body, sys, sr) if tt is Abs else sr.zero
    if ts is RApp and tt is App:
        c = _coeff(t.fun, s.head, sys, sr)
        for u, k in s.bag.counts():
            if sr.is_zero(c):
                return c
            cu = _coeff(t.arg, u, sys, sr)
            for _ in range(k):
                c = sr.mul(c, cu)
            c = sr.mul(c, sr.inv_int(factorial(k)))
        return c
    return sr.zero


# ---------------------------------------------------------------------------
# truncated expansions

@dataclass
class TruncatedExpansion:
    sum: RSum
    bound_kind: str            # "size"
    bound: int
    source: Source = field(repr=False, default=None)
    max_depth: Optional[int] = None

    def support(self) -> set:
        return self.sum.support()


def taylor_truncated(m: Source, size_bound: int, sr: Semiring = RAT,
                     max_depth: Optional[int] = None) -> TruncatedExpansion:
    """All approximants of size <= size_bound with their coefficients."""
    t, sys = _root(m)
    gen = _Enumerator(sys, sr)
    pairs = gen.run(t, size_bound)
    s = RSum(dict(pairs), sr)
    if max_depth is not None:
        from .resource import rdepth
        s = s.filter(lambda u: rdepth(u) <= max_depth)
    return TruncatedExpansion(s, "size", size_bound, m, max_depth)


class _Enumerator:
    def __init__(self, sys, sr: Semiring):
        self.sys = sys
        self.sr = sr
        self.memo: dict = {}

    def run(self, t: Term, budget: int) -> dict:
        """Map approximant -> coefficient over approximants of size <= budget."""
        if budget <= 0:
            return {}
        if self.sys is not None and type(t) is Ref:
            t = self.sys.resolve(t)
        key = (t, budget)
        if key in self.memo:
            return self.memo[key]
        tp = type(t)
        if tp is Var:
            out = {RVar(t.index): self.sr.one}
        elif tp is Free:
            out = {RFree(t.name): self.sr.one}
        elif tp is Abs:
            out = {RAbs(u, t.name): c for u, c in self.run(t.body, budget - 1).items()}
        elif tp is App:
            out = {}
            heads = self.run(t.fun, budget - 1)
            if heads:
                hmin = min(rsize(h) for h in heads)
                args = self.run(t.arg, budget - 1 - hmin)
                bags = _bags(args, budget - 1 - hmin, self.sr)
                for h, ch in heads.items():
                    room = budget - 1 - rsize(h)
                    for b, (bs, cb) in bags.items():
                        if bs <= room:
                            out[RApp(h, b)] = self.sr.mul(ch, cb)
        else:                         # Bottom has no approximant
            out = {}
        self.memo[key] = out
        return out


def _bags(elems: dict, room: int, sr: Semiring) -> dict:
    """Every bag of total size <= room drawn from ``elems``, with its
    coefficient prod c_i^k_i / k_i!; values are (size, coefficient)."""
    items = sorted(((u, c, rsize(u)) for u, c in elems.items()), key=lambda x: x[0]._key)
    out: dict = {}

    def go(i: int, left: int, acc: list, coeff):
        if i == len(items):
            out[Bag(acc)] = (room - left, coeff)
            return
        u, c, sz = items[i]
        go(i + 1, left, acc, coeff)
        k, cc, extra = 0, coeff, []
        while left - sz * (k + 1) >= 0:
            k += 1
            cc = sr.mul(cc, c)
            extra.append(u)
            go(i + 1, left - sz * k, acc + extra, sr.mul(cc, sr.inv_int(factorial(k))))

    go(0, room, [], sr.one)
    return out


# ---------------------------------------------------------------------------
# promotion

def promotion(S: RSum, degree_bound: int, size_bound: Optional[int] = None) -> RSum:
    """sum_{n <= degree_bound} (1/n!) [S]^n, expanded over ordered tuples.
    With ``size_bound`` only bags of total size <= size_bound are kept."""
    sr = S.sr
    support = [(u, c, rsize(u)) for u, c in S.items()]
    acc: dict = {}

    def tuples(n: int, room):
        if n == 0:
            yield ()
            return
        for item in support:
            if room is not None and item[2] > room:
                continue
            for rest in tuples(n - 1, None if room is None else room - item[2]):
                yield (item,) + rest

    for n in range(degree_bound + 1):
        w = sr.inv_int(factorial(n))
        for combo in tuples(n, size_bound):
            c = w
            for _, ci, _ in combo:
                c = sr.mul(c, ci)
            b = Bag(u for u, _, _ in combo)
            acc[b] = sr.add(acc[b], c) if b in acc else c
    return RSum(acc, sr)


def taylor_by_promotion(t: Term, size_bound: int, sr: Semiring = RAT) -> RSum:
    """Truncated expansion computed the slow way: T((M)N) = (T(M))T(N)^! with
    the promotion expanded literally. Finite terms only."""
    if size_bound <= 0:
        return RSum.zero(sr)
    tp = type(t)
    if tp is Var:
        return RSum.single(RVar(t.index), sr=sr)
    if tp is Free:
        return RSum.single(RFree(t.name), sr=sr)
    if tp is Abs:
        return taylor_by_promotion(t.body, size_bound - 1, sr).map_terms(
            lambda u: RAbs(u, t.name))
    if tp is App:
        heads = taylor_by_promotion(t.fun, size_bound - 1, sr)
        args = taylor_by_promotion(t.arg, size_bound - 1, sr)
        room = size_bound - 1
        bags = promotion(args, room, room)
        out: dict = {}
        for h, ch in heads.items():
            left = room - rsize(h)
            for b, cb in bags.items():
                if rsize(b) <= left:
                    key = RApp(h, b)
                    v = sr.mul(ch, cb)
                    out[key] = sr.add(out[key], v) if key in out else v
        return RSum(out, sr)
    return RSum.zero(sr)


# ---------------------------------------------------------------------------
# canonical approximants

def to_resource(t: Term) -> RTerm:
    """The approximant with singleton bags; defined on finite terms without
    Bottom."""
    return canonical_approximant(t)


def canonical_approximant(m: Source, d: Optional[int] = None) -> RTerm:
    t, sys = _root(m)
    if sys is not None and d is None:
        raise ValueError("an infinite term needs a depth")

    def go(u: Term, k: Optional[int]) -> RTerm:
        if sys is not None and type(u) is Ref:
            u = sys.resolve(u)
        tp = type(u)
        if tp is Var:
            return RVar(u.index)
        if tp is Free:
            return RFree(u.name)
        if tp is Abs:
            return RAbs(go(u.body, k), u.name)
        if tp is App:
            head = go(u.fun, k)
            if k == 0:
                return RApp(head, EMPTY)
            return RApp(head, Bag([go(u.arg, None if k is None else k - 1)]))
        raise ValueError("Bottom has no approximant")

    return go(t, d)


# ---------------------------------------------------------------------------
# coherence

@dataclass(frozen=True)
class Derivation:
    rule: str                          # var | abs | app | bag
    left: object
    right: object
    premises: tuple["Derivation", ...] = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


@dataclass(frozen=True)
class CoherencePair:
    left: object
    right: object
    verdict: bool
    derivation: Optional[Derivation]


@lru_cache(maxsize=200_000)
def _coh(a, b) -> Optional[Derivation]:
    ta, tb = type(a), type(b)
    if ta is Bag and tb is Bag:
        prem = []
        for u in dict.fromkeys(a.items):
            for v in dict.fromkeys(b.items):
                d = _coh(u, v)
                if d is None:
                    return None
                prem.append(d)
        return Derivation("bag", a, b, tuple(prem))
    if ta is not tb:
        return None
    if ta in (RVar, RFree):
        return Derivation("var", a, b) if a == b else None
    if ta is RAbs:
        d = _coh(a.body, b.body)
        return None if d is None else Derivation("abs", a, b, (d,))
    if ta is RApp:
        d1 = _coh(a.head, b.head)
        if d1 is None:
            return None
        d2 = _coh(a.bag, b.bag)
        return None if d2 is None else Derivation("app", a, b, (d1, d2))
    return None


def coherent(a, b) -> CoherencePair:
    d = _coh(a, b)
    return CoherencePair(a, b, d is not None, d)


def self_coherent(S: RSum) -> bool:
    supp = [t for t, _ in S.items()]
    return all(_coh(u, v) is not None
               for i, u in enumerate(supp) for v in supp[i:])


# ---------------------------------------------------------------------------
# uniform (bundle) simulation of a beta step

@dataclass
class BundleWitness:
    redex: RedexInfo
    mapping: dict                      # source approximant -> RSum
    certified_bound: int               # source size bound K

    def pushed(self, source: RSum) -> RSum:
        return source.bind(lambda s: self.mapping[s])

    def certified(self, t: RTerm) -> bool:
        return certified_preimage_bound(t, self.redex.depth) <= self.certified_bound

    def to_json(self) -> dict:
        from .beta import format_position
        from .resource import print_rterm
        return {
            "redex": format_position(self.redex.position),
            "entries": [
                {"source": print_rterm(s),
                 "targets": [{"term": print_rterm(u), "coeff": self_fmt(c)}
                             for u, c in v.items()]}
                for s, v in sorted(self.mapping.items(), key=lambda kv: kv[0]._key)
            ],
        }


def self_fmt(c) -> str:
    if isinstance(c, bool):
        return "1" if c else "0"
    return str(c)


def certified_preimage_bound(t: RTerm, depth: int) -> int:
    """Largest possible size of an approximant whose bundle reduct contains
    ``t``. Each fired copy (\\x.u)[b1..bn] loses 2+n nodes, its contractum
    keeps at least max(1, n) of them, and at depth 0 there is one copy."""
    n = rsize(t)
    return 2 * n + 2 if depth == 0 else 4 * n


def fire_copies(s: RTerm, p: Sequence[str], sr: Semiring = RAT) -> RSum:
    """Reduce every copy of the redex at lambda position ``p`` inside the
    approximant ``s``; copies fan out through every element of each bag."""
    if not p:
        return contract_r(s, sr)
    sel, rest = p[0], p[1:]
    if sel == "B":
        if type(s) is not RAbs:
            raise ValueError("approximant does not follow the term shape")
        return fire_copies(s.body, rest, sr).map_terms(lambda u: RAbs(u, s.name))
    if type(s) is not RApp:
        raise ValueError("approximant does not follow the term shape")
    if sel == "F":
        return fire_copies(s.head, rest, sr).map_terms(lambda u: RApp(u, s.bag))
    acc: dict = {(): sr.one}
    for e in s.bag:
        r = fire_copies(e, rest, sr)
        nxt: dict = {}
        for lst, c in acc.items():
            for u, d in r.terms.items():
                key = lst + (u,)
                v = sr.mul(c, d)
                nxt[key] = sr.add(nxt[key], v) if key in nxt else v
        acc = nxt
    return RSum.from_pairs(((RApp(s.head, Bag(lst)), c) for lst, c in acc.items()), sr)


def bundle_beta_step(m: Term, p: Sequence[str], T: TruncatedExpansion
                     ) -> tuple[Term, TruncatedExpansion, BundleWitness]:
    p = tuple(p)
    info = redex_info(m, p)
    n = beta_step(m, p)
    sr = T.sum.sr
    mapping = {s: fire_copies(s, p, sr) for s in T.sum.terms}
    return n, taylor_truncated(n, T.bound, sr), BundleWitness(info, mapping, T.bound)


def simulation_agrees(m: Term, p: Sequence[str], size_bound: int,
                      sr: Semiring = RAT) -> tuple[bool, int, BundleWitness]:
    """Compare the pushed sum with the truncated expansion of the reduct on
    the certified region; returns (agree, region size, witness)."""
    T = taylor_truncated(m, size_bound, sr)
    n, TN, w = bundle_beta_step(m, p, T)
    pushed = w.pushed(T.sum)
    lhs = pushed.filter(w.certified)
    rhs = TN.sum.filter(w.certified)
    region = len(lhs.support() | rhs.support())
    return lhs == rhs, region, w
