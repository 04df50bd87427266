"""The resource lambda calculus.

Resource terms are nameless like ``syntax`` terms: ``RVar`` holds a de
Bruijn index, ``RFree`` a free name. Arguments are bags (finite multisets)
kept sorted under a fixed structural order, so equal multisets are equal
tuples. Formal sums map terms (or bags) to nonzero semiring coefficients.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .semiring import RAT, Semiring

__all__ = [
    "RTerm", "RVar", "RFree", "RAbs", "RApp", "Bag", "EMPTY", "RSum",
    "rlam", "rapp", "bag", "parse_resource", "parse_rterm", "print_rterm",
    "msubst", "msubst_bound", "msubst_literal", "resource_step",
    "enumerate_rredexes", "normalize_term", "normalize_sum", "sum_step",
    "rsize", "rdepth", "metrics", "restrict_below_depth", "occurrences",
    "NotAResourceRedex",
]


class RTerm:
    __slots__ = ()

    def __lt__(self, other: "RTerm") -> bool:
        return self._key < other._key


@dataclass(frozen=True, slots=True, eq=False)
class RVar(RTerm):
    index: int
    _key: tuple = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        k = (0, self.index)
        object.__setattr__(self, "_key", k)
        object.__setattr__(self, "_hash", hash(k))

    def __eq__(self, other):
        return type(other) is RVar and other.index == self.index

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class RFree(RTerm):
    name: str
    _key: tuple = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        k = (1, self.name)
        object.__setattr__(self, "_key", k)
        object.__setattr__(self, "_hash", hash(k))

    def __eq__(self, other):
        return type(other) is RFree and other.name == self.name

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class RAbs(RTerm):
    body: RTerm
    name: str = "x"
    _key: tuple = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        k = (2, self.body._key)
        object.__setattr__(self, "_key", k)
        object.__setattr__(self, "_hash", hash(k))

    def __eq__(self, other):
        return type(other) is RAbs and (self is other or (
            self._hash == other._hash and self._key == other._key))

    def __hash__(self):
        return self._hash


class Bag:
    """A finite multiset of resource terms, stored sorted."""

    __slots__ = ("items", "_key", "_hash")

    def __init__(self, items: Iterable[RTerm] = ()):
        self.items: tuple[RTerm, ...] = tuple(sorted(items, key=lambda t: t._key))
        self._key = tuple(t._key for t in self.items)
        self._hash = hash(("bag", self._key))

    def __eq__(self, other):
        return type(other) is Bag and self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Bag") -> bool:
        return self._key < other._key

    def __len__(self):
        return len(self.items)

    def __iter__(self) -> Iterator[RTerm]:
        return iter(self.items)

    def __getitem__(self, i: int) -> RTerm:
        return self.items[i]

    def __repr__(self):
        return f"Bag({list(self.items)!r})"

    def counts(self) -> list[tuple[RTerm, int]]:
        return [(t, len(list(g))) for t, g in itertools.groupby(self.items)]

    def replace(self, i: int, t: RTerm) -> "Bag":
        return Bag(self.items[:i] + (t,) + self.items[i + 1:])

    def union(self, other: "Bag") -> "Bag":
        return Bag(self.items + other.items)


EMPTY = Bag()


@dataclass(frozen=True, slots=True, eq=False)
class RApp(RTerm):
    head: RTerm
    bag: Bag
    _key: tuple = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        k = (3, self.head._key, self.bag._key)
        object.__setattr__(self, "_key", k)
        object.__setattr__(self, "_hash", hash(k))

    def __eq__(self, other):
        return type(other) is RApp and (self is other or (
            self._hash == other._hash and self._key == other._key))

    def __hash__(self):
        return self._hash


Element = Union[RTerm, Bag]


# ---------------------------------------------------------------------------
# construction

def _abstract(t: RTerm, name: str, level: int) -> RTerm:
    tp = type(t)
    if tp is RFree:
        return RVar(level) if t.name == name else t
    if tp is RAbs:
        return RAbs(_abstract(t.body, name, level + 1), t.name)
    if tp is RApp:
        return RApp(_abstract(t.head, name, level),
                    Bag(_abstract(u, name, level) for u in t.bag))
    return t


def rlam(name: str, body: RTerm) -> RAbs:
    return RAbs(_abstract(body, name, 0), name)


def rapp(head: RTerm, *elems: RTerm) -> RApp:
    return RApp(head, Bag(elems))


def bag(*elems: RTerm) -> Bag:
    return Bag(elems)


def rshift(t: RTerm, by: int, cutoff: int = 0) -> RTerm:
    if by == 0:
        return t
    tp = type(t)
    if tp is RVar:
        return RVar(t.index + by) if t.index >= cutoff else t
    if tp is RAbs:
        return RAbs(rshift(t.body, by, cutoff + 1), t.name)
    if tp is RApp:
        return RApp(rshift(t.head, by, cutoff),
                    Bag(rshift(u, by, cutoff) for u in t.bag))
    return t


# ---------------------------------------------------------------------------
# metrics

def rsize(t: Element) -> int:
    if type(t) is Bag:
        return sum(rsize(u) for u in t)
    tp = type(t)
    if tp is RAbs:
        return 1 + rsize(t.body)
    if tp is RApp:
        return 1 + rsize(t.head) + rsize(t.bag)
    return 1


def rdepth(t: Element) -> int:
    """Applicative depth; an empty bag has depth 0."""
    if type(t) is Bag:
        return max((rdepth(u) for u in t), default=0)
    tp = type(t)
    if tp is RAbs:
        return rdepth(t.body)
    if tp is RApp:
        return max(rdepth(t.head), 1 + rdepth(t.bag))
    return 0


def metrics(t: Element) -> tuple[int, int]:
    return rsize(t), rdepth(t)


def free_rvars(t: Element) -> set[str]:
    out: set[str] = set()

    def go(u):
        tp = type(u)
        if tp is RFree:
            out.add(u.name)
        elif tp is RAbs:
            go(u.body)
        elif tp is RApp:
            go(u.head)
            for e in u.bag:
                go(e)
        elif tp is Bag:
            for e in u:
                go(e)

    go(t)
    return out


# ---------------------------------------------------------------------------
# formal sums

class RSum:
    """Finite-support linear combination; zero coefficients are never stored."""

    __slots__ = ("sr", "terms")

    def __init__(self, terms: Optional[dict] = None, sr: Semiring = RAT):
        self.sr = sr
        self.terms: dict = {}
        if terms:
            for t, c in terms.items():
                if not sr.is_zero(c):
                    self.terms[t] = c

    @classmethod
    def zero(cls, sr: Semiring = RAT) -> "RSum":
        return cls(None, sr)

    @classmethod
    def single(cls, t: Element, c=None, sr: Semiring = RAT) -> "RSum":
        return cls({t: sr.one if c is None else c}, sr)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Element, object]],
                   sr: Semiring = RAT) -> "RSum":
        acc: dict = {}
        for t, c in pairs:
            acc[t] = sr.add(acc[t], c) if t in acc else c
        return cls(acc, sr)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, RSum) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "RSum") -> "RSum":
        out = dict(self.terms)
        add = self.sr.add
        for t, c in other.terms.items():
            out[t] = add(out[t], c) if t in out else c
        return RSum(out, self.sr)

    def scale(self, c) -> "RSum":
        mul = self.sr.mul
        return RSum({t: mul(c, d) for t, d in self.terms.items()}, self.sr)

    def coeff(self, t: Element):
        return self.terms.get(t, self.sr.zero)

    def support(self) -> set:
        return set(self.terms)

    def mass(self):
        return self.sr.sum(self.terms.values())

    def items(self) -> list[tuple[Element, object]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0]._key)

    def map_terms(self, f: Callable[[Element], Element]) -> "RSum":
        return RSum.from_pairs(((f(t), c) for t, c in self.terms.items()), self.sr)

    def bind(self, f: Callable[[Element], "RSum"]) -> "RSum":
        """Linear extension of ``f`` to the sum."""
        acc: dict = {}
        add, mul = self.sr.add, self.sr.mul
        for t, c in self.terms.items():
            for u, d in f(t).terms.items():
                v = mul(c, d)
                acc[u] = add(acc[u], v) if u in acc else v
        return RSum(acc, self.sr)

    def filter(self, keep: Callable[[Element], bool]) -> "RSum":
        return RSum({t: c for t, c in self.terms.items() if keep(t)}, self.sr)

    def convert(self, sr: Semiring, conv: Callable) -> "RSum":
        return RSum({t: conv(c) for t, c in self.terms.items()}, sr)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{self.sr.fmt(c)}*{print_rterm(t)}" for t, c in self.items())

    def __repr__(self):
        return f"RSum({self})"


def restrict_below_depth(s: RSum, d: int) -> RSum:
    """Keep the support elements of depth < d."""
    return s.filter(lambda t: rdepth(t) < d)


# ---------------------------------------------------------------------------
# printing and parsing

def _fresh(hint: str, taken) -> str:
    name = hint
    while name in taken:
        name += "'"
    return name


def print_rterm(t: Element) -> str:
    taken = set(free_rvars(t))
    return _print(t, [], taken)


def _print(t: Element, env: list[str], taken: set[str]) -> str:
    tp = type(t)
    if tp is Bag:
        if not t.items:
            return "1"
        return "[" + ",".join(_print(u, env, taken) for u in t) + "]"
    if tp is RVar:
        return env[len(env) - 1 - t.index] if t.index < len(env) else f"#{t.index}"
    if tp is RFree:
        return t.name
    if tp is RAbs:
        name = _fresh(t.name, taken | set(env))
        return f"\\{name}." + _print(t.body, env + [name], taken)
    return f"({_print(t.head, env, taken)})" + _print(t.bag, env, taken)


class ResourceParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


_RTOKEN = re.compile(r"\s*(?:(?P<lam>\\|λ)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
                     r"|(?P<one>1)|(?P<sym>[().\[\],]))")


def _rtokenize(text: str) -> list[tuple[str, str, int]]:
    out, i = [], 0
    text = text.rstrip()
    while i < len(text):
        m = _RTOKEN.match(text, i)
        if not m or m.end() == i:
            raise ResourceParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        i = m.end()
    out.append(("eof", "", len(text)))
    return out


class _RParser:
    def __init__(self, text: str):
        self.toks = _rtokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, v: str):
        tok = self.take()
        if tok[1] != v:
            raise ResourceParseError(f"expected {v!r}, found {tok[1] or 'end'!r}", tok[2])

    def element(self, env: list[str]) -> Element:
        kind, v, pos = self.peek()
        if v == "[" or kind == "one":
            return self.bag(env)
        return self.term(env)

    def term(self, env: list[str]) -> RTerm:
        kind, v, pos = self.take()
        if kind == "lam":
            k2, name, p2 = self.take()
            if k2 != "ident":
                raise ResourceParseError("expected a binder name", p2)
            self.expect(".")
            return RAbs(self.term(env + [name]), name)
        if kind == "ident":
            for depth, n in enumerate(reversed(env)):
                if n == v:
                    return RVar(depth)
            return RFree(v)
        if v == "(":
            head = self.term(env)
            self.expect(")")
            return RApp(head, self.bag(env))
        raise ResourceParseError(f"unexpected token {v or 'end'!r}", pos)

    def bag(self, env: list[str]) -> Bag:
        kind, v, pos = self.take()
        if kind == "one":
            return EMPTY
        if v != "[":
            raise ResourceParseError("expected a bag", pos)
        items = [self.term(env)]
        while self.peek()[1] == ",":
            self.take()
            items.append(self.term(env))
        self.expect("]")
        return Bag(items)

    def done(self):
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ResourceParseError(f"trailing input {v!r}", pos)


def parse_resource(text: str) -> Element:
    """Parse a resource term or a bag (``1`` or ``[t, ...]``)."""
    p = _RParser(text)
    out = p.element([])
    p.done()
    return out


def parse_rterm(text: str) -> RTerm:
    p = _RParser(text)
    out = p.term([])
    p.done()
    return out


# ---------------------------------------------------------------------------
# multilinear substitution

def occurrences(t: Element, level: int = 0) -> int:
    """Occurrences of the bound variable at ``level``."""
    tp = type(t)
    if tp is RVar:
        return 1 if t.index == level else 0
    if tp is RAbs:
        return occurrences(t.body, level + 1)
    if tp is RApp:
        return occurrences(t.head, level) + occurrences(t.bag, level)
    if tp is Bag:
        return sum(occurrences(u, level) for u in t)
    return 0


def _plug(t: Element, level: int, fill: Iterator[RTerm]) -> Element:
    """Replace each occurrence of index ``level`` by the next filler (shifted
    under the binders crossed) and drop the binder at ``level``."""
    tp = type(t)
    if tp is RVar:
        if t.index == level:
            return rshift(next(fill), level)
        return RVar(t.index - 1) if t.index > level else t
    if tp is RAbs:
        return RAbs(_plug(t.body, level + 1, fill), t.name)
    if tp is RApp:
        head = _plug(t.head, level, fill)
        return RApp(head, Bag(_plug(u, level, fill) for u in t.bag))
    if tp is Bag:
        return Bag(_plug(u, level, fill) for u in t)
    return t


def _multiset_perms(counts: list[tuple[RTerm, int]]) -> Iterator[list[RTerm]]:
    """Distinct orderings of a multiset given as (element, multiplicity)."""
    n = sum(k for _, k in counts)
    if n == 0:
        yield []
        return
    for i, (t, k) in enumerate(counts):
        rest = counts[:i] + ([(t, k - 1)] if k > 1 else []) + counts[i + 1:]
        for tail in _multiset_perms(rest):
            yield [t] + tail


def msubst_bound(body: Element, b: Bag, sr: Semiring = RAT) -> RSum:
    """``body[b/x]`` where x is de Bruijn index 0 of ``body``.

    Each distinct assignment of bag elements to occurrences stands for
    ``prod k_i!`` bijections, ``k_i`` the multiplicities in the bag."""
    n = occurrences(body)
    if n != len(b):
        return RSum.zero(sr)
    counts = b.counts()
    weight = 1
    for _, k in counts:
        weight *= factorial(k)
    w = sr.from_int(weight)
    acc: dict = {}
    for perm in _multiset_perms(counts):
        u = _plug(body, 0, iter(perm))
        acc[u] = sr.add(acc[u], w) if u in acc else w
    return RSum(acc, sr)


def msubst_literal(body: Element, b: Bag, sr: Semiring = RAT) -> RSum:
    """Reference version: one addend per bijection, n! of them."""
    if occurrences(body) != len(b):
        return RSum.zero(sr)
    return RSum.from_pairs(((_plug(body, 0, iter(p)), sr.one)
                            for p in itertools.permutations(b.items)), sr)


def msubst(u: Element, x: str, b: Bag, sr: Semiring = RAT) -> RSum:
    """Multilinear substitution of the bag for the free variable ``x``."""
    if type(u) is Bag:
        body = Bag(_abstract(rshift(e, 1), x, 0) for e in u)
    else:
        body = _abstract(rshift(u, 1), x, 0)
    return msubst_bound(body, b, sr)


# ---------------------------------------------------------------------------
# reduction

class NotAResourceRedex(ValueError):
    pass


RPosition = tuple[str, ...]


def _sel_child(t: Element, sel: str) -> Element:
    if sel == "B" and type(t) is RAbs:
        return t.body
    if sel == "F" and type(t) is RApp:
        return t.head
    if sel.startswith("A") and type(t) is RApp:
        i = int(sel[1:])
        if 0 <= i < len(t.bag):
            return t.bag[i]
    raise NotAResourceRedex(f"invalid selector {sel!r}")


def rsubterm_at(t: RTerm, p: Sequence[str]) -> RTerm:
    for sel in p:
        t = _sel_child(t, sel)
    return t


def _replace_sum(t: RTerm, p: Sequence[str], repl: RSum) -> RSum:
    """Plug a sum into the one-hole context ``t`` at ``p``, linearly."""
    if not p:
        return repl
    sel, rest = p[0], p[1:]
    inner = _replace_sum(_sel_child(t, sel), rest, repl)
    if sel == "B":
        return inner.map_terms(lambda u: RAbs(u, t.name))
    if sel == "F":
        return inner.map_terms(lambda u: RApp(u, t.bag))
    i = int(sel[1:])
    return inner.map_terms(lambda u: RApp(t.head, t.bag.replace(i, u)))


def contract_r(redex: RTerm, sr: Semiring = RAT) -> RSum:
    if type(redex) is not RApp or type(redex.head) is not RAbs:
        raise NotAResourceRedex("not a resource redex")
    return msubst_bound(redex.head.body, redex.bag, sr)


def resource_step(s: RTerm, p: Sequence[str], sr: Semiring = RAT) -> RSum:
    p = tuple(p)
    return _replace_sum(s, p, contract_r(rsubterm_at(s, p), sr))


def enumerate_rredexes(t: RTerm) -> list[RPosition]:
    """Redex positions in pre-order (leftmost-outermost first)."""
    out: list[RPosition] = []

    def go(u, path):
        tp = type(u)
        if tp is RAbs:
            go(u.body, path + ("B",))
        elif tp is RApp:
            if type(u.head) is RAbs:
                out.append(path)
            go(u.head, path + ("F",))
            for i, e in enumerate(u.bag):
                go(e, path + (f"A{i}",))

    go(t, ())
    return out


def _lo(t: RTerm) -> Optional[RPosition]:
    tp = type(t)
    if tp is RAbs:
        r = _lo(t.body)
        return None if r is None else ("B",) + r
    if tp is RApp:
        if type(t.head) is RAbs:
            return ()
        r = _lo(t.head)
        if r is not None:
            return ("F",) + r
        for i, e in enumerate(t.bag):
            r = _lo(e)
            if r is not None:
                return (f"A{i}",) + r
    return None


def _li(t: RTerm) -> Optional[RPosition]:
    tp = type(t)
    if tp is RAbs:
        r = _li(t.body)
        return None if r is None else ("B",) + r
    if tp is RApp:
        r = _li(t.head)
        if r is not None:
            return ("F",) + r
        for i, e in enumerate(t.bag):
            r = _li(e)
            if r is not None:
                return (f"A{i}",) + r
        if type(t.head) is RAbs:
            return ()
    return None


_STRATEGIES = {"lo": _lo, "li": _li}
_NF_MEMO: dict = {}


def normalize_term(s: RTerm, strategy: str = "lo", sr: Semiring = RAT) -> RSum:
    """Normal form of ``s`` as a sum. Terminates since every step shrinks
    the term."""
    pick = _STRATEGIES[strategy]
    memo = _NF_MEMO.setdefault((strategy, sr.name), {})

    def nf(t: RTerm) -> RSum:
        if t in memo:
            return memo[t]
        p = pick(t)
        r = RSum.single(t, sr=sr) if p is None else resource_step(t, p, sr).bind(nf)
        memo[t] = r
        return r

    return nf(s)


def normalize_sum(S: RSum, strategy: str = "lo") -> RSum:
    return S.bind(lambda t: normalize_term(t, strategy, S.sr))


def sum_step(S: RSum, t: RTerm, p: Sequence[str]) -> RSum:
    """One pointwise step: reduce one support element, keep the others."""
    if t not in S.terms:
        raise KeyError("term not in the support")
    c = S.terms[t]
    rest = RSum({u: d for u, d in S.terms.items() if u != t}, S.sr)
    return rest + resource_step(t, p, S.sr).scale(c)


def resource_reducts(s: RTerm, sr: Semiring = RAT) -> set:
    """Every term occurring in some sum reachable from ``s`` by resource
    steps, ``s`` included. Coefficients never cancel in a positive semiring,
    so this is the union of the supports of one-step reducts, closed up."""
    seen = {s}
    todo = [s]
    while todo:
        t = todo.pop()
        for p in enumerate_rredexes(t):
            for u in resource_step(t, p, sr).terms:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
    return seen


def clear_memo() -> None:
    _NF_MEMO.clear()
