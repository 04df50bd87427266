"""Lambda terms in locally nameless form, Krivine-style concrete syntax,
substitution, positions, and regular systems for 001-infinitary terms.

Bound variables are de Bruijn indices; free variables keep their names.
Binder names survive only as printing hints, so ``==`` on terms is
alpha-equivalence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence, Union

__all__ = [
    "Term", "Var", "Free", "Abs", "App", "Bottom", "Ref", "Hole", "BOTTOM",
    "ParseError", "SystemDefinitionError", "RegularSystem",
    "var", "lam", "app", "parse_term", "print_term", "alpha_eq",
    "substitute", "free_vars", "subst_bound", "shift",
    "size", "app_height", "subterm_at", "replace_at", "spine",
    "format_position", "parse_position", "position_depth",
    "parse_system", "truncate", "cut_below", "match",
]


class Term:
    """Base class. Subclasses cache their hash at construction."""

    __slots__ = ()


@dataclass(frozen=True, slots=True, eq=False)
class Var(Term):
    index: int
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("V", self.index)))

    def __eq__(self, other):
        return type(other) is Var and other.index == self.index

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class Free(Term):
    name: str
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("F", self.name)))

    def __eq__(self, other):
        return type(other) is Free and other.name == self.name

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class Abs(Term):
    body: Term
    name: str = "x"
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("L", self.body._hash)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Abs and other._hash == self._hash
                and other.body == self.body)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class App(Term):
    fun: Term
    arg: Term
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_hash", hash(("A", self.fun._hash, self.arg._hash)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is App and other._hash == self._hash
                and other.fun == self.fun and other.arg == self.arg)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class Bottom(Term):
    """Inert constant whose Taylor expansion is 0."""

    _hash: int = field(init=False, repr=False, default=0x5F7C5F)

    def __eq__(self, other):
        return type(other) is Bottom

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class Ref(Term):
    """Reference to an equation of a :class:`RegularSystem`."""

    name: str
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("R", self.name)))

    def __eq__(self, other):
        return type(other) is Ref and other.name == self.name

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False)
class Hole(Term):
    """Pattern metavariable; matches any subterm with no dangling index."""

    name: str
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("H", self.name)))

    def __eq__(self, other):
        return type(other) is Hole and other.name == self.name

    def __hash__(self):
        return self._hash


BOTTOM = Bottom()

_ATOMS = (Var, Free, Bottom, Ref, Hole)


# ---------------------------------------------------------------------------
# construction helpers

def var(name: str) -> Free:
    return Free(name)


def _abstract(t: Term, name: str, level: int) -> Term:
    tp = type(t)
    if tp is Free:
        return Var(level) if t.name == name else t
    if tp is Abs:
        return Abs(_abstract(t.body, name, level + 1), t.name)
    if tp is App:
        return App(_abstract(t.fun, name, level), _abstract(t.arg, name, level))
    return t


def lam(name: str, body: Term) -> Abs:
    """Bind the free occurrences of ``name`` in ``body``."""
    return Abs(_abstract(body, name, 0), name)


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ---------------------------------------------------------------------------
# de Bruijn machinery

def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    if by == 0:
        return t
    tp = type(t)
    if tp is Var:
        return Var(t.index + by) if t.index >= cutoff else t
    if tp is Abs:
        return Abs(shift(t.body, by, cutoff + 1), t.name)
    if tp is App:
        return App(shift(t.fun, by, cutoff), shift(t.arg, by, cutoff))
    return t


def _has_loose(t: Term, level: int = 0) -> bool:
    tp = type(t)
    if tp is Var:
        return t.index >= level
    if tp is Abs:
        return _has_loose(t.body, level + 1)
    if tp is App:
        return _has_loose(t.fun, level) or _has_loose(t.arg, level)
    return False


def subst_bound(body: Term, value: Term, level: int = 0) -> Term:
    """``body[level := value]`` with the binder at ``level`` removed.

    ``value`` lives in the context outside that binder.
    """
    tp = type(body)
    if tp is Var:
        i = body.index
        if i == level:
            return shift(value, level)
        if i > level:
            return Var(i - 1)
        return body
    if tp is Abs:
        return Abs(subst_bound(body.body, value, level + 1), body.name)
    if tp is App:
        return App(subst_bound(body.fun, value, level),
                   subst_bound(body.arg, value, level))
    return body


def substitute(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding ``m[n/x]`` for a free variable name ``x``."""

    def go(t: Term, level: int) -> Term:
        tp = type(t)
        if tp is Free:
            return shift(n, level) if t.name == x else t
        if tp is Abs:
            return Abs(go(t.body, level + 1), t.name)
        if tp is App:
            return App(go(t.fun, level), go(t.arg, level))
        return t

    return go(m, 0)


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        tp = type(u)
        if tp is Free:
            out.add(u.name)
        elif tp is Abs:
            stack.append(u.body)
        elif tp is App:
            stack.append(u.fun)
            stack.append(u.arg)
    return out


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


def size(t: Term) -> int:
    tp = type(t)
    if tp is Abs:
        return 1 + size(t.body)
    if tp is App:
        return 1 + size(t.fun) + size(t.arg)
    return 1


def app_height(t: Term) -> int:
    """Largest number of argument edges on a path from the root."""
    tp = type(t)
    if tp is Abs:
        return app_height(t.body)
    if tp is App:
        return max(app_height(t.fun), 1 + app_height(t.arg))
    return 0


# ---------------------------------------------------------------------------
# positions: tuples over "B" (body), "F" (function), "A" (argument)

def format_position(p: Sequence[str]) -> str:
    return ".".join(p)


def parse_position(s: str) -> tuple[str, ...]:
    s = s.strip()
    if not s:
        return ()
    parts = tuple(s.split("."))
    for q in parts:
        if q not in ("B", "F", "A"):
            raise ValueError(f"bad position selector {q!r}")
    return parts


def position_depth(p: Sequence[str]) -> int:
    return sum(1 for q in p if q.startswith("A"))


def subterm_at(t: Term, p: Sequence[str]) -> Term:
    for q in p:
        if q == "B" and type(t) is Abs:
            t = t.body
        elif q == "F" and type(t) is App:
            t = t.fun
        elif q == "A" and type(t) is App:
            t = t.arg
        else:
            raise ValueError(f"invalid position {format_position(p)!r}")
    return t


def replace_at(t: Term, p: Sequence[str], new: Term) -> Term:
    if not p:
        return new
    q, rest = p[0], p[1:]
    if q == "B" and type(t) is Abs:
        return Abs(replace_at(t.body, rest, new), t.name)
    if q == "F" and type(t) is App:
        return App(replace_at(t.fun, rest, new), t.arg)
    if q == "A" and type(t) is App:
        return App(t.fun, replace_at(t.arg, rest, new))
    raise ValueError(f"invalid position {format_position(p)!r}")


# ---------------------------------------------------------------------------
# concrete syntax

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<bot>_\|_|⊥)
  | (?P<lam>\\|λ)
  | (?P<hole>\?[A-Za-z_][A-Za-z0-9_']*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[().\[\],])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), i))
        i = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _TermParser:
    def __init__(self, text: str, refs: frozenset[str] = frozenset()):
        self.toks = _tokenize(text)
        self.i = 0
        self.refs = refs

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value or kind == "eof":
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def atom(self, env: list[str]) -> Term | None:
        kind, v, pos = self.peek()
        if kind == "ident":
            self.i += 1
            for k in range(len(env) - 1, -1, -1):
                if env[k] == v:
                    return Var(len(env) - 1 - k)
            return Ref(v) if v in self.refs else Free(v)
        if kind == "bot":
            self.i += 1
            return BOTTOM
        if kind == "hole":
            self.i += 1
            return Hole(v[1:])
        return None

    def term(self, env: list[str]) -> Term:
        kind, v, pos = self.peek()
        if kind == "lam":
            self.i += 1
            k2, name, p2 = self.take()
            if k2 != "ident":
                raise ParseError("expected binder name", p2)
            self.expect(".")
            body = self.term(env + [name])
            return Abs(body, name)
        if v == "(" and kind == "sym":
            self.i += 1
            head = self.term(env)
            self.expect(")")
            return self.args(head, env)
        a = self.atom(env)
        if a is None:
            raise ParseError(f"unexpected {v or 'end of input'!r}", pos)
        return a

    def args(self, head: Term, env: list[str]) -> Term:
        while True:
            a = self.atom(env)
            if a is not None:
                head = App(head, a)
                continue
            kind, v, _ = self.peek()
            if kind == "lam" or (kind == "sym" and v == "("):
                # a compound argument extends to the end of the context
                return App(head, self.term(env))
            return head

    def parse(self) -> Term:
        t = self.term([])
        kind, v, pos = self.peek()
        if kind != "eof":
            raise ParseError(
                f"unexpected {v!r} (application heads must be parenthesised)", pos)
        return t


def parse_term(text: str) -> Term:
    """Parse Krivine-style syntax: ``(M)N1 N2`` is ``((M)N1)N2`` and a
    compound argument such as ``(M)(N)P`` nests to the right."""
    return _TermParser(text).parse()


def _fresh(hint: str, taken) -> str:
    name = hint
    while name in taken:
        name += "'"
    return name


def print_term(t: Term) -> str:
    taken_free = free_vars(t) | _refs_in(t)
    return _print(t, [], taken_free)


def _refs_in(t: Term) -> set[str]:
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if type(u) is Ref:
            out.add(u.name)
        elif type(u) is Abs:
            stack.append(u.body)
        elif type(u) is App:
            stack.append(u.fun)
            stack.append(u.arg)
    return out


def _print_atom(t: Term, env: list[str]) -> str:
    tp = type(t)
    if tp is Var:
        if t.index >= len(env):
            return f"#{t.index}"
        return env[-1 - t.index]
    if tp is Free or tp is Ref:
        return t.name
    if tp is Hole:
        return "?" + t.name
    return "_|_"


def _print(t: Term, env: list[str], taken_free: set[str]) -> str:
    tp = type(t)
    if tp is Abs:
        name = _fresh(t.name, taken_free.union(env))
        return "\\" + name + "." + _print(t.body, env + [name], taken_free)
    if tp is App:
        head, args = spine(t)
        out = "(" + _print(head, env, taken_free) + ")"
        for i, a in enumerate(args):
            sep = "" if out.endswith(")") else " "
            if isinstance(a, _ATOMS):
                out += sep + _print_atom(a, env)
            elif i == len(args) - 1:
                out += sep + _print(a, env, taken_free)
            else:
                out = "(" + out + sep + _print(a, env, taken_free) + ")"
        return out
    return _print_atom(t, env)


# ---------------------------------------------------------------------------
# regular systems (finite presentations of 001-infinitary terms)

class SystemDefinitionError(ValueError):
    pass


@dataclass(frozen=True)
class RegularSystem:
    equations: Mapping[str, Term]
    root: str

    def __post_init__(self):
        object.__setattr__(self, "equations", dict(self.equations))
        self.check()

    def check(self) -> None:
        """Every Ref resolves and every cycle crosses an argument edge."""
        if self.root not in self.equations:
            raise SystemDefinitionError(f"root {self.root!r} has no equation")
        unguarded: dict[str, set[str]] = {}
        for name, body in self.equations.items():
            if _has_loose(body):
                raise SystemDefinitionError(f"equation {name!r} has a dangling index")
            edges: set[str] = set()
            for ref, guarded in _ref_edges(body):
                if ref not in self.equations:
                    raise SystemDefinitionError(f"unresolved reference {ref!r}")
                if not guarded:
                    edges.add(ref)
            unguarded[name] = edges
        # a cycle of unguarded edges is an infinite branch avoiding arguments
        state: dict[str, int] = {}

        def visit(n: str):
            state[n] = 1
            for m in unguarded[n]:
                if state.get(m) == 1:
                    raise SystemDefinitionError(
                        f"unguarded cycle through {m!r}: it never enters an argument")
                if m not in state:
                    visit(m)
            state[n] = 2

        for n in unguarded:
            if n not in state:
                visit(n)

    def resolve(self, t: Term) -> Term:
        while type(t) is Ref:
            t = self.equations[t.name]
        return t

    def root_term(self) -> Term:
        return self.resolve(Ref(self.root))

    def __hash__(self):
        return hash((self.root, tuple(sorted(self.equations.items(),
                                              key=lambda kv: kv[0]))))


def _ref_edges(t: Term, guarded: bool = False) -> Iterator[tuple[str, bool]]:
    tp = type(t)
    if tp is Ref:
        yield t.name, guarded
    elif tp is Abs:
        yield from _ref_edges(t.body, guarded)
    elif tp is App:
        yield from _ref_edges(t.fun, guarded)
        yield from _ref_edges(t.arg, True)


def parse_system(text: str) -> RegularSystem:
    """Parse ``name = term`` lines plus an ``@root name`` directive."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    root = None
    raw: dict[str, str] = {}
    for ln in lines:
        if ln.startswith("@root"):
            root = ln[len("@root"):].strip()
            continue
        if "=" not in ln:
            raise SystemDefinitionError(f"expected 'name = term', got {ln!r}")
        name, body = ln.split("=", 1)
        raw[name.strip()] = body
    if root is None:
        if not raw:
            raise SystemDefinitionError("empty system")
        root = next(iter(raw))
    names = frozenset(raw)
    eqs = {n: _TermParser(b, names).parse() for n, b in raw.items()}
    return RegularSystem(eqs, root)


def cut_below(t: Term, d: int, sys: RegularSystem | None = None) -> Term:
    """Keep nodes at applicative depth <= d; deeper arguments become Bottom."""

    def go(u: Term, depth: int) -> Term:
        if sys is not None:
            u = sys.resolve(u)
        tp = type(u)
        if tp is Abs:
            return Abs(go(u.body, depth), u.name)
        if tp is App:
            arg = BOTTOM if depth + 1 > d else go(u.arg, depth + 1)
            return App(go(u.fun, depth), arg)
        if tp is Ref:
            raise SystemDefinitionError(f"unresolved reference {u.name!r}")
        return u

    return go(t, 0)


def truncate(sys: Union[RegularSystem, Term], d: int) -> Term:
    if isinstance(sys, RegularSystem):
        return cut_below(sys.root_term(), d, sys)
    return cut_below(sys, d)


# ---------------------------------------------------------------------------
# pattern matching with holes

def match(pattern: Term, t: Term, binding: dict[str, Term] | None = None,
          level: int = 0) -> dict[str, Term] | None:
    """Alpha-aware matching; holes bind subterms without dangling indices.

    ``level`` counts binders enclosing both terms; a hole may not capture an
    index pointing at them either."""
    b = {} if binding is None else binding

    def go(p: Term, u: Term, level: int) -> bool:
        tp = type(p)
        if tp is Hole:
            if _min_loose(u) < level:
                return False
            u = shift(u, -level) if level else u
            if p.name in b:
                return b[p.name] == u
            b[p.name] = u
            return True
        if tp is Abs:
            return type(u) is Abs and go(p.body, u.body, level + 1)
        if tp is App:
            return (type(u) is App and go(p.fun, u.fun, level)
                    and go(p.arg, u.arg, level))
        return p == u

    return b if go(pattern, t, level) else None


def _min_loose(t: Term, level: int = 0) -> int:
    tp = type(t)
    if tp is Var:
        return t.index - level if t.index >= level else 1 << 30
    if tp is Abs:
        return _min_loose(t.body, level + 1)
    if tp is App:
        return min(_min_loose(t.fun, level), _min_loose(t.arg, level))
    return 1 << 30
