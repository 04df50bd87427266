"""Named terms: booleans, applicator, Church numerals, fixpoint, and the
Accordion family with its abbreviations."""

from __future__ import annotations

from functools import lru_cache

from .syntax import (
    RegularSystem, Ref, Term, app, lam, parse_term, substitute, var,
)

TT = parse_term(r"\x.\y.x")
FF = parse_term(r"\x.\y.y")
SUCC = parse_term(r"\n.\f.\x.((n)f)(f)x")
Y = parse_term(r"\f.(\x.(f)(x)x)\x.(f)(x)x")
DELTA = parse_term(r"\x.(x)x")
OMEGA = app(DELTA, DELTA)
ID = parse_term(r"\x.x")


def applicator(m: Term) -> Term:
    """The term that hands ``m`` to its argument: b ↦ (b)m."""
    return lam("b", app(var("b"), m))


APP_TT = applicator(TT)
APP_FF = applicator(FF)


def church(n: int) -> Term:
    body = var("x")
    for _ in range(n):
        body = app(var("f"), body)
    return lam("f", lam("x", body))


def power(f: Term, n: int, base: Term) -> Term:
    """``(f)^n base`` nesting on the right."""
    t = base
    for _ in range(n):
        t = app(f, t)
    return t


def succ_n(n: int) -> Term:
    """``(succ)^n ⌜0⌝``."""
    return power(SUCC, n, church(0))


def _fill(text: str, **terms: Term) -> Term:
    t = parse_term(text)
    for k, v in terms.items():
        t = substitute(t, k, v)
    return t


def q_open(phi: Term, n: Term) -> Term:
    """Q_{phi,n} = (Y) λψ.λb.((b)(phi)(succ)n)ψ."""
    return _fill(r"(Y)\psi.\b.((b)(PHI)(SUCC)N)psi", Y=Y, PHI=phi, SUCC=SUCC, N=n)


@lru_cache(maxsize=None)
def p_prime() -> Term:
    body = _fill(r"(ATT)((n)AFF)QPHI",
                 ATT=APP_TT, AFF=APP_FF, QPHI=q_open(var("phi"), var("n")))
    return lam("phi", lam("n", body))


@lru_cache(maxsize=None)
def p_accordion() -> Term:
    return app(Y, p_prime())


def _self_app(f: Term) -> Term:
    half = lam("x", app(f, app(var("x"), var("x"))))
    return app(half, half)


@lru_cache(maxsize=None)
def p_second() -> Term:
    """P'' = (λx.(P')(x)x) λx.(P')(x)x, the first head reduct of P."""
    return _self_app(p_prime())


@lru_cache(maxsize=None)
def q_n(n: int) -> Term:
    return q_open(p_second(), succ_n(n))


@lru_cache(maxsize=None)
def q1_n(n: int) -> Term:
    """Q'_n."""
    return _fill(r"\psi.\b.((b)(PS)N)psi", PS=p_second(), N=succ_n(n + 1))


@lru_cache(maxsize=None)
def q2_n(n: int) -> Term:
    """Q''_n."""
    return _self_app(q1_n(n))


@lru_cache(maxsize=None)
def accordion() -> Term:
    return app(p_accordion(), church(0))


def accordion_star() -> RegularSystem:
    """A* = (⟨tt⟩)X with X = (⟨ff⟩)X."""
    return RegularSystem({"Astar": app(APP_TT, Ref("X")),
                          "X": app(APP_FF, Ref("X"))}, "Astar")


def a_star_d(d: int, n: int | None = None) -> Term:
    """A*_d = (⟨tt⟩)(⟨ff⟩)^d Q_n, with n = d unless given."""
    return app(APP_TT, power(APP_FF, d, q_n(d if n is None else n)))


def build(name: str, *params) -> Term | RegularSystem:
    """Look up a named term; integer or term parameters as documented."""
    table = {
        "tt": lambda: TT, "ff": lambda: FF, "succ": lambda: SUCC, "Y": lambda: Y,
        "id": lambda: ID, "delta": lambda: DELTA, "omega": lambda: OMEGA,
        "church": lambda n: church(int(n)),
        "applicator": lambda m: applicator(_as_term(m)),
        "P": p_accordion, "P'": p_prime, "P''": p_second,
        "Q": lambda phi, n: q_open(_as_term(phi), _as_term(n)),
        "Q_n": lambda n: q_n(int(n)), "Q'_n": lambda n: q1_n(int(n)),
        "Q''_n": lambda n: q2_n(int(n)),
        "A": accordion, "A*": accordion_star,
        "A*_d": lambda d: a_star_d(int(d)),
        "succ^n": lambda n: succ_n(int(n)),
    }
    if name not in table:
        raise KeyError(f"unknown term {name!r}")
    return table[name](*params)


def _as_term(x) -> Term:
    if isinstance(x, Term):
        return x
    if isinstance(x, str):
        if x in ("tt", "ff", "succ", "Y", "id"):
            return build(x)
        return parse_term(x)
    raise TypeError(f"cannot use {x!r} as a term")
