"""Coefficient semirings: exact nonnegative rationals and booleans."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable


@dataclass(frozen=True)
class Semiring:
    name: str
    zero: Any
    one: Any
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    from_int: Callable[[int], Any]
    inv_int: Callable[[int], Any]       # the fraction 1/n, n > 0
    fmt: Callable[[Any], str]
    parse: Callable[[str], Any]

    def is_zero(self, c) -> bool:
        return c == self.zero

    def sum(self, cs) -> Any:
        acc = self.zero
        for c in cs:
            acc = self.add(acc, c)
        return acc

    def __repr__(self) -> str:
        return f"Semiring({self.name})"


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _parse_frac(s: str) -> Fraction:
    c = Fraction(s)
    if c < 0:
        raise ValueError("coefficients are nonnegative")
    return c


def _parse_bool(s: str) -> bool:
    if s in ("1", "true", "True"):
        return True
    if s in ("0", "false", "False"):
        return False
    raise ValueError(f"not a boolean coefficient: {s!r}")


RAT = Semiring("rat", Fraction(0), Fraction(1), operator.add, operator.mul,
               Fraction, lambda n: Fraction(1, n), _fmt_frac, _parse_frac)

BOOL = Semiring("bool", False, True, operator.or_, operator.and_,
                lambda n: n != 0, lambda n: True,
                lambda c: "1" if c else "0", _parse_bool)

SEMIRINGS = {"rat": RAT, "bool": BOOL}
