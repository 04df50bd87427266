"""Term generators: seeded random lambda terms and traces, and exhaustive
enumeration of small resource terms."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .beta import Trace, enumerate_redexes, replay
from .resource import Bag, RAbs, RApp, RFree, RTerm, RVar
from .syntax import Abs, App, Free, Term, Var, size

FREE_NAMES = ("x", "y")


def random_term(rng: random.Random, max_size: int, free: Sequence[str] = ("x", "y", "z"),
                redex_bias: float = 0.35) -> Term:
    """A random term with at most ``max_size`` nodes. With probability
    ``redex_bias`` an application node is built as a redex."""
    target = rng.randint(1, max_size)
    return _build(rng, target, 0, free, redex_bias)


def _build(rng, n, depth, free, bias) -> Term:
    if n <= 1:
        pool = [Free(f) for f in free] + [Var(i) for i in range(depth)]
        return rng.choice(pool)
    if n == 2:
        return Abs(_build(rng, 1, depth + 1, free, bias), rng.choice("xyzuvw"))
    if rng.random() < 0.35:
        return Abs(_build(rng, n - 1, depth + 1, free, bias), rng.choice("xyzuvw"))
    left = rng.randint(1, n - 2)
    right = n - 1 - left
    if rng.random() < bias and left >= 2:
        fun = Abs(_build(rng, left - 1, depth + 1, free, bias), rng.choice("xyzuvw"))
    else:
        fun = _build(rng, left, depth, free, bias)
    return App(fun, _build(rng, right, depth, free, bias))


def random_redex_term(rng: random.Random, max_size: int, tries: int = 1000) -> Term:
    """A random term with at least one redex."""
    for _ in range(tries):
        t = random_term(rng, max_size, redex_bias=0.7)
        if enumerate_redexes(t):
            return t
    raise RuntimeError("no redex term generated")


def random_trace(rng: random.Random, t: Term, max_len: int,
                 max_size: int = 60) -> Trace:
    """Fire up to ``max_len`` uniformly chosen redexes, stopping at normal
    forms or when the term grows beyond ``max_size``."""
    positions = []
    cur = t
    for _ in range(rng.randint(0, max_len)):
        rs = enumerate_redexes(cur)
        if not rs:
            break
        p = rng.choice(rs).position
        nxt = replay(cur, [p]).end
        if size(nxt) > max_size:
            break
        positions.append(p)
        cur = nxt
    return replay(t, positions)


# ---------------------------------------------------------------------------
# exhaustive resource terms

@lru_cache(maxsize=None)
def resource_terms(n: int, binders: int = 0, free: tuple[str, ...] = FREE_NAMES
                   ) -> tuple[RTerm, ...]:
    """Every resource term with exactly ``n`` nodes, under ``binders``
    enclosing abstractions, over the given free names."""
    if n <= 0:
        return ()
    if n == 1:
        return tuple([RFree(f) for f in free] + [RVar(i) for i in range(binders)])
    out: list[RTerm] = [RAbs(b) for b in resource_terms(n - 1, binders + 1, free)]
    for h in range(1, n):
        heads = resource_terms(h, binders, free)
        for b in bags(n - 1 - h, binders, free):
            out.extend(RApp(hd, b) for hd in heads)
    return tuple(out)


@lru_cache(maxsize=None)
def bags(n: int, binders: int = 0, free: tuple[str, ...] = FREE_NAMES) -> tuple[Bag, ...]:
    """Every bag whose elements total exactly ``n`` nodes."""
    return tuple(Bag(items) for items in _multisets(n, n, binders, free))


def _multisets(n: int, largest: int, binders: int, free) -> Iterator[tuple[RTerm, ...]]:
    # elements drawn in nonincreasing (size, index) order to avoid repeats
    if n == 0:
        yield ()
        return
    for s in range(min(n, largest), 0, -1):
        pool = resource_terms(s, binders, free)
        for i, t in enumerate(pool):
            for rest in _multisets_bounded(n - s, s, i, binders, free):
                yield (t,) + rest


def _multisets_bounded(n: int, size_cap: int, idx_cap: int, binders, free):
    if n == 0:
        yield ()
        return
    for s in range(min(n, size_cap), 0, -1):
        pool = resource_terms(s, binders, free)
        top = idx_cap if s == size_cap else len(pool) - 1
        for i in range(top + 1):
            for rest in _multisets_bounded(n - s, s, i, binders, free):
                yield (pool[i],) + rest


def all_resource_terms(max_size: int, free: tuple[str, ...] = FREE_NAMES) -> Iterator[RTerm]:
    for n in range(1, max_size + 1):
        yield from resource_terms(n, 0, free)


def random_beta_trace(rng: random.Random, max_size: int, max_len: int,
                      tries: int = 2000) -> Trace:
    """A random trace M ->* N with |M| <= max_size. The length is drawn first,
    uniformly in 1..max_len, then terms are sampled until one admits a
    random trace of that length."""
    want = rng.randint(1, max_len)
    best = None
    for _ in range(tries):
        t = random_term(rng, max_size, redex_bias=0.8)
        positions = []
        cur = t
        while len(positions) < want:
            rs = enumerate_redexes(cur)
            if not rs:
                break
            p = rng.choice(rs).position
            positions.append(p)
            cur = replay(cur, [p]).end
        tr = replay(t, positions)
        if len(tr) == want:
            return tr
        if best is None or len(tr) > len(best):
            best = tr
    return best
