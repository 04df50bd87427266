"""Command-line front end.

Every command prints one JSON object with sorted keys (or readable text with
``--pretty``). The exit code is 0 exactly when ``status`` is ``ok``; bad
flags or unparsable terms exit with 2, failed checks and semantic errors
with 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import accordion as acc
from .acceptance import DEFAULT_SEED, run_all
from .beta import NotARedex, reduce_with
from .conservativity import commutation_check, extract_reduction
from .kit import build
from .resource import (
    Bag, ResourceParseError, parse_resource, print_rterm, rdepth, rsize,
)
from .semiring import SEMIRINGS
from .syntax import (
    ParseError, RegularSystem, SystemDefinitionError, parse_position, parse_system, parse_term,
    print_term,
)
from .taylor import Derivation, coherent, simulation_agrees, taylor_truncated


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers

def read_term(text: str, allow_system: bool = False):
    """A term in the grammar, or ``@name[:param,...]`` for a built-in term
    such as ``@A`` or ``@Q_n:2``. Infinite built-ins (``@A*``) are only
    accepted where ``allow_system`` is set."""
    try:
        if text.startswith("@"):
            name, _, params = text[1:].partition(":")
            args = [p for p in params.split(",") if p] if params else []
            t = build(name, *args)
        else:
            t = parse_term(text)
    except (ParseError, KeyError, TypeError, ValueError) as e:
        raise UsageError(f"cannot read term {text!r}: {e}") from None
    if isinstance(t, RegularSystem) and not allow_system:
        raise UsageError(f"{text} is infinite; only the taylor command accepts it")
    return t


def read_source(text: str, system: bool):
    if not system:
        return read_term(text, allow_system=True)
    try:
        return parse_system(text.replace(";", "\n"))
    except (ParseError, SystemDefinitionError) as e:
        raise UsageError(f"cannot read system: {e}") from None


def read_resource(text: str):
    try:
        return parse_resource(text)
    except ResourceParseError as e:
        raise UsageError(f"cannot read resource term {text!r}: {e}") from None


def _derivation_json(d: Optional[Derivation]):
    if d is None:
        return None
    return {"rule": d.rule, "left": print_rterm(d.left), "right": print_rterm(d.right),
            "premises": [_derivation_json(p) for p in d.premises]}


# ---------------------------------------------------------------------------
# commands; each returns a report dict carrying a "status"

def cmd_reduce(a, sr):
    t = read_term(a.term)
    tr = reduce_with(t, a.strategy, a.fuel, a.min_depth)
    return {"status": "exhausted" if tr.exhausted else "ok", "steps": len(tr),
            "result": print_term(tr.end), "trace": tr.to_json()}


def cmd_taylor(a, sr):
    m = read_source(a.term, a.system)
    T = taylor_truncated(m, a.size_bound, sr, a.max_depth)
    rows = sorted(T.sum.terms.items(), key=lambda kv: (rsize(kv[0]), print_rterm(kv[0])))
    return {"status": "ok", "size_bound": a.size_bound, "semiring": sr.name,
            "terms": [{"coeff": sr.fmt(c), "term": print_rterm(t), "size": rsize(t),
                       "depth": rdepth(t)} for t, c in rows],
            "lines": [f"{sr.fmt(c)} {print_rterm(t)}" for t, c in rows]}


def cmd_coherent(a, sr):
    left, right = read_resource(a.left), read_resource(a.right)
    if (type(left) is Bag) != (type(right) is Bag):
        raise UsageError("compare two terms or two bags")
    r = coherent(left, right)
    return {"status": "ok", "coherent": r.verdict, "derivation": _derivation_json(r.derivation)}


def cmd_simulate(a, sr):
    m = read_term(a.term)
    try:
        p = parse_position(a.position)
    except ValueError as e:
        raise UsageError(str(e)) from None
    agree, region, w = simulation_agrees(m, p, a.size_bound, sr)
    from .beta import beta_step
    return {"status": "ok", "reduct": print_term(beta_step(m, p)), "agree": agree,
            "certified_region": region, "witness": w.to_json()}


def cmd_extract(a, sr):
    m, n = read_term(a.source), read_term(a.target)
    tr = extract_reduction(m, n, a.fuel, a.state_cap)
    if tr is None:
        return {"status": "not-found-within-fuel", "fuel": a.fuel}
    return {"status": "ok", "steps": len(tr), "trace": tr.to_json()}


def cmd_commute(a, sr):
    r = commutation_check(read_term(a.term), a.size, a.fuel, sr)
    return r.to_json()


def cmd_accordion(a, sr):
    if a.what == "trace":
        return acc.head_cycle_trace(a.n, a.fuel).to_json()
    if a.what == "approximant":
        return acc.approximant_path(a.d, a.fuel).to_json()
    if a.what == "nosearch":
        c = a.case
        if c in ("1", "2", "3", "4"):
            r = acc.depth_restricted_negative_search(int(c), a.n, a.budget, a.mode)
        elif c == "t1":
            r = acc.technique1_search(a.k, a.n, a.budget, a.mode)
        elif c == "t2":
            r = acc.technique2_search(a.k, a.n, a.budget, a.mode)
        else:
            r = acc.positive_control(a.budget, a.mode)
        out = r.to_json()
        out["result"] = out.pop("status")
        # a completed search is a successful run whatever it found
        out["status"] = "ok" if r.complete else "exhausted"
        return out
    rows = acc.layer_rigidity(a.max_total, a.size_bound, sr)
    return {"status": "ok", "size_bound": a.size_bound,
            "pairs": [{"d": d, "k": k, "layer_d": x, "layer_d_plus_k": y, "disjoint": ok}
                      for d, k, x, y, ok in rows],
            "disjoint": all(r[4] for r in rows)}


def cmd_selftest(a, sr):
    only = [int(x) for x in a.only.split(",")] if a.only else None
    results = run_all(sr, a.seed, a.mutate, only)
    failed = [r.number for r in results if r.passed is False]
    return {"status": "error" if failed else "ok", "semiring": sr.name, "seed": a.seed,
            "mutated": a.mutate, "failed": failed,
            "criteria": [r.to_json() for r in results],
            "_lines": [r.line() for r in results]}


# ---------------------------------------------------------------------------
# parser

def _globals(defaults: bool) -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    kw = (lambda v: {"default": v}) if defaults else (lambda v: {"default": argparse.SUPPRESS})
    g.add_argument("--semiring", choices=sorted(SEMIRINGS), **kw("rat"),
                   help="coefficient semiring (default rat)")
    g.add_argument("--pretty", action="store_true", **kw(False),
                   help="human-readable text instead of JSON")
    g.add_argument("--seed", type=int, **kw(DEFAULT_SEED),
                   help=f"seed for randomized suites (default {DEFAULT_SEED})")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _globals(False)
    ap = argparse.ArgumentParser(prog="taylorlam", parents=[_globals(True)],
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="reduce a lambda term")
    p.add_argument("term")
    p.add_argument("--strategy", choices=["head", "lo"], default="lo")
    p.add_argument("--fuel", type=int, default=100)
    p.add_argument("--min-depth", type=int, default=0)
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("taylor", parents=[common], help="truncated Taylor expansion")
    p.add_argument("term")
    p.add_argument("--size-bound", type=int, default=6)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--system", action="store_true",
                   help="read TERM as a regular system, equations separated by ';'")
    p.set_defaults(run=cmd_taylor)

    p = sub.add_parser("coherent", parents=[common], help="coherence of two resource terms")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(run=cmd_coherent)

    p = sub.add_parser("simulate", parents=[common], help="bundle simulation of one beta step")
    p.add_argument("term")
    p.add_argument("--position", default="", help="redex position such as F.A.B (root: empty)")
    p.add_argument("--size-bound", type=int, default=8)
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("extract", parents=[common], help="recover a reduction M ->* N")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--fuel", type=int, default=8)
    p.add_argument("--state-cap", type=int, default=20_000)
    p.set_defaults(run=cmd_extract)

    p = sub.add_parser("commute", parents=[common], help="nf(T(M)) against T(nf(M))")
    p.add_argument("term")
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--fuel", type=int, default=100)
    p.set_defaults(run=cmd_commute)

    p = sub.add_parser("accordion", parents=[common], help="Accordion experiments")
    asub = p.add_subparsers(dest="what", required=True)
    q = asub.add_parser("trace", parents=[common], help="head-reduction cycle at index n")
    q.add_argument("--n", type=int, default=0)
    q.add_argument("--fuel", type=int, default=500)
    q = asub.add_parser("approximant", parents=[common], help="A ->* A*_d")
    q.add_argument("--d", type=int, default=0)
    q.add_argument("--fuel", type=int, default=5000)
    q = asub.add_parser("nosearch", parents=[common], help="bounded negative search")
    q.add_argument("--case", choices=["1", "2", "3", "4", "t1", "t2", "control"], default="1")
    q.add_argument("--n", type=int, default=0)
    q.add_argument("--k", type=int, default=0)
    q.add_argument("--budget", type=int, default=10)
    q.add_argument("--mode", choices=["standard", "breadth-first"], default="standard")
    q = asub.add_parser("layers", parents=[common], help="Taylor layers of A*")
    q.add_argument("--max-total", type=int, default=3)
    q.add_argument("--size-bound", type=int, default=14)
    p.set_defaults(run=cmd_accordion)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", default="", help="comma-separated criterion numbers")
    p.add_argument("--mutate", action="store_true",
                   help="corrupt normalized coefficients (negative control)")
    p.set_defaults(run=cmd_selftest)
    return ap


def _pretty(report: dict) -> str:
    if "_lines" in report:
        return "\n".join(report["_lines"] + [f"status: {report['status']}"])
    if "lines" in report:
        return "\n".join(report["lines"])
    return json.dumps(report, sort_keys=True, indent=2)


def dispatch(argv: Sequence[str]) -> tuple[dict, int]:
    """Parse ``argv``, run the command and return (report, exit code).
    Raises SystemExit(2) on usage errors."""
    ap = build_parser()
    a = ap.parse_args(list(argv))
    sr = SEMIRINGS[a.semiring]
    try:
        report = a.run(a, sr)
    except UsageError as e:
        ap.exit(2, f"taylorlam: error: {e}\n")
    except (NotARedex, ValueError, KeyError, RecursionError) as e:
        report = {"status": "error", "error": f"{type(e).__name__}: {e}"}
    return report, 0 if report["status"] == "ok" else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report, code = dispatch(argv)
    pretty = "--pretty" in argv
    if pretty:
        print(_pretty(report))
    else:
        print(json.dumps({k: v for k, v in report.items() if not k.startswith("_")},
                         sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
