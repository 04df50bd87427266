"""Bounded searches for reductions that should not exist, plus the
positive control. Standard-reduction search is the default; plain
breadth-first search over all redexes is available for comparison but the
state space grows quickly with the budget.

    python3 scripts/negative_searches.py --budget 12
    python3 scripts/negative_searches.py --mode breadth-first --budget 4 --state-cap 20000
"""

import argparse
import time

from taylorlam.accordion import (
    depth_restricted_negative_search, positive_control, technique1_search,
    technique2_search,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=10)
    ap.add_argument("--max-n", type=int, default=1)
    ap.add_argument("--mode", choices=["standard", "breadth-first"], default="standard")
    ap.add_argument("--state-cap", type=int, default=200_000,
                    help="breadth-first only: give up after this many states")
    a = ap.parse_args()

    for n in range(a.max_n + 1):
        jobs = [(lambda c=c: depth_restricted_negative_search(c, n, a.budget, a.mode, a.state_cap))
                for c in (1, 2, 3, 4)]
        jobs += [(lambda k=k: technique1_search(k, n, a.budget, a.mode, a.state_cap)) for k in (0, 1)]
        jobs.append(lambda: technique2_search(0, n, a.budget, a.mode, a.state_cap))
        for job in jobs:
            show(job)
    show(lambda: positive_control(max(a.budget, 20), a.mode, a.state_cap))


def show(job) -> None:
    t0 = time.perf_counter()
    r = job()
    dt = time.perf_counter() - t0
    params = ",".join(f"{k}={v}" for k, v in sorted(r.params.items()))
    print(f"{r.name:<28} {params:<12} explored={r.explored:<8} {dt:7.2f}s  {r.status}",
          flush=True)


if __name__ == "__main__":
    main()
