"""Head-reduction cycle of the Accordion and the approximant paths.

    python3 scripts/accordion_table.py --max-n 4 --max-d 3
"""

import argparse
import time

from taylorlam.accordion import approximant_path, head_cycle_trace


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--max-d", type=int, default=3)
    ap.add_argument("--fuel", type=int, default=5000)
    a = ap.parse_args()

    print(f"{'n':>3} {'steps':>6} {'checkpoints':>12} {'in order':>9}  head-redex rows")
    for n in range(a.max_n + 1):
        r = head_cycle_trace(n, a.fuel)
        js = r.to_json()
        print(f"{n:>3} {js['steps']:>6} {len(r.hits):>12} {str(r.checkpoints_in_order()):>9}  "
              f"{js['head_redex_rows']}")

    print()
    print(f"{'d':>3} {'steps':>6} {'offset':>7}  depth-0 step between marks  seconds")
    for d in range(a.max_d + 1):
        t0 = time.perf_counter()
        p = approximant_path(d, a.fuel)
        dt = time.perf_counter() - t0
        print(f"{d:>3} {len(p.trace):>6} {p.offset:>7}  {str(p.depth0_between):<27} {dt:7.2f}")


if __name__ == "__main__":
    main()
