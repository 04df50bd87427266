"""Compare nf(T(M)) with T(nf(M)) over the fixed corpus, at the corpus size
bound and a few larger ones.

    python3 scripts/commutation_corpus.py --extra 2
"""

import argparse

from taylorlam.acceptance import COMMUTATION_CORPUS
from taylorlam.conservativity import commutation_check
from taylorlam.semiring import SEMIRINGS
from taylorlam.syntax import parse_term


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--extra", type=int, default=0, help="also try K+2, K+4, ... up to K+extra")
    ap.add_argument("--fuel", type=int, default=50)
    ap.add_argument("--semiring", choices=sorted(SEMIRINGS), default="rat")
    a = ap.parse_args()
    sr = SEMIRINGS[a.semiring]

    print(f"{'term':<28} {'K':>3} {'steps':>5} {'k':>3} {'cert':>5} agree stable")
    for text, K in COMMUTATION_CORPUS:
        for bound in range(K, K + a.extra + 1, 2):
            r = commutation_check(parse_term(text), bound, a.fuel, sr)
            print(f"{text:<28} {bound:>3} {r.steps:>5} {r.certified_size:>3} "
                  f"{len(r.certified):>5} {str(r.agree):<5} {r.stable}")


if __name__ == "__main__":
    main()
