"""Evidence for the q constant: with oracle-anchored c and d, the ratio c / (d q^(1/2))
tends to 1 at rate O(1/gamma) with the default q, while the alternative middle
factor leaves it near sqrt(2 gamma)."""

import argparse
import math

from prolate.approx import Evaluator, log_q


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", default="0,0;0,2;1,3;2,4")
    ap.add_argument("--gammas", default="30,60,120")
    args = ap.parse_args()
    modes = [tuple(int(v) for v in s.split(",")) for s in args.modes.split(";")]
    gammas = [float(g) for g in args.gammas.split(",")]
    print(f"{'mode':>8} {'gamma':>6} {'c/(d sqrt q)':>14} {'alt ratio':>12} {'sqrt(2 gamma)':>14}")
    for mode in modes:
        for g in gammas:
            ev = Evaluator(mode, g)
            ratio = ev.c / (ev.d * math.exp(0.5 * ev.log_q))
            alt = ev.c / (ev.d * math.exp(0.5 * log_q(g, ev.spectral, literal=True)))
            print(f"{str(mode):>8} {g:6.0f} {ratio:14.6f} {alt:12.4f} {math.sqrt(2 * g):14.4f}")


if __name__ == "__main__":
    main()
