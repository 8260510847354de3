"""Max error against the series oracle per zone as gamma doubles.

Prints one row per (mode, gamma, zone, anchoring) with the max error and the
reduction factor relative to the previous gamma.
"""

import argparse

import numpy as np

from prolate.approx import Anchoring, Evaluator
from prolate.oracle import angular_series, radial_series


def zone_errors(mode, gamma, anchoring, points):
    ev = Evaluator(mode, gamma, anchoring=anchoring)
    d0 = ev.partition.delta0
    out = {}
    pc = 0.0
    for x in np.linspace(0.0, 1.0 - d0, points):
        r = ev.angular(float(x))
        pc = max(pc, abs(r.value - angular_series(mode, gamma, float(x)).value) / r.scale)
    out["pc"] = pc
    bi = 0.0
    for i in range(points // 2):
        x = 1.0 - d0 + d0 * i / (points // 2)
        ref = angular_series(mode, gamma, x).value
        bi = max(bi, abs(ev.angular(x).value - ref) / abs(ref))
    out["besselI"] = bi
    bj = 0.0
    for x in np.linspace(1.001, 1.3, points // 2):
        r = ev.radial(float(x))
        bj = max(bj, abs(r.value - radial_series(mode, gamma, float(x)).value) / r.scale)
    out["besselJ_pole"] = bj
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", default="0,0;0,2;1,3")
    ap.add_argument("--gammas", default="30,60,120")
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--anchoring", choices=("oracle", "asymptotic", "both"), default="both")
    args = ap.parse_args()
    modes = [tuple(int(v) for v in s.split(",")) for s in args.modes.split(";")]
    gammas = [float(g) for g in args.gammas.split(",")]
    anchors = [Anchoring.ORACLE, Anchoring.ASYMPTOTIC] if args.anchoring == "both" else [Anchoring(args.anchoring)]
    print(f"{'mode':>8} {'anchoring':>10} {'zone':>13} " + " ".join(f"{'g=' + str(g):>11}" for g in gammas) + "  factors")
    for mode in modes:
        for anchoring in anchors:
            table = [zone_errors(mode, g, anchoring, args.points) for g in gammas]
            for zone in table[0]:
                errs = [t[zone] for t in table]
                facs = [a / b for a, b in zip(errs, errs[1:])]
                print(f"{str(mode):>8} {anchoring.value:>10} {zone:>13} " + " ".join(f"{e:11.3e}" for e in errs)
                      + "  " + " ".join(f"{f:.2f}" for f in facs))


if __name__ == "__main__":
    main()
