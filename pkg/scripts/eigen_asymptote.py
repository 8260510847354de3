"""Eigenvalue diagnostics: lambda + gamma^2 - (2(n-m)+1) gamma, and the gap between the
action-relation eigenvalue and the recurrence oracle, over doubling gamma."""

import argparse

from prolate.eigensystem import eigenvalue_oracle, lambda_asymptotic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", default="0,0;0,2;1,3;2,5")
    ap.add_argument("--gammas", default="25,50,100,200,400")
    args = ap.parse_args()
    modes = [tuple(int(v) for v in s.split(",")) for s in args.modes.split(";")]
    gammas = [float(g) for g in args.gammas.split(",")]
    print(f"{'mode':>8} {'gamma':>7} {'lambda_oracle':>22} {'diagnostic':>12} {'|asym - oracle|':>16}")
    for m, n in modes:
        for g in gammas:
            lam = eigenvalue_oracle((m, n), g)
            diag = lam + g * g - (2 * (n - m) + 1) * g
            gap = abs(lambda_asymptotic((m, n), g) - lam)
            print(f"{str((m, n)):>8} {g:7.0f} {lam:22.12f} {diag:12.6f} {gap:16.8f}")


if __name__ == "__main__":
    main()
