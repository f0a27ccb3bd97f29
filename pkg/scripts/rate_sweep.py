"""Bracket exponents over eps = 2^-k and their log2-slopes for every config.

For each config the computed total ``N - Lambda_eps(u_eps) + Fbar`` is
tabulated next to the upper and lower exponents, with the local slope of
``log total`` against ``log(1/eps)``.

    python3 scripts/rate_sweep.py [--kmin 4] [--kmax 20] [--out sweep.csv]
"""

import argparse
import csv
import math
import sys
from pathlib import Path

from levy_smallball import NoRoot, load_triplet, theorem15

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="*", type=Path)
    ap.add_argument("--kmin", type=int, default=4)
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args(argv)
    paths = args.configs or sorted((ROOT / "configs").glob("*.json"))

    rows = []
    for path in paths:
        t = load_triplet(path)
        prev = None
        for k in range(args.kmin, args.kmax + 1):
            eps = 2.0**-k
            rep = theorem15(t, eps)
            if isinstance(rep, NoRoot):
                rows.append(dict(config=path.stem, k=k, eps=eps, note=f"no root: {rep.reason}"))
                continue
            total = rep.N + rep.esscher_cost + rep.fbar
            slope = math.log2(total / prev) if prev and total > 0 else float("nan")
            prev = total
            rows.append(
                dict(
                    config=path.stem, k=k, eps=eps, total=total, slope=slope,
                    upper=rep.upper_exponent, lower=rep.lower_exponent, dominant=rep.dominant, note="",
                )
            )

    cols = ["config", "k", "eps", "total", "slope", "upper", "lower", "dominant", "note"]
    stream = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(stream, cols, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        stream.close()


if __name__ == "__main__":
    main()
