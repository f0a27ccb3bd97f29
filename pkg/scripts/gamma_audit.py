"""Fitted small-eps exponent of P(X_1 <= eps) for the driftless Gamma process.

For shape ``b`` and scale ``a`` the fit is compared with ``b`` and ``b + 1``.

    python3 scripts/gamma_audit.py [--a 1.0] [--b 0.5 1 2 3.5]
"""

import argparse

from levy_smallball.catalog import fit_gamma_exponent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, nargs="+", default=[0.5, 1.0, 2.0, 3.5])
    args = ap.parse_args(argv)
    eps = [2.0**-k for k in range(10, 21)]
    print(f"{'b':>5} {'slope':>9} {'|slope-b|':>10} {'|slope-b-1|':>12}")
    for b in args.b:
        s = fit_gamma_exponent(args.a, b, eps)
        print(f"{b:5.2f} {s:9.5f} {abs(s - b):10.5f} {abs(s - b - 1):12.5f}")


if __name__ == "__main__":
    main()
