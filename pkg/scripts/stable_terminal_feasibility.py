"""How many paths a direct estimate of P(X_1 <= eps) needs for the driftless
stable subordinator of index 1/2.

With ``nu(dx) = x^(-3/2) dx`` the variable ``X_1`` has the Levy law and
``P(X_1 <= eps) = erfc(sqrt(pi / eps))`` in closed form.  The script prints
the exact probability, a Monte Carlo estimate, the paths required for a 10%
relative standard error, and the log-log slope of the exact ``-log P``.

    python3 scripts/stable_terminal_feasibility.py [--paths 100000]
"""

import argparse
import math

import numpy as np
from scipy import special as sps

from levy_smallball.catalog import StableSubordinatorDrift
from levy_smallball.simulate import SimulationConfig, sample_terminal, set_threads


def exact(eps: float) -> float:
    return float(sps.erfc(math.sqrt(math.pi / eps)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.3, 0.2, 0.1])
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    set_threads()

    t = StableSubordinatorDrift(0.5).triplet()
    x = sample_terminal(t, SimulationConfig(n_paths=args.paths, seed=args.seed), eps=min(args.eps))
    print(f"{'eps':>5} {'exact':>11} {'p_hat':>11} {'paths for 10% rse':>18}")
    logs = []
    for e in args.eps:
        p = exact(e)
        logs.append(-math.log(p))
        print(f"{e:5.2f} {p:11.4e} {np.mean(x <= e):11.4e} {100.0 * (1 - p) / p:18.3e}")
    slope = np.polyfit(np.log(args.eps), np.log(logs), 1)[0]
    print(f"slope of log(-log P) against log eps (exact): {slope:.4f}; target -1, magnitude {abs(slope):.4f}")


if __name__ == "__main__":
    main()
