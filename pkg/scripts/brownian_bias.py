"""Monte Carlo against the exact Brownian small-ball probability.

Compares bridge monitoring and plain grid monitoring over a few grid sizes,
which isolates the discretisation bias of the supremum.

    python3 scripts/brownian_bias.py [--paths 200000] [--eps 0.4 0.5 0.6]
"""

import argparse
import math
import time

from levy_smallball import LevyTriplet
from levy_smallball.simulate import SimulationConfig, brownian_small_ball_exact, estimate_small_ball, set_threads


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.4, 0.5, 0.6])
    ap.add_argument("--grids", type=int, nargs="+", default=[64, 512, 4096])
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    set_threads()

    bm = LevyTriplet((), 1.0, 0.0)
    print(f"{'eps':>5} {'grid':>6} {'monitor':>7} {'p_hat':>11} {'exact':>11} {'rel_err':>8} {'z':>6} {'sec':>6}")
    for eps in args.eps:
        exact = brownian_small_ball_exact(eps)
        for grid in args.grids:
            for bridge in (True, False):
                cfg = SimulationConfig(n_paths=args.paths, grid_n=grid, seed=args.seed, bridge=bridge)
                t0 = time.perf_counter()
                est = estimate_small_ball(bm, eps, cfg)
                dt = time.perf_counter() - t0
                z = (est.p_hat - exact) / est.stderr if est.stderr > 0 else math.inf
                print(
                    f"{eps:5.2f} {grid:6d} {'bridge' if bridge else 'grid':>7} {est.p_hat:11.4e} {exact:11.4e} "
                    f"{est.p_hat / exact - 1:8.4f} {z:6.2f} {dt:6.1f}"
                )
    e = 0.2
    print(f"-log P * 8 eps^2 / pi^2 at eps={e}: {-math.log(brownian_small_ball_exact(e)) * 8 * e * e / math.pi**2:.6f}")


if __name__ == "__main__":
    main()
