"""Command-line front end.

Subcommands: ``classify``, ``bounds``, ``rate``, ``simulate``, ``sweep`` and
``selftest``.  Exit codes: 0 on success, 1 on a domain error (no small
deviation property, no Esscher root, failed self-test), 2 on usage error.
CSV output has one header row and floats with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import catalog
from .bounds import doubling_check, theorem15
from .calculus import Variant, lemma52_bounds_check, tilted_integral
from .classify import classify
from .esscher import NoRoot, NumericalFailure, lambda_eps, lambda_eps_deriv, lambda_eps_increment, solve_esscher
from .model import LevyTriplet, TemperedPowerLaw, eval_rate, load_triplet, validate

BOUNDS_COLUMNS = ("eps", "N", "esscher_cost", "tilt", "fbar", "upper_exponent", "lower_exponent", "dominant", "tight")
SIM_COLUMNS = ("eps", "p_hat", "stderr", "n_paths", "delta", "small_jump_mode", "upper_one_sided")

_NO_ROOT_TEXT = {
    "subordinator": "driftless subordinator: Lambda_eps' > 0 everywhere, the infimum sits at u -> -inf "
    "(use `rate`, e.g. the Tauberian exponent, instead)",
    "neg_subordinator": "driftless negative subordinator: Lambda_eps' < 0 everywhere, the infimum sits at u -> +inf",
    "no_sdp": "no small deviation property: the effective drift points away from the side "
    "that has small jumps, so P(sup|X| <= eps) = 0 for small eps",
}


class UsageError(Exception):
    """Bad command-line input (exit code 2)."""


class DomainError(Exception):
    """Valid input outside the domain of the requested computation (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- eps grids


@dataclass(frozen=True)
class SweepSpec:
    """A strictly decreasing list of radii plus output selection."""

    eps_values: tuple
    outputs: tuple = BOUNDS_COLUMNS
    out_path: Optional[str] = None

    def __post_init__(self):
        e = self.eps_values
        if not e or any(not (x > 0.0 and math.isfinite(x)) for x in e):
            raise UsageError("eps values must be finite and > 0")
        if any(b >= a for a, b in zip(e, e[1:])):
            raise UsageError("eps values must be strictly decreasing")
        unknown = set(self.outputs) - set(BOUNDS_COLUMNS)
        if unknown:
            raise UsageError(f"unknown columns: {sorted(unknown)}")

    @classmethod
    def geometric(cls, start: float, stop: float, count: int, **kw) -> "SweepSpec":
        if count < 1:
            raise UsageError("count must be >= 1")
        if count == 1:
            return cls((float(start),), **kw)
        return cls(tuple(float(x) for x in np.geomspace(start, stop, count)), **kw)


def _eps_spec(args, outputs=BOUNDS_COLUMNS) -> SweepSpec:
    out = getattr(args, "out", None)
    if args.eps and args.eps_range:
        raise UsageError("give --eps or --eps-range, not both")
    if args.eps:
        vals = sorted({float(x) for x in args.eps}, reverse=True)
        return SweepSpec(tuple(vals), outputs, out)
    if args.eps_range:
        start, stop, count = args.eps_range
        return SweepSpec.geometric(float(start), float(stop), int(count), outputs=outputs, out_path=out)
    raise UsageError("one of --eps or --eps-range is required")


# --------------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(rows: Sequence[dict], columns: Sequence[str], out_path: Optional[str], stream) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    if out_path:
        Path(out_path).write_text(buf.getvalue())
    else:
        stream.write(buf.getvalue())


def _load(path: str) -> LevyTriplet:
    try:
        t = load_triplet(path)
    except FileNotFoundError:
        raise UsageError(f"no such config: {path}")
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid config {path}: {exc}")
    problems = validate(t)
    if problems:
        raise UsageError(f"invalid config {path}: " + "; ".join(problems))
    return t


def _no_root(r: NoRoot) -> DomainError:
    return DomainError(f"eps={_fmt(r.eps)}: no Esscher root ({r.reason}): {_NO_ROOT_TEXT.get(r.reason, r.message)}")


# ------------------------------------------------------------------ commands


def _cmd_classify(args, out) -> int:
    cls = classify(_load(args.config))
    out.write((cls.to_json() if args.json else cls.key_values()) + "\n")
    return 0


def _bound_rows(t: LevyTriplet, spec: SweepSpec) -> list[dict]:
    rows = []
    for eps in spec.eps_values:
        rep = theorem15(t, eps)
        if isinstance(rep, NoRoot):
            raise _no_root(rep)
        rows.append(rep.to_dict())
    return rows


def _cmd_bounds(args, out) -> int:
    t = _load(args.config)
    cols = tuple(args.columns.split(",")) if args.columns else BOUNDS_COLUMNS
    spec = _eps_spec(args, cols)
    _write_csv(_bound_rows(t, spec), spec.outputs, spec.out_path, out)
    return 0


_RATE_FLAGS = ("alpha", "mu", "C", "a", "b", "alpha1", "alpha2", "C1", "C2", "c", "lam1", "lam2", "gamma", "b_A", "sigma2")


def _cmd_rate(args, out) -> int:
    if args.family == "compound_poisson":
        if not args.config:
            raise UsageError("compound_poisson needs --config with a finite measure")
        fam = catalog.CompoundPoissonNoDrift(_load(args.config).components)
    else:
        cls = catalog.FAMILIES[args.family]
        names = {f.name for f in dataclasses.fields(cls)}
        given = {k: getattr(args, k) for k in _RATE_FLAGS if getattr(args, k) is not None}
        extra = sorted(set(given) - names)
        if extra:
            raise UsageError(f"family {args.family} takes no parameter(s) {extra}; valid: {sorted(names)}")
        try:
            fam = cls(**given)
        except TypeError as exc:
            raise UsageError(str(exc))
        except ValueError as exc:
            raise UsageError(f"invalid parameters: {exc}")
    rate = catalog.asymptotic_rate(fam)
    if isinstance(rate, catalog.NoRate):
        raise DomainError(str(rate))
    out.write(f"{rate}\n")
    if args.rate_eps is not None:
        try:
            out.write(f"value={_fmt(eval_rate(rate, args.rate_eps))}\n")
        except ValueError as exc:
            raise UsageError(str(exc))
    return 0


def _sim_config(args):
    from .simulate import SimulationConfig

    try:
        return SimulationConfig(
            n_paths=args.paths, grid_n=args.grid, delta=args.delta, small_jump_mode=args.mode, seed=args.seed
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _sim_row(e) -> dict:
    return {
        "eps": e.eps,
        "p_hat": e.p_hat,
        "stderr": e.stderr,
        "n_paths": e.n_paths,
        "delta": e.delta,
        "small_jump_mode": e.small_jump_mode,
        "upper_one_sided": e.upper_one_sided(),
    }


def _cmd_simulate(args, out) -> int:
    from .simulate import estimate_small_ball, path_sups, set_threads

    t = _load(args.config)
    set_threads(args.threads)
    cfg = _sim_config(args)
    try:
        est = estimate_small_ball(t, args.eps, cfg)
        if args.sups_out:
            sups = path_sups(t, cfg.resolved(args.eps), args.eps)
            np.savetxt(args.sups_out, sups, fmt="%.17g", header="sup_abs_X")
    except ValueError as exc:
        raise UsageError(str(exc))
    _write_csv([_sim_row(est)], SIM_COLUMNS, args.out, out)
    return 0


def _cmd_sweep(args, out) -> int:
    t = _load(args.config)
    spec = _eps_spec(args)
    rows = _bound_rows(t, spec)
    cols = list(spec.outputs)
    if args.simulate > 0:
        from .simulate import estimate_small_ball_many, set_threads

        set_threads(args.threads)
        cfg = _sim_config(args)
        cols += ["p_hat_3eps", "stderr_3eps", "p_hat_half_eps", "stderr_half_eps"]
        for row in rows[: args.simulate]:
            eps = row["eps"]
            try:
                big, small = estimate_small_ball_many(t, [3.0 * eps, 0.5 * eps], cfg)
            except ValueError as exc:
                raise UsageError(str(exc))
            row.update(
                p_hat_3eps=big.p_hat, stderr_3eps=big.stderr, p_hat_half_eps=small.p_hat, stderr_half_eps=small.stderr
            )
    _write_csv(rows, cols, spec.out_path, out)
    return 0


# ------------------------------------------------------------------ selftest


def _selftest_triplets() -> dict:
    return {
        "stable_sub_drift": catalog.StableSubordinatorDrift(0.5, -1.0).triplet(),
        "gamma_drift": catalog.GammaDrift(1.0, 1.0, -1.0).triplet(),
        "polynomial_1.5": catalog.PolynomialMeasure(1.5, 0.3).triplet(),
        "polynomial_1_0.5": catalog.PolynomialMeasure(1.0, 0.5).triplet(),
        "polynomial_c_neg": catalog.PolynomialMeasure(0.5, 0.5, c=-1.0).triplet(),
        "variance_gamma": catalog.VarianceGamma(1.0, 2.0, 1.0, 3.0, c=0.5).triplet(),
        "strictly_stable": catalog.StrictlyStable(1.2).triplet(),
    }


def selftest(triplets: Optional[dict] = None, seed: int = 0) -> list[tuple[str, bool, str]]:
    """Run the invariant checks; return ``(name, passed, detail)`` rows."""
    rng = np.random.default_rng(seed)
    triplets = triplets or _selftest_triplets()
    results = []

    def record(name, ok, detail):
        results.append((name, bool(ok), detail))

    for label, t in triplets.items():
        for eps in (1e-1, 1e-2, 1e-3):
            try:
                r = doubling_check(t, eps)
                record(f"doubling[{label},{eps:g}]", True, f"ratio={r:.6g}")
            except (ArithmeticError, ZeroDivisionError) as exc:
                record(f"doubling[{label},{eps:g}]", False, str(exc))

            sol = solve_esscher(t, eps)
            if isinstance(sol, NoRoot):
                record(f"root[{label},{eps:g}]", False, f"no root: {sol.reason}")
                continue
            tol = 1e-9 * (1.0 + abs(sol.b_eps))
            record(f"residual[{label},{eps:g}]", sol.residual <= tol, f"|Lambda'|={sol.residual:.3g}")
            worst = min(
                lambda_eps_increment(t, eps, sol.u_eps, s * d) for d in (1e-3, 1e-1, 1.0, 10.0) for s in (1, -1)
            )
            record(
                f"minimality[{label},{eps:g}]",
                sol.lambda_at_root <= 0.0 and worst >= -1e-12 * (1.0 + abs(sol.lambda_at_root)),
                f"Lambda(u)={sol.lambda_at_root:.6g}, min increment={worst:.3g}",
            )
            u = sol.u_eps + rng.normal() / eps
            h = 1e-4 / eps
            d1 = (lambda_eps(t, eps, u + h) - lambda_eps(t, eps, u - h)) / (2 * h)
            d1a = lambda_eps_deriv(t, eps, u, 1)
            d2 = (lambda_eps_deriv(t, eps, u + h, 1) - lambda_eps_deriv(t, eps, u - h, 1)) / (2 * h)
            d2a = lambda_eps_deriv(t, eps, u, 2)
            e1 = abs(d1 - d1a) / max(abs(d1a), 1e-300)
            e2 = abs(d2 - d2a) / max(abs(d2a), 1e-300)
            record(f"derivatives[{label},{eps:g}]", e1 < 1e-6 and e2 < 1e-6, f"rel err {e1:.2g}, {e2:.2g}")

    for _ in range(10):
        alpha = rng.uniform(-0.5, 0.95)
        gamma = rng.uniform(0.0, 50.0)
        r = lemma52_bounds_check(alpha, gamma)
        ok = all(x is None or 0.0 < x < math.inf for x in r)
        record(f"lemma52[alpha={alpha:.3f},gamma={gamma:.2f}]", ok, ", ".join("-" if x is None else f"{x:.4g}" for x in r))

    for _ in range(10):
        alpha = rng.uniform(-0.5, 1.9)
        eps = 10.0 ** rng.uniform(-4, -0.5)
        u = rng.uniform(-30.0, 30.0) / eps
        comp = TemperedPowerLaw(1.0, alpha)
        worst = 0.0
        for v in (Variant.COMPENSATED2, Variant.COMPENSATED1X, Variant.MOMENT2_TILTED):
            lhs = tilted_integral([comp], eps, u, v)
            rhs = eps ** (v.power - alpha) * tilted_integral([comp], 1.0, u * eps, v)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        record(f"scaling[alpha={alpha:.3f},eps={eps:.3g}]", worst <= 1e-12, f"rel diff {worst:.2g}")
    return results


def _cmd_selftest(args, out) -> int:
    triplets = {Path(p).stem: _load(p) for p in args.configs} if args.configs else None
    rows = selftest(triplets, args.seed)
    for name, ok, detail in rows:
        out.write(f"{'PASS' if ok else 'FAIL'} {name} {detail}\n")
    failed = sum(not ok for _, ok, _ in rows)
    out.write(f"{len(rows) - failed}/{len(rows)} checks passed\n")
    return 1 if failed else 0


# -------------------------------------------------------------------- parser


def _add_eps(p):
    p.add_argument("--eps", nargs="+", type=float, help="explicit radii")
    p.add_argument(
        "--eps-range", nargs=3, metavar=("START", "STOP", "COUNT"), help="geometric grid from START down to STOP"
    )


def _add_sim(p):
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--delta", type=float, default=None, help="small-jump truncation (default eps/10)")
    p.add_argument("--mode", choices=("gaussian_substitute", "drift_only"), default="gaussian_substitute")
    p.add_argument("--threads", type=int, default=None, help="numba threads (default $LEVY_SMALLBALL_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="levy-smallball", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("classify", help="type (I), effective drift, subordinator, SDP")
    p.add_argument("config")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bounds", help="exponent bounds as CSV")
    p.add_argument("config")
    _add_eps(p)
    p.add_argument("--columns", help="comma-separated subset of " + ",".join(BOUNDS_COLUMNS))
    p.add_argument("--out")

    p = sub.add_parser("rate", help="closed-form rate of a named family")
    p.add_argument("--family", required=True, choices=sorted(catalog.FAMILIES) + ["compound_poisson"])
    for name in _RATE_FLAGS:
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--config", help="measure for compound_poisson")
    p.add_argument("--eps", dest="rate_eps", type=float, default=None, help="also evaluate at eps")

    p = sub.add_parser("simulate", help="Monte Carlo small-ball estimate as CSV")
    p.add_argument("config")
    p.add_argument("--eps", type=float, required=True)
    _add_sim(p)
    p.add_argument("--out")
    p.add_argument("--sups-out", help="write per-path sup |X| values here")

    p = sub.add_parser("sweep", help="bounds over an eps grid, optionally joined with Monte Carlo")
    p.add_argument("config")
    _add_eps(p)
    p.add_argument("--simulate", type=int, default=0, metavar="K", help="simulate at the K largest radii")
    _add_sim(p)
    p.add_argument("--out")

    p = sub.add_parser("selftest", help="invariant checks")
    p.add_argument("configs", nargs="*")
    p.add_argument("--seed", type=int, default=0)
    return ap


_COMMANDS = {
    "classify": _cmd_classify,
    "bounds": _cmd_bounds,
    "rate": _cmd_rate,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "selftest": _cmd_selftest,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    """Parse ``argv`` and dispatch; return the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except DomainError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except NumericalFailure as exc:
        err.write(f"numerical failure: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())
