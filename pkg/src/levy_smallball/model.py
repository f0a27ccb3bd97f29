"""Lévy triplets, measure components and symbolic rate expressions.

The drift ``b`` of a :class:`LevyTriplet` always refers to the
characteristic exponent compensated on ``|x| <= 1``:

    psi(u) = i b u - sigma2 u^2 / 2 + int (e^{iux} - 1 - iux 1{|x|<=1}) nu(dx).

Families that are naturally written without compensation (finite-variation
processes with an effective drift ``c``) are converted with
:meth:`LevyTriplet.from_effective_drift`, which also records ``c`` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

POSITIVE = "positive"
NEGATIVE = "negative"
_SIDES = (POSITIVE, NEGATIVE)


@dataclass(frozen=True)
class TemperedPowerLaw:
    """Density ``C exp(-lam |x|) / |x|^(1 + alpha)`` on ``0 < |x| <= cutoff``.

    The component lives on one half-line, selected by ``side``.  ``alpha``
    may be any real number below 2; ``alpha <= 0`` gives a finite mass
    near the origin.
    """

    C: float
    alpha: float
    lam: float = 0.0
    side: str = POSITIVE
    cutoff: float = 1.0

    @property
    def sign(self) -> int:
        return 1 if self.side == POSITIVE else -1

    def density(self, x: float) -> float:
        ax = abs(x)
        if ax == 0.0 or ax > self.cutoff or (x > 0) != (self.sign > 0):
            return 0.0
        if self.C == 0.0:
            return 0.0
        log_d = math.log(self.C) - self.lam * ax - (1.0 + self.alpha) * math.log(ax)
        return math.exp(log_d) if log_d < 709.0 else math.inf

    def reflect(self) -> "TemperedPowerLaw":
        return replace(self, side=NEGATIVE if self.side == POSITIVE else POSITIVE)

    def violations(self) -> list[str]:
        out = []
        if not self.alpha < 2.0:
            out.append(f"alpha={self.alpha:g} >= 2 breaks int 1 ^ x^2 dnu < inf")
        if not self.C >= 0.0:
            out.append("mass coefficient C must be >= 0")
        if not self.lam >= 0.0:
            out.append("tempering rate lam must be >= 0")
        if self.side not in _SIDES:
            out.append(f"side must be one of {_SIDES}, got {self.side!r}")
        if not self.cutoff > 0.0:
            out.append("cutoff must be > 0")
        if self.lam == 0.0 and math.isinf(self.cutoff) and self.alpha <= 0.0 and self.C > 0.0:
            out.append("untempered power law with infinite cutoff has infinite mass at infinity")
        return out


@dataclass(frozen=True)
class Atom:
    """Point mass ``mass`` at ``location``."""

    location: float
    mass: float

    def reflect(self) -> "Atom":
        return Atom(-self.location, self.mass)

    def violations(self) -> list[str]:
        out = []
        if self.location == 0.0:
            out.append("atom at origin")
        if not self.mass > 0.0:
            out.append("atom mass must be > 0")
        return out


@dataclass(frozen=True)
class NumericDensity:
    """User supplied density on ``support`` (an interval, origin excluded).

    ``sing_exp`` is an exponent ``s`` for which ``density(x) |x|^(1+s)``
    stays bounded near 0.  Whether the density charges every neighbourhood
    of the origin on either side cannot be decided numerically, so it is
    declared through ``near_zero_positive`` and ``near_zero_negative``.
    """

    density: Callable[[float], float]
    support: tuple[float, float]
    sing_exp: float = 0.0
    near_zero_positive: bool = False
    near_zero_negative: bool = False

    def reflect(self) -> "NumericDensity":
        f = self.density
        lo, hi = self.support
        return NumericDensity(
            lambda x: f(-x),
            (-hi, -lo),
            self.sing_exp,
            self.near_zero_negative,
            self.near_zero_positive,
        )

    def violations(self) -> list[str]:
        out = []
        lo, hi = self.support
        if not lo < hi:
            out.append("support must be a nonempty interval")
        # sing_exp == 2 is allowed so that densities like x^-3 |log x|^-2 fit
        if not self.sing_exp <= 2.0:
            out.append(f"sing_exp={self.sing_exp:g} > 2 breaks int 1 ^ x^2 dnu < inf")
        if self.near_zero_positive and not (lo <= 0.0 < hi):
            out.append("near_zero_positive declared but support misses (0, delta)")
        if self.near_zero_negative and not (lo < 0.0 <= hi):
            out.append("near_zero_negative declared but support misses (-delta, 0)")
        return out


MeasureComponent = Union[TemperedPowerLaw, Atom, NumericDensity]


@dataclass(frozen=True)
class LevyTriplet:
    """A (nu, sigma2, b) triplet.

    Parameters
    ----------
    components
        Building blocks of the Lévy measure; their sum is ``nu``.
    sigma2
        Gaussian variance.
    b
        Drift under the ``|x| <= 1`` compensation convention.
    declared_c
        Effective drift ``b - int_{|x|<=1} x nu(dx)`` when the triplet was
        built from it.  Kept so that ``c = 0`` is known exactly.
    declared_symmetric
        Set when the caller asserts that ``nu`` is symmetric.
    """

    components: tuple = ()
    sigma2: float = 0.0
    b: float = 0.0
    declared_c: Optional[float] = None
    declared_symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def from_effective_drift(
        cls,
        components: Sequence[MeasureComponent],
        c: float,
        sigma2: float = 0.0,
        declared_symmetric: bool = False,
    ) -> "LevyTriplet":
        """Build a triplet from its effective drift ``c``."""
        from .calculus import signed_moment

        comps = tuple(components)
        m1 = signed_moment(comps, 0.0, 1.0)
        if not math.isfinite(m1):
            raise ValueError("effective drift needs int_{|x|<=1} |x| nu(dx) < inf")
        return cls(comps, sigma2, c + m1, declared_c=c, declared_symmetric=declared_symmetric)

    def reflect(self) -> "LevyTriplet":
        """Triplet of ``-X``."""
        c = None if self.declared_c is None else -self.declared_c
        return LevyTriplet(
            tuple(comp.reflect() for comp in self.components),
            self.sigma2,
            -self.b,
            c,
            self.declared_symmetric,
        )

    def is_symmetric(self) -> bool:
        """True when ``nu`` is symmetric, declared or structurally evident."""
        if self.declared_symmetric:
            return True
        comps = [cmp for cmp in self.components if not isinstance(cmp, NumericDensity)]
        if len(comps) != len(self.components):
            return False
        return sorted(map(repr, comps)) == sorted(repr(cmp.reflect()) for cmp in comps)

    def with_components(self, components) -> "LevyTriplet":
        return replace(self, components=tuple(components), declared_symmetric=False)


def validate(triplet: LevyTriplet) -> list[str]:
    """Return a list of invariant violations; empty when the triplet is valid."""
    out = []
    for i, comp in enumerate(triplet.components):
        name = type(comp).__name__
        for msg in comp.violations():
            out.append(f"component {i} ({name}): {msg}")
    if not triplet.sigma2 >= 0.0:
        out.append("sigma2 must be >= 0")
    if not math.isfinite(triplet.b):
        out.append("drift b must be finite")
    has_mass = any(
        (isinstance(c, TemperedPowerLaw) and c.C > 0.0) or isinstance(c, (Atom, NumericDensity))
        for c in triplet.components
    )
    if triplet.sigma2 == 0.0 and not has_mass:
        what = "pure drift" if triplet.b != 0.0 else "zero process"
        out.append(f"triplet is deterministic ({what})")
    return out


# ---------------------------------------------------------------- rates


@dataclass(frozen=True)
class RateExpression:
    """``constant * eps^-p * |log eps|^q * (log|log eps|)^r``.

    ``mode`` is ``"strong"`` (asymptotic equivalence, constant known) or
    ``"weak"`` (two-sided bounds up to constants, no constant).
    """

    pow_eps: float = 0.0
    pow_log: float = 0.0
    pow_loglog: float = 0.0
    mode: str = "weak"
    constant: Optional[float] = None
    regime: str = ""

    def __post_init__(self):
        if self.mode not in ("strong", "weak"):
            raise ValueError(f"mode must be 'strong' or 'weak', got {self.mode!r}")
        if (self.constant is not None) != (self.mode == "strong"):
            raise ValueError("a constant is given exactly when mode is 'strong'")
        if self.pow_eps < 0.0:
            raise ValueError("pow_eps must be >= 0")

    def evaluate(self, eps: float) -> float:
        return eval_rate(self, eps)

    def __str__(self) -> str:
        parts = []
        if self.constant is not None:
            parts.append(f"{self.constant:.6g}")
        if self.pow_eps:
            parts.append(f"eps^-{_fmt(self.pow_eps)}")
        if self.pow_log:
            parts.append("|log eps|" + ("" if self.pow_log == 1 else f"^{_fmt(self.pow_log)}"))
        if self.pow_loglog:
            parts.append("loglog" + ("" if self.pow_loglog == 1 else f"^{_fmt(self.pow_loglog)}"))
        return " * ".join(parts) if parts else "1"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


_EPS_MAX = math.exp(-2.0)


def eval_rate(rate: RateExpression, eps: float) -> float:
    """Evaluate a rate at ``eps`` in ``(0, e^-2)``."""
    if not 0.0 < eps < _EPS_MAX:
        raise ValueError(f"eps must lie in (0, e^-2), got {eps!r}")
    L = -math.log(eps)
    const = 1.0 if rate.constant is None else rate.constant
    return const * eps ** (-rate.pow_eps) * L**rate.pow_log * math.log(L) ** rate.pow_loglog


# ----------------------------------------------------------------- json


def _cutoff_from_json(v) -> float:
    if v is None or v == "inf":
        return math.inf
    return float(v)


_KEYS = {
    "power_law": {"kind", "C", "alpha", "lambda", "side", "cutoff"},
    "atom": {"kind", "location", "mass"},
}
_TRIPLET_KEYS = {"sigma2", "b", "c", "symmetric", "components"}


def _check_keys(d: dict, allowed: set, what: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown {what} key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def component_from_dict(d: dict) -> MeasureComponent:
    kind = d.get("kind")
    if kind in _KEYS:
        _check_keys(d, _KEYS[kind], kind)
    if kind == "power_law":
        return TemperedPowerLaw(
            C=float(d["C"]),
            alpha=float(d["alpha"]),
            lam=float(d.get("lambda", 0.0)),
            side=d.get("side", POSITIVE),
            cutoff=_cutoff_from_json(d.get("cutoff", 1.0)),
        )
    if kind == "atom":
        return Atom(float(d["location"]), float(d["mass"]))
    raise ValueError(f"unknown component kind {kind!r} (numeric densities cannot be read from JSON)")


def component_to_dict(c: MeasureComponent) -> dict:
    if isinstance(c, TemperedPowerLaw):
        return {
            "kind": "power_law",
            "C": c.C,
            "alpha": c.alpha,
            "lambda": c.lam,
            "side": c.side,
            "cutoff": "inf" if math.isinf(c.cutoff) else c.cutoff,
        }
    if isinstance(c, Atom):
        return {"kind": "atom", "location": c.location, "mass": c.mass}
    raise TypeError("numeric densities are not serialisable")


def triplet_from_dict(d: dict) -> LevyTriplet:
    """Parse the JSON schema.

    Keys: ``sigma2`` (default 0), exactly one of ``b`` or ``c`` (effective
    drift), optional ``symmetric`` flag and a ``components`` array.
    """
    _check_keys(d, _TRIPLET_KEYS, "triplet")
    comps = [component_from_dict(c) for c in d.get("components", [])]
    sigma2 = float(d.get("sigma2", 0.0))
    sym = bool(d.get("symmetric", False))
    if "c" in d and "b" in d:
        raise ValueError("give either 'b' or 'c', not both")
    if "c" in d:
        return LevyTriplet.from_effective_drift(comps, float(d["c"]), sigma2, sym)
    return LevyTriplet(tuple(comps), sigma2, float(d.get("b", 0.0)), declared_symmetric=sym)


def triplet_to_dict(t: LevyTriplet) -> dict:
    d: dict = {"sigma2": t.sigma2}
    if t.declared_c is not None:
        d["c"] = t.declared_c
    else:
        d["b"] = t.b
    if t.declared_symmetric:
        d["symmetric"] = True
    d["components"] = [component_to_dict(c) for c in t.components]
    return d


def load_triplet(path: Union[str, Path]) -> LevyTriplet:
    with open(path) as fh:
        return triplet_from_dict(json.load(fh))


def save_triplet(t: LevyTriplet, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(triplet_to_dict(t), fh, indent=2)
        fh.write("\n")
