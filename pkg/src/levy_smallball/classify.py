"""Structural classification of a triplet and the small deviation property."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .calculus import abs_moment, effective_drift, has_mass_near_zero, side_moment, total_mass
from .model import LevyTriplet

SDP_REASONS = ("not_type_I", "c_zero", "c_pos_with_neg_jumps", "c_neg_with_pos_jumps", "fails_prop11")


@dataclass(frozen=True)
class Classification:
    """Structural properties of a (nu, sigma2, b) triplet.

    ``effective_drift`` is ``None`` unless the process is of type (I);
    ``drift_error`` is its numerical error bar (0 when exact).
    """

    is_type_I: bool
    effective_drift: Optional[float]
    drift_error: float
    is_subordinator: bool
    is_neg_subordinator: bool
    has_sdp: bool
    sdp_reason: str
    is_compound_poisson: bool

    def c_is_zero(self) -> bool:
        return self.effective_drift is not None and abs(self.effective_drift) <= self.drift_error

    def c_sign(self) -> int:
        """Sign of the effective drift, 0 when it is zero within its error bar."""
        if self.effective_drift is None or self.c_is_zero():
            return 0
        return 1 if self.effective_drift > 0 else -1

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def key_values(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            if isinstance(v, bool):
                v = str(v).lower()
            lines.append(f"{k}={v}")
        return "\n".join(lines)


def classify(triplet: LevyTriplet) -> Classification:
    """Type (I), effective drift, subordinator status and the SDP.

    Jumps near the origin are decided from component structure (power laws
    charge every neighbourhood of 0 on their side, atoms never do).
    """
    m1 = abs_moment(triplet, 1.0, 1.0)
    type_I = math.isfinite(m1) and triplet.sigma2 == 0.0
    pos_near = has_mass_near_zero(triplet, 1)
    neg_near = has_mass_near_zero(triplet, -1)
    has_pos = side_moment(triplet, 1, 0.0, math.inf, 0.0) > 0.0
    has_neg = side_moment(triplet, -1, 0.0, math.inf, 0.0) > 0.0

    c: Optional[float] = None
    err = 0.0
    if type_I:
        if triplet.declared_c is None and triplet.b == 0.0 and triplet.is_symmetric():
            c = 0.0
        else:
            c, err = effective_drift(triplet)

    cp = triplet.sigma2 == 0.0 and math.isfinite(total_mass(triplet))
    out = Classification(type_I, c, err, False, False, False, "fails_prop11", cp)

    sign = out.c_sign()
    sub = type_I and not has_neg and sign >= 0
    negsub = type_I and not has_pos and sign <= 0
    if not type_I:
        sdp, reason = True, "not_type_I"
    elif sign == 0:
        sdp, reason = True, "c_zero"
    elif sign > 0 and neg_near:
        sdp, reason = True, "c_pos_with_neg_jumps"
    elif sign < 0 and pos_near:
        sdp, reason = True, "c_neg_with_pos_jumps"
    else:
        sdp, reason = False, "fails_prop11"
    return Classification(type_I, c, err, sub, negsub, sdp, reason, cp)
