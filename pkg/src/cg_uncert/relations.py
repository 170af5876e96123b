"""Relation-report record shared by the continuous and coarse-grained
uncertainty-relation checkers, plus the conjugate Renyi-order helpers.

A report's margin is lhs - rhs for sum-form (entropic) relations and
ln(lhs) - ln(rhs) for product-form relations; the verdict tolerance is a
single global 1e-9 on the margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "RelationReport",
    "RELATION_IDS",
    "VERDICT_TOL",
    "verdict_from_margin",
    "beta_conjugate",
    "conjugate_constant",
]


class DomainError(ValueError):
    """Argument outside the mathematical domain of the requested quantity."""


RELATION_IDS = (
    "HUR",
    "RenyiCont",
    "ShannonCont",
    "RenyiDiscrete",
    "HeisPreopt",
    "HeisRect",
    "HeisOptimal",
)

VERDICT_TOL = 1e-9


@dataclass(frozen=True)
class RelationReport:
    relation_id: str
    lhs: float
    rhs: float
    margin: float
    verdict: str  # "holds" | "violated" | "infeasible_inputs"


def verdict_from_margin(margin: float, *, infeasible: bool = False) -> str:
    if margin >= -VERDICT_TOL:
        return "holds"
    return "infeasible_inputs" if infeasible else "violated"


def beta_conjugate(alpha: float) -> float:
    """beta with 1/alpha + 1/beta = 2; diverges at alpha = 1/2."""
    if not 0.5 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [1/2, 1], got {alpha}")
    if alpha == 0.5:
        return math.inf
    return alpha / (2.0 * alpha - 1.0)


def _half_term(eps: float) -> float:
    # -ln(1 - eps) / (2 eps), continuous value 1/2 at eps = 0
    if abs(eps) < 1e-5:
        return 0.5 * (1.0 + eps * (0.5 + eps * (1.0 / 3.0 + eps * 0.25)))
    return -math.log1p(-eps) / (2.0 * eps)


def conjugate_constant(alpha: float) -> float:
    """K_alpha = -[ln(alpha)/(2(1-alpha)) + ln(beta)/(2(1-beta))] for the
    conjugate pair; equals ln 2 at alpha = 1/2 and 1 at alpha = 1.

    The continuous Renyi relation's right side is ln(pi*hbar) + K_alpha and
    the discrete bound is B_alpha = K_alpha - ln(Delta*delta/(pi*hbar)).
    """
    if not 0.5 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [1/2, 1], got {alpha}")
    if alpha == 0.5:
        return math.log(2.0)
    if alpha == 1.0:
        return 1.0
    beta = beta_conjugate(alpha)
    return _half_term(1.0 - alpha) + _half_term(1.0 - beta)
