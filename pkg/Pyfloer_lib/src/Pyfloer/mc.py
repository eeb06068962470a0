# -*- coding: utf-8 -*-
"""
Maurer-Cartan candidates, potential, admissibility and gauge equivalence.

A candidate b is an odd cochain; it solves the weak Maurer-Cartan equation
when m^b_0 = sum_k m_k(b, ..., b) is a multiple W * WHITE of the strict
unit, W being the potential.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .ainfty import WHITE, Cochain, CurvedAInftyAlgebra, NotAdmissible, corner_count, m_multi
from .novikov import NovikovElement, Truncation, format_exponent, invert, val_q

logger = logging.getLogger(__name__)


class NoProgress(ValueError):
    """Raised when an iterative gauge construction stops improving."""


@dataclass(frozen=True)
class MCCandidate:
    b: Cochain
    delta: Fraction


def shifted_valuation(A: CurvedAInftyAlgebra, b: Cochain, delta: Fraction) -> Truncation:
    """min over generators of val b(s) + delta * (#self-intersection corners of s)."""
    best: Truncation = math.inf
    for name, value in b.items():
        shift = delta if A.is_si(name) else 0
        best = min(best, val_q(value) + shift)
    return best


def mc_residual(A: CurvedAInftyAlgebra, cand: MCCandidate) -> Cochain:
    """m^b_0(): the full curvature of the deformed algebra."""
    return m_multi(A, [cand.b], [], cand.delta)


def potential(A: CurvedAInftyAlgebra, cand: MCCandidate, tol: float = 1e-9) -> Tuple[NovikovElement, bool]:
    """
    Potential and flatness of a candidate.

    Output parameters:
    W       -   coefficient of WHITE in the residual (equals b(GREY))
    flat    -   True when every other coefficient vanishes within tol
    """
    residual = mc_residual(A, cand)
    W = residual[WHITE]
    flat = residual.without(WHITE).max_abs() <= tol
    if not flat:
        logger.debug("potential: non-unit residual %r", residual.without(WHITE))
    return W, flat


def admissibility_report(b: Cochain, x: str, xbar: str, delta: Fraction, n: int,
                         example_mode: bool = False) -> List[str]:
    """Reasons the candidate is not admissible at the self-intersection (x, xbar)."""
    reasons = []
    bx, bxb = b[x], b[xbar]
    if bx.is_zero():
        reasons.append(f"b({x}) vanishes")
    elif not -delta < val_q(bx) < 0:
        reasons.append(f"val b({x}) = {format_exponent(val_q(bx))} outside (-{format_exponent(delta)}, 0)")
    z = bx * bxb - 1
    if z.is_zero() or val_q(z) != 0:
        reasons.append(f"val(b({x}) b({xbar}) - 1) is not zero")
    if n < 2 and not example_mode:
        reasons.append(f"dimension {n} < 2")
    return reasons


def admissible(b: Cochain, x: str, xbar: str, delta: Fraction, n: int, example_mode: bool = False) -> bool:
    return not admissibility_report(b, x, xbar, delta, n, example_mode)


def require_admissible(b: Cochain, x: str, xbar: str, delta: Fraction, n: int,
                       example_mode: bool = False) -> None:
    reasons = admissibility_report(b, x, xbar, delta, n, example_mode)
    if reasons:
        raise NotAdmissible("; ".join(reasons))


# ---------------------------------------------------------------------------
# gauge


def gauge_step(A: CurvedAInftyAlgebra, b0: Cochain, b1: Cochain, h: Cochain,
               delta: Optional[Fraction] = None) -> Tuple[Cochain, Cochain]:
    """
    One step of the gauge flow.

    Returns value = b0 + m^{b0, b1}_1(h) and the defect b1 - value; b1 solves
    the gauge equation exactly when the defect vanishes.
    """
    value = b0 + _linear_m1(A, b0, b1, h, delta)
    return value, b1 - value


def _linear_m1(A: CurvedAInftyAlgebra, b0: Cochain, b1: Cochain, h: Cochain,
               delta: Optional[Fraction]) -> Cochain:
    out = Cochain()
    for name, coef in h.items():
        out = out + m_multi(A, [b0, b1], [name], delta) * coef
    return out


def minimal_surplus(A: CurvedAInftyAlgebra, delta: Fraction) -> Fraction:
    """Smallest area - (#corners) * delta over non-classical disks."""
    surplus = [disk.area - corner_count(A, disk) * delta
               for disk in A.atlas if not disk.classical and not disk.constant_on_handle]
    positive = [s for s in surplus if s > 0]
    return min(positive) if positive else Fraction(1)


def gauge_integrate(A: CurvedAInftyAlgebra, b0: Cochain, h: Cochain, delta: Fraction,
                    zeta: Optional[Fraction] = None) -> Cochain:
    """
    Solve b1 = b0 + m^{b0, b1}_1(h) by fixed point iteration.

    Each iterate must agree with the previous one to an order at least zeta
    higher than before; zeta defaults to half the minimal disk surplus and is
    kept below the shifted valuation of h.  The iteration count is capped at
    ceil(T / zeta) + 2 where T is the algebra truncation.
    """
    vh = shifted_valuation(A, h, delta)
    if vh <= 0:
        raise NotAdmissible(f"gauge parameter needs positive shifted valuation, got {vh}")
    if zeta is None:
        zeta = minimal_surplus(A, delta) / 2
    if not math.isinf(vh):
        zeta = min(zeta, Fraction(vh))
    T = A.truncation if not math.isinf(A.truncation) else Fraction(6)
    cap = int(math.ceil(Fraction(T) / zeta)) + 2

    current = b0
    agreement: Truncation = Fraction(0)
    for k in range(cap):
        nxt, defect = gauge_step(A, b0, current, h, delta)
        order = defect.valuation()
        if math.isinf(order) or order >= T:
            logger.debug("gauge_integrate converged after %d steps", k + 1)
            return nxt
        if order < agreement + zeta and k > 0:
            raise NoProgress(f"agreement stalled at order {format_exponent(order)} after {k + 1} steps")
        agreement = order
        current = nxt
    raise NoProgress(f"no convergence within {cap} steps")


def gauge_away(A: CurvedAInftyAlgebra, b: Cochain, neck: str, sphere: str,
               delta: Optional[Fraction] = None, max_steps: int = 20) -> Cochain:
    """
    Gauge away the sphere (sigma_{n-1}) coefficient of b using the neck cell.

    kappa = coefficient of `sphere` in m^{b,b}_1(neck) must have valuation 0;
    then t = -b(sphere) / kappa and b is replaced by the gauge of t * neck,
    repeating until b(sphere) vanishes.
    """
    delta = A.delta_gap if delta is None else delta
    current = b
    for step in range(max_steps):
        coef = current[sphere]
        if coef.is_zero():
            return current
        kappa = m_multi(A, [current, current], [neck], delta)[sphere]
        if kappa.is_zero() or val_q(kappa) != 0:
            raise NoProgress(f"coefficient of '{sphere}' in m_1({neck}) has no unit leading term")
        t = -coef * invert(kappa)
        current = gauge_integrate(A, current, Cochain({neck: t}), delta)
        logger.debug("gauge_away step %d: residual %r", step, current[sphere])
    raise NoProgress(f"'{sphere}' coefficient not removed in {max_steps} steps")


def gauge_equivalent_potentials(A: CurvedAInftyAlgebra, cand: MCCandidate, h: Cochain,
                                tol: float = 1e-9) -> Tuple[NovikovElement, NovikovElement]:
    """Potentials of b and of its gauge transform along h."""
    b1 = gauge_integrate(A, cand.b, h, cand.delta)
    W0, _ = potential(A, cand, tol)
    W1, _ = potential(A, MCCandidate(b1, cand.delta), tol)
    return W0, W1
