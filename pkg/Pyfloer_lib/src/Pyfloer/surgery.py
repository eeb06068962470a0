# -*- coding: utf-8 -*-
"""
Surgery at a transverse self-intersection x of an immersed Lagrangian.

Given an admissible Maurer-Cartan candidate b0 the handle S^{n-1} x [0, 1]
of neck area A(eps) replaces the two balls around the preimages of x.  This
module provides

    psi                         -   b0 |-> b_eps on the surgered cell complex
    psi_local_system_variant    -   the same with the meridian or the
                                    longitude weight moved into a local system
    dpsi                        -   linearization CF(b0) -> CF(b_eps)
    transform_atlas             -   disk atlas of the surgered Lagrangian
    verify_curve_identity       -   curve-count correlators before and after
    resummation_check           -   truncated multiplicity sums against their
                                    closed forms
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .ainfty import (GREY, WHITE, Cochain, CurvedAInftyAlgebra, Disk, NotAdmissible, classical_atlas,
                     heart_sign)
from .cellular import (CellComplex, DimensionMismatch, DimensionTooLow, StandardBall,
                       surger_cells)
from .floer import NovikovMatrix
from .mc import MCCandidate, require_admissible
from .novikov import (NotAUnit, NovikovElement, exp_series, format_exponent, invert, log_unit,
                      max_abs_difference, parse_exponent, truncate, val_q)

logger = logging.getLogger(__name__)

DEFAULT_CAPS = (12, 12)


class SurgeryError(ValueError):
    pass


class UnannotatedCorner(SurgeryError):
    pass


class CapTooSmall(SurgeryError):
    pass


class MissingOneChain(SurgeryError):
    pass


@dataclass(frozen=True)
class SurgeryData:
    """
    x, xbar             -   the self-intersection pair being resolved
    area                -   neck area A(eps)
    dim                 -   dimension n of the Lagrangian
    plus, minus         -   standard balls around the two preimages of x
    longitude, neck     -   names of the new 1-cell and n-cell
    meridian            -   cell carrying the meridian weight (plus sphere by default)
    sign_flags          -   {"longitude": +-1, "meridian": +-1}
    longitude_labels    -   local system labels crossed by the longitude
    meridian_label      -   local system label crossed by the meridian
    """

    x: str
    xbar: str
    area: Fraction
    dim: int
    plus: StandardBall
    minus: StandardBall
    longitude: str = "sigma_1"
    neck: str = "sigma_n"
    meridian: Optional[str] = None
    sign_flags: Mapping[str, int] = field(default_factory=dict)
    longitude_labels: Tuple[str, ...] = ()
    meridian_label: Optional[str] = None

    @property
    def mu(self) -> str:
        return self.meridian or self.plus.sphere

    @property
    def lam(self) -> str:
        return self.longitude

    @property
    def removed(self) -> Tuple[str, str]:
        return (self.plus.top, self.minus.top)

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "x": self.x, "xbar": self.xbar,
            "area": format_exponent(self.area),
            "dim": self.dim,
            "balls": {"plus": vars(self.plus).copy(), "minus": vars(self.minus).copy()},
            "longitude": self.longitude,
            "neck": self.neck,
        }
        if self.meridian is not None:
            data["meridian"] = self.meridian
        if self.sign_flags:
            data["sign_flags"] = dict(self.sign_flags)
        if self.longitude_labels:
            data["longitude_labels"] = list(self.longitude_labels)
        if self.meridian_label is not None:
            data["meridian_label"] = self.meridian_label
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any], dim: Optional[int] = None) -> "SurgeryData":
        balls = data.get("balls", {})
        try:
            plus = StandardBall(**{k: str(v) for k, v in balls["plus"].items()})
            minus = StandardBall(**{k: str(v) for k, v in balls["minus"].items()})
        except (KeyError, TypeError) as exc:
            raise SurgeryError(f"surgery balls: {exc}") from exc
        return cls(
            x=str(data["x"]), xbar=str(data["xbar"]),
            area=parse_exponent(data["area"]),
            dim=int(data.get("dim", dim if dim is not None else 0)),
            plus=plus, minus=minus,
            longitude=str(data.get("longitude", "sigma_1")),
            neck=str(data.get("neck", "sigma_n")),
            meridian=data.get("meridian"),
            sign_flags=dict(data.get("sign_flags", {})),
            longitude_labels=tuple(data.get("longitude_labels", ())),
            meridian_label=data.get("meridian_label"),
        )


@dataclass(frozen=True)
class HandleCoefficients:
    c_mu: NovikovElement
    c_lam: NovikovElement
    z: NovikovElement
    meridian_weight: NovikovElement   # b0(x) q^{A(eps)}


def _check_handle_support(b: Cochain, S: SurgeryData) -> None:
    handle = {S.plus.top, S.minus.top, S.plus.sphere, S.minus.sphere, S.longitude, S.neck}
    touched = sorted(h for h in handle if h in b)
    if touched:
        raise NotAdmissible(f"b0 must vanish on the handle cells, found {touched}")


def handle_coefficients(cand: MCCandidate, S: SurgeryData, example_mode: bool = False,
                        branch: Optional[int] = None) -> HandleCoefficients:
    """c(mu) = log(b0(x) q^A), and c(lam) = log(z - 1) for n = 2, z otherwise (z = b0(x) b0(xbar))."""
    require_admissible(cand.b, S.x, S.xbar, cand.delta, S.dim, example_mode)
    _check_handle_support(cand.b, S)
    bx, bxb = cand.b[S.x], cand.b[S.xbar]
    weight = bx.shift(S.area)
    c_mu = log_unit(weight, branch)
    z = bx * bxb
    c_lam = log_unit(z - 1, branch) if S.dim == 2 else z
    return HandleCoefficients(c_mu, c_lam, z, weight)


def psi(cand: MCCandidate, S: SurgeryData, example_mode: bool = False,
        branch: Optional[int] = None) -> Cochain:
    """
    Surgered candidate

        b_eps = b0 - b0(x) x - b0(xbar) xbar + c(mu) mu + c(lam) lam.

    In example mode (n = 1 and b0(xbar) = 0) the meridian weight cannot live
    on a cell; the longitude local-system form is returned instead.
    """
    if example_mode:
        return psi_local_system_variant(cand, S, "Lshift", example_mode=True, branch=branch)[0]
    if S.dim < 2:
        raise DimensionTooLow(f"surgery needs n >= 2, got {S.dim}")
    h = handle_coefficients(cand, S, example_mode, branch)
    b_eps = cand.b.without(S.x, S.xbar)
    return b_eps + Cochain({S.mu: h.c_mu, S.lam: h.c_lam})


def psi_local_system_variant(cand: MCCandidate, S: SurgeryData, mode: str,
                             one_chain: Optional[Cochain] = None,
                             complex0: Optional[CellComplex] = None,
                             example_mode: bool = False,
                             branch: Optional[int] = None) -> Tuple[Cochain, Dict[str, NovikovElement]]:
    """
    Move one handle weight into a local system.

    mode    -   "Lshift": drop the meridian term, multiply every longitude
                          label by b0(x) q^A
                "Mshift": n = 2 only; b0 must be supported on x, xbar and a
                          1-chain bounding the two preimages of x; b_eps keeps
                          only the unit terms and the meridian label gets
                          z - 1, which must be a unit

    Output parameters:
    b_eps   -   Cochain
    updates -   {label: multiplicative holonomy factor}
    """
    base = cand.b.without(S.x, S.xbar)
    if mode == "Lshift":
        h = handle_coefficients(cand, S, example_mode, branch)
        labels = S.longitude_labels or (S.longitude,)
        b_eps = base + Cochain({S.lam: h.c_lam}) if S.dim >= 2 else base
        return b_eps, {label: h.meridian_weight for label in labels}
    if mode == "Mshift":
        if S.dim != 2:
            raise DimensionMismatch(f"Mshift is defined for n = 2, got {S.dim}")
        if one_chain is None or one_chain.is_zero():
            raise MissingOneChain("Mshift needs a 1-chain joining the preimages of x")
        if complex0 is not None:
            _check_one_chain(one_chain, S, complex0)
        meridian = cand.b[S.x] * cand.b[S.xbar] - 1
        if meridian.is_zero() or val_q(meridian) != 0:
            raise NotAUnit("z - 1 is not a unit")
        require_admissible(cand.b, S.x, S.xbar, cand.delta, S.dim, example_mode)
        _check_handle_support(cand.b, S)
        allowed = {S.x, S.xbar, WHITE, GREY} | set(one_chain.support())
        stray = sorted(s for s in cand.b.support() if s not in allowed)
        if stray:
            raise NotAdmissible(f"Mshift needs b0 supported on x, xbar and the 1-chain, found {stray}")
        label = S.meridian_label or S.neck
        # b_eps vanishes off the units; the handle weight lives only in the holonomy
        units = Cochain({u: cand.b[u] for u in (WHITE, GREY) if u in cand.b})
        return units, {label: meridian}
    raise ValueError(f"unknown local-system mode '{mode}'")


def _check_one_chain(chain: Cochain, S: SurgeryData, C: CellComplex) -> None:
    boundary: Dict[str, complex] = {}
    for cell, coef in chain.items():
        for tau, k in C.chain_boundary(cell).items():
            boundary[tau] = boundary.get(tau, 0) + k * coef.coefficient(0)
    target = {S.plus.point: 1, S.minus.point: -1}
    for name in set(boundary) | set(target):
        if abs(boundary.get(name, 0) - target.get(name, 0)) > 1e-9:
            raise MissingOneChain(f"1-chain does not bound {S.plus.point} - {S.minus.point}")


def dpsi(cand: MCCandidate, S: SurgeryData, off_handle: Sequence[str] = ()) -> NovikovMatrix:
    """
    Linearized surgery map on generators.

        x    |->  (b0(x) q^A)^{-1} mu + b0(xbar) lam
        xbar |->  b0(x) lam
        s    |->  s                              for s in off_handle

    with the longitude entries divided by z - 1 when n = 2.
    """
    bx, bxb = cand.b[S.x], cand.b[S.xbar]
    entries = {(s, s): NovikovElement.one() for s in off_handle}
    entries[(S.mu, S.x)] = invert(bx.shift(S.area))
    lam_x, lam_xbar = bxb, bx
    if S.dim == 2:
        scale = invert(bx * bxb - 1)
        lam_x, lam_xbar = lam_x * scale, lam_xbar * scale
    entries[(S.lam, S.x)] = lam_x
    entries[(S.lam, S.xbar)] = lam_xbar
    rows = list(off_handle) + [S.mu, S.lam]
    cols = list(off_handle) + [S.x, S.xbar]
    return NovikovMatrix(rows, cols, entries)


# ---------------------------------------------------------------------------
# atlas transform


Option = Tuple[Tuple[str, ...], Fraction, Fraction]


def _inv_fact(k: int) -> Fraction:
    return Fraction(1, math.factorial(k))


def _input_options(label: str, S: SurgeryData, R: int, Smax: int) -> List[Option]:
    A, mu, lam = S.area, S.mu, S.lam
    if label == S.x:
        return [((mu,) * r, _inv_fact(r), -A) for r in range(R + 1)]
    if label == S.xbar:
        if S.dim > 2:
            return [((lam,) + (mu,) * r, (-1) ** r * _inv_fact(r), A) for r in range(R + 1)]
        sheet_a = [((mu,) * r, (-1) ** r * _inv_fact(r), A) for r in range(R + 1)]
        sheet_b = [((lam,) * s + (mu,) * r, (-1) ** r * _inv_fact(r) * _inv_fact(s), A)
                   for r in range(R + 1) for s in range(Smax + 1)]
        return sheet_a + sheet_b
    return [((label,), Fraction(1), Fraction(0))]


def _output_options(label: str, S: SurgeryData, R: int, Smax: int) -> List[Tuple[str, Tuple[str, ...], Fraction, Fraction]]:
    A, mu, lam = S.area, S.mu, S.lam
    if label == S.x:
        return [(mu, (mu,) * l, _inv_fact(l), Fraction(0)) for l in range(R + 1)]
    if label == S.xbar:
        if S.dim > 2:
            longitude = [(lam, (mu,) * l, (-1) ** l * _inv_fact(l), A) for l in range(R + 1)]
            meridian = [(mu, (lam,) + (mu,) * l, -(-1) ** l * _inv_fact(l), 2 * A) for l in range(R + 1)]
            return longitude + meridian
        longitude = [(lam, (lam,) * s + (mu,) * l, (-1) ** l * _inv_fact(l) * _inv_fact(s), A)
                     for l in range(R + 1) for s in range(Smax + 1)]
        sheet_a = [(mu, (mu,) * l, -(-1) ** l * _inv_fact(l), 2 * A) for l in range(R + 1)]
        sheet_b = [(mu, (lam,) * s + (mu,) * l, -(-1) ** l * _inv_fact(l) * _inv_fact(s), 2 * A)
                   for l in range(R + 1) for s in range(Smax + 1)]
        return longitude + sheet_a + sheet_b
    return [(label, (), Fraction(1), Fraction(0))]


def _check_passes(disk: Disk, S: SurgeryData) -> None:
    if disk.passes is None:
        return
    corners = [s for s in disk.inputs + (disk.output,) if s in (S.x, S.xbar)]
    expected = ["+" if s == S.x else "-" for s in corners]
    if list(disk.passes) != expected:
        raise UnannotatedCorner(f"disk {disk.inputs} -> {disk.output}: passes {list(disk.passes)} "
                                f"do not match corners {expected}")


def _heart(parity: Mapping[str, int], word: Sequence[str]) -> int:
    return heart_sign([parity[s] for s in word])


def transform_disk(disk: Disk, S: SurgeryData, parity0: Mapping[str, int],
                   parity_eps: Mapping[str, int], caps: Tuple[int, int] = DEFAULT_CAPS) -> List[Disk]:
    """All disks of the surgered atlas coming from one disk through the handle."""
    R, Smax = caps
    _check_passes(disk, S)
    per_corner = [_input_options(s, S, R, Smax) for s in disk.inputs]
    outputs = _output_options(disk.output, S, R, Smax)
    heart_old = _heart(parity0, disk.inputs)
    out: List[Disk] = []
    for combo in itertools.product(*per_corner):
        word = tuple(itertools.chain.from_iterable(opt[0] for opt in combo))
        weight = math.prod((opt[1] for opt in combo), start=Fraction(1))
        shift = sum((opt[2] for opt in combo), Fraction(0))
        for new_output, extra, w_out, s_out in outputs:
            inputs = word + extra
            sign = disk.sign * (-1) ** (heart_old + _heart(parity_eps, inputs))
            out.append(Disk(inputs, new_output, disk.area + shift + s_out, sign,
                            disk.sym * weight * w_out, disk.holonomy))
    return out


def tail(a: float, cap: int) -> float:
    """sum_{r > cap} a^r / r!"""
    return sum(a ** r / math.factorial(r) for r in range(cap + 1, cap + 60))


def _corner_tails(h: HandleCoefficients, S: SurgeryData, caps: Tuple[int, int]) -> Dict[str, float]:
    """Relative truncation error of the resummed factor at each kind of corner."""
    R, Smax = caps
    a = h.c_mu.abs_sum()
    t_mu = tail(a, R) * math.exp(a)
    if S.dim > 2:
        return {"positive": t_mu, "negative": t_mu, "output": 2 * t_mu}
    b = h.c_lam.abs_sum()
    full = math.exp(a + b)
    t_sheet = (full - (math.exp(a) - tail(a, R)) * (math.exp(b) - tail(b, Smax))) * math.exp(a)
    return {"positive": t_mu, "negative": t_mu + t_sheet, "output": 2 * (t_mu + t_sheet)}


def transform_atlas(A0: CurvedAInftyAlgebra, S: SurgeryData, caps: Tuple[int, int] = DEFAULT_CAPS,
                    cand: Optional[MCCandidate] = None, tol: float = 1e-9,
                    branch: Optional[int] = None) -> CurvedAInftyAlgebra:
    """
    Disk atlas of the surgered Lagrangian.

    Input parameters:
    A0      -   CurvedAInftyAlgebra of the immersed Lagrangian, n >= 2
    S       -   SurgeryData
    caps    -   (R, S) caps on the meridian and longitude multiplicities
    cand    -   optional admissible candidate; when given the truncation tail
                of the multiplicity sums is bounded and CapTooSmall raised
                when a corner tail exceeds tol

    Output parameters:
    A_eps   -   CurvedAInftyAlgebra on the surgered complex.  Every positive
                input corner at x is replaced by r meridian insertions (weight
                1/r!, area - A), every negative corner at xbar by a longitude
                and r meridians (weight (-1)^r/r!, area + A) or the two sheet
                families for n = 2, and output corners at x or xbar by the
                meridian or longitude outputs.  Constant handle disks are
                removed, classical disks are regenerated on the new complex.
    """
    n = A0.dim
    if n != S.dim:
        raise DimensionMismatch(f"surgery data is for n = {S.dim}, algebra has n = {n}")
    if n < 2:
        raise DimensionTooLow(f"surgery needs n >= 2, got {n}")
    C_eps = surger_cells(A0.complex, (S.plus, S.minus), S.longitude, S.neck, S.sign_flags)
    parity0 = {name: g.parity for name, g in A0.generators.items()}
    parity_eps = dict(parity0)
    parity_eps.update({cell: C_eps.codim_parity(cell) for cell in C_eps.cells})

    removed = set(S.removed)
    disks: List[Disk] = []
    had_classical = False
    dropped = 0
    for disk in A0.atlas:
        if disk.classical:
            had_classical = True
            continue
        if disk.constant_on_handle:
            continue
        if disk.output in removed:
            raise UnannotatedCorner(f"non-constant disk {disk.inputs} has output on removed cell {disk.output}")
        if removed & set(disk.inputs):
            dropped += 1
            continue
        disks.extend(transform_disk(disk, S, parity0, parity_eps, caps))
    if dropped:
        logger.debug("transform_atlas: dropped %d disks with inputs on removed cells", dropped)

    if had_classical:
        disks.extend(classical_atlas(C_eps))
    else:
        new_cells = {S.longitude, S.neck}
        disks.extend(d for d in classical_atlas(C_eps) if d.inputs[0] in new_cells)

    tail_total = 0.0
    if cand is not None:
        h = handle_coefficients(cand, S, branch=branch)
        tails = _corner_tails(h, S, caps)
        worst = max(tails.values())
        if worst > tol:
            raise CapTooSmall(f"multiplicity tail {worst:.3e} exceeds tolerance {tol:.1e} at caps {caps}")
        tail_total = _tail_bound(A0, cand.b, S, tails)

    resummed = {S.mu} | ({S.lam} if n == 2 else set())
    A_eps = CurvedAInftyAlgebra(
        complex=C_eps,
        atlas=tuple(disks),
        delta_gap=A0.delta_gap,
        si_pairs=tuple(p for p in A0.si_pairs if p != (S.x, S.xbar)),
        si_parity={k: v for k, v in A0.si_parity.items() if k not in (S.x, S.xbar)},
        local_system=dict(A0.local_system),
        truncation=A0.truncation,
        unit_convention=A0.unit_convention,
        resummed=frozenset(resummed),
        tail_bound=tail_total,
        name=f"{A0.name}_surgered" if A0.name else "surgered",
    )
    _report_gap(A_eps)
    logger.info("transform_atlas: %d disks -> %d disks", len(A0.atlas), len(disks))
    return A_eps


def _report_gap(A: CurvedAInftyAlgebra) -> None:
    handle = A.resummed
    for disk in A.atlas:
        if disk.classical or handle & set(disk.inputs + (disk.output,)):
            continue
        corners = sum(1 for s in disk.inputs + (disk.output,) if A.is_si(s))
        if corners and disk.area < corners * A.delta_gap:
            logger.warning("surgered disk %s -> %s breaks the corner gap (area %s)",
                           disk.inputs, disk.output, format_exponent(disk.area))


def _tail_bound(A0: CurvedAInftyAlgebra, b0: Cochain, S: SurgeryData, tails: Mapping[str, float]) -> float:
    total = 0.0
    for disk in A0.atlas:
        if disk.classical or disk.constant_on_handle:
            continue
        factors = [tails["positive"] if s == S.x else tails["negative"]
                   for s in disk.inputs if s in (S.x, S.xbar)]
        if disk.output in (S.x, S.xbar):
            factors.append(tails["output"])
        if not factors:
            continue
        size = A0.weight(disk).abs_sum()
        for s in disk.inputs:
            size *= b0[s].abs_sum()
        total += size * (math.prod(1 + f for f in factors) - 1)
    return total


# ---------------------------------------------------------------------------
# correlators


def correlators(A: CurvedAInftyAlgebra, b: Cochain) -> Dict[str, NovikovElement]:
    """p(o; b) = sum over disks with output constraint o of w(u) prod_i b(s_i)."""
    powers: Dict[Tuple[str, int], NovikovElement] = {}

    def power(name: str, k: int) -> NovikovElement:
        key = (name, k)
        if key not in powers:
            powers[key] = b[name] ** k
        return powers[key]

    out: Dict[str, NovikovElement] = {}
    for disk in A.atlas:
        if disk.classical or disk.constant_on_handle:
            continue
        counts = Counter(disk.inputs)
        if any(name not in b for name in counts):
            continue
        value = A.weight(disk)
        for name, k in counts.items():
            value = value * power(name, k)
        out[disk.output] = out[disk.output] + value if disk.output in out else value
    return out


@dataclass
class CurveIdentityRow:
    generator: str
    lhs: NovikovElement
    rhs: NovikovElement
    difference: float
    passed: bool


@dataclass
class CurveIdentityReport:
    rows: List[CurveIdentityRow]
    tail_bound: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def max_difference(self) -> float:
        return max((r.difference for r in self.rows), default=0.0)

    def to_records(self) -> List[Dict[str, Any]]:
        return [{"generator": r.generator, "lhs": repr(r.lhs), "rhs": repr(r.rhs),
                 "difference": r.difference, "tail_bound": self.tail_bound, "passed": r.passed}
                for r in self.rows]


def verify_curve_identity(A0: CurvedAInftyAlgebra, A_eps: CurvedAInftyAlgebra, S: SurgeryData,
                          cand: MCCandidate, b_eps: Optional[Cochain] = None,
                          tol: float = 1e-9) -> CurveIdentityReport:
    """
    Compare p_eps(DPsi(s); b_eps) with p_0(s; b0) for every generator s of the
    immersed Lagrangian away from the removed balls and the meridian cell.
    """
    if b_eps is None:
        b_eps = psi(cand, S)
    p0 = correlators(A0, cand.b)
    pe = correlators(A_eps, b_eps)
    D = dpsi(cand, S)
    order = min(A0.truncation, A_eps.truncation)
    zero = NovikovElement.zero()

    def lhs_of(name: str) -> NovikovElement:
        value = zero
        for (row, col), coef in D.entries.items():
            if col == name:
                value = value + coef * pe.get(row, zero)
        return value

    skip = set(S.removed) | {S.mu}
    rows = []
    for name, gen in A0.generators.items():
        if gen.kind == "unit" or name in skip:
            continue
        lhs = lhs_of(name) if name in (S.x, S.xbar) else pe.get(name, zero)
        rhs = p0.get(name, zero)
        diff = max_abs_difference(truncate(lhs, order), truncate(rhs, order))
        rows.append(CurveIdentityRow(name, lhs, rhs, diff, diff <= tol + A_eps.tail_bound))
    report = CurveIdentityReport(rows, A_eps.tail_bound, tol)
    logger.info("curve identity: max difference %.3e, tail bound %.3e, %s",
                report.max_difference(), report.tail_bound, "passed" if report.passed else "FAILED")
    return report


def constant_disk_report(A0: CurvedAInftyAlgebra, A_eps: CurvedAInftyAlgebra, S: SurgeryData,
                         cand: MCCandidate, b_eps: Optional[Cochain] = None) -> Dict[str, Any]:
    """
    Constant disks at x (inputs x, xbar) against the classical longitude
    boundary.  They agree for n > 2; for n = 2 the longitude coefficient is
    log(z - 1) and the difference is reported, not asserted.
    """
    if b_eps is None:
        b_eps = psi(cand, S)
    before = Cochain()
    for disk in A0.atlas:
        if disk.constant_on_handle:
            value = A0.weight(disk)
            for s in disk.inputs:
                value = value * cand.b[s]
            before = before + A0.disk_output(disk) * value
    after = Cochain()
    for disk in A_eps.atlas:
        if disk.classical and disk.inputs == (S.lam,):
            after = after + A_eps.disk_output(disk) * (A_eps.weight(disk) * b_eps[S.lam])
    difference = (before - after).max_abs()
    return {"before": before, "after": after, "difference": difference, "branch_tension": S.dim == 2}


def resummation_check(cand: MCCandidate, S: SurgeryData, caps: Tuple[int, int] = DEFAULT_CAPS,
                      tol: float = 1e-9, branch: Optional[int] = None) -> List[Dict[str, Any]]:
    """
    Truncated multiplicity sums (path A) against closed forms (path B):
        sum_{r<=R} c(mu)^r / r!                  vs  b0(x) q^A
        sum_{r<=R} (-c(mu))^r / r! * b_eps(lam)  vs  q^{-A} b0(xbar)     (n > 2)
        sum_r (-c(mu))^r/r! (1 + sum_s c(lam)^s/s!) vs q^{-A} b0(xbar)   (n = 2)
    """
    R, Smax = caps
    h = handle_coefficients(cand, S, branch=branch)

    def partial(c: NovikovElement, cap: int) -> NovikovElement:
        total, term = NovikovElement.zero(), NovikovElement.one()
        for r in range(cap + 1):
            total = total + term * (1 / math.factorial(r))
            term = term * c
        return total

    a = h.c_mu.abs_sum()
    rows = []
    path_a = partial(h.c_mu, R)
    closed = h.meridian_weight
    rows.append(_resummation_row("meridian", path_a, exp_series(h.c_mu), closed, tail(a, R), tol))

    neg = partial(-h.c_mu, R)
    closed_neg = cand.b[S.xbar].shift(-S.area)
    if S.dim > 2:
        path_a = neg * h.c_lam
        bound = tail(a, R) * h.c_lam.abs_sum()
        path_b = exp_series(-h.c_mu) * h.c_lam
    else:
        b = h.c_lam.abs_sum()
        path_a = neg * (1 + partial(h.c_lam, Smax))
        bound = tail(a, R) * (1 + math.exp(b)) + math.exp(a) * tail(b, Smax)
        path_b = exp_series(-h.c_mu) * (1 + exp_series(h.c_lam))
    rows.append(_resummation_row("negative corner", path_a, path_b, closed_neg, bound, tol))
    return rows


def _resummation_row(kind: str, path_a: NovikovElement, path_b: NovikovElement,
                     closed: NovikovElement, bound: float, tol: float) -> Dict[str, Any]:
    order = min(path_a.truncation, path_b.truncation, closed.truncation)
    diff_closed = max_abs_difference(truncate(path_a, order), truncate(closed, order))
    diff_series = max_abs_difference(truncate(path_b, order), truncate(closed, order))
    return {"kind": kind, "path_a": path_a, "path_b": path_b, "closed_form": closed,
            "difference": diff_closed, "series_difference": diff_series, "tail_bound": bound,
            "passed": diff_closed <= bound + tol and diff_series <= tol}
