# -*- coding: utf-8 -*-
"""
Floer differential, rank certificates and essential quotients.

The deformed differential m^b_1 of a projectively flat candidate is a square
matrix over the Novikov field.  Its rank is found by pivot elimination with
minimal-valuation pivots (ties broken by row then column order), which
yields a certificate: the pivots used and the margin between the largest
pivot valuation and the lowest order at which a discarded entry is still
unknown.  A positive margin proves the rank is independent of the
truncation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .ainfty import Cochain, CurvedAInftyAlgebra, deformed
from .mc import MCCandidate, potential
from .novikov import NovikovElement, Truncation, format_exponent, invert, val_q

logger = logging.getLogger(__name__)


class FloerError(ValueError):
    pass


class NotProjectivelyFlat(FloerError):
    pass


class SquareNotZero(FloerError):
    pass


class RankUnstable(FloerError):
    pass


class NotSubcomplex(FloerError):
    pass


class NotAcyclic(FloerError):
    pass


@dataclass
class NovikovMatrix:
    """Sparse matrix indexed by generator names; entries[(row, col)]."""

    rows: List[str]
    cols: List[str]
    entries: Dict[Tuple[str, str], NovikovElement] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {k: v for k, v in self.entries.items() if not v.is_zero()}

    def get(self, row: str, col: str) -> NovikovElement:
        return self.entries.get((row, col), NovikovElement.zero())

    @classmethod
    def from_columns(cls, rows: Sequence[str], columns: Dict[str, Cochain]) -> "NovikovMatrix":
        entries = {}
        for col, vector in columns.items():
            for row, value in vector.items():
                if row not in rows:
                    raise FloerError(f"column '{col}' has entry in unknown row '{row}'")
                entries[(row, col)] = value
        return cls(list(rows), list(columns), entries)

    def column(self, col: str) -> Cochain:
        return Cochain({r: v for (r, c), v in self.entries.items() if c == col})

    def transpose(self) -> "NovikovMatrix":
        return NovikovMatrix(list(self.cols), list(self.rows),
                             {(c, r): v for (r, c), v in self.entries.items()})

    def __matmul__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        if set(self.cols) != set(other.rows):
            raise FloerError("matrix shapes do not compose")
        by_row: Dict[str, List[Tuple[str, NovikovElement]]] = {}
        for (k, c), v in other.entries.items():
            by_row.setdefault(k, []).append((c, v))
        out: Dict[Tuple[str, str], NovikovElement] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, []):
                out[(r, c)] = out[(r, c)] + v * w if (r, c) in out else v * w
        return NovikovMatrix(list(self.rows), list(other.cols), out)

    def __sub__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] - v if k in out else -v
        return NovikovMatrix(list(self.rows), list(self.cols), out)

    def max_abs(self) -> float:
        return max((abs(c) for v in self.entries.values() for _, c in v.terms), default=0.0)

    def to_json(self) -> Dict[str, Any]:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [{"row": r, "col": c, "value": v.to_json()} for (r, c), v in self.entries.items()]}


@dataclass
class RankCertificate:
    rank: int
    pivots: List[Tuple[str, str, Fraction]]
    margin: Truncation
    safety_gap: Fraction
    stable: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "pivots": [{"row": r, "col": c, "val": format_exponent(v)} for r, c, v in self.pivots],
            "margin": format_exponent(self.margin),
            "safety_gap": format_exponent(self.safety_gap),
            "stable": self.stable,
        }


def rank_certificate(M: NovikovMatrix, truncation: Truncation = math.inf,
                     safety_gap: Fraction = Fraction(1, 2)) -> RankCertificate:
    """
    Rank of M by minimal-valuation pivoting.

    Input parameters:
    M           -   NovikovMatrix
    truncation  -   order T to which the entries are trusted
    safety_gap  -   margin below which the certificate is flagged unstable

    Output parameters:
    cert        -   RankCertificate; RankUnstable is raised when margin <= 0
    """
    row_index = {r: i for i, r in enumerate(M.rows)}
    col_index = {c: j for j, c in enumerate(M.cols)}
    work: Dict[str, Dict[str, NovikovElement]] = {}
    for (r, c), v in M.entries.items():
        work.setdefault(r, {})[c] = v
    discarded: Truncation = truncation
    pivots: List[Tuple[str, str, Fraction]] = []

    while True:
        best = None
        for r, row in work.items():
            for c, v in row.items():
                key = (val_q(v), row_index[r], col_index[c])
                if best is None or key < best[0]:
                    best = (key, r, c)
        if best is None:
            break
        _, pr, pc = best
        pivot_row = work.pop(pr)
        p = pivot_row.pop(pc)
        pivots.append((pr, pc, val_q(p)))
        p_inv = invert(p)
        for r, row in list(work.items()):
            if pc not in row:
                continue
            factor = row.pop(pc) * p_inv
            for c, v in pivot_row.items():
                new = row.get(c, NovikovElement.zero()) - factor * v
                if new.is_zero():
                    discarded = min(discarded, new.truncation)
                    row.pop(c, None)
                else:
                    row[c] = new
            if not row:
                del work[r]

    top = max((v for _, _, v in pivots), default=None)
    if top is None:
        margin = discarded
    else:
        margin = discarded - top if not math.isinf(discarded) else math.inf
    stable = margin >= safety_gap
    if margin <= 0:
        raise RankUnstable(f"rank {len(pivots)} not certified: margin {format_exponent(margin)}")
    if not stable:
        logger.warning("rank certificate margin %s below safety gap %s",
                       format_exponent(margin), format_exponent(safety_gap))
    return RankCertificate(len(pivots), pivots, margin, safety_gap, stable)


def hf_of_matrix(M: NovikovMatrix, truncation: Truncation = math.inf,
                 safety_gap: Fraction = Fraction(1, 2)) -> Tuple[int, RankCertificate]:
    """dim ker / im = N - 2 rank for a square differential."""
    cert = rank_certificate(M, truncation, safety_gap)
    return len(M.cols) - 2 * cert.rank, cert


# ---------------------------------------------------------------------------


def floer_differential(A: CurvedAInftyAlgebra, b: Cochain, delta: Optional[Fraction] = None,
                       tol: float = 1e-9) -> NovikovMatrix:
    """Matrix of m^b_1 over all generators; b must be projectively flat."""
    delta = A.delta_gap if delta is None else delta
    _, flat = potential(A, MCCandidate(b, delta), tol)
    if not flat:
        raise NotProjectivelyFlat("m^b_0 is not a multiple of the strict unit")
    names = list(A.generators)
    columns = {name: deformed(A, b, [name], delta) for name in names}
    return NovikovMatrix.from_columns(names, columns)


def check_square_zero(M: NovikovMatrix, tol: float = 1e-9) -> None:
    defect = (M @ M).max_abs()
    if defect > tol:
        raise SquareNotZero(f"d^2 has coefficient of size {defect:.3e}")


def hf_dimension(A: CurvedAInftyAlgebra, b: Cochain, delta: Optional[Fraction] = None,
                 safety_gap: Fraction = Fraction(1, 2), tol: float = 1e-9) -> Tuple[int, RankCertificate]:
    """
    Dimension of HF(L, b) with its rank certificate.

    Raises NotProjectivelyFlat, SquareNotZero or RankUnstable.
    """
    M = floer_differential(A, b, delta, tol)
    check_square_zero(M, tol)
    dim, cert = hf_of_matrix(M, A.truncation, safety_gap)
    logger.info("HF dimension %d (rank %d, margin %s)", dim, cert.rank, format_exponent(cert.margin))
    return dim, cert


# ---------------------------------------------------------------------------
# essential quotient


@dataclass
class QuotientComplex:
    generators: List[str]
    differential: NovikovMatrix
    loc_basis: List[Tuple[str, Cochain]]


def _echelon(vectors: Sequence[Cochain], order: Dict[str, int]) -> List[Tuple[str, Cochain]]:
    """Reduced echelon form, pivot = last support element in basis order."""
    basis: List[Tuple[str, Cochain]] = []
    for vector in vectors:
        v = _reduce(vector, basis)
        if v.is_zero():
            continue
        pivot = max(v.support(), key=lambda s: order[s])
        v = v * invert(v[pivot])
        basis = [(p, w - v * w[pivot]) if pivot in w else (p, w) for p, w in basis]
        basis.append((pivot, v))
    return basis


def _reduce(vector: Cochain, basis: Sequence[Tuple[str, Cochain]]) -> Cochain:
    v = vector
    for pivot, w in basis:
        if pivot in v:
            v = v - w * v[pivot]
    return v


def ess_quotient(M: NovikovMatrix, loc: Sequence[Cochain], tol: float = 1e-9) -> QuotientComplex:
    """
    Quotient of a complex by an acyclic subcomplex spanned by `loc`.

    Input parameters:
    M       -   square NovikovMatrix (columns are images of generators)
    loc     -   cochains spanning the subcomplex CF^loc

    Output parameters:
    Q       -   QuotientComplex on the generators that are not pivots of loc,
                with the induced differential
    """
    order = {g: i for i, g in enumerate(M.cols)}
    for v in loc:
        unknown = [s for s in v.support() if s not in order]
        if unknown:
            raise NotSubcomplex(f"loc vector uses unknown generators {unknown}")
    basis = _echelon(loc, order)

    def apply(v: Cochain) -> Cochain:
        out = Cochain()
        for name, coef in v.items():
            out = out + M.column(name) * coef
        return out

    for pivot, v in basis:
        image = _reduce(apply(v), basis)
        if image.max_abs() > tol:
            raise NotSubcomplex(f"image of loc vector with pivot '{pivot}' leaves the subcomplex")

    pivots = {p for p, _ in basis}
    sub_rank = rank_certificate(_in_loc_coordinates(basis, apply)).rank
    if 2 * sub_rank != len(basis):
        raise NotAcyclic(f"subcomplex of dimension {len(basis)} has rank {sub_rank}")

    keep = [g for g in M.cols if g not in pivots]
    columns = {}
    for g in keep:
        image = _reduce(M.column(g), basis)
        columns[g] = Cochain({k: v for k, v in image.items() if k in keep})
    Q = NovikovMatrix.from_columns(keep, columns)
    logger.debug("ess_quotient: %d generators, %d in loc", len(keep), len(basis))
    return QuotientComplex(keep, Q, basis)


def _in_loc_coordinates(basis: Sequence[Tuple[str, Cochain]], apply) -> NovikovMatrix:
    """Matrix of the differential restricted to loc, in the echelon basis."""
    pivots = [p for p, _ in basis]
    entries = {}
    for q, v in basis:
        image = apply(v)
        for p, _ in basis:
            if p in image:
                entries[(p, q)] = image[p]
    return NovikovMatrix(pivots, pivots, entries)


# ---------------------------------------------------------------------------


def conjugate_differential(M_eps: NovikovMatrix, P: NovikovMatrix) -> NovikovMatrix:
    """P^T M_eps P."""
    return P.transpose() @ M_eps @ P


def conjugation_defect(M0: NovikovMatrix, M_eps: NovikovMatrix, P: NovikovMatrix) -> float:
    """Largest coefficient of P^T M_eps P - M0."""
    return (conjugate_differential(M_eps, P) - M0).max_abs()
