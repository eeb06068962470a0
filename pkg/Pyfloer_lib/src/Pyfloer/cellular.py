# -*- coding: utf-8 -*-
"""
Finite cell complexes with a dual complex and a cellular diagonal.

A CellComplex carries
    cells           -   name -> dimension, in insertion order
    boundary        -   (sigma, tau) -> integer coefficient of tau in d(sigma)
    dual_cells      -   name -> dimension of the dual complex (None: self-dual)
    dual_boundary   -   same convention on the dual complex
    diagonal        -   (cell, dual cell) -> integer c(cell, dual cell), the
                        coefficients of the diagonal class  sum c(a, b) a x b
    dim             -   dimension n of the manifold

The diagonal must be a cycle: for every cell a and dual cell g,

    sum_b d(b, a) c(b, g) + sum_b c(a, b) dd(b, g) = 0,

with d(b, a) the coefficient of a in the boundary of b and dd(b, g) the
coefficient of g in the dual boundary of b.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

BoundaryMap = Dict[Tuple[str, str], int]


class CellularError(ValueError):
    """Base class for malformed cell complexes."""


class DuplicateCell(CellularError):
    pass


class UnknownGenerator(CellularError):
    pass


class MissingBall(CellularError):
    pass


class DimensionTooLow(CellularError):
    pass


class DimensionMismatch(CellularError):
    pass


@dataclass(frozen=True)
class Violation:
    """A failed structural check; `cells` names the offending pair."""

    rule: str
    cells: Tuple[str, ...]
    value: int = 0

    def __str__(self) -> str:
        pair = ", ".join(self.cells)
        return f"{self.rule} fails at ({pair}): {self.value}"


@dataclass
class CellComplex:
    dim: int
    cells: Dict[str, int]
    boundary: BoundaryMap = field(default_factory=dict)
    diagonal: BoundaryMap = field(default_factory=dict)
    dual_cells: Optional[Dict[str, int]] = None
    dual_boundary: Optional[BoundaryMap] = None

    def __post_init__(self):
        self.boundary = {k: int(v) for k, v in self.boundary.items() if int(v) != 0}
        self.diagonal = {k: int(v) for k, v in self.diagonal.items() if int(v) != 0}
        if self.dual_boundary is not None:
            self.dual_boundary = {k: int(v) for k, v in self.dual_boundary.items() if int(v) != 0}

    # -- accessors ------------------------------------------------------

    @property
    def self_dual(self) -> bool:
        return self.dual_cells is None

    @property
    def duals(self) -> Dict[str, int]:
        return self.cells if self.dual_cells is None else self.dual_cells

    @property
    def dual_boundary_map(self) -> BoundaryMap:
        return self.boundary if self.dual_boundary is None else self.dual_boundary

    def names(self) -> List[str]:
        return list(self.cells)

    def cells_of_dim(self, k: int) -> List[str]:
        return [c for c, d in self.cells.items() if d == k]

    def top_cells(self) -> List[str]:
        return self.cells_of_dim(self.dim)

    def codim_parity(self, name: str) -> int:
        if name not in self.cells:
            raise UnknownGenerator(f"unknown cell '{name}'")
        return (self.dim - self.cells[name]) % 2

    def chain_boundary(self, name: str) -> Dict[str, int]:
        if name not in self.cells:
            raise UnknownGenerator(f"unknown cell '{name}'")
        return {tau: coef for (sigma, tau), coef in self.boundary.items() if sigma == name}

    def diagonal_row(self, name: str) -> Dict[str, int]:
        return {g: coef for (a, g), coef in self.diagonal.items() if a == name}

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.cells.values())

    def closure(self, name: str) -> List[str]:
        """Cells in the closure of `name` reached through nonzero boundary coefficients."""
        seen, stack = [], [name]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.append(cur)
            stack.extend(self.chain_boundary(cur))
        return seen

    # -- matrices -------------------------------------------------------

    @staticmethod
    def _matrix(names: Sequence[str], bmap: BoundaryMap) -> np.ndarray:
        """M[i, j] = coefficient of names[i] in the boundary of names[j]."""
        index = {n: i for i, n in enumerate(names)}
        mat = np.zeros((len(names), len(names)), dtype=np.int64)
        for (sigma, tau), coef in bmap.items():
            if sigma in index and tau in index:
                mat[index[tau], index[sigma]] = coef
        return mat

    def boundary_matrix(self) -> np.ndarray:
        return self._matrix(self.names(), self.boundary)

    def dual_boundary_matrix(self) -> np.ndarray:
        return self._matrix(list(self.duals), self.dual_boundary_map)

    def diagonal_matrix(self) -> np.ndarray:
        rows = {n: i for i, n in enumerate(self.cells)}
        cols = {n: i for i, n in enumerate(self.duals)}
        mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for (a, g), coef in self.diagonal.items():
            if a in rows and g in cols:
                mat[rows[a], cols[g]] = coef
        return mat

    # -- serialization --------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "dim": self.dim,
            "cells": [{"name": n, "dim": d} for n, d in self.cells.items()],
            "boundary": [{"from": s, "to": t, "coef": c} for (s, t), c in self.boundary.items()],
            "diagonal": [{"cell": a, "dual": g, "coef": c} for (a, g), c in self.diagonal.items()],
        }
        if self.dual_cells is not None:
            data["dual_cells"] = [{"name": n, "dim": d} for n, d in self.dual_cells.items()]
            data["dual_boundary"] = [{"from": s, "to": t, "coef": c}
                                     for (s, t), c in (self.dual_boundary or {}).items()]
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "CellComplex":
        cells = _read_cells(data.get("cells", []), "cells")
        dual_cells = _read_cells(data["dual_cells"], "dual_cells") if data.get("dual_cells") else None
        boundary = _read_pairs(data.get("boundary", []), "from", "to", "boundary")
        dual_boundary = (_read_pairs(data.get("dual_boundary", []), "from", "to", "dual_boundary")
                         if dual_cells is not None else None)
        diagonal = _read_pairs(data.get("diagonal", []), "cell", "dual", "diagonal")
        complex_ = cls(int(data["dim"]), cells, boundary, diagonal, dual_cells, dual_boundary)
        _check_names(complex_)
        return complex_


def _read_cells(entries: Iterable[Mapping[str, Any]], label: str) -> Dict[str, int]:
    cells: Dict[str, int] = {}
    for k, entry in enumerate(entries):
        try:
            name, dim = str(entry["name"]), int(entry["dim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CellularError(f"{label}[{k}]: {exc}") from exc
        if name in cells:
            raise DuplicateCell(f"{label}: cell '{name}' listed twice")
        cells[name] = dim
    return cells


def _read_pairs(entries: Iterable[Mapping[str, Any]], a: str, b: str, label: str) -> BoundaryMap:
    out: BoundaryMap = {}
    for k, entry in enumerate(entries):
        try:
            key = (str(entry[a]), str(entry[b]))
            out[key] = out.get(key, 0) + int(entry["coef"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CellularError(f"{label}[{k}]: {exc}") from exc
    return out


def _check_names(C: CellComplex) -> None:
    for sigma, tau in C.boundary:
        for name in (sigma, tau):
            if name not in C.cells:
                raise UnknownGenerator(f"boundary refers to unknown cell '{name}'")
    for sigma, tau in C.dual_boundary_map:
        for name in (sigma, tau):
            if name not in C.duals:
                raise UnknownGenerator(f"dual boundary refers to unknown cell '{name}'")
    for a, g in C.diagonal:
        if a not in C.cells:
            raise UnknownGenerator(f"diagonal refers to unknown cell '{a}'")
        if g not in C.duals:
            raise UnknownGenerator(f"diagonal refers to unknown dual cell '{g}'")


# ---------------------------------------------------------------------------


def validate_complex(C: CellComplex) -> List[Violation]:
    """
    Structural checks of a cell complex with diagonal.

    Input parameters:
    C           -   CellComplex

    Output parameters:
    violations  -   list of Violation, empty when
                    * boundary coefficients lower dimension by one
                    * d o d = 0 on the complex and on its dual
                    * diagonal entries pair dimensions k and n - k
                    * the diagonal class is a cycle
    """
    violations: List[Violation] = []
    try:
        _check_names(C)
    except UnknownGenerator as exc:
        logger.debug("validate_complex: %s", exc)
        return [Violation("names", (str(exc),), 1)]

    for (sigma, tau), coef in C.boundary.items():
        if C.cells[tau] != C.cells[sigma] - 1:
            violations.append(Violation("boundary dimension", (sigma, tau), coef))
    for (sigma, tau), coef in C.dual_boundary_map.items():
        if C.duals[tau] != C.duals[sigma] - 1:
            violations.append(Violation("dual boundary dimension", (sigma, tau), coef))
    for (a, g), coef in C.diagonal.items():
        if C.cells[a] + C.duals[g] != C.dim:
            violations.append(Violation("diagonal dimension", (a, g), coef))

    names, dual_names = C.names(), list(C.duals)
    B = C.boundary_matrix()
    D = C.dual_boundary_matrix()
    for label, mat, labels in (("d^2 = 0", B, names), ("dual d^2 = 0", D, dual_names)):
        square = mat @ mat
        for i, j in zip(*np.nonzero(square)):
            violations.append(Violation(label, (labels[j], labels[i]), int(square[i, j])))

    # coefficient of a x g in (d x 1 + 1 x d_dual) of the diagonal
    Cmat = C.diagonal_matrix()
    defect = B @ Cmat + Cmat @ D.T
    for i, j in zip(*np.nonzero(defect)):
        violations.append(Violation("diagonal cycle", (names[i], dual_names[j]), int(defect[i, j])))

    if violations:
        logger.debug("validate_complex found %d violations", len(violations))
    return violations


# ---------------------------------------------------------------------------


class ExtendedDiagonal:
    """
    Diagonal coefficients extended to self-intersection generators,
    c(x, xbar) = c(xbar, x) = 1 for every pair (x, xbar).
    """

    def __init__(self, C: CellComplex, si_pairs: Sequence[Tuple[str, str]] = ()):
        self.complex = C
        self.rows: Dict[str, Dict[str, int]] = {}
        for a in dict.fromkeys(a for a, _ in C.diagonal):
            self.rows[a] = C.diagonal_row(a)
        self.generators = set(C.cells) | set(C.duals)
        for x, xbar in si_pairs:
            for name in (x, xbar):
                if name in C.cells or name in C.duals:
                    raise DuplicateCell(f"self-intersection generator '{name}' collides with a cell")
            self.rows.setdefault(x, {})[xbar] = 1
            self.rows.setdefault(xbar, {})[x] = 1
            self.generators.update((x, xbar))

    def __call__(self, a: str, b: str) -> int:
        if a not in self.generators:
            raise UnknownGenerator(f"unknown generator '{a}'")
        return self.rows.get(a, {}).get(b, 0)

    def row(self, a: str) -> Dict[str, int]:
        if a not in self.generators:
            raise UnknownGenerator(f"unknown generator '{a}'")
        return dict(self.rows.get(a, {}))


def extend_diagonal(C: CellComplex, si_pairs: Sequence[Tuple[str, str]] = ()) -> ExtendedDiagonal:
    return ExtendedDiagonal(C, si_pairs)


def _vertices(C: CellComplex, name: str) -> List[str]:
    """0-cells in the closure of a cell; the first 0-cell of C when the closure has none."""
    vertices = [cell for cell in C.closure(name) if C.cells.get(cell) == 0]
    if not vertices:
        vertices = C.cells_of_dim(0)[:1]
    return vertices


def _front_vertex(C: CellComplex, name: str) -> Optional[str]:
    vertices = _vertices(C, name)
    return vertices[0] if vertices else None


def _back_vertex(C: CellComplex, name: str) -> Optional[str]:
    vertices = _vertices(C, name)
    return vertices[-1] if vertices else None


def cup_product(C: CellComplex, a: Mapping[str, float], b: Mapping[str, float],
                deg_a: int, deg_b: int) -> Dict[str, float]:
    """
    Product of cellular cochains through the diagonal.

    Degree zero factors act pointwise through the front (resp. back) vertex
    of each cell.  Degrees above n give the zero cochain.

    Limitations:
    * complementary degrees (deg_a + deg_b = n, both positive) pair through
      the diagonal rows,  sum c(s, t) a(s) b(t),  and the whole value is put
      on the first top cell.  Only its evaluation on the fundamental class
      is meaningful; how it spreads over the top cells is not computed.
    * positive degrees with deg_a + deg_b < n raise DimensionMismatch, since
      a diagonal cycle alone does not determine them.
    """
    total = deg_a + deg_b
    if total > C.dim:
        return {}
    if deg_a == 0:
        out = {}
        for s in C.cells_of_dim(deg_b):
            v = _front_vertex(C, s)
            value = a.get(v, 0) * b.get(s, 0) if v is not None else 0
            if value:
                out[s] = value
        return out
    if deg_b == 0:
        out = {}
        for s in C.cells_of_dim(deg_a):
            v = _back_vertex(C, s)
            value = a.get(s, 0) * b.get(v, 0) if v is not None else 0
            if value:
                out[s] = value
        return out
    if total == C.dim:
        value = sum(coef * a_s * b.get(t, 0)
                    for s, a_s in a.items() for t, coef in C.diagonal_row(s).items())
        tops = C.top_cells()
        return {tops[0]: value} if value and tops else {}
    raise DimensionMismatch(f"cup product of degrees {deg_a} and {deg_b} needs more than a diagonal cycle")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardBall:
    """Cells of a standard n-ball: top cell, its boundary sphere cell and a point."""

    top: str
    sphere: str
    point: str


def surger_cells(C0: CellComplex, balls: Tuple[StandardBall, StandardBall],
                 longitude: str = "sigma_1", neck: str = "sigma_n",
                 sign_flags: Optional[Mapping[str, int]] = None,
                 handle_pattern: Optional[Mapping[Tuple[str, str], int]] = None) -> CellComplex:
    """
    Replace two standard balls by a handle S^{n-1} x [0, 1].

    Input parameters:
    C0              -   self-dual CellComplex of dimension n >= 2
    balls           -   (plus ball, minus ball)
    longitude       -   name of the new 1-cell,      d = s_l (point+ - point-)
    neck            -   name of the new n-cell,      d = s_m (sphere+ - sphere-)
    sign_flags      -   {"longitude": +-1, "meridian": +-1}, default +1
    handle_pattern  -   diagonal entries for the handle; default
                        c(sphere, longitude) = c(longitude, sphere) = coefficient
                        of the sphere in the boundary of its removed top cell

    Output parameters:
    Ceps            -   surgered CellComplex
    """
    n = C0.dim
    if n < 2:
        raise DimensionTooLow(f"surgery needs n >= 2, got {n}")
    if not C0.self_dual:
        raise DimensionMismatch("surger_cells works on self-dual complexes")
    plus, minus = balls
    for ball in balls:
        for name in (ball.top, ball.sphere, ball.point):
            if name not in C0.cells:
                raise MissingBall(f"ball cell '{name}' is not in the complex")
        if (C0.cells[ball.top], C0.cells[ball.sphere], C0.cells[ball.point]) != (n, n - 1, 0):
            raise DimensionMismatch(f"ball ({ball.top}, {ball.sphere}, {ball.point}) has wrong dimensions")
        if abs(C0.chain_boundary(ball.top).get(ball.sphere, 0)) != 1 or len(C0.chain_boundary(ball.top)) != 1:
            raise MissingBall(f"boundary of '{ball.top}' is not +-'{ball.sphere}'")
    for name in (longitude, neck):
        if name in C0.cells:
            raise DuplicateCell(f"handle cell '{name}' already present")

    flags = {"longitude": 1, "meridian": 1}
    flags.update(sign_flags or {})
    removed = {plus.top, minus.top}

    cells = {c: d for c, d in C0.cells.items() if c not in removed}
    cells[longitude] = 1
    cells[neck] = n
    boundary = {k: v for k, v in C0.boundary.items() if not set(k) & removed}
    boundary[(longitude, plus.point)] = flags["longitude"]
    boundary[(longitude, minus.point)] = -flags["longitude"]
    boundary[(neck, plus.sphere)] = flags["meridian"]
    boundary[(neck, minus.sphere)] = -flags["meridian"]

    diagonal = {k: v for k, v in C0.diagonal.items() if not set(k) & removed}
    pattern = handle_pattern
    if pattern is None:
        pattern = {}
        for ball in balls:
            sign = C0.boundary[(ball.top, ball.sphere)]
            pattern[(ball.sphere, longitude)] = sign
            pattern[(longitude, ball.sphere)] = sign
    diagonal.update(pattern)

    Ceps = CellComplex(n, cells, boundary, diagonal)
    logger.debug("surger_cells: removed %s, added %s, %s", sorted(removed), longitude, neck)
    return Ceps


def euler_change(n: int) -> int:
    """chi(C_eps) - chi(C_0) = -2(-1)^n + ((-1)^n - 1)."""
    return -2 * (-1) ** n + ((-1) ** n - 1)
