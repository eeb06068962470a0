# -*- coding: utf-8 -*-
"""
Curved A-infinity algebra of an immersed Lagrangian, built from a disk atlas.

Generators are the cells of the (self-dual) cell complex, the
self-intersection generators x, xbar of every transverse double point and
the two units WHITE (strict unit) and GREY (homotopy unit).  Structure maps

    m_d(s_1, ..., s_d) = sum_{disks u with inputs (s_1..s_d)} w(u) sum_g c(out(u), g) g

where the weight of a disk is

    w(u) = (-1)^heart * sym * holonomy * sign * q^area,   heart = sum_i i |s_i|,

and c is the diagonal extended by c(x, xbar) = c(xbar, x) = 1.  Strict unit
rules for WHITE are applied before the atlas is consulted, and
m_1(GREY) additionally contains WHITE minus the geometric unit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .cellular import CellComplex, ExtendedDiagonal, UnknownGenerator, extend_diagonal
from .novikov import (NovikovElement, Truncation, format_exponent, invert, monomial,
                      parse_exponent, parse_truncation, truncate, val_q)

logger = logging.getLogger(__name__)

WHITE = "1w"
GREY = "1g"
UNIT_CONVENTIONS = ("literal", "koszul")


class AlgebraError(ValueError):
    """Base class for A-infinity structure errors."""


class NotOdd(AlgebraError):
    pass


class NotAdmissible(AlgebraError):
    pass


class NonConvergent(AlgebraError):
    pass


# ---------------------------------------------------------------------------
# cochains


class Cochain:
    """Finite linear combination of generators with Novikov coefficients."""

    __slots__ = ("_coef",)

    def __init__(self, coefficients: Optional[Mapping[str, Any]] = None):
        self._coef: Dict[str, NovikovElement] = {}
        for name, value in (coefficients or {}).items():
            element = NovikovElement.coerce(value)
            if element.terms:
                self._coef[name] = element

    @classmethod
    def basis(cls, name: str, coefficient: Any = 1) -> "Cochain":
        return cls({name: coefficient})

    def __getitem__(self, name: str) -> NovikovElement:
        return self._coef.get(name, NovikovElement.zero())

    def __contains__(self, name: str) -> bool:
        return name in self._coef

    def __iter__(self) -> Iterator[str]:
        return iter(self._coef)

    def __len__(self) -> int:
        return len(self._coef)

    def items(self):
        return self._coef.items()

    def support(self) -> List[str]:
        return list(self._coef)

    def is_zero(self) -> bool:
        return not self._coef

    def __add__(self, other: "Cochain") -> "Cochain":
        out = dict(self._coef)
        for name, value in other.items():
            out[name] = out[name] + value if name in out else value
        return Cochain(out)

    def __neg__(self) -> "Cochain":
        return Cochain({k: -v for k, v in self._coef.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __mul__(self, factor: Any) -> "Cochain":
        return Cochain({k: v * factor for k, v in self._coef.items()})

    __rmul__ = __mul__

    def truncate(self, order: Truncation) -> "Cochain":
        return Cochain({k: truncate(v, order) for k, v in self._coef.items()})

    def without(self, *names: str) -> "Cochain":
        return Cochain({k: v for k, v in self._coef.items() if k not in names})

    def valuation(self) -> Truncation:
        return min((val_q(v) for v in self._coef.values()), default=math.inf)

    def max_abs(self) -> float:
        return max((abs(c) for v in self._coef.values() for _, c in v.terms), default=0.0)

    def nearly_equal(self, other: "Cochain", tol: float = 1e-9) -> bool:
        return (self - other).max_abs() <= tol

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v!r}" for k, v in self._coef.items())
        return f"Cochain({{{body}}})"

    def to_json(self) -> Dict[str, Any]:
        return {name: value.to_json() for name, value in self._coef.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Cochain":
        out = {}
        for name, value in data.items():
            try:
                out[str(name)] = NovikovElement.from_json(value)
            except ValueError as exc:
                raise ValueError(f"coefficient of '{name}': {exc}") from exc
        return cls(out)


# ---------------------------------------------------------------------------
# generators and disks


@dataclass(frozen=True)
class Generator:
    name: str
    kind: str           # "cell", "si" or "unit"
    parity: int
    conjugate: Optional[str] = None


@dataclass(frozen=True)
class Disk:
    """
    One holomorphic disk (or a symmetric family of them).

    inputs              -   generator names in boundary order
    output              -   output constraint; with direct=False the output is
                            sum_g c(output, g) g, with direct=True it is output itself
    area                -   symplectic area as an exact Fraction
    sign                -   orientation sign +-1
    sym                 -   rational symmetry weight
    holonomy            -   ((label, power), ...) local-system crossings
    constant_on_handle  -   constant disk at a surgered self-intersection
    classical           -   Morse/cellular disk of the complex itself
    passes              -   optional '+'/'-' per handle corner, for the surgery transform
    """

    inputs: Tuple[str, ...]
    output: str
    area: Fraction
    sign: int = 1
    sym: Fraction = Fraction(1)
    holonomy: Tuple[Tuple[str, int], ...] = ()
    constant_on_handle: bool = False
    classical: bool = False
    direct: bool = False
    passes: Optional[Tuple[str, ...]] = None

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "inputs": list(self.inputs),
            "output": self.output,
            "area": format_exponent(self.area),
            "sign": self.sign,
            "sym": format_exponent(self.sym),
        }
        if self.holonomy:
            data["holonomy"] = [{"label": lab, "power": p} for lab, p in self.holonomy]
        for flag in ("constant_on_handle", "classical", "direct"):
            if getattr(self, flag):
                data[flag] = True
        if self.passes is not None:
            data["passes"] = list(self.passes)
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Disk":
        sign = int(data.get("sign", 1))
        if sign not in (1, -1):
            raise ValueError(f"disk sign must be +-1, got {sign}")
        holonomy = tuple((str(h["label"]), int(h.get("power", 1))) for h in data.get("holonomy", []))
        passes = data.get("passes")
        return cls(
            inputs=tuple(str(s) for s in data.get("inputs", [])),
            output=str(data["output"]),
            area=parse_exponent(data["area"]),
            sign=sign,
            sym=parse_exponent(data.get("sym", 1)),
            holonomy=holonomy,
            constant_on_handle=bool(data.get("constant_on_handle", False)),
            classical=bool(data.get("classical", False)),
            direct=bool(data.get("direct", False)),
            passes=tuple(passes) if passes is not None else None,
        )


def classical_atlas(C: CellComplex) -> Tuple[Disk, ...]:
    """Area zero direct disks realizing m_1 = d on cells."""
    disks = []
    for (sigma, tau), coef in C.boundary.items():
        parity = C.codim_parity(sigma)
        sign = (1 if coef > 0 else -1) * (-1) ** parity
        disks.append(Disk((sigma,), tau, Fraction(0), sign, Fraction(abs(coef)),
                          classical=True, direct=True))
    return tuple(disks)


# ---------------------------------------------------------------------------


@dataclass
class CurvedAInftyAlgebra:
    complex: CellComplex
    atlas: Tuple[Disk, ...]
    delta_gap: Fraction
    si_pairs: Tuple[Tuple[str, str], ...] = ()
    si_parity: Dict[str, int] = field(default_factory=dict)
    local_system: Dict[str, NovikovElement] = field(default_factory=dict)
    truncation: Truncation = Fraction(6)
    unit_convention: str = "literal"
    resummed: frozenset = frozenset()
    tail_bound: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.unit_convention not in UNIT_CONVENTIONS:
            raise ValueError(f"unit_convention must be one of {UNIT_CONVENTIONS}")
        self.atlas = tuple(self.atlas)
        self.si_pairs = tuple(tuple(p) for p in self.si_pairs)
        self.diagonal: ExtendedDiagonal = extend_diagonal(self.complex, self.si_pairs)
        self.generators: Dict[str, Generator] = {}
        n = self.complex.dim
        for cell in self.complex.cells:
            self.generators[cell] = Generator(cell, "cell", self.complex.codim_parity(cell))
        for x, xbar in self.si_pairs:
            self.generators[x] = Generator(x, "si", self.si_parity.get(x, 1) % 2, xbar)
            self.generators[xbar] = Generator(xbar, "si", self.si_parity.get(xbar, (n - 1) % 2) % 2, x)
        self.generators[WHITE] = Generator(WHITE, "unit", 0)
        self.generators[GREY] = Generator(GREY, "unit", 1)
        self._words: Dict[Tuple[str, ...], List[Disk]] = {}
        for disk in self.atlas:
            self._words.setdefault(disk.inputs, []).append(disk)

    # -- lookups --------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.complex.dim

    def require(self, name: str) -> Generator:
        try:
            return self.generators[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator '{name}'") from None

    def parity(self, name: str) -> int:
        return self.require(name).parity

    def is_si(self, name: str) -> bool:
        return self.require(name).kind == "si"

    def words(self) -> List[Tuple[str, ...]]:
        return list(self._words)

    def disks_for(self, word: Sequence[str]) -> List[Disk]:
        return self._words.get(tuple(word), [])

    def heart(self, word: Sequence[str]) -> int:
        return heart_sign([self.parity(s) for s in word])

    def holonomy(self, disk: Disk) -> NovikovElement:
        value = NovikovElement.one()
        for label, power in disk.holonomy:
            y = self.local_system.get(label, NovikovElement.one())
            factor = y if power >= 0 else invert(y)
            for _ in range(abs(power)):
                value = value * factor
        return value

    def weight(self, disk: Disk) -> NovikovElement:
        scalar = (-1) ** self.heart(disk.inputs) * disk.sign * float(disk.sym)
        return self.holonomy(disk) * monomial(scalar, disk.area)

    def disk_output(self, disk: Disk) -> Cochain:
        self.require(disk.output)
        if disk.direct:
            return Cochain.basis(disk.output)
        return Cochain({g: c for g, c in self.diagonal.row(disk.output).items()})

    def with_changes(self, **changes: Any) -> "CurvedAInftyAlgebra":
        return replace(self, **changes)

    # -- serialization --------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "complex": self.complex.to_json(),
            "si": [{"x": x, "xbar": xb, "parity_x": self.parity(x), "parity_xbar": self.parity(xb)}
                   for x, xb in self.si_pairs],
            "delta_gap": format_exponent(self.delta_gap),
            "local_system": {k: v.to_json() for k, v in self.local_system.items()},
            "atlas": [d.to_json() for d in self.atlas],
            "truncation": format_exponent(self.truncation),
            "unit_convention": self.unit_convention,
            "resummed": sorted(self.resummed),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], truncation: Any = None,
                  unit_convention: Optional[str] = None) -> "CurvedAInftyAlgebra":
        complex_ = CellComplex.from_json(data["complex"])
        si_pairs, si_parity = [], {}
        for entry in data.get("si", []):
            x, xbar = str(entry["x"]), str(entry["xbar"])
            si_pairs.append((x, xbar))
            if "parity_x" in entry:
                si_parity[x] = int(entry["parity_x"])
            if "parity_xbar" in entry:
                si_parity[xbar] = int(entry["parity_xbar"])
        atlas = []
        for k, entry in enumerate(data.get("atlas", [])):
            try:
                atlas.append(Disk.from_json(entry))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"atlas[{k}]: {exc}") from exc
        if data.get("classical", False):
            atlas.extend(classical_atlas(complex_))
        local = {str(k): NovikovElement.from_json(v) for k, v in data.get("local_system", {}).items()}
        trunc = truncation if truncation is not None else data.get("truncation", 6)
        return cls(
            complex=complex_,
            atlas=tuple(atlas),
            delta_gap=parse_exponent(data["delta_gap"]),
            si_pairs=tuple(si_pairs),
            si_parity=si_parity,
            local_system=local,
            truncation=parse_truncation(trunc),
            unit_convention=unit_convention or data.get("unit_convention", "literal"),
            resummed=frozenset(data.get("resummed", [])),
            name=str(data.get("name", "")),
        )


def geometric_unit(A: CurvedAInftyAlgebra) -> Cochain:
    """Sum of the top cells: the fundamental chain of L."""
    return Cochain({cell: 1 for cell in A.complex.top_cells()})


# ---------------------------------------------------------------------------
# structure maps


def _unit_rule(A: CurvedAInftyAlgebra, word: Tuple[str, ...]) -> Optional[Cochain]:
    if WHITE not in word:
        return None
    if len(word) != 2:
        return Cochain()
    first, second = word
    if first == WHITE:
        return Cochain.basis(second)
    sign = (-1) ** A.parity(first) if A.unit_convention == "koszul" else 1
    return Cochain.basis(first, sign)


def m_d(A: CurvedAInftyAlgebra, inputs: Sequence[str]) -> Cochain:
    """
    Structure map m_d on generators.

    Input parameters:
    A       -   CurvedAInftyAlgebra
    inputs  -   sequence of generator names (d = len(inputs), d = 0 allowed)

    Output parameters:
    out     -   Cochain, truncated at A.truncation
    """
    word = tuple(inputs)
    for name in word:
        A.require(name)
    unit = _unit_rule(A, word)
    if unit is not None:
        return unit
    out = Cochain()
    for disk in A.disks_for(word):
        out = out + A.disk_output(disk) * A.weight(disk)
    if word == (GREY,):
        out = out + Cochain.basis(WHITE) - geometric_unit(A)
    return out.truncate(A.truncation)


def _check_insertion(A: CurvedAInftyAlgebra, b: Cochain, delta: Optional[Fraction]) -> None:
    bound = A.delta_gap if delta is None else delta
    for name, value in b.items():
        gen = A.require(name)
        if gen.parity != 1:
            raise NotOdd(f"insertion has even generator '{name}'")
        v = val_q(value)
        if gen.kind == "si":
            if v <= -bound:
                raise NotAdmissible(f"val b({name}) = {format_exponent(v)} <= -{format_exponent(bound)}")
        elif name in A.resummed:
            if v < 0:
                raise NotAdmissible(f"val b({name}) = {format_exponent(v)} < 0")
        elif v <= 0:
            raise NotAdmissible(f"val b({name}) = {format_exponent(v)} must be positive")


def _insertion_count(word: Tuple[str, ...], args: Tuple[str, ...],
                     bs: Sequence[Cochain]) -> Optional[NovikovElement]:
    """Sum over placements of args in word, the gaps filled by letters of bs[j] in gap j."""
    d = len(args)
    dp: List[Optional[NovikovElement]] = [None] * (d + 1)
    dp[0] = NovikovElement.one()
    for letter in word:
        new: List[Optional[NovikovElement]] = [None] * (d + 1)
        for j, value in enumerate(dp):
            if value is None:
                continue
            if letter in bs[j]:
                term = value * bs[j][letter]
                new[j] = term if new[j] is None else new[j] + term
            if j < d and args[j] == letter:
                new[j + 1] = value if new[j + 1] is None else new[j + 1] + value
        dp = new
    return dp[d]


def _candidate_words(A: CurvedAInftyAlgebra, args: Tuple[str, ...],
                     bs: Sequence[Cochain]) -> List[Tuple[str, ...]]:
    letters = set(args)
    for b in bs:
        letters.update(b.support())
    words = [w for w in A.words() if set(w) <= letters]
    if GREY in letters:
        words.append((GREY,))
    if WHITE in letters:
        for y in letters:
            words.extend([(WHITE, y), (y, WHITE)])
        words = list(dict.fromkeys(words))
    return words


def m_multi(A: CurvedAInftyAlgebra, bs: Sequence[Cochain], args: Sequence[str],
            delta: Optional[Fraction] = None) -> Cochain:
    """
    Deformed structure map with separate insertions in every gap,

        m^{b_0..b_d}(a_1..a_d) = sum m(b_0..b_0, a_1, b_1..b_1, ..., a_d, b_d..b_d).

    Each b_j must be odd and admissible (cells positive valuation, resummed
    handle cells non-negative, self-intersections above -delta).  A disk
    contributing through at least one insertion must have positive total
    valuation, constant and classical disks excepted.
    """
    args = tuple(args)
    if len(bs) != len(args) + 1:
        raise ValueError(f"need {len(args) + 1} insertions for {len(args)} arguments, got {len(bs)}")
    for name in args:
        A.require(name)
    for b in bs:
        _check_insertion(A, b, delta)

    out = Cochain()
    for word in _candidate_words(A, args, bs):
        count = _insertion_count(word, args, bs)
        if count is None or count.is_zero():
            continue
        if len(word) > len(args):
            for disk in A.disks_for(word):
                if disk.constant_on_handle or disk.classical:
                    continue
                if disk.area + val_q(count) <= 0:
                    raise NonConvergent(f"disk {word} -> {disk.output} has total valuation "
                                        f"{format_exponent(disk.area + val_q(count))}")
        out = out + m_d(A, word) * count
    return out.truncate(A.truncation)


def deformed(A: CurvedAInftyAlgebra, b: Cochain, args: Sequence[str],
             delta: Optional[Fraction] = None) -> Cochain:
    """m^b with the same insertion in every gap."""
    return m_multi(A, [b] * (len(args) + 1), args, delta)


def apply_linear(A: CurvedAInftyAlgebra, operation, prefix: Sequence[str], middle: Cochain,
                 suffix: Sequence[str]) -> Cochain:
    """Extend `operation(word)` linearly in the middle slot."""
    out = Cochain()
    for name, coef in middle.items():
        out = out + operation(tuple(prefix) + (name,) + tuple(suffix)) * coef
    return out


def ainfty_residual(A: CurvedAInftyAlgebra, inputs: Sequence[str], b: Optional[Cochain] = None) -> Cochain:
    """
    sum_{d1+d2+d3=d} (-1)^{d1 + sum_{i<=d1} |s_i|} m(s_1..s_d1, m(s_d1+1..s_d1+d2), ..., s_d)

    computed for m, or for m^b when b is given.  Vanishes for an A-infinity algebra.
    """
    word = tuple(inputs)
    d = len(word)

    def op(w: Tuple[str, ...]) -> Cochain:
        return m_d(A, w) if b is None else deformed(A, b, w)

    total = Cochain()
    for d1 in range(d + 1):
        sign = (-1) ** (d1 + sum(A.parity(s) for s in word[:d1]))
        for d2 in range(d - d1 + 1):
            inner = op(word[d1:d1 + d2])
            outer = apply_linear(A, op, word[:d1], inner, word[d1 + d2:])
            total = total + outer * sign
    return total.truncate(A.truncation)


# ---------------------------------------------------------------------------
# sign calculus


def heart_sign(parities: Sequence[int]) -> int:
    """Sign exponent sum_i i|s_i| mod 2 of an input word, counted from 1."""
    return sum(i * (int(p) % 2) for i, p in enumerate(parities, start=1)) % 2


def gluing_sign_terms(d: int, n: int, m: int, parities: Sequence[int]) -> Dict[str, int]:
    """
    The four exponents of the boundary-gluing sign for an inner disk of m
    inputs glued after the first n of d inputs, and the reference exponent
    sum_k (k + 1)|s_k|.  `alpha` is the output of the inner map, of parity
    sum of its inputs plus m.
    """
    if not 0 <= n <= d or not 0 <= m <= d - n or len(parities) != d:
        raise ValueError(f"bad gluing data d={d}, n={n}, m={m}, {len(parities)} parities")
    p = [int(x) % 2 for x in parities]
    inner = sum(p[n:n + m])
    tail = sum(p[n + m:])
    alpha = inner + m
    # (m - 1)(n - 1) + 1 = mn + m + n mod 2
    sign_a = (m - 1) * (n - 1) + 1
    sign_b = (sum(k * p[k - 1] for k in range(1, n + 1))
              + (n + 1) * alpha
              + sum((k - m + 1) * p[k - 1] for k in range(n + m + 1, d + 1))
              + sum((k - n) * p[k - 1] for k in range(n + 1, n + m + 1)))
    sign_c = (d - m + 1) * m + m * (d + tail)
    sign_d = sum(p[:n]) + n
    reference = sum((k + 1) * p[k - 1] for k in range(1, d + 1))
    return {"a": sign_a, "b": sign_b, "c": sign_c, "d": sign_d, "reference": reference}


def verify_gluing_sign_congruence(d: int, n: int, m: int, parities: Sequence[int]) -> bool:
    """True when the glued sign agrees mod 2 with sum_k (k + 1)|s_k|."""
    terms = gluing_sign_terms(d, n, m, parities)
    return (terms["a"] + terms["b"] + terms["c"] + terms["d"]) % 2 == terms["reference"] % 2


# ---------------------------------------------------------------------------


def corner_count(A: CurvedAInftyAlgebra, disk: Disk) -> int:
    """Number of self-intersection corners of a disk, output included."""
    return sum(1 for s in disk.inputs + (disk.output,) if A.generators.get(s, Generator(s, "", 0)).kind == "si")


def validate_atlas(A: CurvedAInftyAlgebra) -> List[str]:
    """
    Atlas checks: known generators, positive area for curvature disks,
    area >= (#corners) * delta_gap away from handle and classical disks,
    no WHITE inputs, outputs never a unit, local system values invertible.
    """
    problems: List[str] = []
    for k, disk in enumerate(A.atlas):
        where = f"disk {k} {disk.inputs} -> {disk.output}"
        unknown = [s for s in disk.inputs + (disk.output,) if s not in A.generators]
        if unknown:
            problems.append(f"{where}: unknown generators {unknown}")
            continue
        if WHITE in disk.inputs:
            problems.append(f"{where}: WHITE is a strict unit and cannot be a disk input")
        if disk.output in (WHITE, GREY):
            problems.append(f"{where}: output is a unit")
        if disk.classical or disk.constant_on_handle:
            continue
        if not disk.inputs and disk.area <= 0:
            problems.append(f"{where}: curvature disk with non-positive area {format_exponent(disk.area)}")
        if any(s in A.resummed for s in disk.inputs + (disk.output,)):
            continue
        s = corner_count(A, disk)
        if s and disk.area < s * A.delta_gap:
            problems.append(f"{where}: area {format_exponent(disk.area)} below "
                            f"{s} x delta_gap = {format_exponent(s * A.delta_gap)}")
    for label, y in A.local_system.items():
        if y.is_zero() or val_q(y) != 0:
            problems.append(f"local system '{label}' is not a unit")
    return problems
