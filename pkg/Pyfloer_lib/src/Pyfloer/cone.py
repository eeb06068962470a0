# -*- coding: utf-8 -*-
"""
Mapping cone of a morphism between two Lagrangians, and its comparison
with the surgered atlas.

A BimoduleAtlas carries the algebras of L- and L+ together with mixed
generators in the sectors mp = CF(L-, L+) and pm = CF(L+, L-) and the
mixed disks joining them.  Block generators are addressed as
"minus:<name>" and "plus:<name>".  Cone(b) for a closed b in the mp sector
has structure maps that insert b between the L- and L+ blocks and b-, b+
inside the blocks; on CF(L-)[1] the parity is flipped.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .ainfty import (GREY, WHITE, Cochain, CurvedAInftyAlgebra, Disk, NotAdmissible,
                     _insertion_count, geometric_unit)
from .cellular import StandardBall
from .mc import MCCandidate, potential
from .novikov import (NovikovElement, Truncation, format_exponent, invert, log_unit,
                      max_abs_difference, monomial, parse_exponent, parse_truncation)
from .surgery import DEFAULT_CAPS, SurgeryData, tail, transform_disk

logger = logging.getLogger(__name__)

SECTORS = {"minus": ("-", "-"), "plus": ("+", "+"), "mp": ("-", "+"), "pm": ("+", "-")}
BLOCK_PREFIX = {"minus": "minus:", "plus": "plus:"}


class ConeError(ValueError):
    pass


class NotClosed(ConeError):
    pass


class WrongWayCorner(ConeError):
    pass


@dataclass
class BimoduleAtlas:
    minus: CurvedAInftyAlgebra
    plus: CurvedAInftyAlgebra
    mixed_generators: Dict[str, Tuple[str, int]]
    mixed_disks: Tuple[Disk, ...] = ()
    truncation: Truncation = Fraction(6)

    def __post_init__(self):
        for name, (sector, _) in self.mixed_generators.items():
            if sector not in ("mp", "pm"):
                raise ConeError(f"mixed generator '{name}' has sector '{sector}'")
            if ":" in name:
                raise ConeError(f"mixed generator name '{name}' may not contain ':'")
        for k, disk in enumerate(self.mixed_disks):
            if not disk.inputs:
                raise ConeError(f"mixed disk {k} has no inputs")
            if not self.composable(disk.inputs, disk.output):
                raise ConeError(f"mixed disk {k} {disk.inputs} -> {disk.output} is not composable")

    # -- sectors --------------------------------------------------------

    def split(self, name: str) -> Tuple[str, str]:
        """(sector, local name) of a cone-level generator name."""
        for block, prefix in BLOCK_PREFIX.items():
            if name.startswith(prefix):
                local = name[len(prefix):]
                getattr(self, block).require(local)
                return block, local
        if name not in self.mixed_generators:
            raise ConeError(f"unknown generator '{name}'")
        return self.mixed_generators[name][0], name

    def sector(self, name: str) -> str:
        return self.split(name)[0]

    def parity(self, name: str) -> int:
        sector, local = self.split(name)
        if sector in BLOCK_PREFIX:
            return getattr(self, sector).parity(local)
        return self.mixed_generators[name][1] % 2

    def composable(self, word: Sequence[str], output: Optional[str] = None) -> bool:
        ends = [SECTORS[self.sector(s)] for s in word]
        if any(a[1] != b[0] for a, b in zip(ends, ends[1:])):
            return False
        if output is None or not ends:
            return True
        return SECTORS[self.sector(output)] == (ends[0][0], ends[-1][1])

    def generators(self) -> List[Tuple[str, str, int]]:
        """(name, sector, parity in the cone) with the L- block shifted by one."""
        table = []
        for block, prefix in BLOCK_PREFIX.items():
            algebra = getattr(self, block)
            flip = 1 if block == "minus" else 0
            for name, gen in algebra.generators.items():
                table.append((prefix + name, block, (gen.parity + flip) % 2))
        for name, (sector, parity) in self.mixed_generators.items():
            table.append((name, sector, parity % 2))
        return table

    # -- disk table -----------------------------------------------------

    def local_system(self) -> Dict[str, NovikovElement]:
        merged = dict(self.plus.local_system)
        merged.update(self.minus.local_system)
        return merged

    def mixed_weight(self, disk: Disk) -> NovikovElement:
        heart = sum(i * self.parity(s) for i, s in enumerate(disk.inputs, start=1))
        value = NovikovElement.one()
        local = self.local_system()
        for label, power in disk.holonomy:
            y = local.get(label, NovikovElement.one())
            for _ in range(abs(power)):
                value = value * (y if power >= 0 else invert(y))
        return value * monomial((-1) ** heart * disk.sign * float(disk.sym), disk.area)

    def word_table(self) -> Dict[Tuple[str, ...], Cochain]:
        """word -> total output of all disks with that input word."""
        table: Dict[Tuple[str, ...], Cochain] = {}

        def put(word: Tuple[str, ...], value: Cochain) -> None:
            table[word] = table[word] + value if word in table else value

        for block, prefix in BLOCK_PREFIX.items():
            algebra: CurvedAInftyAlgebra = getattr(self, block)
            for disk in algebra.atlas:
                out = _prefixed(algebra.disk_output(disk), prefix) * algebra.weight(disk)
                put(tuple(prefix + s for s in disk.inputs), out)
            grey = _prefixed(Cochain.basis(WHITE) - geometric_unit(algebra), prefix)
            put((prefix + GREY,), grey)
        for disk in self.mixed_disks:
            put(disk.inputs, Cochain.basis(disk.output) * self.mixed_weight(disk))
        return table

    def to_json(self) -> Dict[str, Any]:
        return {
            "minus": self.minus.to_json(),
            "plus": self.plus.to_json(),
            "mixed": [{"name": name, "sector": sector, "parity": parity}
                      for name, (sector, parity) in self.mixed_generators.items()],
            "mixed_disks": [d.to_json() for d in self.mixed_disks],
            "truncation": format_exponent(self.truncation),
        }


def _prefixed(c: Cochain, prefix: str) -> Cochain:
    return Cochain({prefix + k: v for k, v in c.items()})


# ---------------------------------------------------------------------------


@dataclass
class ConeAlgebra:
    bimodule: BimoduleAtlas
    b: Cochain
    b_minus: Cochain = field(default_factory=Cochain)
    b_plus: Cochain = field(default_factory=Cochain)

    def __post_init__(self):
        self._table = self.bimodule.word_table()

    def insertion(self) -> Cochain:
        return _prefixed(self.b_minus, BLOCK_PREFIX["minus"]) + self.b + \
            _prefixed(self.b_plus, BLOCK_PREFIX["plus"])

    def m(self, args: Sequence[str], bs: Optional[Sequence[Cochain]] = None) -> Cochain:
        """Structure map of Cone(b) on cone-level generator names."""
        args = tuple(args)
        for name in args:
            if name.endswith(":" + WHITE):
                raise ConeError("strict units act blockwise and are not cone inputs")
            self.bimodule.split(name)
        if bs is None:
            bs = [self.insertion()] * (len(args) + 1)
        letters = set(args)
        for b in bs:
            letters.update(b.support())
        out = Cochain()
        for word, value in self._table.items():
            if not set(word) <= letters:
                continue
            count = _insertion_count(word, args, bs)
            if count is not None and not count.is_zero():
                out = out + value * count
        return out.truncate(self.bimodule.truncation)

    def curvature(self) -> Cochain:
        return self.m(())

    def is_flat(self, tol: float = 1e-9) -> bool:
        """m_0 of the cone is a multiple of the blockwise strict unit."""
        curv = self.curvature()
        white_minus = BLOCK_PREFIX["minus"] + WHITE
        white_plus = BLOCK_PREFIX["plus"] + WHITE
        rest = curv.without(white_minus, white_plus)
        return rest.max_abs() <= tol and max_abs_difference(curv[white_minus], curv[white_plus]) <= tol


def cone(B: BimoduleAtlas, b: Cochain, b_minus: Optional[Cochain] = None,
         b_plus: Optional[Cochain] = None, tol: float = 1e-9) -> ConeAlgebra:
    """
    Cone(b) for b in CF(L-, L+).

    b must live in the mp sector and satisfy m^{b-, b+}_1(b) = 0 (NotClosed
    otherwise); b- and b+ must be projectively flat candidates of their
    blocks (NotAdmissible otherwise).
    """
    b_minus = b_minus if b_minus is not None else Cochain()
    b_plus = b_plus if b_plus is not None else Cochain()
    for name in b.support():
        if B.sector(name) != "mp":
            raise NotAdmissible(f"cone morphism has component '{name}' outside CF(L-, L+)")
    for block, bb in (("minus", b_minus), ("plus", b_plus)):
        algebra: CurvedAInftyAlgebra = getattr(B, block)
        if bb.is_zero():
            continue
        _, flat = potential(algebra, MCCandidate(bb, algebra.delta_gap), tol)
        if not flat:
            raise NotAdmissible(f"b_{block} is not projectively flat")

    C = ConeAlgebra(B, b, b_minus, b_plus)
    left = _prefixed(b_minus, BLOCK_PREFIX["minus"])
    right = _prefixed(b_plus, BLOCK_PREFIX["plus"])
    image = Cochain()
    for name, coef in b.items():
        image = image + C.m((name,), [left, right]) * coef
    if image.max_abs() > tol:
        raise NotClosed(f"m_1(b) has coefficient of size {image.max_abs():.3e}")
    logger.debug("cone: closed morphism with %d components", len(b))
    return C


# ---------------------------------------------------------------------------


def compare_cone_surgery(B: BimoduleAtlas, x: str, xbar: str, area: Any, b: Cochain,
                         caps: Tuple[int, int] = DEFAULT_CAPS, tol: float = 1e-9) -> Dict[str, Any]:
    """
    Compare Cone(b) with the surgery of L- u L+ at x, for b = beta q^{-A} x.

    Every mixed disk must pass x positively (corners at xbar raise
    WrongWayCorner).  For each reduced input word w (a mixed disk word with
    its x corners removed) the cone side is m_w of Cone(b) without its x
    component, so b(x) is inserted at every x corner.  The surgered side
    transforms the same disks: area shifted by -A per corner and r meridian
    insertions of weight 1/r!, with meridian coefficient log(beta); disks
    with word w itself do not meet the handle and enter unchanged.

    Output parameters:
    report  -   {"rows": [...], "max_discrepancy": float, "tail_bound": float}
    """
    A = parse_exponent(area)
    for disk in B.mixed_disks:
        if xbar in disk.inputs or disk.output == xbar:
            raise WrongWayCorner(f"disk {disk.inputs} -> {disk.output} has a corner at {xbar}")
    R = caps[0]
    c_mu = log_unit(b[x].shift(A))
    meridian = "meridian"
    dummy = StandardBall("", "", "")
    S = SurgeryData(x, xbar, A, dim=max(B.minus.dim, 2), plus=dummy, minus=dummy,
                    longitude="longitude", meridian=meridian)
    parity0 = {name: B.parity(name) for name, _, _ in B.generators()}
    parity_eps = dict(parity0)
    parity_eps[meridian] = 1

    C = ConeAlgebra(B, b)
    table = B.word_table()
    surgered: Dict[Tuple[str, ...], Cochain] = {}
    for disk in B.mixed_disks:
        if x not in disk.inputs or disk.output == x:
            continue
        reduced = tuple(s for s in disk.inputs if s != x)
        total = NovikovElement.zero()
        for new in transform_disk(disk, S, parity0, parity_eps, (R, 0)):
            heart = sum(i * parity_eps[s] for i, s in enumerate(new.inputs, start=1))
            w = monomial((-1) ** heart * new.sign * float(new.sym), new.area) * _holonomy(B, disk)
            total = total + w * (c_mu ** new.inputs.count(meridian))
        surgered[reduced] = surgered.get(reduced, Cochain()) + Cochain.basis(disk.output) * total

    for word in surgered:
        if word in table:
            surgered[word] = surgered[word] + table[word]

    rows = []
    order = B.truncation
    for word, value in surgered.items():
        lhs, rhs = C.m(word).without(x).truncate(order), value.truncate(order)
        rows.append({"word": word, "cone": lhs, "surgered": rhs, "discrepancy": (lhs - rhs).max_abs()})
    a = c_mu.abs_sum()
    bound = tail(a, R) * math.exp(a)
    worst = max((r["discrepancy"] for r in rows), default=0.0)
    logger.info("cone/surgery comparison: %d words, max discrepancy %.3e", len(rows), worst)
    return {"rows": rows, "max_discrepancy": worst, "tail_bound": bound, "passed": worst <= tol + bound}


def _holonomy(B: BimoduleAtlas, disk: Disk) -> NovikovElement:
    value = NovikovElement.one()
    local = B.local_system()
    for label, power in disk.holonomy:
        y = local.get(label, NovikovElement.one())
        for _ in range(abs(power)):
            value = value * (y if power >= 0 else invert(y))
    return value


def bimodule_from_json(data: Mapping[str, Any], truncation: Any = None) -> BimoduleAtlas:
    minus = CurvedAInftyAlgebra.from_json(data["minus"], truncation)
    plus = CurvedAInftyAlgebra.from_json(data["plus"], truncation)
    mixed = {str(g["name"]): (str(g["sector"]), int(g.get("parity", 1))) for g in data.get("mixed", [])}
    disks = tuple(Disk.from_json(d) for d in data.get("mixed_disks", []))
    trunc = truncation if truncation is not None else data.get("truncation", 6)
    return BimoduleAtlas(minus, plus, mixed, disks, parse_truncation(trunc))
