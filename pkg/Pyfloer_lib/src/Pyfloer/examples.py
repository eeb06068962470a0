# -*- coding: utf-8 -*-
"""
Bundled complexes, atlases and candidates.

    circle                  -   S^1 with one 0-cell and one 1-cell
    two_spheres             -   two n-spheres (optionally joined by an arc)
    worked_example          -   immersed circle with three double points
    worked_surgered         -   its surgery at x, with longitude holonomy
    dim3_synthetic          -   n = 3 surgery case with b0(xbar) = 0
    random_surgery_case     -   seeded n = 4 atlas for the curve identity
    flat_surgery_case       -   seeded flat n = 4 case, flat again after surgery
    gauge_toy               -   flat n = 2 toy with a nontrivial gauge direction
    embedded_pair_cone      -   two circles meeting at x, z (and xbar, zbar)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction as F
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .ainfty import GREY, Cochain, CurvedAInftyAlgebra, Disk, classical_atlas
from .cellular import CellComplex, StandardBall, surger_cells
from .cone import BimoduleAtlas
from .mc import MCCandidate
from .novikov import NovikovElement, monomial
from .surgery import SurgeryData


@dataclass
class SurgeryCase:
    algebra: CurvedAInftyAlgebra
    candidate: MCCandidate
    surgery: SurgeryData
    example_mode: bool = False
    surgered: Optional[CurvedAInftyAlgebra] = None


def circle(point: str = "sigma_0", edge: str = "sigma_1") -> CellComplex:
    return CellComplex(1, {point: 0, edge: 1}, {},
                       {(point, edge): 1, (edge, point): 1})


def two_spheres(n: int, with_arc: bool = False) -> CellComplex:
    """
    Cells v+-, e+- (dim n-1, closed), D+-, D'+- (dim n) with dD+ = e+, dD'+ = -e+
    and, with the opposite orientation on the second sphere, dD- = -e-, dD'- = e-;
    and diagonal c(v_s, D_t) = c(v_s, D'_t) = c(D_t, v_s) = c(D'_t, v_s) = s.
    """
    cells = {"v+": 0, "v-": 0, "e+": n - 1, "e-": n - 1, "D+": n, "D-": n, "D'+": n, "D'-": n}
    boundary = {("D+", "e+"): 1, ("D'+", "e+"): -1, ("D-", "e-"): -1, ("D'-", "e-"): 1}
    diagonal = {}
    for s, sign in (("+", 1), ("-", -1)):
        for t in "+-":
            for top in ("D", "D'"):
                diagonal[(f"v{s}", f"{top}{t}")] = sign
                diagonal[(f"{top}{t}", f"v{s}")] = sign
    if with_arc:
        cells["a"] = 1
        boundary[("a", "v+")] = 1
        boundary[("a", "v-")] = -1
    return CellComplex(n, cells, boundary, diagonal)


SPHERE_BALLS = (StandardBall("D+", "e+", "v+"), StandardBall("D-", "e-", "v-"))


def surgered_two_spheres(n: int, with_arc: bool = False) -> CellComplex:
    return surger_cells(two_spheres(n, with_arc), SPHERE_BALLS)


def classical_sphere_algebra(n: int, surgered: bool = False) -> CurvedAInftyAlgebra:
    C = surgered_two_spheres(n) if surgered else two_spheres(n)
    return CurvedAInftyAlgebra(C, classical_atlas(C), F(1), name="two-spheres")


# ---------------------------------------------------------------------------


WORKED_PAIRS = (("x", "xbar"), ("x'", "xbar'"), ("x''", "xbar''"))


def worked_example() -> SurgeryCase:
    """
    Immersed circle, n = 1, with double points x, x', x''; delta_gap = 2/3,
    three lobes of area 1, three central disks of area 2 and one strip from
    x to the point class.  b0 = i q^{1/2} GREY + i q^{-1/2} (x + x' + x'').
    """
    pairs = WORKED_PAIRS
    atlas = [Disk((), x, F(1)) for x, _ in pairs]
    atlas += [Disk(("x'", "x''"), "x", F(2), -1),
              Disk(("x''", "x"), "x'", F(2), -1),
              Disk(("x", "x'"), "x''", F(2), -1),
              Disk(("x",), "sigma_0", F(1), -1)]
    A = CurvedAInftyAlgebra(circle(), tuple(atlas), F(2, 3), tuple(pairs),
                            unit_convention="koszul", name="worked")
    b = Cochain({GREY: monomial(1j, F(1, 2))} | {x: monomial(1j, F(-1, 2)) for x, _ in pairs})
    dummy = (StandardBall("ball+", "sphere+", "point+"), StandardBall("ball-", "sphere-", "point-"))
    S = SurgeryData("x", "xbar", F(1, 2), 1, *dummy,
                    longitude="sigma_1'", longitude_labels=("sigma_1'", "sigma_1''"))
    return SurgeryCase(A, MCCandidate(b, F(3, 5)), S, example_mode=True, surgered=worked_surgered())


def worked_surgered() -> CurvedAInftyAlgebra:
    """
    The worked example after surgery at x: two circles, double points x', x'',
    longitude labels sigma_1', sigma_1'' with trivial holonomy until the
    local-system form of the surgery multiplies them by b0(x) q^{1/2} = i.
    """
    cells = {"sigma_0'": 0, "sigma_1'": 1, "sigma_0''": 0, "sigma_1''": 1}
    diagonal = {}
    for p in ("'", "''"):
        diagonal[(f"sigma_0{p}", f"sigma_1{p}")] = 1
        diagonal[(f"sigma_1{p}", f"sigma_0{p}")] = 1
    C = CellComplex(1, cells, {}, diagonal)
    atlas = (
        Disk((), "sigma_0'", F(1, 2), holonomy=(("sigma_1'", 1),)),
        Disk(("x'", "x''"), "sigma_0''", F(3, 2), holonomy=(("sigma_1''", 1),)),
        Disk((), "x'", F(1)),
        Disk((), "x''", F(1)),
        Disk(("x''",), "x'", F(3, 2), -1, holonomy=(("sigma_1'", 1),)),
        Disk(("x'",), "x''", F(3, 2), -1, holonomy=(("sigma_1'", 1),)),
    )
    local = {"sigma_1'": NovikovElement.one(), "sigma_1''": NovikovElement.one()}
    return CurvedAInftyAlgebra(C, atlas, F(2, 3), (("x'", "xbar'"), ("x''", "xbar''")),
                               local_system=local, unit_convention="koszul", name="worked_surgered")


def dim3_synthetic() -> SurgeryCase:
    """n = 3 on two spheres; xbar is even there, so b0(xbar) = 0."""
    C = two_spheres(3, with_arc=True)
    atlas = (
        Disk((), "x", F(1)),
        Disk(("x",), "D'+", F(1), -1),
        Disk(("x", "x"), "xbar", F(3)),
        Disk((), "D'-", F(3, 2)),
    )
    A = CurvedAInftyAlgebra(C, atlas, F(1), (("x", "xbar"),), name="dim3-synthetic")
    b = Cochain({GREY: monomial(0.5, 1), "x": monomial(0.9, F(-1, 4))})
    S = SurgeryData("x", "xbar", F(1, 4), 3, *SPHERE_BALLS)
    return SurgeryCase(A, MCCandidate(b, F(1, 2)), S)


def random_surgery_case(seed: Union[int, np.random.Generator], max_disks: int = 6,
                        max_passes: int = 2) -> SurgeryCase:
    """
    Seeded n = 4 surgery case on two spheres joined by an arc, with double
    points x (surgered) and y.  delta_gap = 1, delta = 1/2, A(eps) in
    {1/8, 1/4, 3/8} and val b0(x) = -A(eps), val b0(xbar) > A(eps).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = 4
    C = two_spheres(n, with_arc=True)
    pairs = (("x", "xbar"), ("y", "ybar"))
    area_eps = F(int(rng.integers(1, 4)), 8)

    def coef(low: float, high: float) -> complex:
        return float(rng.uniform(low, high)) * cmath.exp(1j * float(rng.uniform(-math.pi, math.pi)))

    b = Cochain({
        "x": monomial(float(rng.uniform(0.8, 1.2)) * cmath.exp(1j * float(rng.uniform(-0.5, 0.5))), -area_eps),
        "xbar": monomial(coef(0.5, 1.5), area_eps + F(int(rng.integers(1, 4)), 8)),
        "y": monomial(coef(0.5, 1.5), F(-1, 4)),
        "ybar": monomial(coef(0.5, 1.5), F(-1, 8)),
        GREY: monomial(coef(0.5, 1.5), F(1, 2)),
    })
    si_names = ["x", "xbar", "y", "ybar"]
    outputs = si_names + ["D'+", "D'-", "v+", "v-", "a"]
    local = {"ell": monomial(cmath.exp(1j * float(rng.uniform(-math.pi, math.pi))))}

    atlas: List[Disk] = []
    for _ in range(int(rng.integers(1, max_disks + 1))):
        output = str(rng.choice(outputs))
        budget = max_passes - (1 if output in ("x", "xbar") else 0)
        inputs = []
        for _ in range(int(rng.integers(0, 4))):
            choice = str(rng.choice(si_names))
            if choice in ("x", "xbar"):
                if budget == 0:
                    continue
                budget -= 1
            inputs.append(choice)
        corners = sum(1 for s in inputs + [output] if s in si_names)
        area = corners * F(1) + F(int(rng.integers(1, 5)), 4)
        holonomy = (("ell", int(rng.choice([1, -1]))),) if rng.random() < 0.3 else ()
        atlas.append(Disk(tuple(inputs), output, area, int(rng.choice([1, -1])),
                          F(int(rng.choice([1, 2])), 2), holonomy))
    # constant disks at x: weight +-1 onto the two preimage points
    atlas.append(Disk(("x", "xbar"), "v+", F(0), -1, constant_on_handle=True, direct=True))
    atlas.append(Disk(("x", "xbar"), "v-", F(0), 1, constant_on_handle=True, direct=True))

    A = CurvedAInftyAlgebra(C, tuple(atlas), F(1), pairs, local_system=local, name="random")
    S = SurgeryData("x", "xbar", area_eps, n, *SPHERE_BALLS)
    return SurgeryCase(A, MCCandidate(b, F(1, 2)), S)


def flat_surgery_case(seed: Union[int, np.random.Generator] = 0, sheet_units: bool = True) -> SurgeryCase:
    """
    Seeded flat n = 4 case on two spheres joined by the arc a (koszul units).

    Atlas: the classical disks, the two constant disks at x (so that
    m_2(x, xbar) = v+ - v-) and, with sheet_units, disks of area 2 through the
    removed balls acting on x and xbar:

        m_1^b(D+) = e+ + q^2 K,   m_1^b(D-) = -e- - q^2 K,   K = b0(x) x - b0(xbar) xbar

    The candidate b0 = X x + Xb xbar - X Xb a is flat with W = 0, and so is its
    image under psi on the transformed atlas.  The sheet units are dropped by
    the transform; with them HF has dimension 3 on both sides.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = 4
    C = two_spheres(n, with_arc=True)
    area_eps = F(int(rng.integers(1, 4)), 8)
    X = monomial(float(rng.uniform(0.8, 1.2)) * cmath.exp(1j * float(rng.uniform(-0.5, 0.5))), -area_eps)
    Xb = monomial(float(rng.uniform(0.5, 1.5)) * cmath.exp(1j * float(rng.uniform(-math.pi, math.pi))),
                  area_eps + F(int(rng.integers(1, 4)), 8))

    atlas = list(classical_atlas(C))
    atlas.append(Disk(("x", "xbar"), "v+", F(0), -1, constant_on_handle=True, direct=True))
    atlas.append(Disk(("x", "xbar"), "v-", F(0), 1, constant_on_handle=True, direct=True))
    if sheet_units:
        atlas += [Disk(("D+", "x"), "x", F(2), direct=True),
                  Disk(("xbar", "D+"), "xbar", F(2), direct=True),
                  Disk(("x", "D-"), "x", F(2), direct=True),
                  Disk(("D-", "xbar"), "xbar", F(2), direct=True)]

    A = CurvedAInftyAlgebra(C, tuple(atlas), F(1), (("x", "xbar"),), unit_convention="koszul",
                            name="flat-surgery")
    b = Cochain({"x": X, "xbar": Xb, "a": -(X * Xb)})
    S = SurgeryData("x", "xbar", area_eps, n, *SPHERE_BALLS)
    return SurgeryCase(A, MCCandidate(b, F(1, 2)), S)


def gauge_toy(seed: Union[int, np.random.Generator] = 0,
              closed: bool = True) -> Tuple[CurvedAInftyAlgebra, MCCandidate, Cochain]:
    """
    Seeded n = 2 algebra on cells T (top), c1, c2 (edges), h, w (points):

        m_0 = s0 q^a T,   m_1(h) = q^al (s1 c1 + s2 c2),   m_1(c_i) = -s_{i+2} q^ga w

    with s1 s3 + s2 s4 = 0, so m_1 m_1(h) = 0.  The candidate
    b0 = s0 q^a GREY + beta (c1 - s3 s4 c2) is flat with W = s0 q^a, and the
    gauge parameter t h moves it along c1 and c2.  closed=False drops the
    disk onto c2; m_1 m_1(h) no longer vanishes and gauging leaves the flat locus.

    Output parameters:
    A, candidate, gauge parameter h
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    C = CellComplex(2, {"T": 2, "c1": 1, "c2": 1, "h": 0, "w": 0})
    s0, s1, s3, s4 = (int(rng.choice([1, -1])) for _ in range(4))
    s2 = -s1 * s3 * s4
    a, al, ga = (F(int(rng.integers(2, 7)), 4) for _ in range(3))
    atlas = [
        Disk((), "T", a, s0, direct=True),
        Disk(("h",), "c1", al, s1, direct=True),
        Disk(("h",), "c2", al, s2, direct=True),
        Disk(("c1",), "w", ga, s3, direct=True),
        Disk(("c2",), "w", ga, s4, direct=True),
    ]
    if not closed:
        del atlas[2]
    A = CurvedAInftyAlgebra(C, tuple(atlas), F(1), name="gauge-toy")
    beta = float(rng.uniform(0.5, 1.5)) * cmath.exp(1j * float(rng.uniform(-math.pi, math.pi)))
    b = Cochain({GREY: monomial(s0, a), "c1": monomial(beta, F(1, 4)), "c2": monomial(-s3 * s4 * beta, F(1, 4))})
    h = Cochain({"h": monomial(float(rng.uniform(0.2, 0.8)), F(1, 2))})
    return A, MCCandidate(b, F(1, 2)), h


# ---------------------------------------------------------------------------


def embedded_pair_cone(with_strips: bool = True) -> BimoduleAtlas:
    """
    Two embedded circles L-, L+ meeting at x and z (CF(L-, L+)) with
    conjugates xbar, zbar.  Mixed disks pass x positively only.
    """
    minus = CurvedAInftyAlgebra(circle("p", "l"), (), F(1), name="L-")
    plus = CurvedAInftyAlgebra(circle("p", "l"), (), F(1), name="L+")
    mixed = {"x": ("mp", 1), "z": ("mp", 1), "xbar": ("pm", 0), "zbar": ("pm", 0)}
    disks: Tuple[Disk, ...] = ()
    if with_strips:
        disks = (
            Disk(("x",), "z", F(1)),
            Disk(("x",), "z", F(2), -1),
            Disk(("minus:l", "x"), "z", F(3, 2)),
            Disk(("x", "plus:p"), "z", F(5, 2), -1, F(1, 2)),
        )
    return BimoduleAtlas(minus, plus, mixed, disks)


EXAMPLES: Dict[str, Callable[[], object]] = {
    "worked": worked_example,
    "worked-surgered": worked_surgered,
    "two-spheres": lambda: classical_sphere_algebra(4),
    "dim3-synthetic": dim3_synthetic,
    "embedded-pair-cone": embedded_pair_cone,
}
