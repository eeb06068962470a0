# -*- coding: utf-8 -*-
"""
Mapping cones of a closed morphism between embedded circles, and their
comparison with the surgery at the corresponding intersection point.
"""
import cmath
from fractions import Fraction as F

import pytest

from Pyfloer.ainfty import GREY, WHITE, Cochain, Disk, NotAdmissible
from Pyfloer.cone import (BimoduleAtlas, ConeAlgebra, ConeError, NotClosed, WrongWayCorner,
                          compare_cone_surgery, cone)
from Pyfloer.examples import embedded_pair_cone
from Pyfloer.novikov import monomial

TOL = 1e-9


def test_zero_morphism_gives_direct_sum():
    C = ConeAlgebra(embedded_pair_cone(), Cochain())
    out = C.m(("minus:" + GREY,))
    assert out.nearly_equal(Cochain({"minus:" + WHITE: 1, "minus:l": -1}))
    assert C.m(("x",)).nearly_equal(Cochain({"z": monomial(-1, 1) + monomial(1, 2)}))


def test_cone_parity_shift():
    parities = {name: parity for name, _, parity in embedded_pair_cone().generators()}
    assert parities["minus:l"] == 1 and parities["plus:l"] == 0
    assert parities["minus:p"] == 0 and parities["plus:p"] == 1
    assert parities["x"] == 1 and parities["xbar"] == 0


def test_strips_obstruct_closedness():
    with pytest.raises(NotClosed):
        cone(embedded_pair_cone(), Cochain({"x": monomial(1, F(-1, 2))}))


def test_closed_morphism_gives_flat_cone():
    C = cone(embedded_pair_cone(with_strips=False), Cochain({"x": monomial(1, F(-1, 2))}))
    assert C.is_flat()


def test_cone_rejects_wrong_sector():
    with pytest.raises(NotAdmissible):
        cone(embedded_pair_cone(), Cochain({"xbar": monomial(1, 1)}))


def test_strict_units_are_not_cone_inputs():
    C = ConeAlgebra(embedded_pair_cone(), Cochain())
    with pytest.raises(ConeError):
        C.m(("plus:" + WHITE,))


@pytest.mark.parametrize("beta", [1, cmath.exp(0.3j), 0.8 * cmath.exp(-1j)])
def test_cone_matches_surgery(beta):
    b = Cochain({"x": monomial(beta, F(-1, 2))})
    report = compare_cone_surgery(embedded_pair_cone(), "x", "xbar", F(1, 2), b)
    assert report["passed"]
    assert len(report["rows"]) == 3
    if beta == 1:
        assert report["max_discrepancy"] <= TOL


def test_cone_rows_are_cone_structure_maps():
    beta = 0.8 * cmath.exp(-1j)
    b = Cochain({"x": monomial(beta, F(-1, 2))})
    B = embedded_pair_cone()
    report = compare_cone_surgery(B, "x", "xbar", F(1, 2), b)
    rows = {r["word"]: r for r in report["rows"]}
    assert set(rows) == {(), ("minus:l",), ("plus:p",)}
    C = ConeAlgebra(B, b)
    assert rows[()]["cone"].nearly_equal(C.curvature())
    assert rows[()]["cone"].nearly_equal(Cochain({"z": monomial(-beta, F(1, 2)) + monomial(beta, F(3, 2))}))
    assert rows[("minus:l",)]["cone"].nearly_equal(C.m(("minus:l",)))
    assert 0 < report["max_discrepancy"] <= TOL + report["tail_bound"]


def test_wrong_way_corner():
    B = embedded_pair_cone()
    B.mixed_disks = B.mixed_disks + (Disk(("x", "xbar"), "minus:p", F(3)),)
    with pytest.raises(WrongWayCorner):
        compare_cone_surgery(B, "x", "xbar", F(1, 2), Cochain({"x": monomial(1, F(-1, 2))}))


def test_non_composable_disk():
    B = embedded_pair_cone(with_strips=False)
    with pytest.raises(ConeError):
        BimoduleAtlas(B.minus, B.plus, B.mixed_generators, (Disk(("x", "x"), "z", F(2)),))
