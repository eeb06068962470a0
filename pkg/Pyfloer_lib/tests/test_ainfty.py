# -*- coding: utf-8 -*-
"""
Curved A-infinity structure maps, unit rules, insertion checks and signs.
"""
import itertools
from fractions import Fraction as F

import pytest

from Pyfloer.ainfty import (GREY, WHITE, Cochain, CurvedAInftyAlgebra, Disk, NonConvergent,
                            NotAdmissible, NotOdd, ainfty_residual, classical_atlas, deformed,
                            gluing_sign_terms, heart_sign, m_d, m_multi, validate_atlas,
                            verify_gluing_sign_congruence)
from Pyfloer.cellular import UnknownGenerator
from Pyfloer.examples import circle, classical_sphere_algebra, two_spheres, worked_example
from Pyfloer.novikov import monomial

TOL = 1e-9


@pytest.fixture
def worked():
    return worked_example()


def test_curvature_of_worked_example(worked):
    m0 = m_d(worked.algebra, ())
    for x, xbar in worked.algebra.si_pairs:
        assert abs(m0[xbar].coefficient(1) - 1) < TOL
    assert len(m0) == 3


def test_unit_rules(worked):
    A = worked.algebra
    assert m_d(A, (WHITE, "x")).nearly_equal(Cochain.basis("x"))
    assert m_d(A, ("x", WHITE)).nearly_equal(Cochain.basis("x", -1))
    assert m_d(A, (WHITE, "x", "x'")).is_zero()
    literal = A.with_changes(unit_convention="literal")
    assert m_d(literal, ("x", WHITE)).nearly_equal(Cochain.basis("x"))


def test_grey_unit_differential():
    A = CurvedAInftyAlgebra(circle(), (), F(1))
    out = m_d(A, (GREY,))
    assert out.nearly_equal(Cochain({WHITE: 1, "sigma_1": -1}))


def test_unknown_generator(worked):
    with pytest.raises(UnknownGenerator):
        m_d(worked.algebra, ("nope",))


def test_worked_potential_residual(worked):
    A, cand = worked.algebra, worked.candidate
    residual = m_multi(A, [cand.b], [], cand.delta)
    assert abs(residual[WHITE].coefficient(F(1, 2)) - 1j) < TOL
    assert residual.without(WHITE).max_abs() < TOL


def test_koszul_unit_is_closed(worked):
    A, b = worked.algebra, worked.candidate.b
    assert deformed(A, b, [WHITE], worked.candidate.delta).max_abs() < TOL
    assert ainfty_residual(A, [], b).max_abs() < TOL


def test_literal_unit_is_not_closed(worked):
    A = worked.algebra.with_changes(unit_convention="literal")
    assert deformed(A, worked.candidate.b, [WHITE], worked.candidate.delta).max_abs() > 0.1


def test_classical_relations_on_spheres():
    A = classical_sphere_algebra(4)
    for name in ["D+", "D'-", "e+", GREY]:
        assert ainfty_residual(A, [name]).max_abs() < TOL
    assert ainfty_residual(A, []).max_abs() < TOL


def test_classical_atlas_realizes_boundary():
    A = classical_sphere_algebra(3, surgered=True)
    assert m_d(A, ("sigma_1",)).nearly_equal(Cochain({"v+": 1, "v-": -1}))
    assert m_d(A, ("sigma_n",)).nearly_equal(Cochain({"e+": 1, "e-": -1}))


def test_insertion_checks(worked):
    A = worked.algebra
    with pytest.raises(NotOdd):
        m_multi(A, [Cochain({"xbar": monomial(1, 1)})], [], F(3, 5))
    with pytest.raises(NotAdmissible):
        m_multi(A, [Cochain({"x": monomial(1, -1)})], [], F(3, 5))
    with pytest.raises(NotAdmissible):
        m_multi(A, [Cochain({"sigma_0": monomial(1, 0)})], [], F(3, 5))
    with pytest.raises(ValueError):
        m_multi(A, [Cochain()], ["x"], F(3, 5))


def test_non_convergent_disk():
    A = CurvedAInftyAlgebra(circle(), (Disk(("x",), "sigma_0", F(1, 4)),), F(2, 3), (("x", "xbar"),))
    with pytest.raises(NonConvergent):
        m_multi(A, [Cochain({"x": monomial(1, F(-1, 2))})], [], F(3, 5))


def test_validate_atlas(worked):
    A = worked.algebra
    assert validate_atlas(A) == []
    bad = A.with_changes(atlas=A.atlas + (Disk(("x",), "sigma_0", F(1, 2)), Disk((WHITE,), "x", F(1))))
    problems = validate_atlas(bad)
    assert any("below" in p for p in problems)
    assert any("strict unit" in p for p in problems)


@pytest.mark.parametrize("parities,expected", [([1], 1), ([0, 0, 0], 0), ([1, 1], 1), ([0, 1, 1], 1), ([], 0)])
def test_heart_sign(parities, expected):
    assert heart_sign(parities) == expected


def test_heart_sign_matches_algebra(worked):
    A = worked.algebra
    # n = 1: x odd, xbar even
    assert A.heart(("x", "x")) == 1
    assert A.heart(("xbar", "x")) == 0
    assert A.heart(("x", "xbar")) == 1


def test_gluing_sign_examples():
    assert verify_gluing_sign_congruence(3, 1, 1, [1, 0, 1])
    assert verify_gluing_sign_congruence(4, 0, 2, [1, 1, 0, 1])
    terms = gluing_sign_terms(2, 0, 0, [1, 1])
    assert terms["reference"] == 2 * 1 + 3 * 1


@pytest.mark.parametrize("d", range(0, 7))
def test_gluing_sign_exhaustive(d):
    for n in range(d + 1):
        for m in range(d - n + 1):
            for parities in itertools.product((0, 1), repeat=d):
                assert verify_gluing_sign_congruence(d, n, m, parities), (d, n, m, parities)


def test_gluing_sign_rejects_bad_data():
    with pytest.raises(ValueError):
        gluing_sign_terms(2, 3, 0, [0, 0])


def test_algebra_json_with_classical_flag():
    A = CurvedAInftyAlgebra(two_spheres(3), (), F(1), (("x", "xbar"),))
    data = A.to_json()
    data["classical"] = True
    back = CurvedAInftyAlgebra.from_json(data)
    assert len(back.atlas) == len(classical_atlas(two_spheres(3))) == 4
    assert back.parity("xbar") == 0
