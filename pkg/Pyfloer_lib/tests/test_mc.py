# -*- coding: utf-8 -*-
"""
Maurer-Cartan candidates: potential, admissibility and gauge transformations.
"""
from fractions import Fraction as F

import pytest

from Pyfloer.ainfty import GREY, Cochain, CurvedAInftyAlgebra, Disk, NotAdmissible, m_d
from Pyfloer.cellular import CellComplex
from Pyfloer.examples import classical_sphere_algebra, gauge_toy, random_surgery_case, worked_example
from Pyfloer.mc import (MCCandidate, NoProgress, admissibility_report, admissible,
                        gauge_away, gauge_equivalent_potentials, gauge_integrate, gauge_step,
                        potential, require_admissible, shifted_valuation)
from Pyfloer.novikov import monomial, nearly_equal, truncate

TOL = 1e-9


def test_worked_potential():
    case = worked_example()
    W, flat = potential(case.algebra, case.candidate)
    assert flat
    assert nearly_equal(W, monomial(1j, F(1, 2)), TOL)


def test_potential_reports_non_flat():
    case = worked_example()
    b = case.candidate.b.without("x''")
    _, flat = potential(case.algebra, MCCandidate(b, case.candidate.delta))
    assert not flat


def test_shifted_valuation():
    case = worked_example()
    value = shifted_valuation(case.algebra, case.candidate.b, case.candidate.delta)
    assert value == F(-1, 2) + F(3, 5)


def test_admissibility():
    b = Cochain({"x": monomial(1j, F(-1, 2)), "xbar": monomial(2, F(3, 2))})
    assert admissible(b, "x", "xbar", F(3, 5), 4)
    assert not admissible(b, "x", "xbar", F(1, 2), 4)
    assert not admissible(b, "x", "xbar", F(3, 5), 1)
    assert admissible(b, "x", "xbar", F(3, 5), 1, example_mode=True)
    resonant = Cochain({"x": monomial(1, F(-1, 2)), "xbar": monomial(1, F(1, 2))})
    reasons = admissibility_report(resonant, "x", "xbar", F(3, 5), 4)
    assert any("not zero" in r for r in reasons)
    with pytest.raises(NotAdmissible):
        require_admissible(Cochain(), "x", "xbar", F(3, 5), 4)


@pytest.mark.parametrize("seed", range(10))
def test_gauge_preserves_flatness_and_potential(seed):
    A, cand, h = gauge_toy(seed)
    b1 = gauge_integrate(A, cand.b, h, cand.delta)
    assert sorted((b1 - cand.b).support()) == ["c1", "c2"]
    W0, flat0 = potential(A, cand)
    W1, flat1 = potential(A, MCCandidate(b1, cand.delta))
    assert flat0 and flat1
    assert nearly_equal(W0, W1, TOL)
    assert all(nearly_equal(w, W0, TOL) for w in gauge_equivalent_potentials(A, cand, h))


@pytest.mark.parametrize("seed", range(5))
def test_gauge_leaves_flat_locus_when_m1_squares_nonzero(seed):
    A, cand, h = gauge_toy(seed, closed=False)
    b1 = gauge_integrate(A, cand.b, h, cand.delta)
    assert potential(A, cand)[1]
    assert not potential(A, MCCandidate(b1, cand.delta))[1]


def test_gauge_integrate_with_nilpotent_m1():
    A, cand, h = gauge_toy(3)
    expected = cand.b + m_d(A, ("h",)) * h["h"]
    assert gauge_integrate(A, cand.b, h, cand.delta).nearly_equal(expected, TOL)


def _single_product_algebra(word, sign):
    C = CellComplex(2, {"T": 2, "c1": 1, "h": 0})
    return CurvedAInftyAlgebra(C, (Disk(word, "c1", F(1, 2), sign, direct=True),), F(1))


@pytest.mark.parametrize("sign", [1, -1])
def test_gauge_integrate_sums_product_after_h(sign):
    # b1(c1) = b0(c1) + r b1(c1) with r = sign * t q^{1/2}
    A = _single_product_algebra(("h", "c1"), sign)
    b0 = Cochain({"c1": monomial(1, F(1, 2))})
    b1 = gauge_integrate(A, b0, Cochain({"h": monomial(0.5, F(1, 2))}), F(1, 2))
    expected = sum((monomial((0.5 * sign) ** k, k + F(1, 2)) for k in range(1, 8)), monomial(1, F(1, 2)))
    assert b1.support() == ["c1"]
    assert nearly_equal(truncate(b1["c1"], 4), truncate(expected, 4), TOL)


@pytest.mark.parametrize("sign", [1, -1])
def test_gauge_integrate_product_before_h(sign):
    # c1 before h only sees b0, and the word (c1, h) has an odd sign exponent
    A = _single_product_algebra(("c1", "h"), sign)
    b0 = Cochain({"c1": monomial(1, F(1, 2))})
    b1 = gauge_integrate(A, b0, Cochain({"h": monomial(0.5, F(1, 2))}), F(1, 2))
    assert nearly_equal(b1["c1"], monomial(1, F(1, 2)) + monomial(-0.5 * sign, F(3, 2)), TOL)


def test_gauge_step_defect():
    A, cand, h = gauge_toy(1)
    value, defect = gauge_step(A, cand.b, cand.b, h, cand.delta)
    assert (defect + value - cand.b).max_abs() < TOL
    assert defect.max_abs() > 0.1 * abs(h["h"].coefficient(F(1, 2)))
    b1 = gauge_integrate(A, cand.b, h, cand.delta)
    _, defect = gauge_step(A, cand.b, b1, h, cand.delta)
    assert defect.max_abs() < TOL


def test_gauge_step_is_linear_in_h():
    A, cand, h = gauge_toy(0)
    b = cand.b
    step = gauge_step(A, b, b, h, cand.delta)[0] - b
    double = gauge_step(A, b, b, h * 2, cand.delta)[0] - b
    assert not step.is_zero()
    assert (double - step * 2).max_abs() < TOL


def test_gauge_needs_positive_valuation():
    case = random_surgery_case(1)
    with pytest.raises(NotAdmissible):
        gauge_integrate(case.algebra, case.candidate.b, Cochain({"v+": monomial(1)}), case.candidate.delta)


def test_gauge_away_sphere_coefficient():
    A = classical_sphere_algebra(4, surgered=True)
    t = monomial(0.7, F(1, 2))
    b = Cochain({"e+": t, GREY: monomial(1, 1)})
    gauged = gauge_away(A, b, "sigma_n", "e+", F(1))
    assert gauged["e+"].is_zero()
    assert nearly_equal(gauged["e-"], t, TOL)
    assert nearly_equal(gauged[GREY], monomial(1, 1), TOL)


def test_gauge_away_without_neck_coefficient():
    A = classical_sphere_algebra(4, surgered=True)
    b = Cochain({"e+": monomial(0.7, F(1, 2))})
    with pytest.raises(NoProgress):
        gauge_away(A, b, "sigma_1", "e+", F(1))
