# -*- coding: utf-8 -*-
"""
Floer cohomology ranks, certificates and essential quotients.
"""
from fractions import Fraction as F

import pytest

from Pyfloer.ainfty import Cochain
from Pyfloer.examples import classical_sphere_algebra, flat_surgery_case, worked_example
from Pyfloer.floer import (NotAcyclic, NotProjectivelyFlat, NotSubcomplex, NovikovMatrix,
                           RankUnstable, check_square_zero, conjugation_defect, ess_quotient,
                           floer_differential, hf_dimension, hf_of_matrix, rank_certificate)
from Pyfloer.novikov import NovikovElement, monomial, nearly_equal
from Pyfloer.surgery import dpsi, psi, transform_atlas

TOL = 1e-9


def test_sphere_pair_before_and_after_surgery():
    dim0, cert0 = hf_dimension(classical_sphere_algebra(4), Cochain())
    dim1, cert1 = hf_dimension(classical_sphere_algebra(4, surgered=True), Cochain())
    assert (dim0, cert0.rank) == (4, 3)
    assert (dim1, cert1.rank) == (2, 4)
    assert cert0.stable and cert1.stable


def test_differential_squares_to_zero():
    M = floer_differential(classical_sphere_algebra(3, surgered=True), Cochain())
    check_square_zero(M)


def test_non_flat_candidate_is_rejected():
    case = worked_example()
    b = case.candidate.b.without("x''")
    with pytest.raises(NotProjectivelyFlat):
        floer_differential(case.algebra, b, case.candidate.delta)


def test_essential_quotients_match_hf():
    M0 = floer_differential(classical_sphere_algebra(4), Cochain())
    loc0 = [Cochain.basis(s) for s in ("e+", "e-", "D+", "D-")]
    Q0 = ess_quotient(M0, loc0)
    assert hf_of_matrix(Q0.differential)[0] == 4

    M1 = floer_differential(classical_sphere_algebra(4, surgered=True), Cochain())
    loc1 = [Cochain.basis("sigma_n"), Cochain({"e+": 1, "e-": -1})]
    Q1 = ess_quotient(M1, loc1)
    assert sorted(p for p, _ in Q1.loc_basis) == ["e-", "sigma_n"]
    assert hf_of_matrix(Q1.differential)[0] == 2


def test_essential_quotient_errors():
    M = floer_differential(classical_sphere_algebra(4), Cochain())
    with pytest.raises(NotSubcomplex):
        ess_quotient(M, [Cochain.basis("D+")])
    with pytest.raises(NotAcyclic):
        ess_quotient(M, [Cochain.basis("e+")])
    with pytest.raises(NotSubcomplex):
        ess_quotient(M, [Cochain.basis("nowhere")])


def _unstable_matrix():
    rows, cols = ["r1", "r2", "r3"], ["c1", "c2", "c3"]
    entries = {
        ("r1", "c1"): monomial(1),
        ("r1", "c2"): NovikovElement.build([(0, 1)], F(1, 2)),
        ("r2", "c1"): monomial(1),
        ("r2", "c2"): monomial(1),
        ("r3", "c3"): monomial(1, 1),
    }
    return NovikovMatrix(rows, cols, entries)


def test_rank_unstable():
    with pytest.raises(RankUnstable):
        rank_certificate(_unstable_matrix())


def test_rank_certificate_margin():
    M = NovikovMatrix(["r"], ["c"], {("r", "c"): monomial(2, F(1, 2))})
    cert = rank_certificate(M, truncation=F(3))
    assert cert.rank == 1
    assert cert.margin == F(5, 2)
    assert cert.to_json()["margin"] == "5/2"


def _block(M, names):
    keep = set(names)
    return NovikovMatrix(list(names), list(names),
                         {(r, c): v for (r, c), v in M.entries.items() if r in keep and c in keep})


@pytest.mark.parametrize("seed", range(3))
def test_flat_surgery_case_hf_on_both_sides(seed):
    case = flat_surgery_case(seed)
    A0, cand, S = case.algebra, case.candidate, case.surgery
    A_eps = transform_atlas(A0, S, (12, 12), cand)
    b_eps = psi(cand, S)

    dim0, cert0 = hf_dimension(A0, cand.b, cand.delta)
    dim_eps, cert_eps = hf_dimension(A_eps, b_eps, cand.delta)
    assert dim0 == dim_eps == 3
    assert (cert0.rank, cert_eps.rank) == (5, 4)

    M0 = floer_differential(A0, cand.b, cand.delta)
    M_eps = floer_differential(A_eps, b_eps, cand.delta)
    Q0 = ess_quotient(M0, [Cochain.basis(s) for s in ("e+", "e-", "D'+", "D'-")])
    Q_eps = ess_quotient(M_eps, [Cochain.basis("sigma_n"), Cochain({"e+": 1, "e-": -1})])
    assert len(Q0.generators) == len(Q_eps.generators) == 9
    assert hf_of_matrix(Q0.differential)[0] == hf_of_matrix(Q_eps.differential)[0] == 3

    # dpsi intertwines both differentials on the block through the arc and the handle
    P = dpsi(cand, S, off_handle=["v+", "v-", "a"])
    assert conjugation_defect(_block(M0, P.cols), _block(M_eps, P.rows), P) < TOL
    assert nearly_equal(M0.get("v+", "x"), cand.b["xbar"], TOL)


def test_flat_surgery_case_without_sheet_units():
    case = flat_surgery_case(0, sheet_units=False)
    dim0, cert0 = hf_dimension(case.algebra, case.candidate.b, case.candidate.delta)
    assert (dim0, cert0.rank) == (5, 4)
    M0 = floer_differential(case.algebra, case.candidate.b, case.candidate.delta)
    Q0 = ess_quotient(M0, [Cochain.basis(s) for s in ("e+", "e-", "D+", "D-")])
    assert hf_of_matrix(Q0.differential)[0] == 5
