# -*- coding: utf-8 -*-
"""
Cell complexes: structural validation, surgery on cells and cup products.
"""
import pytest

from Pyfloer.cellular import (CellComplex, DimensionMismatch, DimensionTooLow, DuplicateCell,
                              MissingBall, StandardBall, UnknownGenerator, cup_product,
                              euler_change, extend_diagonal, surger_cells, validate_complex)
from Pyfloer.examples import SPHERE_BALLS, circle, surgered_two_spheres, two_spheres


def test_bundled_complexes_are_valid():
    assert validate_complex(circle()) == []
    for n in range(2, 6):
        for arc in (False, True):
            assert validate_complex(two_spheres(n, arc)) == []
            assert validate_complex(surgered_two_spheres(n, arc)) == []


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_euler_characteristic_change(n):
    before = two_spheres(n, with_arc=True)
    after = surgered_two_spheres(n, with_arc=True)
    assert after.euler_characteristic() - before.euler_characteristic() == euler_change(n)


def test_surgery_replaces_tops_by_handle():
    C = surgered_two_spheres(4)
    assert "D+" not in C.cells and "D-" not in C.cells
    assert C.cells["sigma_1"] == 1 and C.cells["sigma_n"] == 4
    assert C.chain_boundary("sigma_1") == {"v+": 1, "v-": -1}
    assert C.chain_boundary("sigma_n") == {"e+": 1, "e-": -1}


def test_sign_flags_reverse_handle_boundaries():
    C = surger_cells(two_spheres(3), SPHERE_BALLS, sign_flags={"longitude": -1})
    assert C.chain_boundary("sigma_1") == {"v+": -1, "v-": 1}
    assert C.chain_boundary("sigma_n") == {"e+": 1, "e-": -1}


def test_broken_diagonal_names_the_pair():
    C = two_spheres(3)
    diagonal = dict(C.diagonal)
    del diagonal[("v+", "D'+")]
    broken = CellComplex(3, dict(C.cells), dict(C.boundary), diagonal)
    violations = validate_complex(broken)
    assert any(v.rule == "diagonal cycle" and v.cells == ("v+", "e+") for v in violations)


def test_boundary_squared_violation():
    C = CellComplex(2, {"a": 0, "b": 1, "c": 2}, {("c", "b"): 1, ("b", "a"): 1})
    violations = validate_complex(C)
    assert any(v.rule == "d^2 = 0" and v.cells == ("c", "a") for v in violations)


def test_boundary_dimension_violation():
    C = CellComplex(2, {"a": 0, "c": 2}, {("c", "a"): 1})
    assert any(v.rule == "boundary dimension" for v in validate_complex(C))


def test_surgery_errors():
    with pytest.raises(DimensionTooLow):
        surger_cells(circle(), SPHERE_BALLS)
    with pytest.raises(MissingBall):
        surger_cells(two_spheres(3), (StandardBall("B", "e+", "v+"), SPHERE_BALLS[1]))
    with pytest.raises(DuplicateCell):
        surger_cells(two_spheres(3), SPHERE_BALLS, longitude="v+")


def test_from_json_rejects_duplicates_and_unknown_cells():
    data = circle().to_json()
    data["cells"].append({"name": "sigma_0", "dim": 0})
    with pytest.raises(DuplicateCell):
        CellComplex.from_json(data)
    data = circle().to_json()
    data["boundary"] = [{"from": "sigma_1", "to": "nowhere", "coef": 1}]
    with pytest.raises(UnknownGenerator):
        CellComplex.from_json(data)


def test_extended_diagonal_pairs_self_intersections():
    diag = extend_diagonal(circle(), [("x", "xbar")])
    assert diag("x", "xbar") == 1 and diag("xbar", "x") == 1
    assert diag("sigma_0", "sigma_1") == 1
    with pytest.raises(UnknownGenerator):
        diag("y", "x")
    with pytest.raises(DuplicateCell):
        extend_diagonal(circle(), [("sigma_0", "xbar")])


def test_cup_product_with_unit():
    C = circle()
    assert cup_product(C, {"sigma_0": 1}, {"sigma_1": 3}, 0, 1) == {"sigma_1": 3}
    assert cup_product(C, {"sigma_1": 3}, {"sigma_0": 1}, 1, 0) == {"sigma_1": 3}


def test_cup_product_degrees():
    C = circle()
    assert cup_product(C, {"sigma_1": 1}, {"sigma_1": 1}, 1, 1) == {}
    with pytest.raises(DimensionMismatch):
        cup_product(two_spheres(3), {"e+": 1}, {"e+": 1}, 1, 1)


def test_complementary_cup_product_lands_on_first_top_cell():
    C = surgered_two_spheres(2)
    assert C.diagonal_row("e+") == {"sigma_1": 1}
    assert C.top_cells()[0] == "D'+"
    assert cup_product(C, {"e+": 2}, {"sigma_1": 3}, 1, 1) == {"D'+": 6}
    assert cup_product(C, {"e-": 1}, {"sigma_1": 1}, 1, 1) == {"D'+": -1}
