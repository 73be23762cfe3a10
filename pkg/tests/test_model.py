from math import comb

import pytest
from hypothesis import given, strategies as st

from postulate.model import (BScheme, SpecMove, SubStar, TScheme, VScheme, dim_forms, dim_forms_p2,
                             dim_forms_p3, main_theorem_scheme, point_count, surplus, virtual_conditions)


@pytest.mark.parametrize("d,expected", [(1, 4), (9, 220), (0, 1), (-1, 0)])
def test_dim_forms_p3(d, expected):
    assert dim_forms_p3(d) == expected


@pytest.mark.parametrize("d,expected", [(5, 21), (4, 15), (0, 1), (-3, 0)])
def test_dim_forms_p2(d, expected):
    assert dim_forms_p2(d) == expected


@pytest.mark.parametrize("d", range(1, 200))
def test_p3_difference_is_p2(d):
    assert dim_forms_p3(d) - dim_forms_p3(d - 1) == dim_forms_p2(d)


def test_main_theorem_examples():
    assert main_theorem_scheme(9) == BScheme(9, 22, 0, SubStar(), 0)
    assert main_theorem_scheme(5) == BScheme(5, 9, 0, SubStar(), 2)
    assert 22 * 10 + 0 == dim_forms_p3(9)


def _oracle_lines(d):
    # independent count: the largest number of lines that fit, and leftover points
    lines = dim_forms_p3(d) // (d + 1)
    return lines, dim_forms_p3(d) - lines * (d + 1)


@pytest.mark.parametrize("d", range(1, 301))
def test_main_theorem_balanced(d):
    y = main_theorem_scheme(d)
    assert surplus(y) == 0
    assert y.L * (d + 1) + y.collinear == comb(d + 3, 3)
    assert (y.L, y.collinear) == _oracle_lines(d)


def test_main_theorem_rejects_nonpositive():
    with pytest.raises(ValueError):
        main_theorem_scheme(0)


def test_virtual_conditions_examples():
    b = BScheme(9, 14, 4, SubStar(4, 2))
    assert virtual_conditions(b) == 140 + 76 + 4 == 220
    assert surplus(b) == 0
    v = VScheme(5, 0, 3, SubStar(4, 2), 11)
    assert virtual_conditions(v) == 6 + 4 + 11 == dim_forms_p2(5)
    assert virtual_conditions(BScheme(0, 0, 0, SubStar())) == 0
    assert surplus(VScheme(9, 0, 8, SubStar(6, 3), 27)) == 16 + 12 + 27 - 55 == 0
    assert surplus(VScheme(0, 0, 0, SubStar(), 1)) == 0


def test_trace_conditions():
    t = TScheme(9, 4, 0, 3, SubStar(4, 2), 11)
    assert virtual_conditions(t) == 4 * 10 + 6 + 4 + 11
    assert dim_forms(t) == dim_forms_p2(9)


def test_substar_points():
    assert SubStar(3, 1).points == 2
    assert point_count(4, 2) == 4
    with pytest.raises(ValueError):
        SubStar(3, 2)
    with pytest.raises(ValueError):
        SubStar(-1, 0)


@given(st.integers(0, 60), st.data())
def test_point_count_monotone(a, data):
    b = data.draw(st.integers(0, a // 2))
    assert point_count(a, 0) == comb(a, 2)
    if b > 0:
        assert point_count(a, b) < point_count(a, b - 1)


def test_negative_degree_v_is_empty_system():
    v = VScheme(-1, 0, 0, SubStar(1, 0), 0)
    assert dim_forms(v) == 0
    assert surplus(v) == 0


def test_move_validation_and_str():
    m = SpecMove(3, 0, 1, 0)
    assert str(m) == "S(3,0,1,0)"
    assert str(SpecMove(1, 2, 0, 0, star=True)) == "S*(1,2,0,0)"
    assert m.trace_lines == 4
    with pytest.raises(ValueError):
        SpecMove(-1, 0, 0, 0)
    with pytest.raises(ValueError):
        BScheme(3, -1, 0, SubStar())


def test_scheme_str():
    assert str(BScheme(9, 14, 4, SubStar(4, 2))) == "B(9;14,4,(4,2))"
    assert str(TScheme(9, 4, 0, 3, SubStar(4, 2), 11)) == "T(9;4,0,3,(4,2),11)"
    assert str(VScheme(5, 0, 3, SubStar(4, 2), 11)) == "V(0,3,(4,2),11)@5"
