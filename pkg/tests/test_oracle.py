import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from postulate.calculus3 import HH9_START, apply_move
from postulate.model import BScheme, SpecMove, SubStar, TScheme, VScheme, main_theorem_scheme, surplus
from postulate.oracle import (LADDER, Line, OracleConfig, Point, Realization, attempt, calibrate_conditions,
                              castelnuovo_ranks, condition_matrix, conditions, eval_row, monomials, rank,
                              realize, realize_specialization, verify_empty)

P = 2147483647


def naive_eval(exps, x, p):
    return [int(np.prod([pow(int(xi), int(e), p) for xi, e in zip(x, row)], dtype=object)) % p
            for row in exps]


def test_monomials_graded_lex():
    m = monomials(3, 2)
    assert m.shape == (6, 3)
    assert [tuple(r) for r in m] == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    assert monomials(4, 9).shape[0] == 220


@pytest.mark.parametrize("p", LADDER)
def test_eval_row_exact_for_big_primes(p):
    # regression: the power table used to overflow int64 for p >= 2**31
    exps = monomials(4, 7)
    x = (p - 1, p - 2, 123456789, p // 3)
    assert [int(v) for v in eval_row(exps, x, p)] == naive_eval(exps, x, p)


@pytest.mark.parametrize("scheme", [main_theorem_scheme(9), HH9_START, VScheme(5, 0, 3, SubStar(4, 2), 11)])
def test_rank_agrees_across_ladder(scheme):
    ranks = {attempt(scheme, p, 0)[0] for p in LADDER}
    assert len(ranks) == 1


def test_realize_structure_and_determinism():
    b = BScheme(1, 1, 0, SubStar(3, 1))
    r = realize(b, P, 0)
    kinds = sorted(e.kind for e in r.elements)
    assert kinds == ["line", "point", "point"]
    assert all(e.x[3] == 0 for e in r.elements if e.kind == "point")  # sub-star points lie in H
    assert realize(b, P, 0) == r
    assert realize(b, P, 1) != r


def test_realize_double_point_slot():
    r = realize(VScheme(2, 1, 0, SubStar(), 0), P, 0)
    assert [e.kind for e in r.elements] == ["double_point"]


def test_realize_rejects_bad_prime():
    with pytest.raises(ValueError):
        realize(main_theorem_scheme(9), 7, 0)
    with pytest.raises(ValueError):
        realize(main_theorem_scheme(9), 1 << 33, 0)


def test_condition_matrix_shapes():
    r = realize(BScheme(2, 1, 0, SubStar()), P, 0)
    m = condition_matrix(r, 2)
    assert m.rows.shape == (3, 10)
    m = condition_matrix(realize(HH9_START, P, 0), 9)
    assert m.rows.shape == (14 * 10 + 4 * 20 + 4, 220)
    assert rank(m) == 220
    m = condition_matrix(realize(VScheme(1, 1, 0, SubStar(), 0), P, 0), 1)
    assert m.rows.shape == (3, 3) and rank(m) == 3


def test_fifteen_points_quartics():
    assert conditions(realize(VScheme(4, 0, 0, SubStar(), 15), P, 0), 4) == 15


def test_verify_empty_examples():
    assert verify_empty(BScheme(1, 1, 0, SubStar(3, 1)))
    assert verify_empty(VScheme(5, 0, 1, SubStar(4, 2), 15))
    v = verify_empty(VScheme(1, 0, 0, SubStar(), 1))
    assert not v and v.rank == 1 and v.cols == 3 and v.attempts == 3
    neg = verify_empty(VScheme(-1, 0, 0, SubStar(1, 0), 0))
    assert neg and neg.cols == 0


def test_determinism_of_verdicts():
    cfg = OracleConfig(P, 5, 2)
    assert verify_empty(HH9_START, cfg) == verify_empty(HH9_START, cfg)


@pytest.mark.parametrize("kind,d,expected", [("cross", 3, 7), ("line", 5, 6), ("sundial", 2, 6),
                                             ("double_point", 4, 3), ("length2", 4, 2), ("point", 3, 1)])
def test_calibration_examples(kind, d, expected):
    assert calibrate_conditions(kind, d) == expected


@pytest.mark.parametrize("d", range(1, 8))
def test_sundial_matches_skew_lines(d):
    assert calibrate_conditions("sundial", d, seed=3) == calibrate_conditions("skew_lines", d, seed=3) == 2 * d + 2


def test_calibration_rejects_unknown():
    with pytest.raises(ValueError):
        calibrate_conditions("triple_point", 3)


small = st.builds(lambda d, L, C, a, col: BScheme(d, L, C, SubStar(a, a // 3), col),
                  st.integers(1, 4), st.integers(0, 4), st.integers(0, 3), st.integers(0, 4), st.integers(0, 3))


@settings(max_examples=40, deadline=None)
@given(small, st.integers(0, 5))
def test_rank_monotone_and_bounded(b, seed):
    r = realize(b, P, seed)
    prev = 0
    for n in range(len(r.elements) + 1):
        sub = Realization(r.ambient, r.prime, r.seed, r.elements[:n])
        m = condition_matrix(sub, b.d)
        rk = rank(m)
        assert rk >= prev
        assert rk <= min(m.rows.shape[0], m.cols)
        prev = rk


@settings(max_examples=40, deadline=None)
@given(small)
def test_negative_surplus_never_verified(b):
    if surplus(b) < 0:
        assert not verify_empty(b, OracleConfig(retries=1))


def test_specialization_realization_counts():
    b, m = HH9_START, SpecMove(3, 0, 1, 0)
    t, r = apply_move(b, m)
    z = realize_specialization(b, m, P, 0)
    assert z.trace.ambient == "P2" and z.residual.ambient == "P3"
    y, res, tr = castelnuovo_ranks(b, m, P, 0)
    assert y >= res + tr


def test_castelnuovo_needs_embedded_points():
    # without the embedded conditions at the star nodes the inequality fails
    b, m = BScheme(2, 0, 2, SubStar()), SpecMove(0, 0, 1, 1)
    y, res, tr = castelnuovo_ranks(b, m, P, 0)
    assert y >= res + tr
    z = realize_specialization(b, m, P, 0)
    stripped = Realization(z.scheme.ambient, P, 0, [e for e in z.scheme.elements if e.kind != "embedded"])
    assert conditions(stripped, 2) < res + tr
