"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line with its time budget."""

import io
import random
import time
from contextlib import contextmanager
from math import comb

import pytest

from displays import (HH9, first_round_display, initial_blocks, lemma_blocks, second_round_display)
from postulate.calculus2 import (FIRST_TERMINAL, SECOND_TERMINAL, PlaneMove, Target, first_example_start,
                                 on_line_length, plane_step, run_plane_chain, second_example_start,
                                 section6_chain_first, section6_chain_second, strip_lines)
from postulate.calculus3 import (HH9_END, HH9_START, apply_move, hh9_chain, initial_chain, lemma_entry_scheme,
                                 reduction_lemma_moves, reduction_lemma_start, run_chain)
from postulate.certificate import from_json, to_json, verify_certificate
from postulate.cli import main
from postulate.model import (BScheme, SpecMove, SubStar, VScheme, dim_forms_p3, main_theorem_scheme,
                             surplus)
from postulate.oracle import (CALIBRATION_COSTS, OracleConfig, calibrate_conditions, castelnuovo_ranks,
                              verify_empty)
from postulate.search import search_certificate


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number, limit):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            ok = ok and elapsed < limit
            with capsys.disabled():
                print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s, limit {limit} s)")
        assert elapsed < limit, f"criterion {number} took {elapsed:.2f} s > {limit} s"
    return run


def test_criterion_01_numerology(criterion):
    with criterion(1, 1.0):
        for d in range(1, 301):
            y = main_theorem_scheme(d)
            assert surplus(y) == 0
            assert y.L * (d + 1) + y.collinear == comb(d + 3, 3)


def test_criterion_02_hh9_replay(criterion):
    with criterion(2, 1.0):
        steps = run_chain(HH9_START, hh9_chain())
        assert [(s.move, s.trace, s.after) for s in steps] == HH9
        assert steps[-1].after == BScheme(1, 1, 0, SubStar(3, 1))


def test_criterion_03_lemma_and_initial_replay(criterion):
    with criterion(3, 1.0):
        for k in range(4, 31):
            steps = run_chain(reduction_lemma_start(k), reduction_lemma_moves(k))
            assert [(s.move, s.trace, s.after) for s in steps] == lemma_blocks(k)
            assert steps[-1].after == reduction_lemma_start(k - 1)
        for d in range(12, 91):
            steps = run_chain(main_theorem_scheme(d), initial_chain(d))
            if d not in (13, 14):  # the displayed moves are infeasible there; see the patched tails
                assert [(s.move, s.trace, s.after) for s in steps] == initial_blocks(d)
            assert steps[-1].after == lemma_entry_scheme(d)


def _random_pair(rng, bound=100):
    a = rng.randint(0, bound)
    b = BScheme(rng.randint(1, bound), rng.randint(0, bound), rng.randint(0, bound),
                SubStar(a, rng.randint(0, a // 2)), rng.randint(0, bound))
    c = rng.randint(0, b.C)
    h = rng.randint(0, b.C - c)
    s = rng.randint(0, b.L // 2)
    ell = rng.randint(0, b.L - 2 * s)
    star = b.collinear > 0 and rng.random() < 0.5
    return b, SpecMove(ell, s, h, c, star)


def _random_plane_step(rng, bound=100):
    while True:
        a = rng.randint(0, bound)
        star = SubStar(a, rng.randint(0, a // 2))
        v = VScheme(rng.randint(0, bound), rng.randint(0, bound), rng.randint(0, bound), star,
                    rng.randint(0, bound), rng.randint(0, bound), rng.randint(0, 3))
        targets = [Target.GENERAL]
        if star.b:
            targets.append(Target.SUBSTAR_WITH_OMITTED)
        if star.a - 2 * star.b:
            targets.append(Target.SUBSTAR_WITHOUT_OMITTED)
        if v.marked:
            targets.append(Target.THROUGH_MARKED)
        m = PlaneMove(rng.choice(targets), rng.randint(0, v.dbl), rng.randint(0, v.len2), rng.randint(0, v.pts))
        length = on_line_length(v, m)
        if length >= v.d + 1:
            return v, m, length


def test_criterion_04_conservation(criterion):
    rng = random.Random(20241)
    with criterion(4, 10.0):
        for _ in range(10_000):
            b, m = _random_pair(rng)
            t, r = apply_move(b, m)
            assert b.L + 2 * b.C == r.L + 2 * r.C + t.lines
            n = t.lines - t.d - 1
            excess = comb(n, 2) if n >= 2 else 0
            assert surplus(b) == surplus(r) + surplus(strip_lines(t)) - excess
        for _ in range(10_000):
            v, m, length = _random_plane_step(rng)
            assert surplus(v) == surplus(plane_step(v, m)) + (length - v.d - 1)


def test_criterion_05_calibration(criterion):
    with criterion(5, 5.0):
        for d in range(1, 13):
            for seed in range(3):
                for kind in ("line", "cross", "sundial", "double_point", "length2"):
                    assert calibrate_conditions(kind, d, seed=seed) == CALIBRATION_COSTS[kind](d)
                assert calibrate_conditions("sundial", d, seed=seed) == calibrate_conditions("skew_lines", d, seed=seed)


def test_criterion_06_main_theorem_direct(criterion):
    with criterion(6, 30.0):
        for d in range(1, 13):
            for seed in (0, 1):
                v = verify_empty(main_theorem_scheme(d), OracleConfig(seed=seed, retries=1))
                assert v.verified and v.cols == dim_forms_p3(d)


def test_criterion_07_hh9_certified(criterion):
    with criterion(7, 10.0):
        for step in run_chain(HH9_START, hh9_chain()):
            assert verify_empty(strip_lines(step.trace))
        assert verify_empty(HH9_END)
        assert main(["chain", "--case", "hh9", "--verify"], out=io.StringIO()) == 0


def test_criterion_08_plane_bases(criterion):
    with criterion(8, 1.0):
        assert verify_empty(VScheme(5, 0, 1, SubStar(4, 2), 15))
        assert verify_empty(VScheme(4, 0, 0, SubStar(), 15))
        assert verify_empty(FIRST_TERMINAL)
        assert verify_empty(SECOND_TERMINAL)
        assert verify_empty(VScheme(4, 2, 0, SubStar(), 9))


def test_criterion_09_plane_chains(criterion):
    with criterion(9, 60.0):
        to_verify = set()
        for k in range(3, 32, 2):
            first = run_plane_chain(first_example_start(k), section6_chain_first(k))
            second = run_plane_chain(second_example_start(k), section6_chain_second(k))
            for j in range(k, 4, -2):
                i = 4 * (k - j) // 2
                assert first[i + 1:i + 5] == first_round_display(j)
                assert second[i + 1:i + 5] == second_round_display(j)
            assert first[-2] == VScheme(5, 0, 1, SubStar(4, 2), 15) and first[-1] == FIRST_TERMINAL
            assert second[-1] == SECOND_TERMINAL
            if k <= 9:
                to_verify.update(first + second)
        for v in sorted(to_verify, key=str):
            assert verify_empty(v), v


def test_criterion_10_end_to_end(criterion):
    with criterion(10, 120.0):
        for d in range(4, 10):
            cert = search_certificate(main_theorem_scheme(d))
            assert verify_certificate(cert)
            text = to_json(cert)
            assert to_json(from_json(text)) == text


def test_criterion_11_castelnuovo(criterion):
    rng = random.Random(7)
    with criterion(11, 30.0):
        samples = 0
        while samples < 100:
            a = rng.randint(0, 4)
            b = BScheme(rng.randint(1, 5), rng.randint(0, 5), rng.randint(0, 3), SubStar(a, rng.randint(0, a // 2)),
                        rng.randint(0, 3))
            c = rng.randint(0, b.C)
            h = rng.randint(0, b.C - c)
            s = rng.randint(0, b.L // 2)
            m = SpecMove(rng.randint(0, b.L - 2 * s), s, h, c, b.collinear > 0 and rng.random() < 0.5)
            y, res, tr = castelnuovo_ranks(b, m, seed=rng.randint(0, 10**6))
            assert y >= res + tr, (b, m, y, res, tr)
            samples += 1
