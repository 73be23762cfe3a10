"""Random realizations over F_p and exact rank checks of vanishing conditions.

A realization places every element of a scheme descriptor at random
coordinates; the condition matrix has one column per degree-d monomial
(graded lex, variables x0 > x1 > ...) and one row per linear condition.
By semicontinuity a full-rank matrix for one realization proves that the
general scheme of that type imposes independent conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .linalg import cross3, mulmod, normalize, rank_mod_p
from .model import BScheme, Scheme, SpecMove, SubStar, TScheme, VScheme, dim_forms

DEFAULT_PRIME = 2147483647
# retry ladder; both exercise the split multiplication path above 2**31
LADDER = (DEFAULT_PRIME, 4294967291, 4294967279)
RESAMPLE_BUDGET = 200


class RealizationError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> np.ndarray:
    """Exponent vectors of degree d, lexicographically descending."""
    if d < 0:
        return np.zeros((0, nvars), dtype=np.int64)
    if nvars == 1:
        return np.array([[d]], dtype=np.int64)
    out = []
    for e0 in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - e0):
            out.append((e0, *rest))
    arr = np.array(out, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def _values(exps: np.ndarray, x, p: int) -> np.ndarray:
    d = int(exps.max()) if exps.size else 0
    nv = exps.shape[1]
    pw = np.ones((nv, d + 1), dtype=np.int64)
    for i in range(nv):
        xi = int(x[i]) % p
        acc = 1
        for j in range(1, d + 1):
            acc = acc * xi % p
            pw[i, j] = acc
    val = pw[0][exps[:, 0]]
    for i in range(1, nv):
        val = mulmod(val, pw[i][exps[:, i]], p)
    return val


def eval_row(exps, x, p):
    return _values(exps, x, p)


def deriv_row(exps, x, w, p):
    """Row of the functional f -> sum_i w_i (df/dx_i)(x)."""
    row = np.zeros(exps.shape[0], dtype=np.int64)
    for i, wi in enumerate(w):
        wi = int(wi) % p
        if not wi:
            continue
        lowered = exps.copy()
        lowered[:, i] = np.maximum(lowered[:, i] - 1, 0)
        coef = mulmod(exps[:, i] % p, wi, p)
        row = (row + mulmod(_values(lowered, x, p), coef, p)) % p
    return row


def _line_points(a, b, d, p):
    # b is the point at infinity of t -> a + t b
    pts = [np.asarray(b)]
    if d >= 1:
        pts.append(np.asarray(a))
    for t in range(1, d):
        pts.append((np.asarray(a) + t * np.asarray(b)) % p)
    return pts


@dataclass(frozen=True)
class Point:
    x: tuple
    kind = "point"

    def rows(self, exps, d, p):
        return [eval_row(exps, self.x, p)]


@dataclass(frozen=True)
class Line:
    a: tuple
    b: tuple
    kind = "line"

    def rows(self, exps, d, p):
        return [eval_row(exps, q, p) for q in _line_points(self.a, self.b, d, p)]


@dataclass(frozen=True)
class Cross:
    """Two lines through ``v`` towards ``a`` and ``b``."""

    v: tuple
    a: tuple
    b: tuple
    kind = "cross"

    def rows(self, exps, d, p):
        return Line(self.v, self.a).rows(exps, d, p) + Line(self.v, self.b).rows(exps, d, p)


@dataclass(frozen=True)
class Sundial:
    """Cross plus an embedded point at the vertex pointing along ``w``, off the cross's plane."""

    v: tuple
    a: tuple
    b: tuple
    w: tuple
    kind = "sundial"

    def rows(self, exps, d, p):
        return Cross(self.v, self.a, self.b).rows(exps, d, p) + [deriv_row(exps, self.v, self.w, p)]


@dataclass(frozen=True)
class DoublePoint:
    v: tuple
    kind = "double_point"

    def rows(self, exps, d, p):
        # Euler's relation gives f(v) = 0 from the partials when p > d
        n = len(self.v)
        return [deriv_row(exps, self.v, np.eye(n, dtype=np.int64)[i], p) for i in range(n)]


@dataclass(frozen=True)
class Length2:
    v: tuple
    w: tuple
    kind = "length2"

    def rows(self, exps, d, p):
        return [eval_row(exps, self.v, p), deriv_row(exps, self.v, self.w, p)]


@dataclass(frozen=True)
class Embedded:
    """Only the derivative condition of an embedded point; the support is already on the scheme."""

    v: tuple
    w: tuple
    kind = "embedded"

    def rows(self, exps, d, p):
        return [deriv_row(exps, self.v, self.w, p)]


@dataclass
class Realization:
    ambient: str
    prime: int
    seed: int
    elements: list = field(default_factory=list)
    # H is x3 = 0 for P^3 realizations
    plane: tuple | None = None

    @property
    def nvars(self):
        return 4 if self.ambient == "P3" else 3


@dataclass
class ConditionMatrix:
    rows: np.ndarray
    cols: int
    prime: int


class _Sampler:
    """Random coordinates plus the bookkeeping needed to reject degenerate draws."""

    def __init__(self, rng, p, nvars):
        self.rng = rng
        self.p = p
        self.nvars = nvars
        self.supports = []
        self.frames = []

    def vec(self, n=None):
        n = self.nvars if n is None else n
        while True:
            v = self.rng.integers(0, self.p, size=n, dtype=np.int64)
            if v.any():
                return tuple(int(x) for x in v)

    def in_h(self):
        # a point of H = {x3 = 0} in P^3
        return self.vec(3) + (0,)

    def support(self, x):
        self.supports.append(x)
        return x

    def frame(self, *vs):
        self.frames.append(vs)

    def line(self, a=None, b=None):
        a = self.vec() if a is None else a
        b = self.vec() if b is None else b
        self.frame(a, b)
        return a, b

    def on_line(self, a, b, count):
        ts = [int(t) for t in self.rng.integers(0, self.p, size=count, dtype=np.int64)]
        return [self.support(tuple((x + t * y) % self.p for x, y in zip(a, b))) for t in ts]

    def substar_nodes(self, star: SubStar, lift=False):
        p = self.p
        lines = [self.vec(3) for _ in range(star.a)]
        omitted = {(2 * i, 2 * i + 1) for i in range(star.b)}
        nodes = []
        for i, j in itertools.combinations(range(star.a), 2):
            if (i, j) in omitted:
                continue
            x = tuple(int(c) for c in cross3(lines[i], lines[j], p))
            if lift:
                x = x + (0,)
            nodes.append(self.support(x))
        if star.a >= 2:
            self.frames.extend((ln,) for ln in lines)
        return nodes

    def ok(self):
        p = self.p
        seen = set()
        for x in self.supports:
            key = normalize(x, p)
            if not any(key) or key in seen:
                return False
            seen.add(key)
        for fr in self.frames:
            if rank_mod_p(np.array(fr, dtype=np.int64), p) < len(fr):
                return False
        return True


def _rng(scheme_key, prime, seed):
    entropy = [int(seed), int(prime)] + [int(x) & 0xFFFFFFFF for x in scheme_key]
    return np.random.default_rng(entropy)


def _scheme_key(scheme: Scheme) -> tuple:
    tag = {BScheme: 1, TScheme: 2, VScheme: 3}[type(scheme)]
    vals = [tag]
    for f in scheme.__dataclass_fields__:
        v = getattr(scheme, f)
        vals += [v.a, v.b] if isinstance(v, SubStar) else [int(v)]
    return tuple(vals)


def _retrying(build, key, prime, seed, nvars):
    rng = _rng(key, prime, seed)
    for _ in range(RESAMPLE_BUDGET):
        s = _Sampler(rng, prime, nvars)
        out = build(s)
        if s.ok():
            return out
    raise RealizationError(f"no generic realization over F_{prime} after {RESAMPLE_BUDGET} draws")


def realize(scheme: Scheme, prime: int = DEFAULT_PRIME, seed: int = 0) -> Realization:
    if prime <= max(scheme.d, 1) or prime >= 1 << 32:
        raise ValueError(f"prime {prime} must exceed the degree and stay below 2**32")
    key = _scheme_key(scheme)
    if isinstance(scheme, BScheme):
        return _retrying(lambda s: _build_b(scheme, s, prime, seed), key, prime, seed, 4)
    return _retrying(lambda s: _build_plane(scheme, s, prime, seed), key, prime, seed, 3)


def _build_b(b: BScheme, s: _Sampler, prime, seed):
    els = []
    for _ in range(b.L):
        els.append(Line(*s.line()))
    for _ in range(b.C):
        v = s.support(s.in_h())
        q1, q2 = s.vec(), s.vec()
        s.frame(v, q1, q2)
        els.append(Cross(v, q1, q2))
    els += [Point(x) for x in s.substar_nodes(b.substar, lift=True)]
    if b.collinear:
        a, c = s.line()
        els += [Point(x) for x in s.on_line(a, c, b.collinear)]
    return Realization("P3", prime, seed, els, plane=(0, 0, 0, 1))


def _build_plane(t, s: _Sampler, prime, seed):
    els = []
    if isinstance(t, TScheme):
        for _ in range(t.lines):
            els.append(Line(*s.line()))
    for _ in range(t.dbl):
        els.append(DoublePoint(s.support(s.vec())))
    for _ in range(t.len2):
        v = s.support(s.vec())
        w = s.vec()
        s.frame(v, w)
        els.append(Length2(v, w))
    els += [Point(x) for x in s.substar_nodes(t.substar)]
    for _ in range(t.pts):
        els.append(Point(s.support(s.vec())))
    if t.collinear:
        a, c = s.line()
        els += [Point(x) for x in s.on_line(a, c, t.collinear)]
    for _ in range(getattr(t, "marked", 0)):
        els.append(Point(s.support(s.vec())))
    return Realization("P2", prime, seed, els)


def condition_matrix(r: Realization, d: int) -> ConditionMatrix:
    exps = monomials(r.nvars, d)
    rows = []
    for el in r.elements:
        rows += el.rows(exps, d, r.prime)
    mat = np.array(rows, dtype=np.int64).reshape(len(rows), exps.shape[0])
    return ConditionMatrix(mat, exps.shape[0], r.prime)


def rank(m: ConditionMatrix) -> int:
    return rank_mod_p(m.rows, m.prime)


def conditions(r: Realization, d: int) -> int:
    """Number of independent conditions (the Hilbert function value)."""
    if d < 0:
        return 0
    return rank(condition_matrix(r, d))


@dataclass(frozen=True)
class OracleConfig:
    prime: int = DEFAULT_PRIME
    seed: int = 0
    retries: int = 3

    def attempts(self):
        primes = [self.prime] + [q for q in LADDER if q != self.prime]
        for i in range(self.retries):
            yield primes[i % len(primes)], self.seed + i


@dataclass(frozen=True)
class Verdict:
    verified: bool
    rank: int
    cols: int
    prime: int | None = None
    seed: int | None = None
    attempts: int = 0

    def __bool__(self):
        return self.verified

    def __str__(self):
        if self.cols == 0:
            return "Verified (negative degree)"
        word = "Verified" if self.verified else "Inconclusive"
        return f"{word} rank {self.rank}/{self.cols} (p={self.prime}, seed={self.seed}, attempts={self.attempts})"


def attempt(scheme: Scheme, prime: int, seed: int) -> tuple[int, int]:
    """Rank and column count for one realization at the scheme's own degree."""
    r = realize(scheme, prime, seed)
    m = condition_matrix(r, scheme.d)
    return rank(m), m.cols


def verify_empty(scheme: Scheme, config: OracleConfig = OracleConfig()) -> Verdict:
    """Verified iff some realization has full column rank (no form of degree d survives).

    Inconclusive only reports the best rank seen; it never claims forms exist.
    """
    if scheme.d < 0:
        return Verdict(True, 0, 0)
    cols = dim_forms(scheme)
    best = None
    for n, (prime, seed) in enumerate(config.attempts(), 1):
        rk, cols = attempt(scheme, prime, seed)
        if rk == cols:
            return Verdict(True, rk, cols, prime, seed, n)
        if best is None or rk > best[0]:
            best = (rk, prime, seed)
    rk, prime, seed = best
    return Verdict(False, rk, cols, prime, seed, config.retries)


CALIBRATION_COSTS = {
    "point": lambda d: 1,
    "line": lambda d: d + 1,
    "cross": lambda d: 2 * d + 1,
    "sundial": lambda d: 2 * d + 2,
    "skew_lines": lambda d: 2 * d + 2,
    "double_point": lambda d: 3,
    "length2": lambda d: 2,
}


def calibrate_conditions(kind: str, d: int, prime: int = DEFAULT_PRIME, seed: int = 0) -> int:
    """Measured conditions imposed by one element of the given kind at degree d."""
    if d < 1:
        raise ValueError("calibration needs d >= 1")
    if kind not in CALIBRATION_COSTS:
        raise ValueError(f"unknown element kind {kind!r}")

    def build(s: _Sampler):
        if kind == "point":
            return "P3", [Point(s.support(s.vec()))]
        if kind == "line":
            return "P3", [Line(*s.line())]
        if kind == "skew_lines":
            a, b = s.line()
            c, e = s.line()
            s.frame(a, b, c, e)
            return "P3", [Line(a, b), Line(c, e)]
        if kind in ("cross", "sundial"):
            v, a, b, w = s.vec(), s.vec(), s.vec(), s.vec()
            s.frame(v, a, b, w)
            el = Cross(v, a, b) if kind == "cross" else Sundial(v, a, b, w)
            return "P3", [el]
        v = s.support(s.vec())
        if kind == "double_point":
            return "P2", [DoublePoint(v)]
        w = s.vec()
        s.frame(v, w)
        return "P2", [Length2(v, w)]

    key = (99, d, *kind.encode())
    nvars = 3 if kind in ("double_point", "length2") else 4
    ambient, els = _retrying(build, key, prime, seed, nvars)
    return conditions(Realization(ambient, prime, seed, els), d)


@dataclass
class SpecializedRealization:
    """One concrete specialized scheme together with its residual and trace."""

    scheme: Realization
    residual: Realization
    trace: Realization


def realize_specialization(b: BScheme, m: SpecMove, prime: int = DEFAULT_PRIME,
                           seed: int = 0) -> SpecializedRealization:
    """Place the configuration after the move ``m`` at random coordinates.

    Star lines lie in H = {x3 = 0}; every node between two of them carries an
    embedded point pointing off H, except the vertex of a cross laid into H.
    The residual and trace are written down in the same coordinates.
    """
    from .calculus3 import InfeasibleMove, feasible

    if not feasible(b, m):
        raise InfeasibleMove(b, m)
    off_h = (0, 0, 0, 1)

    def build(s: _Sampler):
        Y, R, T = [], [], []
        star = []           # (a, b) point pairs in H
        own_vertex = set()  # star index pairs meeting at a cross vertex

        for _ in range(m.ell):
            star.append(s.line(s.in_h(), s.in_h()))
        for _ in range(m.c):
            v = s.support(s.in_h())
            q1, q2 = s.in_h(), s.in_h()
            s.frame(v[:3], q1[:3], q2[:3])
            star += [(v, q1), (v, q2)]
            own_vertex.add((len(star) - 2, len(star) - 1))
        for _ in range(m.h):
            v = s.support(s.in_h())
            q1, q2 = s.in_h(), s.vec()
            s.frame(v, q1, q2)
            star.append((v, q1))
            Y.append(Line(v, q2))
            R.append(Line(v, q2))
        for _ in range(m.s):
            v = s.support(s.in_h())
            q1, q2, w = s.vec(), s.vec(), s.vec()
            s.frame(v, q1, q2, w)
            Y.append(Sundial(v, q1, q2, w))
            R.append(Cross(v, q1, q2))
            T.append(DoublePoint(v[:3]))
        for _ in range(b.C - m.c - m.h):
            v = s.support(s.in_h())
            q1, q2 = s.vec(), s.vec()
            s.frame(v, q1, q2)
            w = tuple((q1[3] * y - q2[3] * x) % prime for x, y in zip(q1, q2))
            Y.append(Cross(v, q1, q2))
            R.append(Cross(v, q1, q2))
            T.append(Length2(v[:3], w[:3]))
        for _ in range(b.L - m.ell - 2 * m.s):
            a, c = s.line()
            meet = s.support(tuple((x * c[3] - y * a[3]) % prime for x, y in zip(a, c)))
            Y.append(Line(a, c))
            R.append(Line(a, c))
            T.append(Point(meet[:3]))
        for x in s.substar_nodes(b.substar, lift=True):
            Y.append(Point(x))
            T.append(Point(x[:3]))
        if b.collinear:
            if m.star:
                a, c = s.line(s.in_h(), s.in_h())
            else:
                a, c = s.line()
            for x in s.on_line(a, c, b.collinear):
                Y.append(Point(x))
                if m.star:
                    T.append(Point(x[:3]))
                else:
                    R.append(Point(x))

        coefs = [cross3(a[:3], c[:3], prime) for a, c in star]
        for a, c in star:
            Y.append(Line(a, c))
            T.append(Line(a[:3], c[:3]))
        for i, j in itertools.combinations(range(len(star)), 2):
            if (i, j) in own_vertex:
                continue
            node = tuple(int(x) for x in cross3(coefs[i], coefs[j], prime)) + (0,)
            s.support(node)
            Y.append(Embedded(node, off_h))
            R.append(Point(node))
        return Y, R, T

    key = _scheme_key(b) + (m.ell, m.s, m.h, m.c, int(m.star), 7)
    Y, R, T = _retrying(build, key, prime, seed, 4)
    return SpecializedRealization(
        Realization("P3", prime, seed, Y, plane=off_h),
        Realization("P3", prime, seed, R, plane=off_h),
        Realization("P2", prime, seed, T),
    )


def castelnuovo_ranks(b: BScheme, m: SpecMove, prime: int = DEFAULT_PRIME,
                      seed: int = 0) -> tuple[int, int, int]:
    """Conditions imposed by the specialized scheme, its residual, and its trace."""
    z = realize_specialization(b, m, prime, seed)
    return (conditions(z.scheme, b.d), conditions(z.residual, b.d - 1),
            conditions(z.trace, b.d))

