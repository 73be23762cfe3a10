"""Scheme descriptors and the condition-counting layer.

Every descriptor is an immutable value.  ``B`` schemes live in P^3, ``T``
and ``V`` schemes live in the fixed plane H = P^2.  Counting is over plain
integers; nothing here knows about coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Union


def dim_forms_p3(d: int) -> int:
    """Number of degree-``d`` monomials in 4 variables (0 for ``d < 0``)."""
    return comb(d + 3, 3) if d >= 0 else 0


def dim_forms_p2(d: int) -> int:
    """Number of degree-``d`` monomials in 3 variables (0 for ``d < 0``)."""
    return comb(d + 2, 2) if d >= 0 else 0


def point_count(a: int, b: int) -> int:
    return comb(a, 2) - b


@dataclass(frozen=True, order=True)
class SubStar:
    """Nodes of a star of ``a`` lines with ``b`` nodes left out.

    Each line loses at most one node, hence ``2b <= a``.
    """

    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"negative sub-star {self.a, self.b}")
        if 2 * self.b > self.a:
            raise ValueError(f"sub-star ({self.a},{self.b}) omits more than one node on some line")

    @property
    def points(self) -> int:
        return point_count(self.a, self.b)

    def __str__(self):
        return f"({self.a},{self.b})"


@dataclass(frozen=True)
class SpecMove:
    """Combined specialization S(ell, s, h, c); ``star`` marks the S* variant."""

    ell: int = 0
    s: int = 0
    h: int = 0
    c: int = 0
    star: bool = False

    def __post_init__(self):
        if min(self.ell, self.s, self.h, self.c) < 0:
            raise ValueError(f"negative move {self}")

    @property
    def trace_lines(self) -> int:
        return self.ell + 2 * self.c + self.h

    def __str__(self):
        tag = "S*" if self.star else "S"
        return f"{tag}({self.ell},{self.s},{self.h},{self.c})"


@dataclass(frozen=True)
class BScheme:
    """General lines, crosses with vertex in H, a sub-star in H, collinear points."""

    d: int
    L: int = 0
    C: int = 0
    substar: SubStar = SubStar()
    collinear: int = 0

    def __post_init__(self):
        if min(self.d, self.L, self.C, self.collinear) < 0:
            raise ValueError(f"negative field in {self!r}")

    ambient = "P3"

    def __str__(self):
        s = f"B({self.d};{self.L},{self.C},{self.substar})"
        return s + (f"+{self.collinear}col" if self.collinear else "")


@dataclass(frozen=True)
class TScheme:
    """Trace in H: lines, double points, length-2 schemes, sub-star, points."""

    d: int
    lines: int = 0
    dbl: int = 0
    len2: int = 0
    substar: SubStar = SubStar()
    pts: int = 0
    collinear: int = 0

    def __post_init__(self):
        if min(self.d, self.lines, self.dbl, self.len2, self.pts, self.collinear) < 0:
            raise ValueError(f"negative field in {self!r}")

    ambient = "P2"

    def __str__(self):
        s = f"T({self.d};{self.lines},{self.dbl},{self.len2},{self.substar},{self.pts})"
        return s + (f"+{self.collinear}col" if self.collinear else "")


@dataclass(frozen=True)
class VScheme:
    """Zero-dimensional plane scheme at (possibly negative) degree ``d``.

    ``marked`` counts simple points left behind by double points that were
    put on a line; they are the only points a line can be routed through.
    """

    d: int
    dbl: int = 0
    len2: int = 0
    substar: SubStar = SubStar()
    pts: int = 0
    collinear: int = 0
    marked: int = 0

    def __post_init__(self):
        if min(self.dbl, self.len2, self.pts, self.collinear, self.marked) < 0:
            raise ValueError(f"negative field in {self!r}")

    ambient = "P2"

    def __str__(self):
        s = f"V({self.dbl},{self.len2},{self.substar},{self.pts})@{self.d}"
        if self.collinear:
            s += f"+{self.collinear}col"
        if self.marked:
            s += f"+{self.marked}marked"
        return s


Scheme = Union[BScheme, TScheme, VScheme]


def virtual_conditions(scheme: Scheme) -> int:
    """Conditions the scheme would impose if every element were independent."""
    if isinstance(scheme, BScheme):
        d = scheme.d
        return (scheme.L * (d + 1) + scheme.C * (2 * d + 1)
                + scheme.substar.points + scheme.collinear)
    if isinstance(scheme, TScheme):
        return (scheme.lines * (scheme.d + 1) + 3 * scheme.dbl + 2 * scheme.len2
                + scheme.substar.points + scheme.pts + scheme.collinear)
    if isinstance(scheme, VScheme):
        return (3 * scheme.dbl + 2 * scheme.len2 + scheme.substar.points
                + scheme.pts + scheme.collinear + scheme.marked)
    raise TypeError(f"not a scheme: {scheme!r}")


def dim_forms(scheme: Scheme) -> int:
    if scheme.ambient == "P3":
        return dim_forms_p3(scheme.d)
    return dim_forms_p2(scheme.d)


def surplus(scheme: Scheme) -> int:
    """Virtual conditions minus the dimension of the ambient space of forms."""
    return virtual_conditions(scheme) - dim_forms(scheme)


def main_theorem_scheme(d: int) -> BScheme:
    """Y(l, p): the balanced union of general lines (plus collinear points) at degree d."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    k, eps = divmod(d, 3)
    twice = (3 * k + 5 + 2 * eps) * k
    assert twice % 2 == 0
    lines = twice // 2 + 1 + eps
    return BScheme(d, lines, 0, SubStar(0, 0), (k + 1) if eps == 2 else 0)
