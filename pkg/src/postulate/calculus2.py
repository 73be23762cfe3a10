"""Plane calculus: strip trace lines, then peel off forced lines one at a time.

A plane step puts part of a V-scheme on a line.  When the scheme cuts the
line in at least d + 1 points (with multiplicity), every degree-d form
through it contains the line, so one may divide it out and continue with
the residual at degree d - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .model import SubStar, TScheme, VScheme


class Target(str, Enum):
    SUBSTAR_WITH_OMITTED = "substar_line_with_omitted"
    SUBSTAR_WITHOUT_OMITTED = "substar_line_without_omitted"
    GENERAL = "general_line"
    THROUGH_MARKED = "line_through_marked_point"


class PlaneStepError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneMove:
    target: Target
    n_dbl: int = 0
    n_len2: int = 0
    n_pts: int = 0

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        if min(self.n_dbl, self.n_len2, self.n_pts) < 0:
            raise ValueError(f"negative counts in {self}")

    def __str__(self):
        return f"{self.target.value}[dbl={self.n_dbl},len2={self.n_len2},pts={self.n_pts}]"


def strip_lines(t: TScheme) -> VScheme:
    """Divide out the trace lines; the remaining points are assumed off those lines."""
    return VScheme(t.d - t.lines, t.dbl, t.len2, t.substar, t.pts, t.collinear, 0)


def _substar_lines(star: SubStar) -> tuple[int, int]:
    """(lines carrying an omitted node, lines carrying none)."""
    return 2 * star.b, star.a - 2 * star.b


def check_move(v: VScheme, m: PlaneMove) -> None:
    if m.n_dbl > v.dbl or m.n_len2 > v.len2 or m.n_pts > v.pts:
        raise PlaneStepError(f"{m} exceeds the inventory of {v}")
    with_om, without_om = _substar_lines(v.substar)
    if m.target is Target.SUBSTAR_WITH_OMITTED and not with_om:
        raise PlaneStepError(f"{v} has no sub-star line with an omitted node")
    if m.target is Target.SUBSTAR_WITHOUT_OMITTED and not without_om:
        raise PlaneStepError(f"{v} has no sub-star line without an omitted node")
    if m.target is Target.THROUGH_MARKED and not v.marked:
        raise PlaneStepError(f"{v} has no marked point")


def on_line_length(v: VScheme, m: PlaneMove) -> int:
    """Length of the intersection of the specialized scheme with the target line."""
    check_move(v, m)
    a = v.substar.a
    if m.target is Target.SUBSTAR_WITH_OMITTED:
        existing = a - 2
    elif m.target is Target.SUBSTAR_WITHOUT_OMITTED:
        existing = a - 1
    elif m.target is Target.THROUGH_MARKED:
        existing = 1
    else:
        existing = 0
    return existing + 2 * m.n_dbl + 2 * m.n_len2 + m.n_pts


def forces(v: VScheme, m: PlaneMove) -> bool:
    return on_line_length(v, m) >= v.d + 1


def plane_step(v: VScheme, m: PlaneMove) -> VScheme:
    length = on_line_length(v, m)
    if length < v.d + 1:
        raise PlaneStepError(f"{m} meets the line in {length} <= d = {v.d} points; the line is not forced")
    star = v.substar
    if m.target is Target.SUBSTAR_WITH_OMITTED:
        star = SubStar(star.a - 1, star.b - 1)
    elif m.target is Target.SUBSTAR_WITHOUT_OMITTED:
        star = SubStar(star.a - 1, star.b)
    # a double point on the line leaves its support behind as a marked point
    return replace(
        v,
        d=v.d - 1,
        dbl=v.dbl - m.n_dbl,
        len2=v.len2 - m.n_len2,
        pts=v.pts - m.n_pts,
        substar=star,
        marked=v.marked + m.n_dbl - (1 if m.target is Target.THROUGH_MARKED else 0),
    )


def run_plane_chain(v: VScheme, moves) -> list[VScheme]:
    """All intermediate schemes, starting with ``v`` itself."""
    out = [v]
    for i, m in enumerate(moves):
        try:
            v = plane_step(v, m)
        except PlaneStepError as exc:
            raise PlaneStepError(f"step {i}: {exc}") from None
        out.append(v)
    return out


def _odd(k):
    if k < 3 or k % 2 == 0:
        raise ValueError(f"k must be odd and at least 3, got {k}")


def first_example_start(k: int) -> VScheme:
    """Stripped trace T(k+1, 0, k(k-1)/2-2, (k+1,(k+1)/2), (k^2+4k+9)/2) at degree 2k-1."""
    _odd(k)
    return VScheme(2 * k - 1, 0, k * (k - 1) // 2 - 2, SubStar(k + 1, (k + 1) // 2),
                   (k * k + 4 * k + 9) // 2)


def first_example_round(k: int) -> list[PlaneMove]:
    """Four steps taking first_example_start(k) to first_example_start(k - 2)."""
    _odd(k)
    if k < 5:
        raise ValueError("the recursion step needs k >= 5; k = 3 is the base case")
    return [
        PlaneMove(Target.SUBSTAR_WITH_OMITTED, n_pts=k + 1),
        PlaneMove(Target.SUBSTAR_WITHOUT_OMITTED, n_pts=k),
        PlaneMove(Target.GENERAL, n_len2=k - 1),
        PlaneMove(Target.GENERAL, n_len2=k - 2, n_pts=1),
    ]


FIRST_BASE_STEP = PlaneMove(Target.SUBSTAR_WITH_OMITTED, n_len2=1, n_pts=2)
FIRST_TERMINAL = VScheme(4, 0, 0, SubStar(3, 1), 13)


def section6_chain_first(k: int) -> list[PlaneMove]:
    """Every step from first_example_start(k) to 15 general points at degree 4."""
    _odd(k)
    moves = []
    for j in range(k, 3, -2):
        moves += first_example_round(j)
    return moves + [FIRST_BASE_STEP]


def second_example_start(k: int) -> VScheme:
    """Stripped trace T(k, (k+1)/2, k(k-3)/2, (k,(k-1)/2), k(k+3)/2-2) at degree 2k-2."""
    _odd(k)
    return VScheme(2 * k - 2, (k + 1) // 2, k * (k - 3) // 2, SubStar(k, (k - 1) // 2),
                   k * (k + 3) // 2 - 2)


def second_example_round(k: int) -> list[PlaneMove]:
    _odd(k)
    if k < 5:
        raise ValueError("the recursion step needs k >= 5; k = 3 is the base case")
    return [
        PlaneMove(Target.GENERAL, n_dbl=1, n_len2=k - 2, n_pts=1),
        PlaneMove(Target.THROUGH_MARKED, n_len2=k - 3, n_pts=3),
        PlaneMove(Target.SUBSTAR_WITHOUT_OMITTED, n_pts=k - 2),
        PlaneMove(Target.SUBSTAR_WITH_OMITTED, n_pts=k - 1),
    ]


SECOND_TERMINAL = VScheme(4, 2, 0, SubStar(3, 1), 7)


def section6_chain_second(k: int) -> list[PlaneMove]:
    """Every step from second_example_start(k) down to V(2,0,(3,1),7) at degree 4."""
    _odd(k)
    moves = []
    for j in range(k, 3, -2):
        moves += second_example_round(j)
    return moves
