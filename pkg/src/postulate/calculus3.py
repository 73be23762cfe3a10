"""Specialization calculus in P^3 and the fixed move lists of the reduction proof."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import BScheme, SpecMove, SubStar, TScheme, main_theorem_scheme


class InfeasibleMove(ValueError):
    """A move asks for more lines or crosses than the scheme has."""

    def __init__(self, scheme, move, index=None):
        self.scheme = scheme
        self.move = move
        self.index = index
        where = "" if index is None else f" at step {index}"
        super().__init__(f"{move} is infeasible for {scheme}{where}")


@dataclass(frozen=True)
class ChainStep:
    before: BScheme
    move: SpecMove
    trace: TScheme
    after: BScheme

    def __str__(self):
        return f"{self.before} --{self.move}--> {self.trace} | {self.after}"


def feasible(b: BScheme, m: SpecMove) -> bool:
    return (
        b.d >= 1
        and b.L - m.ell - 2 * m.s >= 0
        and b.C - m.c - m.h >= 0
        and (not m.star or b.collinear > 0)
    )


def apply_move(b: BScheme, m: SpecMove) -> tuple[TScheme, BScheme]:
    """Trace on H and residual of the specialization ``m``.

    The old sub-star goes to the trace whole; the residual sub-star is the
    nodes of the new star lines minus the vertices of crosses laid into H.
    """
    if not feasible(b, m):
        raise InfeasibleMove(b, m)
    n = m.trace_lines
    trace = TScheme(
        d=b.d,
        lines=n,
        dbl=m.s,
        len2=b.C - m.c - m.h,
        substar=b.substar,
        pts=b.L - m.ell - 2 * m.s,
        collinear=b.collinear if m.star else 0,
    )
    residual = BScheme(
        d=b.d - 1,
        L=b.L - m.ell + m.h - 2 * m.s,
        C=b.C - m.c + m.s - m.h,
        substar=SubStar(n, m.c),
        collinear=0 if m.star else b.collinear,
    )
    return trace, residual


def run_chain(start: BScheme, moves: Sequence[SpecMove]) -> list[ChainStep]:
    steps = []
    b = start
    for i, m in enumerate(moves):
        if not feasible(b, m):
            raise InfeasibleMove(b, m, i)
        t, r = apply_move(b, m)
        steps.append(ChainStep(b, m, t, r))
        b = r
    return steps


def final_scheme(start: BScheme, moves: Sequence[SpecMove]) -> BScheme:
    steps = run_chain(start, moves)
    return steps[-1].after if steps else start


def reduction_lemma_start(k: int) -> BScheme:
    """Entry scheme of the reduction engine at degree 3k."""
    if k < 1:
        raise ValueError("k must be positive")
    if k % 2:
        return BScheme(3 * k, (k * (k + 5) + 4) // 2, (k * k - 1) // 2,
                       SubStar(k + 1, (k + 1) // 2))
    return BScheme(3 * k, (k * (k + 5) + 2) // 2, k * k // 2, SubStar(k + 1, k // 2))


def reduction_lemma_moves(k: int) -> list[SpecMove]:
    """Three moves taking reduction_lemma_start(k) to reduction_lemma_start(k - 1)."""
    if k < 4:
        raise ValueError(f"the reduction step needs k >= 4, got k={k}")
    if k % 2:
        return [
            SpecMove((k - 5) // 2, 0, (k - 1) // 2, 2),
            SpecMove(0, 3, 1, (k - 1) // 2),
            SpecMove(0, (k + 1) // 2, 1, (k - 1) // 2),
        ]
    return [
        SpecMove(k // 2 - 1, 0, k // 2, 1),
        SpecMove(0, 1, 0, k // 2),
        SpecMove(0, k // 2, 0, k // 2),
    ]


def lemma_descent(k: int, stop: int = 3) -> list[SpecMove]:
    """Moves from reduction_lemma_start(k) down to reduction_lemma_start(stop)."""
    moves = []
    for j in range(k, stop, -1):
        moves += reduction_lemma_moves(j)
    return moves


def lemma_entry(d: int) -> tuple[int, int]:
    """Where the initial chain for degree d joins the reduction engine.

    Returns ``(k, index)``: the chain lands on the residual after the first
    ``index`` moves of ``reduction_lemma_moves(k)`` (index 1 for d = 3k+2,
    index 2 for d = 3k and d = 3k+1).
    """
    k, eps = divmod(d, 3)
    return k, (1 if eps == 2 else 2)


def lemma_entry_scheme(d: int) -> BScheme:
    k, idx = lemma_entry(d)
    return final_scheme(reduction_lemma_start(k), reduction_lemma_moves(k)[:idx])


def initial_chain_displayed(d: int) -> list[SpecMove]:
    """The initial specialization moves exactly as the reduction proof writes them.

    At d = 13 and d = 14 (k = 4) the later moves ask for more crosses than
    are present; :func:`initial_chain` patches those two degrees.
    """
    if d < 12:
        raise ValueError(f"the initial specialization needs d >= 12, got d={d}")
    k, eps = divmod(d, 3)
    odd = k % 2 == 1
    if eps == 0:
        first = [SpecMove(k + 1, k * (k - 1) // 2, 0, 0)]
        rest = [SpecMove(0, 1, 1, (k - 1) // 2)] if odd else [SpecMove(0, 0, 0, k // 2)]
    elif eps == 1:
        first = [SpecMove(k + 2, k * (k - 3) // 2, 0, 0)]
        if odd:
            rest = [SpecMove(0, 1, 1, (k - 1) // 2), SpecMove(0, (3 * k + 1) // 2, 1, (k - 1) // 2)]
        else:
            rest = [SpecMove(0, 0, 0, k // 2), SpecMove(0, 3 * k // 2, 0, k // 2)]
    else:
        first = [SpecMove(k + 2, k * (k - 3) // 2 - 1, 0, 0, star=True)]
        if odd:
            rest = [SpecMove(0, k + 2, 1, (k - 1) // 2), SpecMove(k - 3, (k - 1) // 2, 0, 2)]
        else:
            rest = [SpecMove(0, k + 1, 0, k // 2), SpecMove(k - 1, k // 2, 0, 1)]
    return first + rest


# Replacement tails for the two degrees where the displayed chain runs out
# of crosses.  Both keep the displayed first move and reach the same entry
# scheme; every trace is exactly balanced.
_PATCHED_TAILS = {
    13: [SpecMove(4, 0, 0, 0), SpecMove(0, 4, 0, 2)],
    14: [SpecMove(2, 5, 0, 1), SpecMove(3, 1, 0, 1)],
}


def initial_chain(d: int) -> list[SpecMove]:
    """Moves taking main_theorem_scheme(d) to its reduction-engine entry point."""
    moves = initial_chain_displayed(d)
    if d in _PATCHED_TAILS:
        moves = moves[:1] + _PATCHED_TAILS[d]
    return moves


def hh9_chain() -> list[SpecMove]:
    """Eight moves discharging B(9;14,4,(4,2)) down to B(1;1,0,(3,1))."""
    return [
        SpecMove(3, 0, 1, 0),
        SpecMove(1, 0, 0, 1),
        SpecMove(0, 2, 1, 1),
        SpecMove(0, 0, 1, 1),
        SpecMove(2, 1, 0, 0),
        SpecMove(2, 0, 0, 0),
        SpecMove(1, 1, 0, 0),
        SpecMove(0, 0, 1, 1),
    ]


HH9_START = BScheme(9, 14, 4, SubStar(4, 2))
HH9_END = BScheme(1, 1, 0, SubStar(3, 1))


def full_chain(d: int) -> tuple[BScheme, list[SpecMove]]:
    """Every move from main_theorem_scheme(d) down to B(1;1,0,(3,1)), for d >= 12."""
    start = main_theorem_scheme(d)
    k, idx = lemma_entry(d)
    moves = initial_chain(d) + reduction_lemma_moves(k)[idx:]
    moves += lemma_descent(k - 1) + hh9_chain()
    return start, moves
