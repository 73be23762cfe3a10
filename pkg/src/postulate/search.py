"""Depth-first search for certificates of emptiness.

Each P^3 node tries specializations in order of increasing trace surplus;
the trace obligation is discharged first (it is a cheap plane check) and
only then does the search recurse on the residual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .calculus2 import PlaneMove, PlaneStepError, Target, check_move, on_line_length, plane_step, strip_lines
from .calculus3 import InfeasibleMove, apply_move, feasible
from .certificate import (AnalyticLeaf, Certificate, Node, OracleLeaf, PlaneStep, Specialize3,
                          StripLines)
from .model import BScheme, SpecMove, TScheme, VScheme, dim_forms, surplus
from .oracle import OracleConfig, verify_empty

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Policy:
    max_depth: int = 40
    branching_cap: int = 6
    leaf_degree: int = 3
    oracle: OracleConfig = field(default_factory=OracleConfig)
    # plane schemes with more columns than this are split by plane steps first
    plane_oracle_cols: int = 1200
    plane_branching_cap: int = 4


class SearchFailure(RuntimeError):
    def __init__(self, root, frontier):
        self.root = root
        self.frontier = list(frontier)
        shown = ", ".join(str(s) for s in self.frontier[:5])
        more = "" if len(self.frontier) <= 5 else f" and {len(self.frontier) - 5} more"
        super().__init__(f"no certificate for {root}; undischarged: {shown}{more}")


def enumerate_moves(b: BScheme, policy: Policy = Policy()) -> list[SpecMove]:
    """Feasible moves whose residual and stripped trace both have surplus >= 0.

    Sorted tightest trace first, then by (s, h, c); truncated to the cap.
    """
    if b.d < 1:
        return []
    found = []
    stars = (False, True) if b.collinear else (False,)
    for c in range(b.C + 1):
        for h in range(b.C - c + 1):
            for s in range(b.L // 2 + 1):
                for ell in range(b.L - 2 * s + 1):
                    for star in stars:
                        m = SpecMove(ell, s, h, c, star)
                        t, r = apply_move(b, m)
                        if surplus(r) < 0:
                            continue
                        ts = surplus(strip_lines(t))
                        if ts < 0:
                            continue
                        found.append(((ts, s, h, c, ell, star), m))
    found.sort(key=lambda x: x[0])
    return [m for _, m in found[:policy.branching_cap]]


def _plane_moves(v: VScheme, cap: int) -> list[PlaneMove]:
    """Plane steps meeting their line in exactly d + 1 points, double points first."""
    out = []
    need = v.d + 1
    targets = [Target.SUBSTAR_WITH_OMITTED, Target.SUBSTAR_WITHOUT_OMITTED,
               Target.THROUGH_MARKED, Target.GENERAL]
    for tgt in targets:
        base = PlaneMove(tgt)
        try:
            have = on_line_length(v, base)
        except PlaneStepError:
            continue
        for nd in range(min(v.dbl, (need - have) // 2), -1, -1):
            rest = need - have - 2 * nd
            for nl in range(min(v.len2, rest // 2), -1, -1):
                npts = rest - 2 * nl
                if 0 <= npts <= v.pts:
                    m = PlaneMove(tgt, nd, nl, npts)
                    check_move(v, m)
                    out.append(m)
                    break
    return out[:cap]


class _Searcher:
    def __init__(self, policy: Policy, forced: Sequence[SpecMove] | None):
        self.policy = policy
        self.forced = list(forced) if forced is not None else None
        self.frontier = []
        self.failed = set()
        self.plane_cache = {}

    def leaf(self, scheme) -> Node | None:
        v = verify_empty(scheme, self.policy.oracle)
        if v.verified:
            if v.cols == 0:
                return AnalyticLeaf(scheme, "negative_degree")
            return OracleLeaf(scheme, v.prime, v.seed, v.rank, v.cols)
        log.debug("leaf %s inconclusive (%s)", scheme, v)
        self.frontier.append(scheme)
        return None

    def plane(self, v: VScheme, depth=0) -> Node | None:
        if v in self.plane_cache:
            return self.plane_cache[v]
        if v.d < 0:
            node = AnalyticLeaf(v, "negative_degree")
        elif dim_forms(v) <= self.policy.plane_oracle_cols or depth >= self.policy.max_depth:
            node = self.leaf(v)
        else:
            node = None
            for m in _plane_moves(v, self.policy.plane_branching_cap):
                child = self.plane(plane_step(v, m), depth + 1)
                if child is not None:
                    node = PlaneStep(v, m, plane_step(v, m), child)
                    break
            if node is None:
                self.frontier.append(v)
        self.plane_cache[v] = node
        return node

    def trace(self, t: TScheme) -> StripLines | None:
        v = strip_lines(t)
        child = self.plane(v)
        return None if child is None else StripLines(t, v, child)

    def moves_at(self, b: BScheme, depth: int) -> list[SpecMove] | None:
        """Moves to try, or None when ``b`` must be discharged as a leaf."""
        if self.forced is not None and depth < len(self.forced):
            m = self.forced[depth]
            if not feasible(b, m):
                raise InfeasibleMove(b, m, depth)
            return [m]
        if b.d <= self.policy.leaf_degree or depth >= self.policy.max_depth:
            return None
        return enumerate_moves(b, self.policy) or None

    def prove(self, b: BScheme, depth: int = 0) -> Node | None:
        free = self.forced is None or depth >= len(self.forced)
        if free and b in self.failed:
            return None
        moves = self.moves_at(b, depth)
        if moves is None:
            node = self.leaf(b)
        else:
            node = None
            for m in moves:
                t, r = apply_move(b, m)
                tnode = self.trace(t)
                if tnode is None:
                    continue
                rnode = self.prove(r, depth + 1)
                if rnode is not None:
                    node = Specialize3(b, m, t, r, tnode, rnode)
                    break
        if node is None and free:
            self.failed.add(b)
        return node


def search_certificate(b: BScheme, policy: Policy = Policy(),
                       forced: Sequence[SpecMove] | None = None) -> Certificate:
    """First fully discharged certificate found by depth-first search.

    ``forced`` pins the first len(forced) moves (one candidate each); after
    it runs out the ordinary search rules apply.
    """
    if surplus(b) < 0:
        raise ValueError(f"{b} has negative surplus {surplus(b)}; forms of degree {b.d} exist")
    s = _Searcher(policy, forced)
    node = s.prove(b)
    if node is None:
        raise SearchFailure(b, s.frontier)
    return Certificate(b, node, policy.oracle.prime, policy.oracle.seed)


def plane_certificate(v: VScheme, moves: Sequence[PlaneMove], policy: Policy = Policy()) -> Certificate:
    """Certificate replaying the given plane steps and verifying the last scheme."""
    steps = []
    cur = v
    for m in moves:
        nxt = plane_step(cur, m)
        steps.append((cur, m, nxt))
        cur = nxt
    s = _Searcher(policy, None)
    node = AnalyticLeaf(cur, "negative_degree") if cur.d < 0 else s.leaf(cur)
    if node is None:
        raise SearchFailure(v, s.frontier)
    for before, m, after in reversed(steps):
        node = PlaneStep(before, m, after, node)
    return Certificate(v, node, policy.oracle.prime, policy.oracle.seed)
