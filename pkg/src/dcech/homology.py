"""Mod-2 simplicial homology, slice persistence and bottleneck distance.

Boundary matrices are reduced over GF(2) with columns packed into Python ints,
which keeps the column XOR in C. Ranks determine Betti numbers; the same
reduction with a filtration order yields persistence pairs. Everything is
exact: no floating tolerance enters the algebra, only the input staircases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .core import (
    BifilteredComplex,
    MonotonePath,
    Simplex,
    SimplicialComplex,
    grid_with_midpoints,
)
from .errors import NotAnInclusion, UnsupportedDimension

__all__ = [
    "BettiVector",
    "BettiTable",
    "Barcode",
    "betti",
    "betti_table",
    "slice_persistence",
    "bottleneck_distance",
    "inclusion_induces_iso",
]

BettiVector = tuple[int, ...]
Interval = tuple[float, float]


def _gf2_rank(columns: Iterable[int]) -> int:
    """Rank of a GF(2) matrix given as int-packed columns."""
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            p = col.bit_length() - 1
            other = pivots.get(p)
            if other is None:
                pivots[p] = col
                rank += 1
                break
            col ^= other
    return rank


def betti(complex_: SimplicialComplex, max_degree: int) -> BettiVector:
    """Betti numbers over GF(2) in degrees 0..max_degree.

    Simplices of dimension max_degree + 1 are used for the upper boundary
    rank; higher simplices are ignored. The caller is responsible for having
    materialized the complex at least that far.
    """
    if max_degree < 0:
        raise UnsupportedDimension(f"max_degree must be >= 0, got {max_degree}")
    by_dim: dict[int, list[Simplex]] = {}
    for s in complex_.simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    for k in by_dim:
        by_dim[k].sort()
    index: dict[Simplex, int] = {}
    for k, simps in by_dim.items():
        for i, s in enumerate(simps):
            index[s] = i
    ranks: dict[int, int] = {}
    for k in range(1, max_degree + 2):
        cols = []
        for s in by_dim.get(k, ()):
            mask = 0
            for face in combinations(s, k):
                mask |= 1 << index[face]
            cols.append(mask)
        ranks[k] = _gf2_rank(cols)
    out = []
    for k in range(max_degree + 1):
        n_k = len(by_dim.get(k, ()))
        out.append(n_k - ranks.get(k, 0) - ranks[k + 1])
    return tuple(out)


@dataclass(frozen=True)
class BettiTable:
    """Betti vectors over a rectangular (m, r) grid.

    values[i][j] is the Betti vector at (m_grid[i], r_grid[j]).
    """

    m_grid: tuple[float, ...]
    r_grid: tuple[float, ...]
    max_degree: int
    values: tuple[tuple[BettiVector, ...], ...]

    def at(self, i: int, j: int) -> BettiVector:
        return self.values[i][j]


def betti_table(
    K: BifilteredComplex,
    m_grid: Sequence[float] | None = None,
    r_grid: Sequence[float] | None = None,
    max_degree: int | None = None,
) -> BettiTable:
    """Evaluate Betti vectors over a grid; defaults to criticals + midpoints."""
    crit_r, crit_m = K.critical_grid()
    if m_grid is None:
        m_grid = grid_with_midpoints(crit_m)
    if r_grid is None:
        r_grid = grid_with_midpoints(crit_r)
    if max_degree is None:
        max_degree = max(K.dim_cap - 1, 0)
    cache: dict[frozenset[Simplex], BettiVector] = {}
    rows: list[tuple[BettiVector, ...]] = []
    for m in m_grid:
        row: list[BettiVector] = []
        for r in r_grid:
            cx = K.complex_at(m, r)
            key = cx.simplices
            got = cache.get(key)
            if got is None:
                got = betti(cx, max_degree)
                cache[key] = got
            row.append(got)
        rows.append(tuple(row))
    return BettiTable(
        tuple(float(m) for m in m_grid),
        tuple(float(r) for r in r_grid),
        max_degree,
        tuple(rows),
    )


@dataclass(frozen=True)
class Barcode:
    """Persistence intervals per homology degree, [birth, death) with
    death = inf for essential classes."""

    intervals: Mapping[int, tuple[Interval, ...]]

    def __post_init__(self) -> None:
        fixed = {
            int(k): tuple(sorted((float(b), float(d)) for b, d in v))
            for k, v in self.intervals.items()
        }
        object.__setattr__(self, "intervals", fixed)

    def degree(self, k: int) -> tuple[Interval, ...]:
        return self.intervals.get(k, ())

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.intervals))


def _persistence_pairs(
    ordered: Sequence[Simplex],
    births: Sequence[float],
    max_degree: int,
) -> Barcode:
    """Standard column reduction over a filtration order.

    ``ordered`` must list faces before cofaces; births are the entry times.
    Bars of length zero are dropped; unpaired creators get death = inf.
    """
    index = {s: i for i, s in enumerate(ordered)}
    low_to_col: dict[int, int] = {}
    creators: set[int] = set()
    destroyed: set[int] = set()
    pair_of: dict[int, int] = {}
    for j, s in enumerate(ordered):
        col = 0
        if len(s) > 1:
            for face in combinations(s, len(s) - 1):
                col |= 1 << index[face]
        while col:
            lw = col.bit_length() - 1
            existing = low_to_col.get(lw)
            if existing is None:
                low_to_col[lw] = col
                pair_of[lw] = j
                destroyed.add(lw)
                break
            col ^= existing
        else:
            creators.add(j)
    bars: dict[int, list[Interval]] = {}
    for low, j in pair_of.items():
        deg = len(ordered[low]) - 1
        if deg > max_degree:
            continue
        b, d = births[low], births[j]
        if b < d:
            bars.setdefault(deg, []).append((b, d))
    for j in creators:
        if j in destroyed:
            continue
        deg = len(ordered[j]) - 1
        if deg <= max_degree:
            bars.setdefault(deg, []).append((births[j], math.inf))
    return Barcode({k: tuple(v) for k, v in bars.items()})


def slice_persistence(
    K: BifilteredComplex, path: MonotonePath, max_degree: int | None = None
) -> Barcode:
    """Persistence barcode of K restricted to a monotone parameter path.

    A simplex enters at the first path step where its staircase admits it;
    bars are reported in the path's time stamps.
    """
    if max_degree is None:
        max_degree = max(K.dim_cap - 1, 0)
    steps = list(zip(path.points, path.times))
    entered: list[tuple[float, int, Simplex]] = []
    for sigma, stair in K.entries.items():
        for (m, r), t in steps:
            if stair.present(m, r):
                entered.append((t, len(sigma), sigma))
                break
    entered.sort()
    ordered = [s for _, _, s in entered]
    births = [t for t, _, _ in entered]
    return _persistence_pairs(ordered, births, max_degree)


def inclusion_induces_iso(
    sub: SimplicialComplex, full: SimplicialComplex, max_degree: int
) -> tuple[bool, ...]:
    """Whether the inclusion sub -> full is a homology isomorphism per degree.

    Runs two-step persistence: the inclusion is an isomorphism in degree k
    exactly when no k-bar dies crossing the step and no k-bar is born at the
    second step and survives.
    """
    if not sub.is_subcomplex_of(full):
        extra = sorted(sub.simplices - full.simplices)[:3]
        raise NotAnInclusion(f"not a subcomplex; extra simplices {extra}")
    tagged = [
        (0.0 if s in sub.simplices else 1.0, len(s), s)
        for s in full.sorted_simplices()
    ]
    tagged.sort()
    ordered = [s for _, _, s in tagged]
    births = [b for b, _, _ in tagged]
    bars = _persistence_pairs(ordered, births, max_degree)
    out = []
    for k in range(max_degree + 1):
        ok = True
        for b, d in bars.degree(k):
            if b == 0.0 and d == 1.0:
                ok = False
            if b == 1.0 and math.isinf(d):
                ok = False
        out.append(ok)
    return tuple(out)


# ---------------------------------------------------------------------------
# Bottleneck distance
# ---------------------------------------------------------------------------


def _match_cost(a: Interval, b: Interval) -> float:
    db = abs(a[0] - b[0])
    if math.isinf(a[1]) and math.isinf(b[1]):
        dd = 0.0
    elif math.isinf(a[1]) or math.isinf(b[1]):
        dd = math.inf
    else:
        dd = abs(a[1] - b[1])
    return max(db, dd)


def _removal_cost(a: Interval) -> float:
    if math.isinf(a[1]):
        return math.inf
    return (a[1] - a[0]) / 2.0


def _feasible(
    n0: int,
    n1: int,
    costs: list[list[float]],
    del0: list[float],
    del1: list[float],
    c: float,
) -> bool:
    """Perfect matching test in the doubled bipartite graph at threshold c."""
    left = n0 + n1  # bars0 then dummies for bars1
    right = n1 + n0  # bars1 then dummies for bars0

    def neighbors(u: int) -> list[int]:
        out = []
        if u < n0:
            out.extend(j for j in range(n1) if costs[u][j] <= c)
            if del0[u] <= c:
                out.append(n1 + u)
        else:
            j = u - n0  # dummy for bars1[j]
            if del1[j] <= c:
                out.append(j)
            out.extend(range(n1, n1 + n0))
        return out

    match_right: list[int] = [-1] * right

    def try_augment(u: int, seen: list[bool]) -> bool:
        for v in neighbors(u):
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] == -1 or try_augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    size = 0
    for u in range(left):
        if try_augment(u, [False] * right):
            size += 1
    return size == left


def bottleneck_distance(
    bars0: Sequence[Interval], bars1: Sequence[Interval]
) -> float:
    """Exact bottleneck distance between two single-degree barcodes.

    Intervals may be matched (cost: sup distance of endpoints) or deleted to
    the diagonal (cost: half length); infinite bars must match each other.
    Computed by binary search over the finite candidate costs with a bipartite
    matching feasibility test at each candidate.
    """
    a = [(float(b), float(d)) for b, d in bars0 if float(b) != float(d)]
    b = [(float(x), float(y)) for x, y in bars1 if float(x) != float(y)]
    n0, n1 = len(a), len(b)
    if n0 == 0 and n1 == 0:
        return 0.0
    inf0 = sum(1 for x in a if math.isinf(x[1]))
    inf1 = sum(1 for x in b if math.isinf(x[1]))
    if inf0 != inf1:
        return math.inf
    costs = [[_match_cost(x, y) for y in b] for x in a]
    del0 = [_removal_cost(x) for x in a]
    del1 = [_removal_cost(y) for y in b]
    cands: set[float] = {0.0}
    for row in costs:
        cands.update(v for v in row if math.isfinite(v))
    cands.update(v for v in del0 if math.isfinite(v))
    cands.update(v for v in del1 if math.isfinite(v))
    ordered = sorted(cands)
    lo, hi = 0, len(ordered) - 1
    if not _feasible(n0, n1, costs, del0, del1, ordered[hi]):
        return math.inf
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(n0, n1, costs, del0, del1, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return ordered[lo]
