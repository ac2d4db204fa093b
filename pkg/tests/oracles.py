"""Independent reference implementations used only by the tests.

These deliberately avoid the library's algorithms: enclosing balls come from
a Welzl recursion instead of candidate enumeration, Betti numbers from dense
numpy elimination instead of int-packed columns, the Prohorov distance from a
definition-level feasibility scan instead of the breakpoint envelope, and the
bottleneck distance from exhaustive matchings. Geometric primitives (midpoint,
circumcenter, point distance) are shared formula-for-formula with the library
on purpose: exact set-equality checks at breakpoints need the two sides to
round identically, and the value of the oracle is the independent search, not
independent rounding.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations

import numpy as np

Point = tuple[float, float]


# ---------------------------------------------------------------------------
# Minimum enclosing balls (Welzl)
# ---------------------------------------------------------------------------


def _dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _circumcenter(a: Point, b: Point, c: Point) -> Point | None:
    # sorted like the library's circumcenter, so recursion order cannot
    # perturb the rounding
    a, b, c = sorted((a, b, c))
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    ux = (
        (ax * ax + ay * ay) * (by - cy)
        + (bx * bx + by * by) * (cy - ay)
        + (cx * cx + cy * cy) * (ay - by)
    ) / d
    uy = (
        (ax * ax + ay * ay) * (cx - bx)
        + (bx * bx + by * by) * (ax - cx)
        + (cx * cx + cy * cy) * (bx - ax)
    ) / d
    return (ux, uy)


def _ball_of_boundary(boundary: list[Point]) -> tuple[Point, float]:
    if not boundary:
        return (0.0, 0.0), -1.0
    if len(boundary) == 1:
        return boundary[0], 0.0
    if len(boundary) == 2:
        a, b = boundary
        center = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
        return center, max(_dist(center, a), _dist(center, b))
    cc = _circumcenter(*boundary[:3])
    if cc is None:  # collinear support: fall back to the widest pair
        best = max(combinations(boundary, 2), key=lambda p: _dist(*p))
        a, b = best
        center = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    else:
        center = cc
    return center, max(_dist(center, p) for p in boundary)


def _welzl(points: list[Point], boundary: list[Point]) -> tuple[Point, float]:
    if not points or len(boundary) == 3:
        return _ball_of_boundary(boundary)
    p = points[-1]
    center, radius = _welzl(points[:-1], boundary)
    if radius >= 0.0 and _dist(center, p) <= radius * (1.0 + 1e-12):
        return center, radius
    return _welzl(points[:-1], boundary + [p])


def welzl_meb(points) -> tuple[Point, float]:
    """Exact minimum enclosing ball via the Welzl recursion.

    The returned radius is recomputed as the max distance from the final
    center to every input point, mirroring how the library reports radii, so
    generic inputs agree bitwise with the library's enumeration search.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        raise ValueError("no points")
    center, _ = _welzl(pts, [])
    return center, max(_dist(center, p) for p in pts)


def cech_simplices_welzl(points, max_size: int, r: float) -> set[tuple[int, ...]]:
    """All index sets up to max_size whose enclosing ball has radius <= r."""
    out: set[tuple[int, ...]] = set()
    idx = range(len(points))
    for size in range(1, min(max_size, len(points)) + 1):
        for sigma in combinations(idx, size):
            if welzl_meb([points[i] for i in sigma])[1] <= r:
                out.add(sigma)
    return out


# ---------------------------------------------------------------------------
# Dense GF(2) homology
# ---------------------------------------------------------------------------


def _rank_mod2(mat: np.ndarray) -> int:
    """Row reduction of a dense 0/1 matrix over GF(2)."""
    m = mat.copy() % 2
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        pivot = None
        for rw in range(rank, rows):
            if m[rw, c]:
                pivot = rw
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for rw in range(rows):
            if rw != rank and m[rw, c]:
                m[rw] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def betti_dense(simplices, max_degree: int) -> tuple[int, ...]:
    """Betti numbers from dense boundary matrices, independent of the library."""
    by_dim: dict[int, list[tuple[int, ...]]] = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(tuple(s))
    for k in by_dim:
        by_dim[k].sort()
    ranks: dict[int, int] = {}
    for k in range(1, max_degree + 2):
        top = by_dim.get(k, [])
        bot = by_dim.get(k - 1, [])
        if not top or not bot:
            ranks[k] = 0
            continue
        pos = {s: i for i, s in enumerate(bot)}
        mat = np.zeros((len(bot), len(top)), dtype=np.uint8)
        for j, s in enumerate(top):
            for face in combinations(s, k):
                mat[pos[face], j] ^= 1
        ranks[k] = _rank_mod2(mat)
    out = []
    for k in range(max_degree + 1):
        out.append(len(by_dim.get(k, [])) - ranks.get(k, 0) - ranks[k + 1])
    return tuple(out)


# ---------------------------------------------------------------------------
# Prohorov distance by definition
# ---------------------------------------------------------------------------


def prohorov_feasible(dist, w0, w1, eps: float) -> bool:
    """mu_i(B) <= mu_j(B^eps) + eps for every union-support subset B."""
    union = [i for i in range(len(w0)) if w0[i] > 0 or w1[i] > 0]
    for size in range(1, len(union) + 1):
        for b in combinations(union, size):
            off = [
                j
                for j in range(len(w0))
                if any(dist[i][j] <= eps for i in b)
            ]
            m0b = sum(w0[i] for i in b)
            m1b = sum(w1[i] for i in b)
            m0off = sum(w0[j] for j in off)
            m1off = sum(w1[j] for j in off)
            # subtraction form: candidate epsilons are built as these exact
            # differences, so comparing the same expression avoids the ulp
            # loss of re-adding eps to the offset mass
            if m0b - m1off > eps or m1b - m0off > eps:
                return False
    return True


def prohorov_brute(dist, w0, w1) -> float:
    """Smallest feasible eps, scanned over every value the infimum can take."""
    n = len(w0)
    union = [i for i in range(n) if w0[i] > 0 or w1[i] > 0]
    cands = {0.0}
    levels = sorted(
        {0.0}
        | {float(dist[i][j]) for i in union for j in union if math.isfinite(dist[i][j])}
    )
    for t in levels:
        cands.add(t)
        for size in range(1, len(union) + 1):
            for b in combinations(union, size):
                off = [j for j in range(n) if any(dist[i][j] <= t for i in b)]
                cands.add(sum(w0[i] for i in b) - sum(w1[j] for j in off))
                cands.add(sum(w1[i] for i in b) - sum(w0[j] for j in off))
    feasible = sorted(c for c in cands if c >= 0.0)
    lo, hi = 0, len(feasible) - 1
    if not prohorov_feasible(dist, w0, w1, feasible[hi]):
        raise AssertionError("no feasible candidate; candidate set is wrong")
    if prohorov_feasible(dist, w0, w1, feasible[0]):
        return feasible[0]
    while hi - lo > 1:  # feasibility is monotone in eps
        mid = (lo + hi) // 2
        if prohorov_feasible(dist, w0, w1, feasible[mid]):
            hi = mid
        else:
            lo = mid
    return feasible[hi]


# ---------------------------------------------------------------------------
# Bottleneck distance by exhaustive matching
# ---------------------------------------------------------------------------


def _pair_cost(a, b) -> float:
    if math.isinf(a[1]) != math.isinf(b[1]):
        return math.inf
    if math.isinf(a[1]):
        return abs(a[0] - b[0])
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _drop_cost(a) -> float:
    return math.inf if math.isinf(a[1]) else (a[1] - a[0]) / 2.0


def bottleneck_brute(bars0, bars1) -> float:
    """Min over all partial matchings of the max cost; unmatched bars pay
    half their length (infinite bars can only match infinite bars)."""
    b0 = list(bars0)
    b1 = list(bars1)
    best = math.inf
    for k in range(min(len(b0), len(b1)) + 1):
        for left in combinations(range(len(b0)), k):
            for right in permutations(range(len(b1)), k):
                cost = 0.0
                for i, j in zip(left, right):
                    cost = max(cost, _pair_cost(b0[i], b1[j]))
                for i in range(len(b0)):
                    if i not in left:
                        cost = max(cost, _drop_cost(b0[i]))
                for j in range(len(b1)):
                    if j not in right:
                        cost = max(cost, _drop_cost(b1[j]))
                best = min(best, cost)
    return best


def bars_alive(bars, t: float) -> int:
    """Number of intervals [b, d) containing time t."""
    return sum(1 for b, d in bars if b <= t < d)
