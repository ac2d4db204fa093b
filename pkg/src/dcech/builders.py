"""Degree and distance-to-measure bifiltrations, Dowker duals, nerves.

The central pattern: a set bifiltration f assigns every simplex over a witness
universe X a nondecreasing step function of r, antitone under inclusion of
simplices. Its nerve keeps sigma at (m, r) when f(sigma, r) >= m, and a Dowker
dissimilarity Lambda: X x Y -> [0, inf] turns f into a dual complex on Y:
tau is present when some witness x has f({x}, r) >= m and tau inside the
Lambda-ball of x at r. Degree bifiltrations (f = mass of the common ball)
yield the degree Cech complexes; with the counting measure the m = 1 slice is
the usual Cech nerve.

Ball memberships are cached as int bitmasks per sorted breakpoint level, so
repeated evaluation during verification stays cheap.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    BifilteredComplex,
    DiscreteMeasure,
    FiniteMetricSpace,
    Simplex,
    SimplicialComplex,
    Staircase,
    as_simplex,
    pointwise_max,
)
from .errors import (
    DimensionMismatch,
    DowkerConditionViolation,
    EmptySupport,
    IndexOutOfRange,
    MonotonicityError,
    NonPositiveP,
)

__all__ = [
    "DowkerDissimilarity",
    "SetBifiltration",
    "DegreeBifiltration",
    "DistanceToMeasureBifiltration",
    "TableBifiltration",
    "DowkerBifiltrationPair",
    "degree_bifiltration",
    "dtm_bifiltration",
    "nerve_bifiltration",
    "dowker_dual",
    "intrinsic_dc",
    "ambient_dc_finite",
    "rectangle_complex",
    "measure_bifiltration_points",
    "cover_nerve",
    "restrict_to_support",
    "measure_dowker_reindex",
]


def _mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True, eq=False)
class DowkerDissimilarity:
    """A nonnegative |X| x |Y| dissimilarity matrix, entries may be inf.

    X indexes witnesses, Y indexes the vertex universe of dual complexes.
    ``ball_mask(x, r)`` is the bitmask over Y of points with
    Lambda(x, y) <= r; masks are cached per breakpoint level.
    """

    matrix: np.ndarray
    _levels: tuple[float, ...] = field(init=False, repr=False)
    _mask_cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise DimensionMismatch("dissimilarity matrix must be 2d")
        if np.any(m < 0) or np.any(np.isnan(m)):
            raise DimensionMismatch("dissimilarity entries must be in [0, inf]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        finite = sorted(set(float(v) for v in m.ravel() if math.isfinite(v)))
        object.__setattr__(self, "_levels", tuple(finite))

    @property
    def nx(self) -> int:
        return self.matrix.shape[0]

    @property
    def ny(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def from_metric(
        cls,
        space: FiniteMetricSpace,
        rows: Sequence[int] | None = None,
        cols: Sequence[int] | None = None,
    ) -> "DowkerDissimilarity":
        """Restrict a metric to X = rows, Y = cols (defaults: all points)."""
        r = list(rows) if rows is not None else list(range(space.n))
        c = list(cols) if cols is not None else list(range(space.n))
        for i in r + c:
            space._check_index(i)
        return cls(space.dist[np.ix_(r, c)])

    def r_values(self) -> tuple[float, ...]:
        """Sorted distinct finite entries; the radii where balls can change."""
        return self._levels

    def _level_of(self, r: float) -> int:
        return bisect_right(self._levels, r)

    def _masks_at_level(self, level: int) -> list[int]:
        got = self._mask_cache.get(level)
        if got is not None:
            return got
        if level == 0:
            thr = -math.inf
        else:
            thr = self._levels[level - 1]
        masks = []
        for x in range(self.nx):
            row = self.matrix[x]
            mask = 0
            for y in range(self.ny):
                if row[y] <= thr:
                    mask |= 1 << y
            masks.append(mask)
        self._mask_cache[level] = masks
        return masks

    def ball_mask(self, x: int, r: float) -> int:
        if not 0 <= x < self.nx:
            raise IndexOutOfRange(f"witness index {x} not in [0, {self.nx})")
        if math.isinf(r):
            return (1 << self.ny) - 1
        return self._masks_at_level(self._level_of(r))[x]

    def common_ball_mask(self, sigma: Iterable[int], r: float) -> int:
        mask = (1 << self.ny) - 1
        if math.isinf(r):
            return mask
        masks = self._masks_at_level(self._level_of(r))
        for x in sigma:
            if not 0 <= x < self.nx:
                raise IndexOutOfRange(f"witness index {x} not in [0, {self.nx})")
            mask &= masks[x]
            if not mask:
                break
        return mask


class SetBifiltration:
    """Interface for evaluable set bifiltrations f(sigma, r).

    Implementations must be antitone in sigma, nondecreasing and
    right-continuous in r, and constant between consecutive r_breakpoints().
    """

    universe_size: int

    def value(self, sigma: Iterable[int], r: float) -> float:
        raise NotImplementedError

    def r_breakpoints(self) -> tuple[float, ...]:
        raise NotImplementedError


class DegreeBifiltration(SetBifiltration):
    """f(sigma, r) = mass of the common Lambda-ball of sigma at radius r."""

    def __init__(self, dowker: DowkerDissimilarity, measure: DiscreteMeasure) -> None:
        if len(measure) != dowker.ny:
            raise DimensionMismatch(
                f"{len(measure)} weights for {dowker.ny} ball points"
            )
        self.dowker = dowker
        self.measure = measure
        self.universe_size = dowker.nx
        self._mass_cache: dict[int, float] = {0: 0.0}

    def _mass(self, mask: int) -> float:
        got = self._mass_cache.get(mask)
        if got is None:
            got = sum(self.measure.weights[y] for y in _bits(mask))
            self._mass_cache[mask] = got
        return got

    def value(self, sigma: Iterable[int], r: float) -> float:
        return self._mass(self.dowker.common_ball_mask(sigma, r))

    def r_breakpoints(self) -> tuple[float, ...]:
        return self.dowker.r_values()


class DistanceToMeasureBifiltration(SetBifiltration):
    """f_p(sigma, r) = (sum over the ball of min_x Lambda(x, y)^p * w_y)^(1/p).

    The convention 0^p = 0 applies; entries at Lambda = inf only contribute at
    r = inf, where the value itself is inf.
    """

    def __init__(
        self, dowker: DowkerDissimilarity, measure: DiscreteMeasure, p: float
    ) -> None:
        if len(measure) != dowker.ny:
            raise DimensionMismatch(
                f"{len(measure)} weights for {dowker.ny} ball points"
            )
        if not p > 0:
            raise NonPositiveP(f"exponent p must be > 0, got {p}")
        self.dowker = dowker
        self.measure = measure
        self.p = float(p)
        self.universe_size = dowker.nx

    def value(self, sigma: Iterable[int], r: float) -> float:
        sig = as_simplex(sigma)
        mask = self.dowker.common_ball_mask(sig, r)
        total = 0.0
        for y in _bits(mask):
            best = min(float(self.dowker.matrix[x, y]) for x in sig)
            w = self.measure.weights[y]
            if w == 0.0:
                continue
            if math.isinf(best):
                return math.inf
            if best > 0.0:
                total += (best ** self.p) * w
        return total ** (1.0 / self.p)

    def r_breakpoints(self) -> tuple[float, ...]:
        return self.dowker.r_values()


class TableBifiltration(SetBifiltration):
    """A user-supplied bifiltration tabulated on an explicit r grid.

    ``table`` maps simplices (over range(universe_size)) to value tuples
    aligned with ``r_grid``; the grid must start at 0 so every radius is
    covered. Missing simplices evaluate to 0. Monotonicity in both arguments
    is validated on construction.
    """

    def __init__(
        self,
        universe_size: int,
        r_grid: Sequence[float],
        table: Mapping[Iterable[int], Sequence[float]],
    ) -> None:
        grid = tuple(float(r) for r in r_grid)
        if not grid or grid[0] != 0.0 or list(grid) != sorted(set(grid)):
            raise MonotonicityError("r_grid must be sorted, distinct, starting at 0")
        fixed: dict[Simplex, tuple[float, ...]] = {}
        for sig, vals in table.items():
            s = as_simplex(sig)
            v = tuple(float(x) for x in vals)
            if len(v) != len(grid):
                raise DimensionMismatch(f"values for {s} do not match the r grid")
            if any(x < 0 for x in v):
                raise MonotonicityError(f"negative value for {s}")
            if any(b < a for a, b in zip(v, v[1:])):
                raise MonotonicityError(f"values for {s} decrease along r")
            fixed[s] = v
        self.universe_size = int(universe_size)
        self._grid = grid
        self._table = fixed
        for s, v in fixed.items():
            if max(s) >= self.universe_size:
                raise IndexOutOfRange(f"simplex {s} outside the universe")
            if len(s) > 1:
                for face in combinations(s, len(s) - 1):
                    fv = fixed.get(face, (0.0,) * len(grid))
                    if any(a > b for a, b in zip(v, fv)):
                        raise MonotonicityError(
                            f"face {face} of {s} has smaller values"
                        )

    def value(self, sigma: Iterable[int], r: float) -> float:
        s = as_simplex(sigma)
        vals = self._table.get(s)
        if vals is None:
            return 0.0
        if r < 0:
            return 0.0
        return vals[bisect_right(self._grid, r) - 1]

    def r_breakpoints(self) -> tuple[float, ...]:
        return self._grid


def degree_bifiltration(
    dowker: DowkerDissimilarity, measure: DiscreteMeasure
) -> DegreeBifiltration:
    return DegreeBifiltration(dowker, measure)


def dtm_bifiltration(
    dowker: DowkerDissimilarity, measure: DiscreteMeasure, p: float
) -> DistanceToMeasureBifiltration:
    return DistanceToMeasureBifiltration(dowker, measure, p)


@dataclass(frozen=True, eq=False)
class DowkerBifiltrationPair:
    """A dissimilarity together with a compatible set bifiltration.

    Compatibility (checked up to dim_cap on the critical grid): whenever
    f(sigma, r) > 0 the common Lambda-ball of sigma at r is nonempty. Degree
    and distance-to-measure bifiltrations satisfy this structurally; user
    tables are rejected when they violate it.
    """

    dowker: DowkerDissimilarity
    f: SetBifiltration
    dim_cap: int = 3

    def __post_init__(self) -> None:
        if self.f.universe_size != self.dowker.nx:
            raise DimensionMismatch("f universe does not match the witness set")
        grid = sorted(set((0.0,) + self.dowker.r_values() + self.f.r_breakpoints()))
        nx = self.dowker.nx
        for size in range(1, min(self.dim_cap + 2, nx + 1)):
            for sigma in combinations(range(nx), size):
                for r in grid:
                    if self.f.value(sigma, r) > 0.0 and not (
                        self.dowker.common_ball_mask(sigma, r)
                    ):
                        raise DowkerConditionViolation(
                            f"f{sigma} > 0 at r={r} but the ball is empty"
                        )


# ---------------------------------------------------------------------------
# Complex builders
# ---------------------------------------------------------------------------


def nerve_bifiltration(
    f: SetBifiltration, dim_cap: int = 3, universe: Sequence[int] | None = None
) -> BifilteredComplex:
    """Bifiltered nerve of f: sigma present at (m, r) iff f(sigma, r) >= m.

    Every simplex is present from r = 0 at every m <= f(sigma, 0); in
    particular at m <= 0 the nerve is the full dim_cap skeleton.
    """
    n = f.universe_size
    ids = tuple(universe) if universe is not None else tuple(range(n))
    if len(ids) != n:
        raise DimensionMismatch("universe labels do not match f's universe size")
    if n > 20:
        warnings.warn(f"materializing a nerve over {n} vertices", stacklevel=2)
    rs = sorted(set((0.0,) + tuple(f.r_breakpoints())))
    entries: dict[Simplex, Staircase] = {}
    for size in range(1, min(dim_cap + 2, n + 1)):
        for sigma in combinations(range(n), size):
            vals = [f.value(sigma, r) for r in rs]
            stair = Staircase.from_samples(rs, vals)
            assert stair is not None  # values are >= 0, never absent
            entries[tuple(ids[i] for i in sigma)] = stair
    return BifilteredComplex(ids, entries, dim_cap)


def dowker_dual(
    dowker: DowkerDissimilarity,
    f: SetBifiltration,
    dim_cap: int = 3,
    y_ids: Sequence[int] | None = None,
) -> BifilteredComplex:
    """Dual complex on Y: tau enters at (m, r) when some witness x satisfies
    f({x}, r) >= m and tau lies in the Lambda-ball of x at radius r.

    The staircase value of tau at r is the best witness value; tau is absent
    until some ball contains it.
    """
    if f.universe_size != dowker.nx:
        raise DimensionMismatch("f universe does not match the witness set")
    ny = dowker.ny
    ids = tuple(y_ids) if y_ids is not None else tuple(range(ny))
    if len(ids) != ny:
        raise DimensionMismatch("y_ids do not match the dual universe size")
    if ny > 20:
        warnings.warn(f"materializing a dual over {ny} vertices", stacklevel=2)
    rs = sorted(set((0.0,) + dowker.r_values() + tuple(f.r_breakpoints())))
    per_r: list[tuple[list[int], list[float]]] = []
    for r in rs:
        masks = [dowker.ball_mask(x, r) for x in range(dowker.nx)]
        vals = [f.value((x,), r) for x in range(dowker.nx)]
        per_r.append((masks, vals))
    entries: dict[Simplex, Staircase] = {}
    for size in range(1, min(dim_cap + 2, ny + 1)):
        for tau in combinations(range(ny), size):
            tmask = _mask_of(tau)
            samples: list[float | None] = []
            for masks, vals in per_r:
                best: float | None = None
                for x in range(dowker.nx):
                    if tmask & ~masks[x]:
                        continue
                    v = vals[x]
                    if best is None or v > best:
                        best = v
                samples.append(best)
            stair = Staircase.from_samples(rs, samples)
            if stair is not None:
                entries[tuple(ids[i] for i in tau)] = stair
    return BifilteredComplex(ids, entries, dim_cap)


def intrinsic_dc(
    space: FiniteMetricSpace, measure: DiscreteMeasure, dim_cap: int = 3
) -> BifilteredComplex:
    """Degree Cech bifiltration with witnesses restricted to the support."""
    if len(measure) != space.n:
        raise DimensionMismatch("measure does not align with the space")
    sup = list(measure.support)
    if not sup:
        raise EmptySupport("measure has empty support")
    lam = DowkerDissimilarity.from_metric(space, rows=sup, cols=sup)
    f = DegreeBifiltration(lam, measure.restrict(sup))
    return dowker_dual(lam, f, dim_cap, y_ids=sup)


def ambient_dc_finite(
    space: FiniteMetricSpace, measure: DiscreteMeasure, dim_cap: int = 3
) -> BifilteredComplex:
    """Degree Cech bifiltration with witnesses ranging over the whole space.

    Vertices live on the support only; any point of the space may witness.
    """
    if len(measure) != space.n:
        raise DimensionMismatch("measure does not align with the space")
    sup = list(measure.support)
    if not sup:
        raise EmptySupport("measure has empty support")
    lam_ms = DowkerDissimilarity.from_metric(space, cols=sup)
    lam_mm = DowkerDissimilarity.from_metric(space)
    f = DegreeBifiltration(lam_mm, measure)
    return dowker_dual(lam_ms, f, dim_cap, y_ids=sup)


def rectangle_complex(
    dowker: DowkerDissimilarity,
    f: SetBifiltration,
    m: float,
    r: float,
    dim_cap: int = 3,
) -> SimplicialComplex:
    """The correspondence complex at (m, r) on the vertex set X x Y.

    A set U of pairs is a simplex when its X projection satisfies
    f(proj_X U, r) >= m, its Y projection lies in the dual complex at (m, r),
    and Lambda(x, y) <= r for every pair in U. Vertices are flattened as
    x * |Y| + y.
    """
    nx, ny = dowker.nx, dowker.ny
    eligible_x = [x for x in range(nx) if f.value((x,), r) >= m]
    ball_of = {x: dowker.ball_mask(x, r) for x in eligible_x}
    pairs = [
        (x, y)
        for x in range(nx)
        for y in range(ny)
        if dowker.matrix[x, y] <= r
    ]
    fcache: dict[tuple[int, ...], bool] = {}

    def x_ok(xs: tuple[int, ...]) -> bool:
        got = fcache.get(xs)
        if got is None:
            got = f.value(xs, r) >= m
            fcache[xs] = got
        return got

    def y_ok(ymask: int) -> bool:
        return any((ymask & ~ball_of[x]) == 0 for x in eligible_x)

    simplices: set[Simplex] = set()
    for size in range(1, min(dim_cap + 2, len(pairs) + 1)):
        for combo in combinations(pairs, size):
            xs = tuple(sorted(set(p[0] for p in combo)))
            if not x_ok(xs):
                continue
            ymask = _mask_of(p[1] for p in combo)
            if not y_ok(ymask):
                continue
            simplices.add(tuple(sorted(x * ny + y for x, y in combo)))
    universe = tuple(range(nx * ny))
    return SimplicialComplex(universe, frozenset(simplices))


def measure_bifiltration_points(
    space: FiniteMetricSpace, measure: DiscreteMeasure, m: float, r: float
) -> frozenset[int]:
    """Points whose closed r-ball carries mass at least m."""
    if len(measure) != space.n:
        raise DimensionMismatch("measure does not align with the space")
    out = []
    for x in range(space.n):
        mass = sum(
            measure.weights[y] for y in range(space.n) if space.dist[x, y] <= r
        )
        if mass >= m:
            out.append(x)
    return frozenset(out)


def cover_nerve(
    space: FiniteMetricSpace,
    measure: DiscreteMeasure,
    m: float,
    r: float,
    dim_cap: int = 3,
) -> SimplicialComplex:
    """Nerve of the cover of the dense region by balls centered in its offset.

    Vertices are the points of offset(dense region, r); tau spans a simplex
    when the common ball of tau still meets the dense region.
    """
    dense = measure_bifiltration_points(space, measure, m, r)
    dense_mask = _mask_of(dense)
    n = space.n
    ballm = []
    for y in range(n):
        ballm.append(_mask_of(x for x in range(n) if space.dist[y, x] <= r))
    verts = [y for y in range(n) if ballm[y] & dense_mask]
    simplices: set[Simplex] = set()
    for size in range(1, min(dim_cap + 2, len(verts) + 1)):
        for tau in combinations(verts, size):
            mask = dense_mask
            for y in tau:
                mask &= ballm[y]
                if not mask:
                    break
            if mask:
                simplices.add(tau)
    return SimplicialComplex(tuple(range(n)), frozenset(simplices))


def restrict_to_support(
    K: BifilteredComplex, keep: Iterable[int]
) -> BifilteredComplex:
    """Restriction of a bifiltered complex to a vertex subset.

    The staircase of sigma is the pointwise best over entries whose
    intersection with the kept set is sigma; for downward closed complexes
    this is just the entry of sigma itself, but the general form is kept so
    the operation is meaningful on any input.
    """
    kept = frozenset(keep)
    grouped: dict[Simplex, list[Staircase]] = {}
    for sigma, stair in K.entries.items():
        inter = tuple(v for v in sigma if v in kept)
        if inter:
            grouped.setdefault(inter, []).append(stair)
    entries = {s: pointwise_max(sts) for s, sts in grouped.items()}
    universe = tuple(v for v in K.universe if v in kept)
    return BifilteredComplex(universe, entries, K.dim_cap)


def measure_dowker_reindex(K: BifilteredComplex) -> BifilteredComplex:
    """Reindex r -> r/2 on every staircase (the doubled-radius family)."""
    entries = {s: st.scale_r(0.5) for s, st in K.entries.items()}
    return BifilteredComplex(K.universe, entries, K.dim_cap)
