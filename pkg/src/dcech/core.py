"""Core model: finite metric measure data and bifiltered complexes.

A bifiltered complex is indexed by a density threshold m (a simplex is present
when its staircase value is at least m) and a radius r (staircase values are
nondecreasing, right-continuous step functions of r). Presence regions are
therefore upward closed when m decreases and r increases, which matches the
poset R^op x [0, inf] used throughout.

Simplices are plain sorted tuples of vertex ids. "Absent" is distinct from
"present with value 0": a simplex that is never witnessed simply has no entry,
and below its first breakpoint an entry's value() is None.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetryError,
    CoordMismatch,
    DimensionMismatch,
    EmptySimplex,
    EmptySupport,
    IndexOutOfRange,
    InvalidComplex,
    InvalidStaircase,
    NegativeDistanceError,
    NonMonotonePath,
    TriangleViolation,
)

__all__ = [
    "FiniteMetricSpace",
    "DiscreteMeasure",
    "SimplicialComplex",
    "Staircase",
    "BifilteredComplex",
    "ForwardShift",
    "MonotonePath",
    "as_simplex",
    "pointwise_max",
    "validate_forward_shift",
    "validate_metric",
    "ball",
    "common_ball",
    "offset",
    "complex_at",
    "critical_grid",
    "grid_with_midpoints",
]

METRIC_TOL = 1e-9

Simplex = tuple[int, ...]


def as_simplex(vertices: Iterable[int]) -> Simplex:
    """Normalize an iterable of vertex ids to a sorted, duplicate-free tuple."""
    out = tuple(sorted(set(int(v) for v in vertices)))
    if not out:
        raise EmptySimplex("a simplex needs at least one vertex")
    return out


# ---------------------------------------------------------------------------
# Metric spaces and measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space given by an explicit distance matrix.

    ``coords`` is optional planar (or higher-dimensional) coordinate data; it
    is required only by the planar constructions. ``labels`` are display names
    carried through to CLI output. Instances are immutable; the arrays are
    marked read-only on construction.
    """

    dist: np.ndarray
    coords: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        d = np.asarray(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DimensionMismatch(f"distance matrix must be square, got {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        if self.coords is not None:
            c = np.asarray(self.coords, dtype=float)
            if c.ndim != 2 or c.shape[0] != d.shape[0]:
                raise DimensionMismatch(
                    f"coords shape {c.shape} does not match {d.shape[0]} points"
                )
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)
        if self.labels is not None and len(self.labels) != d.shape[0]:
            raise DimensionMismatch("labels do not match the number of points")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @classmethod
    def from_points(
        cls, coords: Sequence[Sequence[float]], labels: Sequence[str] | None = None
    ) -> "FiniteMetricSpace":
        """Build a Euclidean space from coordinates."""
        c = np.asarray(coords, dtype=float)
        if c.ndim != 2:
            raise DimensionMismatch("coords must be a 2d array of points")
        if c.shape[1] == 2:
            # math.hypot everywhere: planar witness radii are derived from the
            # same call, so matrix and geometry agree to the last bit
            n = c.shape[0]
            d = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    d[i, j] = d[j, i] = math.hypot(
                        c[i, 0] - c[j, 0], c[i, 1] - c[j, 1]
                    )
        else:
            diff = c[:, None, :] - c[None, :, :]
            d = np.sqrt((diff * diff).sum(axis=-1))
        return cls(d, coords=c, labels=tuple(labels) if labels is not None else None)

    @classmethod
    def from_matrix(
        cls,
        dist: Sequence[Sequence[float]],
        labels: Sequence[str] | None = None,
        validate: bool = True,
        tol: float = METRIC_TOL,
    ) -> "FiniteMetricSpace":
        space = cls(np.asarray(dist, dtype=float),
                    labels=tuple(labels) if labels is not None else None)
        if validate:
            validate_metric(space, tol=tol)
        return space

    def restrict(self, ids: Sequence[int]) -> "FiniteMetricSpace":
        """Submetric on the given point ids (order preserved)."""
        idx = list(ids)
        for i in idx:
            self._check_index(i)
        sub = self.dist[np.ix_(idx, idx)]
        coords = self.coords[idx] if self.coords is not None else None
        labels = (
            tuple(self.labels[i] for i in idx) if self.labels is not None else None
        )
        return FiniteMetricSpace(sub, coords=coords, labels=labels)

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def diameter(self) -> float:
        finite = self.dist[np.isfinite(self.dist)]
        return float(finite.max()) if finite.size else 0.0

    def _check_index(self, x: int) -> None:
        if not 0 <= x < self.n:
            raise IndexOutOfRange(f"point index {x} not in [0, {self.n})")


def validate_metric(space: FiniteMetricSpace, tol: float = METRIC_TOL) -> None:
    """Check symmetry, nonnegativity, zero diagonal and triangle inequality.

    Raises the first violation found, with a witness. Distances may be inf
    (disconnected spaces); a triangle check with an infinite right-hand side
    is vacuous.
    """
    d = space.dist
    n = space.n
    for i in range(n):
        if d[i, i] != 0.0:
            raise NegativeDistanceError(f"d({i},{i}) = {d[i, i]} is not zero")
        for j in range(i + 1, n):
            if d[i, j] < 0 or d[j, i] < 0:
                raise NegativeDistanceError(f"d({i},{j}) is negative")
            if not math.isclose(d[i, j], d[j, i], rel_tol=0.0, abs_tol=tol):
                if not (math.isinf(d[i, j]) and math.isinf(d[j, i])):
                    raise AsymmetryError(
                        f"d({i},{j}) = {d[i, j]} but d({j},{i}) = {d[j, i]}"
                    )
    for k in range(n):
        row = d[k]
        for i in range(n):
            dik = d[i, k]
            if math.isinf(dik):
                continue
            for j in range(n):
                rhs = dik + row[j]
                if math.isinf(rhs):
                    continue
                if d[i, j] > rhs + tol:
                    raise TriangleViolation(i, k, j, float(d[i, j]), float(rhs))
    if space.coords is not None:
        c = space.coords
        for i in range(n):
            for j in range(n):
                dd = math.hypot(*(c[i] - c[j])) if c.shape[1] == 2 else float(
                    np.linalg.norm(c[i] - c[j])
                )
                if abs(dd - d[i, j]) > tol:
                    raise CoordMismatch(
                        f"coords give d({i},{j}) = {dd}, matrix says {d[i, j]}"
                    )


@dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative weights aligned with a FiniteMetricSpace.

    The support is the set of indices with strictly positive weight and must
    be nonempty. Total mass is not normalized; arbitrary finite measures are
    allowed.
    """

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.weights)
        for i, x in enumerate(w):
            if x < 0 or math.isnan(x):
                raise EmptySupport(f"weight {i} is {x}; weights must be >= 0")
        if not any(x > 0 for x in w):
            raise EmptySupport("measure has empty support")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.weights)

    @classmethod
    def counting(cls, n: int) -> "DiscreteMeasure":
        return cls((1.0,) * n)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.weights) if x > 0)

    @property
    def total(self) -> float:
        return float(sum(self.weights))

    def mass(self, indices: Iterable[int]) -> float:
        return float(sum(self.weights[i] for i in indices))

    def restrict(self, ids: Sequence[int]) -> "DiscreteMeasure":
        """Reindexed weights on the given ids (support must stay nonempty)."""
        return DiscreteMeasure(tuple(self.weights[i] for i in ids))


def _check_alignment(space: FiniteMetricSpace, measure: DiscreteMeasure) -> None:
    if len(measure) != space.n:
        raise DimensionMismatch(
            f"measure has {len(measure)} weights for a {space.n}-point space"
        )


def ball(space: FiniteMetricSpace, x: int, r: float) -> frozenset[int]:
    """Closed ball: indices within distance r of point x."""
    space._check_index(x)
    row = space.dist[x]
    return frozenset(int(i) for i in np.nonzero(row <= r)[0])


def common_ball(space: FiniteMetricSpace, sigma: Iterable[int], r: float) -> frozenset[int]:
    """Indices within distance r of every vertex of sigma."""
    sig = as_simplex(sigma)
    out: frozenset[int] | None = None
    for x in sig:
        b = ball(space, x, r)
        out = b if out is None else out & b
    assert out is not None
    return out


def offset(space: FiniteMetricSpace, subset: Iterable[int], r: float) -> frozenset[int]:
    """Union of closed r-balls centered at the subset's points."""
    out: set[int] = set()
    for x in subset:
        out |= ball(space, x, r)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Simplicial complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """A finite simplicial complex over an integer vertex universe.

    Universe members that appear in no simplex are ghost vertices; they are
    legal and carry no homology. The simplex set must be downward closed.
    """

    universe: tuple[int, ...]
    simplices: frozenset[Simplex]

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", tuple(sorted(set(self.universe))))
        object.__setattr__(self, "simplices", frozenset(self.simplices))
        uni = set(self.universe)
        for s in self.simplices:
            if not s:
                raise EmptySimplex("the empty simplex is not stored explicitly")
            if list(s) != sorted(set(s)):
                raise InvalidComplex(f"simplex {s} is not strictly sorted")
            if not uni.issuperset(s):
                raise InvalidComplex(f"simplex {s} leaves the universe")
            if len(s) > 1:
                for face in combinations(s, len(s) - 1):
                    if face not in self.simplices:
                        raise InvalidComplex(
                            f"missing face {face} of {s}: not downward closed"
                        )

    @classmethod
    def from_simplices(
        cls, simplices: Iterable[Iterable[int]], universe: Iterable[int] | None = None
    ) -> "SimplicialComplex":
        simp = frozenset(as_simplex(s) for s in simplices)
        if universe is None:
            uni: set[int] = set()
            for s in simp:
                uni.update(s)
            universe = uni
        return cls(tuple(universe), simp)

    @classmethod
    def closure_of(
        cls, maximal: Iterable[Iterable[int]], universe: Iterable[int] | None = None
    ) -> "SimplicialComplex":
        """Downward closure of the given generating simplices."""
        simp: set[Simplex] = set()
        for m in maximal:
            ms = as_simplex(m)
            for k in range(1, len(ms) + 1):
                simp.update(combinations(ms, k))
        if universe is None:
            uni: set[int] = set()
            for s in simp:
                uni.update(s)
            universe = uni
        return cls(tuple(universe), frozenset(simp))

    def __len__(self) -> int:
        return len(self.simplices)

    def __contains__(self, sigma: object) -> bool:
        return sigma in self.simplices

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.sorted_simplices())

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def vertices(self) -> tuple[int, ...]:
        """Vertices that are actually present (not ghosts)."""
        return tuple(sorted(s[0] for s in self.simplices if len(s) == 1))

    def simplices_of_dim(self, k: int) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def sorted_simplices(self) -> list[Simplex]:
        """Deterministic order: by dimension, then lexicographic."""
        return sorted(self.simplices, key=lambda s: (len(s), s))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.simplices.issubset(other.simplices)


# ---------------------------------------------------------------------------
# Staircases and bifiltered complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Staircase:
    """Right-continuous nondecreasing step function of the radius.

    ``steps`` is a nonempty tuple of (r_k, m_k) pairs, strictly increasing in
    both coordinates. Below steps[0][0] the simplex is absent and value()
    returns None; from r_k (inclusive) the value is m_k. Strict increase in m
    means steps record changes only.
    """

    steps: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        st = tuple((float(r), float(m)) for r, m in self.steps)
        if not st:
            raise InvalidStaircase("a staircase needs at least one step")
        for (r0, m0), (r1, m1) in zip(st, st[1:]):
            if not (r0 < r1 and m0 < m1):
                raise InvalidStaircase(
                    f"steps must increase strictly in r and m: {(r0, m0)} then {(r1, m1)}"
                )
        object.__setattr__(self, "steps", st)

    @classmethod
    def from_samples(
        cls, rs: Sequence[float], values: Sequence[float | None]
    ) -> "Staircase | None":
        """Compress sampled values on a sorted grid to a staircase.

        Values must be None (absent) on a prefix and nondecreasing afterwards;
        returns None when every sample is absent.
        """
        steps: list[tuple[float, float]] = []
        last: float | None = None
        for r, v in zip(rs, values):
            if v is None:
                if last is not None:
                    raise InvalidStaircase("absence after presence is not allowed")
                continue
            if last is None:
                steps.append((float(r), float(v)))
                last = float(v)
            elif v > last:
                steps.append((float(r), float(v)))
                last = float(v)
            elif v < last:
                raise InvalidStaircase(f"value dropped from {last} to {v} at r={r}")
        if not steps:
            return None
        return cls(tuple(steps))

    @property
    def start_r(self) -> float:
        return self.steps[0][0]

    @property
    def max_value(self) -> float:
        return self.steps[-1][1]

    def value(self, r: float) -> float | None:
        """Value at radius r, or None if the simplex is absent there."""
        if r < self.steps[0][0]:
            return None
        idx = bisect_right([s[0] for s in self.steps], r) - 1
        return self.steps[idx][1]

    def present(self, m: float, r: float) -> bool:
        v = self.value(r)
        return v is not None and v >= m

    def scale_r(self, factor: float) -> "Staircase":
        return Staircase(tuple((r * factor, m) for r, m in self.steps))


def pointwise_max(stairs: Sequence[Staircase]) -> Staircase:
    """Upper envelope of staircases (absent treated as -inf)."""
    if not stairs:
        raise InvalidStaircase("need at least one staircase")
    rs = sorted({r for st in stairs for r, _ in st.steps})
    vals: list[float | None] = []
    # the max of nondecreasing staircases never drops once present, so the
    # samples compress cleanly
    for r in rs:
        best: float | None = None
        for st in stairs:
            v = st.value(r)
            if v is not None and (best is None or v > best):
                best = v
        vals.append(best)
    out = Staircase.from_samples(rs, vals)
    assert out is not None
    return out


@dataclass(frozen=True, eq=False)
class BifilteredComplex:
    """A bifiltered simplicial complex stored as staircases per simplex.

    ``entries`` maps each simplex that is ever present to its staircase;
    simplices that never appear have no entry. ``universe`` is the vertex id
    pool (ghost vertices allowed). Downward closure here means every face of
    an entry is an entry whose staircase dominates it.
    """

    universe: tuple[int, ...]
    entries: Mapping[Simplex, Staircase]
    dim_cap: int = 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", tuple(sorted(set(self.universe))))
        object.__setattr__(self, "entries", dict(self.entries))

    def staircase(self, sigma: Iterable[int]) -> Staircase | None:
        return self.entries.get(as_simplex(sigma))

    def value(self, sigma: Iterable[int], r: float) -> float | None:
        st = self.staircase(sigma)
        return None if st is None else st.value(r)

    def present(self, sigma: Iterable[int], m: float, r: float) -> bool:
        st = self.staircase(sigma)
        return st is not None and st.present(m, r)

    def complex_at(self, m: float, r: float) -> SimplicialComplex:
        """Slice at one parameter pair; m = -inf keeps everything witnessed."""
        simp = frozenset(
            s for s, st in self.entries.items() if st.present(m, r)
        )
        return SimplicialComplex(self.universe, simp)

    def critical_grid(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Sorted radii and values at which any staircase changes."""
        rs: set[float] = set()
        ms: set[float] = set()
        for st in self.entries.values():
            for r, m in st.steps:
                rs.add(r)
                ms.add(m)
        return tuple(sorted(rs)), tuple(sorted(ms))

    def validate(self) -> None:
        """Check downward closure and staircase domination; raises on failure."""
        uni = set(self.universe)
        for sigma, st in self.entries.items():
            if not uni.issuperset(sigma):
                raise InvalidComplex(f"simplex {sigma} leaves the universe")
            if len(sigma) - 1 > self.dim_cap:
                raise InvalidComplex(f"simplex {sigma} exceeds dim_cap {self.dim_cap}")
            if len(sigma) == 1:
                continue
            for face in combinations(sigma, len(sigma) - 1):
                fst = self.entries.get(face)
                if fst is None:
                    raise InvalidComplex(f"face {face} of {sigma} has no entry")
                for r, m in st.steps:
                    fv = fst.value(r)
                    if fv is None or fv < m:
                        raise InvalidComplex(
                            f"face {face} value {fv} below {m} of {sigma} at r={r}"
                        )

    def restrict_r_grid(self, r_grid: Sequence[float]) -> "BifilteredComplex":
        """Resample every staircase on an explicit radius grid."""
        rs = sorted(float(r) for r in r_grid)
        out: dict[Simplex, Staircase] = {}
        for sigma, st in self.entries.items():
            resampled = Staircase.from_samples(rs, [st.value(r) for r in rs])
            if resampled is not None:
                out[sigma] = resampled
        return BifilteredComplex(self.universe, out, self.dim_cap)


def complex_at(K: BifilteredComplex, m: float, r: float) -> SimplicialComplex:
    return K.complex_at(m, r)


def critical_grid(K: BifilteredComplex) -> tuple[tuple[float, ...], tuple[float, ...]]:
    return K.critical_grid()


def grid_with_midpoints(values: Sequence[float]) -> tuple[float, ...]:
    """Sorted values interleaved with midpoints of consecutive pairs."""
    vs = sorted(set(float(v) for v in values))
    out: list[float] = []
    for a, b in zip(vs, vs[1:]):
        out.append(a)
        if math.isfinite(a) and math.isfinite(b):
            out.append((a + b) / 2.0)
    if vs:
        out.append(vs[-1])
    return tuple(out)


# ---------------------------------------------------------------------------
# Parameter shifts and slice paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForwardShift:
    """Order-preserving map (m, r) -> (m', r') with m' <= m and r' >= r.

    The two stock shifts are the plain epsilon shift (m - eps, r + eps) and
    the doubling shift (m - eps, 2 (r + eps)) used by the nearest-neighbor
    interleavings. Arbitrary monotone pairs can be wrapped with
    :meth:`from_callables`; :func:`validate_forward_shift` spot-checks the
    monotonicity on a sample grid.
    """

    name: str
    apply: Callable[[float, float], tuple[float, float]] = field(repr=False)

    @classmethod
    def eps_shift(cls, eps: float) -> "ForwardShift":
        if eps < 0:
            raise NonMonotonePath(f"shift amount must be >= 0, got {eps}")
        return cls(f"eps_shift({eps!r})", lambda m, r: (m - eps, r + eps))

    @classmethod
    def doubling_shift(cls, eps: float) -> "ForwardShift":
        if eps < 0:
            raise NonMonotonePath(f"shift amount must be >= 0, got {eps}")
        return cls(f"doubling_shift({eps!r})", lambda m, r: (m - eps, 2.0 * (r + eps)))

    @classmethod
    def identity(cls) -> "ForwardShift":
        return cls("identity", lambda m, r: (m, r))

    @classmethod
    def from_callables(
        cls,
        m_part: Callable[[float, float], float],
        r_part: Callable[[float, float], float],
        name: str = "custom",
    ) -> "ForwardShift":
        return cls(name, lambda m, r: (m_part(m, r), r_part(m, r)))

    def __call__(self, m: float, r: float) -> tuple[float, float]:
        return self.apply(m, r)

    def then(self, other: "ForwardShift") -> "ForwardShift":
        """Compose: apply self first, then other."""
        def chained(m: float, r: float) -> tuple[float, float]:
            m1, r1 = self.apply(m, r)
            return other.apply(m1, r1)

        return ForwardShift(f"{other.name} o {self.name}", chained)


def validate_forward_shift(
    shift: ForwardShift,
    m_grid: Sequence[float],
    r_grid: Sequence[float],
) -> None:
    """Check shift direction and order preservation on a sample grid."""
    pts = [(m, r) for m in m_grid for r in r_grid]
    for m, r in pts:
        m1, r1 = shift(m, r)
        if m1 > m or r1 < r:
            raise NonMonotonePath(
                f"{shift.name} moved ({m}, {r}) backwards to ({m1}, {r1})"
            )
    for ma, ra in pts:
        for mb, rb in pts:
            if mb <= ma and ra <= rb:  # (ma, ra) <= (mb, rb) in R^op x [0, inf]
                a = shift(ma, ra)
                b = shift(mb, rb)
                if not (b[0] <= a[0] and a[1] <= b[1]):
                    raise NonMonotonePath(
                        f"{shift.name} is not order preserving at {(ma, ra)}, {(mb, rb)}"
                    )


@dataclass(frozen=True)
class MonotonePath:
    """A finite path through parameter space with nonincreasing m and
    nondecreasing r, plus a strictly increasing time stamp per step.

    Bars produced by slice persistence are reported in these time stamps.
    """

    points: tuple[tuple[float, float], ...]
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        pts = tuple((float(m), float(r)) for m, r in self.points)
        ts = tuple(float(t) for t in self.times)
        if not pts:
            raise NonMonotonePath("a path needs at least one point")
        if len(pts) != len(ts):
            raise NonMonotonePath("points and times must align")
        for (m0, r0), (m1, r1) in zip(pts, pts[1:]):
            if m1 > m0 or r1 < r0:
                raise NonMonotonePath(
                    f"path moved backwards: ({m0},{r0}) then ({m1},{r1})"
                )
        for t0, t1 in zip(ts, ts[1:]):
            if not t0 < t1:
                raise NonMonotonePath("times must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "times", ts)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def at_constant_m(cls, m: float, r_values: Sequence[float]) -> "MonotonePath":
        # order is kept as given so a decreasing grid is rejected, not hidden
        rs: list[float] = []
        for r in r_values:
            r = float(r)
            if not rs or r != rs[-1]:
                rs.append(r)
        return cls(tuple((m, r) for r in rs), tuple(rs))

    @classmethod
    def diagonal(
        cls, m0: float, r0: float, t_values: Sequence[float]
    ) -> "MonotonePath":
        ts = sorted(set(float(t) for t in t_values))
        if any(t < 0 for t in ts):
            raise NonMonotonePath("diagonal parameters must be >= 0")
        return cls(tuple((m0 - t, r0 + t) for t in ts), tuple(ts))
