"""Prohorov distance, common embeddings, and interleaving verification.

The Prohorov distance between finite discrete measures on a common space is
computed exactly: for every subset B of the union of supports, the minimal
feasible epsilon is a min over offset breakpoints of max(threshold, mass
deficit), and the distance is the max over subsets and both inequality
directions. Subset enumeration is vectorized over bitmasks, so the support
cap keeps the arrays small.

Interleaving checks follow the displayed inequalities directly: every
condition is evaluated for all simplices up to dim_cap and all grid radii,
and the report carries the worst slack per condition together with a witness
when a condition fails. A negative slack on one of the union conditions
means the sufficient contiguity-style criterion failed; it does not refute
the existence of an interleaving.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .core import (
    METRIC_TOL,
    BifilteredComplex,
    DiscreteMeasure,
    FiniteMetricSpace,
    ForwardShift,
    Simplex,
)
from .builders import SetBifiltration
from .errors import (
    DifferentSpaces,
    DimensionMismatch,
    EmptyTarget,
    IndexOutOfRange,
    NotDistancePreserving,
    SupportTooLarge,
)

__all__ = [
    "SUPPORT_CAP",
    "CommonEmbedding",
    "ConditionSlack",
    "InterleavingReport",
    "ProhorovCheck",
    "prohorov_distance",
    "prohorov_check",
    "pushforward",
    "nearest_neighbor_projection",
    "check_projection_inequality",
    "ProjectionReport",
    "gp_upper_bound",
    "verify_set_interleaving_eps",
    "verify_set_interleaving_shift",
    "verify_complex_interleaving",
    "verify_sandwich",
]

# 2^15 subsets keeps exact enumeration well under a second.
SUPPORT_CAP = 15


# ---------------------------------------------------------------------------
# Prohorov distance
# ---------------------------------------------------------------------------


def _union_support(
    space: FiniteMetricSpace,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    support_cap: int,
) -> list[int]:
    if len(mu0) != space.n or len(mu1) != space.n:
        raise DifferentSpaces("measures are not indexed by the same space")
    union = sorted(set(mu0.support) | set(mu1.support))
    if len(union) > support_cap:
        raise SupportTooLarge(
            f"combined support has {len(union)} points, cap is {support_cap}"
        )
    return union


def _subset_sums(weights: Sequence[float], k: int) -> np.ndarray:
    out = np.zeros(1 << k)
    for j in range(k):
        out[1 << j : 1 << (j + 1)] = out[: 1 << j] + weights[j]
    return out


def _offset_masks(d: np.ndarray, t: float, k: int) -> np.ndarray:
    """off[B] = bitmask of points within distance t of the subset B."""
    off = np.zeros(1 << k, dtype=np.int64)
    for j in range(k):
        ball = 0
        row = d[j]
        for v in range(k):
            if row[v] <= t:
                ball |= 1 << v
        off[1 << j : 1 << (j + 1)] = off[: 1 << j] | ball
    return off


def prohorov_distance(
    space: FiniteMetricSpace,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    support_cap: int = SUPPORT_CAP,
) -> float:
    """Exact Prohorov distance between two measures on a common space.

    Smallest eps such that mu_i(B) <= mu_j(B^eps) + eps for every subset B
    of the union of supports and both orderings of (i, j); B^eps is the
    closed eps-offset.
    """
    union = _union_support(space, mu0, mu1, support_cap)
    k = len(union)
    if k == 0:
        return 0.0
    d = space.dist[np.ix_(union, union)]
    m0 = _subset_sums([mu0.weights[u] for u in union], k)
    m1 = _subset_sums([mu1.weights[u] for u in union], k)
    ts = sorted(set(float(x) for x in d.ravel() if math.isfinite(x)))
    best = np.full(1 << k, math.inf)
    for t in ts:
        off = _offset_masks(d, t, k)
        deficit = np.maximum(m0 - m1[off], m1 - m0[off])
        np.minimum(best, np.maximum(t, deficit), out=best)
    return float(best.max())


@dataclass(frozen=True)
class ProhorovCheck:
    """Outcome of checking the two Prohorov inequalities at a fixed eps."""

    ok: bool
    worst_slack: float
    witness_subset: frozenset[int] | None
    direction: int | None  # 0: mu0(B) vs mu1(B^eps), 1: the reverse


def prohorov_check(
    space: FiniteMetricSpace,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    eps: float,
    support_cap: int = SUPPORT_CAP,
) -> ProhorovCheck:
    """Check mu_i(B) <= mu_j(B^eps) + eps for all support subsets B."""
    union = _union_support(space, mu0, mu1, support_cap)
    k = len(union)
    if k == 0:
        return ProhorovCheck(True, math.inf, None, None)
    d = space.dist[np.ix_(union, union)]
    m0 = _subset_sums([mu0.weights[u] for u in union], k)
    m1 = _subset_sums([mu1.weights[u] for u in union], k)
    if eps < 0:
        off = np.zeros(1 << k, dtype=np.int64)
    else:
        ts = sorted(set(float(x) for x in d.ravel() if math.isfinite(x)))
        idx = bisect_right(ts, eps) - 1
        off = _offset_masks(d, ts[idx], k) if idx >= 0 else np.zeros(
            1 << k, dtype=np.int64
        )
    slack0 = m1[off] + eps - m0
    slack1 = m0[off] + eps - m1
    slack = np.minimum(slack0, slack1)
    b = int(slack.argmin())
    worst = float(slack[b])
    direction = 0 if slack0[b] <= slack1[b] else 1
    witness = frozenset(union[j] for j in range(k) if b >> j & 1)
    return ProhorovCheck(worst >= 0.0, worst, witness, direction)


# ---------------------------------------------------------------------------
# Embeddings and projections
# ---------------------------------------------------------------------------


def pushforward(
    mu: DiscreteMeasure, index_map: Sequence[int], target_size: int
) -> DiscreteMeasure:
    """Transport a measure along an index map; weights of preimages add."""
    if len(index_map) != len(mu):
        raise DimensionMismatch("index map does not cover the measure's space")
    weights = [0.0] * target_size
    for i, w in enumerate(mu.weights):
        j = index_map[i]
        if not 0 <= j < target_size:
            raise IndexOutOfRange(f"index map sends {i} to {j}")
        weights[j] += w
    return DiscreteMeasure(tuple(weights))


@dataclass(frozen=True, eq=False)
class CommonEmbedding:
    """Two finite metric spaces embedded in a common ambient space.

    iota0 and iota1 are index maps into the ambient space; both must be
    distance preserving within METRIC_TOL.
    """

    ambient: FiniteMetricSpace
    space0: FiniteMetricSpace
    iota0: tuple[int, ...]
    space1: FiniteMetricSpace
    iota1: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "iota0", tuple(self.iota0))
        object.__setattr__(self, "iota1", tuple(self.iota1))
        for name, spc, iota in (
            ("iota0", self.space0, self.iota0),
            ("iota1", self.space1, self.iota1),
        ):
            if len(iota) != spc.n:
                raise DimensionMismatch(f"{name} does not cover its space")
            for i in iota:
                self.ambient._check_index(i)
            for a in range(spc.n):
                for b in range(a + 1, spc.n):
                    da = self.ambient.dist[iota[a], iota[b]]
                    db = spc.dist[a, b]
                    if abs(da - db) > METRIC_TOL and da != db:
                        raise NotDistancePreserving(
                            f"{name}: d({a},{b}) = {db} maps to {da}"
                        )


def nearest_neighbor_projection(
    space: FiniteMetricSpace, target: Sequence[int]
) -> tuple[int, ...]:
    """Map every point to its closest target point, ties to the lowest index."""
    tgt = sorted(set(target))
    if not tgt:
        raise EmptyTarget("projection target is empty")
    for t in tgt:
        space._check_index(t)
    out = []
    for x in range(space.n):
        out.append(min(tgt, key=lambda t: (space.dist[x, t], t)))
    return tuple(out)


@dataclass(frozen=True)
class ProjectionReport:
    ok: bool
    worst_ratio: float
    witness: tuple[int, int] | None  # (x in X1, y in X0)


def check_projection_inequality(
    embedding: CommonEmbedding, p0: Sequence[int] | None = None
) -> ProjectionReport:
    """Verify d(p0(i1 x), i0 y) <= 2 d(i1 x, i0 y) for all x, y.

    p0 defaults to the nearest-neighbor projection onto the image of iota0.
    The worst ratio of left to right side is reported; pairs with right side
    zero cannot violate the bound and are excluded from the ratio.
    """
    amb = embedding.ambient
    if p0 is None:
        p0 = nearest_neighbor_projection(amb, embedding.iota0)
    if len(p0) != amb.n:
        raise DimensionMismatch("projection does not cover the ambient space")
    ok = True
    worst = 0.0
    witness: tuple[int, int] | None = None
    for x in range(embedding.space1.n):
        px = p0[embedding.iota1[x]]
        for y in range(embedding.space0.n):
            lhs = float(amb.dist[px, embedding.iota0[y]])
            rhs = float(amb.dist[embedding.iota1[x], embedding.iota0[y]])
            if lhs > 2.0 * rhs:
                ok = False
                witness = (x, y)
            if rhs > 0.0 and lhs / rhs > worst:
                worst = lhs / rhs
                if ok:
                    witness = (x, y)
    return ProjectionReport(ok, worst, witness)


def gp_upper_bound(
    embedding: CommonEmbedding,
    mu0: DiscreteMeasure,
    mu1: DiscreteMeasure,
    support_cap: int = SUPPORT_CAP,
) -> float:
    """Prohorov distance of the pushforwards along one common embedding.

    An upper bound for the infimum over all embeddings.
    """
    nu0 = pushforward(mu0, embedding.iota0, embedding.ambient.n)
    nu1 = pushforward(mu1, embedding.iota1, embedding.ambient.n)
    return prohorov_distance(embedding.ambient, nu0, nu1, support_cap)


# ---------------------------------------------------------------------------
# Interleaving verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionSlack:
    label: str
    slack: float
    witness: tuple | None  # (simplex, r) or (simplex, m, r) at the worst slack


@dataclass(frozen=True)
class InterleavingReport:
    conditions: tuple[ConditionSlack, ...]
    note: str = ""

    @property
    def ok(self) -> bool:
        return all(c.slack >= 0.0 for c in self.conditions)

    def worst(self) -> ConditionSlack:
        return min(self.conditions, key=lambda c: c.slack)


def _diff(rhs: float, lhs: float) -> float:
    s = rhs - lhs
    if math.isnan(s):  # inf on both sides: holds with no margin
        return 0.0
    return s


def _image(pi: Sequence[int], sigma: Simplex) -> Simplex:
    return tuple(sorted(set(pi[v] for v in sigma)))


def _check_map(pi: Sequence[int], size: int, target: int, name: str) -> None:
    if len(pi) != size:
        raise DimensionMismatch(f"{name} is not total on its universe")
    for v in pi:
        if not 0 <= v < target:
            raise IndexOutOfRange(f"{name} maps outside the target universe")


def _simplices(n: int, dim_cap: int):
    for size in range(1, min(dim_cap + 2, n + 1)):
        yield from combinations(range(n), size)


def _condition(
    label: str,
    sigmas,
    rs: Sequence[float],
    lhs: Callable[[Simplex, float], float],
    rhs: Callable[[Simplex, float], float],
) -> ConditionSlack:
    slack = math.inf
    witness = None
    for sigma in sigmas:
        for r in rs:
            s = _diff(rhs(sigma, r), lhs(sigma, r))
            if s < slack:
                slack = s
                witness = (sigma, r)
    return ConditionSlack(label, slack, witness)


def verify_set_interleaving_eps(
    f0: SetBifiltration,
    f1: SetBifiltration,
    pi1: Sequence[int],
    pi0: Sequence[int],
    eps: float,
    r_grid: Sequence[float],
    dim_cap: int = 3,
) -> InterleavingReport:
    """Check the four eps-interleaving inequalities on a radius grid.

    pi1 maps the universe of f0 into that of f1, pi0 the reverse. The value
    conditions ask f0(sigma, r) <= f1(pi1 sigma, r + eps) + eps and
    symmetrically; the union conditions compare against sigma joined with
    its round-trip image at r + 2 eps.
    """
    n0, n1 = f0.universe_size, f1.universe_size
    _check_map(pi1, n0, n1, "pi1")
    _check_map(pi0, n1, n0, "pi0")
    rs = sorted(set(float(r) for r in r_grid))
    sig0 = list(_simplices(n0, dim_cap))
    sig1 = list(_simplices(n1, dim_cap))
    conds = (
        _condition(
            "value under pi1",
            sig0,
            rs,
            lambda s, r: f0.value(s, r),
            lambda s, r: f1.value(_image(pi1, s), r + eps) + eps,
        ),
        _condition(
            "value under pi0",
            sig1,
            rs,
            lambda s, r: f1.value(s, r),
            lambda s, r: f0.value(_image(pi0, s), r + eps) + eps,
        ),
        _condition(
            "union with pi0 pi1",
            sig0,
            rs,
            lambda s, r: f0.value(s, r),
            lambda s, r: f0.value(
                tuple(sorted(set(s) | set(_image(pi0, _image(pi1, s))))),
                r + 2.0 * eps,
            )
            + 2.0 * eps,
        ),
        _condition(
            "union with pi1 pi0",
            sig1,
            rs,
            lambda s, r: f1.value(s, r),
            lambda s, r: f1.value(
                tuple(sorted(set(s) | set(_image(pi1, _image(pi0, s))))),
                r + 2.0 * eps,
            )
            + 2.0 * eps,
        ),
    )
    return InterleavingReport(conds)


def verify_set_interleaving_shift(
    f0: SetBifiltration,
    f1: SetBifiltration,
    pi1: Sequence[int],
    pi0: Sequence[int],
    alpha: ForwardShift,
    beta: ForwardShift,
    r_grid: Sequence[float],
    dim_cap: int = 3,
    swap_composites: bool = False,
) -> InterleavingReport:
    """Check the four shift-interleaving conditions on a radius grid.

    alpha transports presence from f1 to f0 along pi0, beta from f0 to f1
    along pi1: with (m', r') = alpha(f1(sigma, r), r) the first condition is
    f0(pi0 sigma, r') >= m'. The union conditions apply the composites
    alpha-then-beta on the f1 side and beta-then-alpha on the f0 side;
    swap_composites exchanges the two (the composite order is a documented
    interpretation choice).
    """
    n0, n1 = f0.universe_size, f1.universe_size
    _check_map(pi1, n0, n1, "pi1")
    _check_map(pi0, n1, n0, "pi0")
    rs = sorted(set(float(r) for r in r_grid))
    sig0 = list(_simplices(n0, dim_cap))
    sig1 = list(_simplices(n1, dim_cap))
    ab = alpha.then(beta)  # alpha first
    ba = beta.then(alpha)
    comp1 = ba if swap_composites else ab  # f1-side union condition
    comp0 = ab if swap_composites else ba

    def lhs_shift(f, shift):
        def lhs(s, r):
            return shift(f.value(s, r), r)[0]

        return lhs

    def rhs_shift(f_src, f_dst, shift, img):
        # The shift transports f_src's value at (s, r) to a target point
        # (m2, r2); the inequality compares m2 against f_dst at the image.
        def rhs(s, r):
            m2, r2 = shift(f_src.value(s, r), r)
            del m2
            return f_dst.value(img(s), r2)

        return rhs

    conds = (
        _condition(
            "shifted value under pi0",
            sig1,
            rs,
            lhs_shift(f1, alpha),
            rhs_shift(f1, f0, alpha, lambda s: _image(pi0, s)),
        ),
        _condition(
            "shifted value under pi1",
            sig0,
            rs,
            lhs_shift(f0, beta),
            rhs_shift(f0, f1, beta, lambda s: _image(pi1, s)),
        ),
        _condition(
            "shifted union with pi1 pi0",
            sig1,
            rs,
            lhs_shift(f1, comp1),
            rhs_shift(
                f1,
                f1,
                comp1,
                lambda s: tuple(sorted(set(s) | set(_image(pi1, _image(pi0, s))))),
            ),
        ),
        _condition(
            "shifted union with pi0 pi1",
            sig0,
            rs,
            lhs_shift(f0, comp0),
            rhs_shift(
                f0,
                f0,
                comp0,
                lambda s: tuple(sorted(set(s) | set(_image(pi0, _image(pi1, s))))),
            ),
        ),
    )
    return InterleavingReport(conds)


def _presence_slack(K: BifilteredComplex, sigma: Simplex, m: float, r: float):
    stair = K.staircase(sigma)
    if stair is None:
        return -math.inf
    v = stair.value(r)
    if v is None:
        return -math.inf
    return _diff(v, m)


def verify_complex_interleaving(
    K0: BifilteredComplex,
    K1: BifilteredComplex,
    pi1: Sequence[int],
    pi0: Sequence[int],
    alpha: ForwardShift,
    beta: ForwardShift,
    m_grid: Sequence[float],
    r_grid: Sequence[float],
) -> InterleavingReport:
    """Check that vertex maps give a shifted interleaving of two complexes.

    alpha transports presence along pi1 (K0 into K1), beta along pi0. The
    union conditions are the contiguity-style sufficient criterion: sigma
    joined with its round-trip image must be present at the composite shift.
    A failure there is reported as such; it does not prove the complexes are
    not interleaved.
    """
    u0, u1 = K0.universe, K1.universe
    pos0 = {v: i for i, v in enumerate(u0)}
    pos1 = {v: i for i, v in enumerate(u1)}
    if len(pi1) != len(u0) or len(pi0) != len(u1):
        raise DimensionMismatch("vertex maps do not cover the universes")
    for v in pi1:
        if v not in pos1:
            raise IndexOutOfRange(f"pi1 maps outside the target universe: {v}")
    for v in pi0:
        if v not in pos0:
            raise IndexOutOfRange(f"pi0 maps outside the target universe: {v}")

    map1 = {u0[i]: pi1[i] for i in range(len(u0))}
    map0 = {u1[i]: pi0[i] for i in range(len(u1))}
    ab = alpha.then(beta)
    ba = beta.then(alpha)
    ms = sorted(set(float(m) for m in m_grid))
    rs = sorted(set(float(r) for r in r_grid))

    def img(mp, sigma):
        return tuple(sorted(set(mp[v] for v in sigma)))

    def run(label, src, dst, transform, shift):
        slack = math.inf
        witness = None
        for sigma in src.entries:
            tau = transform(sigma)
            for m in ms:
                for r in rs:
                    if not src.present(sigma, m, r):
                        continue
                    m2, r2 = shift(m, r)
                    s = _presence_slack(dst, tau, m2, r2)
                    if s < slack:
                        slack = s
                        witness = (sigma, m, r)
        return ConditionSlack(label, slack, witness)

    conds = (
        run("pi1 into K1", K0, K1, lambda s: img(map1, s), alpha),
        run("pi0 into K0", K1, K0, lambda s: img(map0, s), beta),
        run(
            "union contiguity in K0",
            K0,
            K0,
            lambda s: tuple(sorted(set(s) | set(img(map0, img(map1, s))))),
            ab,
        ),
        run(
            "union contiguity in K1",
            K1,
            K1,
            lambda s: tuple(sorted(set(s) | set(img(map1, img(map0, s))))),
            ba,
        ),
    )
    note = ""
    if any(c.slack < 0 for c in conds[2:]) and all(c.slack >= 0 for c in conds[:2]):
        note = (
            "contiguity check failed; the sufficient criterion does not hold, "
            "which does not refute an interleaving"
        )
    return InterleavingReport(conds, note)


def verify_sandwich(
    intrinsic: BifilteredComplex,
    ambient: BifilteredComplex,
    m_grid: Sequence[float] | None = None,
    r_grid: Sequence[float] | None = None,
) -> InterleavingReport:
    """Check intrinsic_{m,r} <= ambient_{m,r} <= intrinsic_{m,2r}.

    With no grid the check is exact: staircase domination is tested at every
    breakpoint of either side (halved breakpoints included for the doubled
    radius), which covers all (m, r) at once. With grids the literal
    subcomplex checks run at each grid point.
    """
    if set(intrinsic.universe) != set(ambient.universe):
        raise DimensionMismatch("the two complexes have different universes")
    if m_grid is not None or r_grid is not None:
        ms = sorted(set(float(m) for m in m_grid or [1.0]))
        rs = sorted(set(float(r) for r in r_grid or [0.0]))
        slack1 = slack2 = math.inf
        wit1 = wit2 = None
        for m in ms:
            for r in rs:
                inner = intrinsic.complex_at(m, r)
                mid = ambient.complex_at(m, r)
                outer = intrinsic.complex_at(m, 2.0 * r)
                for sigma in inner:
                    if sigma not in mid and slack1 > -1.0:
                        slack1, wit1 = -1.0, (sigma, m, r)
                for sigma in mid:
                    if sigma not in outer and slack2 > -1.0:
                        slack2, wit2 = -1.0, (sigma, m, r)
        if math.isinf(slack1):
            slack1 = 0.0
        if math.isinf(slack2):
            slack2 = 0.0
        return InterleavingReport(
            (
                ConditionSlack("intrinsic inside ambient", slack1, wit1),
                ConditionSlack("ambient inside doubled intrinsic", slack2, wit2),
            )
        )

    slack1 = math.inf
    wit1 = None
    for sigma, stair in intrinsic.entries.items():
        other = ambient.staircase(sigma)
        rs = [s[0] for s in stair.steps]
        if other is not None:
            rs += [s[0] for s in other.steps if s[0] >= stair.start_r]
        for r in sorted(set(rs)):
            v = stair.value(r)
            if v is None:
                continue
            w = other.value(r) if other is not None else None
            s = -math.inf if w is None else _diff(w, v)
            if s < slack1:
                slack1, wit1 = s, (sigma, v, r)
    slack2 = math.inf
    wit2 = None
    for sigma, stair in ambient.entries.items():
        other = intrinsic.staircase(sigma)
        rs = [s[0] for s in stair.steps]
        if other is not None:
            rs += [s[0] / 2.0 for s in other.steps if s[0] / 2.0 >= stair.start_r]
        for r in sorted(set(rs)):
            v = stair.value(r)
            if v is None:
                continue
            w = other.value(2.0 * r) if other is not None else None
            s = -math.inf if w is None else _diff(w, v)
            if s < slack2:
                slack2, wit2 = s, (sigma, v, r)
    return InterleavingReport(
        (
            ConditionSlack("intrinsic inside ambient", slack1, wit1),
            ConditionSlack("ambient inside doubled intrinsic", slack2, wit2),
        )
    )
