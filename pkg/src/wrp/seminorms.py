"""Weighted sup-seminorms on sampled maps.

The seminorm of order l with weight f is the sup over the domain of
|f(x)| times the operator norm of the order-l derivative.  A finite grid
gives a lower bound of that sup, recorded as such; upper bounds must come
from certificates.  Differentials are curried reindexings of the next
tensor, so the reduction identity "order-(l+1) seminorm of the map equals
the order-l seminorm of its differential" holds exactly, not just up to
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, DomainMembershipError, OrderError, PreconditionError, ShapeError
from .jets import (
    ComponentMap,
    JetMap,
    PairMap,
    ScaledMap,
    SumMap,
    difference_map,
    op_norm,
)
from .report import (
    CERTIFIED_UPPER,
    EXACT,
    GRID_LOWER,
    CheckReport,
    bound_report,
    identity_report,
    merge_min_margin,
)
from .spaces import DomainSet, Weight

DEFAULT_PER_AXIS = {1: 11, 2: 9, 3: 5}

GRID_LOWER_KIND = "grid_lower"
CERTIFIED_UPPER_KIND = "certified_upper"


@dataclass(frozen=True)
class SampleGrid:
    """Interior lattice points of a domain plus pinned points."""

    domain: DomainSet
    axes: tuple[tuple[float, ...], ...]
    pinned: tuple[tuple[float, ...], ...]
    points: np.ndarray = field(compare=False)
    spacing: float

    def __len__(self) -> int:
        return len(self.points)


def _assemble(domain, axes, pinned) -> np.ndarray:
    grids = np.meshgrid(*[np.asarray(a) for a in axes], indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=-1)
    keep = [p for p in pts if domain.contains(p)]
    rows = [tuple(p) for p in keep]
    for p in pinned:
        if not domain.contains(np.asarray(p)):
            raise DomainMembershipError(f"pinned point {p} not interior")
        if tuple(p) not in rows:
            rows.append(tuple(p))
    if not rows:
        raise DataError("grid has no interior points")
    return np.array(rows, dtype=float)


def lattice(
    domain: DomainSet,
    per_axis: int | None = None,
    spacing: float | None = None,
    pinned: Sequence[Sequence[float]] = (),
) -> SampleGrid:
    """Uniform lattice intersected with the open domain.

    With ``spacing`` the lattice sits on integer multiples of the spacing
    (boundary multiples drop out since points must be strictly interior);
    with ``per_axis`` that many equispaced interior points are used.
    """
    lo, hi = domain.bounding_box()
    axes = []
    if spacing is not None:
        for a in range(domain.dim):
            k0 = math.ceil(lo[a] / spacing - 1e-12)
            k1 = math.floor(hi[a] / spacing + 1e-12)
            coords = [k * spacing for k in range(k0, k1 + 1) if lo[a] < k * spacing < hi[a]]
            axes.append(tuple(coords))
        step = spacing
    else:
        n = per_axis or DEFAULT_PER_AXIS.get(domain.dim, 5)
        for a in range(domain.dim):
            coords = np.linspace(lo[a], hi[a], n + 2)[1:-1]
            axes.append(tuple(float(c) for c in coords))
        step = float(axes[0][1] - axes[0][0]) if len(axes[0]) > 1 else float(hi[0] - lo[0])
    pin = tuple(tuple(float(v) for v in p) for p in pinned)
    return SampleGrid(domain, tuple(axes), pin, _assemble(domain, axes, pin), step)


def refine(grid: SampleGrid) -> SampleGrid:
    """Insert axis midpoints; the refined point set contains the old one."""
    new_axes = []
    for coords in grid.axes:
        out = [coords[0]]
        for a, b in zip(coords, coords[1:]):
            out.append((a + b) / 2.0)
            out.append(b)
        new_axes.append(tuple(out))
    pts = _assemble(grid.domain, tuple(new_axes), grid.pinned)
    old = {tuple(p) for p in pts}
    extra = [tuple(p) for p in grid.points if tuple(p) not in old]
    if extra:
        pts = np.vstack([pts, np.array(extra)])
    return SampleGrid(grid.domain, tuple(new_axes), grid.pinned, pts, grid.spacing / 2.0)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedFunction:
    """An evaluable C^k map paired with a sample grid and optional
    certified seminorm upper bounds keyed by (weight name, order)."""

    map: JetMap
    grid: SampleGrid
    max_order: int
    certified: tuple[tuple[str, int, float], ...] = ()

    def __post_init__(self):
        if self.grid.domain.dim != self.map.dim:
            raise ShapeError("grid domain and map domain dimensions disagree")
        if self.map.max_order is not None and self.max_order > self.map.max_order:
            raise OrderError("declared max order exceeds what the map provides")

    def certified_bound(self, weight_name: str, ell: int) -> float | None:
        for name, order, bound in self.certified:
            if name == weight_name and order == ell:
                return bound
        return None

    def require_bound(self, weight_name: str, ell: int) -> float:
        b = self.certified_bound(weight_name, ell)
        if b is None:
            raise PreconditionError(
                f"missing certified bound for ({weight_name!r}, {ell})"
            )
        return b

    def differential(self) -> "WeightedFunction":
        return WeightedFunction(self.map.differential(), self.grid, self.max_order - 1)


@dataclass(frozen=True)
class SeminormValue:
    value: float
    kind: str
    witness: tuple[float, ...] | None = None

    def __float__(self) -> float:
        return self.value


def certified_seminorm(wf: WeightedFunction, weight_name: str, ell: int) -> SeminormValue:
    """The author-certified upper bound as a seminorm value."""
    return SeminormValue(wf.require_bound(weight_name, ell), CERTIFIED_UPPER_KIND)


def weighted_seminorm(wf: WeightedFunction, weight: Weight, ell: int) -> SeminormValue:
    """Grid lower bound of sup |f(x)| * |D^l map(x)|, with its witness.

    A grid point where the weight is infinite forces the value to +inf
    unless the tensor vanishes there.
    """
    if ell > wf.max_order:
        raise OrderError(f"order {ell} exceeds max order {wf.max_order}")
    best, witness = 0.0, None
    for x in wf.grid.points:
        w = abs(weight(x))
        t = op_norm(wf.map.tensor(x, ell), wf.grid.domain.space.norm_kind)
        if math.isinf(w):
            v = 0.0 if t == 0.0 else math.inf
        else:
            v = w * t
        if v > best or witness is None:
            best, witness = v, tuple(float(c) for c in x)
        if math.isinf(best):
            break
    return SeminormValue(best, GRID_LOWER_KIND, witness)


def seminorm_axioms_check(
    wf_a: WeightedFunction,
    wf_b: WeightedFunction,
    weight: Weight,
    ell: int,
    alpha: float = -1.7,
    check_id: str = "def:weighted_seminorm",
) -> CheckReport:
    """Absolute homogeneity (to 1e-12) and the triangle inequality on the
    shared grid."""
    na = weighted_seminorm(wf_a, weight, ell).value
    scaled = WeightedFunction(ScaledMap(wf_a.map, alpha), wf_a.grid, wf_a.max_order)
    dev = abs(weighted_seminorm(scaled, weight, ell).value - abs(alpha) * na)
    homog = identity_report(check_id, dev, tolerance=1e-12, detail="homogeneity")
    total = WeightedFunction(SumMap([wf_a.map, wf_b.map]), wf_a.grid,
                             min(wf_a.max_order, wf_b.max_order))
    lhs = weighted_seminorm(total, weight, ell).value
    rhs = na + weighted_seminorm(wf_b, weight, ell).value
    tri = bound_report(
        check_id, lhs, rhs, tolerance=1e-12,
        lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
        detail="triangle inequality on grid values",
    )
    return merge_min_margin(check_id, [homog, tri])


def decomposition_check(
    wf: WeightedFunction,
    weight: Weight,
    ell: int,
    tolerance: float = 1e-12,
    check_id: str = "lem:topologische_Zerlegung_von_CFk",
) -> CheckReport:
    """Order-(l+1) seminorm of the map equals the order-l seminorm of its
    differential (the curry isometry realized on the same grid)."""
    if ell + 1 > wf.max_order:
        raise OrderError("need one order of headroom for the differential")
    lhs = weighted_seminorm(wf, weight, ell + 1).value
    rhs = weighted_seminorm(wf.differential(), weight, ell).value
    return identity_report(
        check_id,
        abs(lhs - rhs),
        tolerance=tolerance,
        detail=f"reduction to lower order at l = {ell}",
    )


def pair_split(wf: WeightedFunction) -> tuple[WeightedFunction, WeightedFunction]:
    """Split a map with a declared two-block codomain into its components."""
    blocks = wf.map.out_blocks
    if blocks is None or len(blocks) != 2:
        raise ShapeError("codomain is not a declared product of two blocks")
    n1 = blocks[0]
    first = ComponentMap(wf.map, 0, n1)
    second = ComponentMap(wf.map, n1, n1 + blocks[1])
    return (
        WeightedFunction(first, wf.grid, wf.max_order),
        WeightedFunction(second, wf.grid, wf.max_order),
    )


def pair_split_check(
    wf: WeightedFunction,
    weight: Weight,
    ell: int,
    check_id: str = "lem:gewichtete_Abb_Produktisomorphie-endl",
) -> CheckReport:
    """Splitting is an isometric isomorphism: the seminorm is the max of
    the component seminorms and recombination is bit-exact."""
    a, b = pair_split(wf)
    whole = weighted_seminorm(wf, weight, ell).value
    parts = max(
        weighted_seminorm(a, weight, ell).value,
        weighted_seminorm(b, weight, ell).value,
    )
    norm_id = identity_report(
        check_id, abs(whole - parts), tolerance=0.0, detail="max of block seminorms"
    )
    recombined = PairMap([a.map, b.map])
    for x in wf.grid.points[:: max(1, len(wf.grid.points) // 5)]:
        for order in range(min(ell + 1, wf.max_order + 1)):
            if not np.array_equal(
                recombined.tensor(x, order).entries, wf.map.tensor(x, order).entries
            ):
                return identity_report(
                    check_id, math.inf, tolerance=0.0,
                    detail="recombination is not bit-exact",
                )
    return norm_id


def norm_comparison_1U(
    phi: WeightedFunction,
    psi: WeightedFunction,
    weight: Weight,
    d: float,
    pointwise_id: str = "lem:est_1-0-norm_f-0-norm",
    aggregate_id: str = "est:1-0-norm_f-0-norm_spezielles-f",
) -> list[CheckReport]:
    """Pointwise and aggregate comparison of the unweighted distance with
    the f-weighted one, given inf |f| >= max(1/d, 1)."""
    threshold = max(1.0 / d, 1.0)
    if weight.certified_inf is None or weight.certified_inf < threshold:
        raise PreconditionError(
            f"weight {weight.name!r} needs certified inf >= {threshold}"
        )
    diff = difference_map(phi.map, psi.map)
    dwf = WeightedFunction(diff, phi.grid, 0)
    fnorm = weighted_seminorm(dwf, weight, 0).value
    sup_norm = phi.grid.domain.space.norm
    pointwise = []
    unweighted = 0.0
    for x in phi.grid.points:
        gap = sup_norm(diff.value(x))
        unweighted = max(unweighted, gap)
        w = abs(weight(x))
        bound = math.inf if w == 0 else fnorm / w
        pointwise.append(
            bound_report(
                pointwise_id, gap, bound, tolerance=1e-12,
                lhs_provenance=EXACT, rhs_provenance=GRID_LOWER,
                witness=tuple(float(c) for c in x),
            )
        )
    agg = bound_report(
        aggregate_id,
        unweighted,
        min(d, 1.0) * fnorm,
        tolerance=1e-12,
        lhs_provenance=GRID_LOWER,
        rhs_provenance=GRID_LOWER,
        detail="unweighted grid sup vs min(d,1) times the weighted one",
    )
    return [merge_min_margin(pointwise_id, pointwise), agg]
