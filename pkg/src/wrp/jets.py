"""Exact derivative calculus at desk scale.

Maps are closed-form built-ins (polynomial, trigonometric-polynomial,
affine and combinators) whose derivative tensors of every order are coded
symbolically, so inequality margins are limited only by float rounding.
Operator norms are taken with the sup norm on every argument and computed
exactly by sign-vector enumeration: a multilinear map restricted to one
argument is linear, hence attains its sup over the unit ball at a vertex.
Finite differences appear only as oracles, never in the main path.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DomainMembershipError,
    EnumerationBudgetError,
    OrderError,
    PreconditionError,
    ShapeError,
    UnsupportedNormError,
)
from .report import CheckReport, bound_report, identity_report
from .spaces import EUCLIDEAN, SUP, DomainSet, box, product_box

ENUM_BUDGET = 16
FD_STEP_ORDER1 = 1e-4
FD_STEP_ORDER2 = 1e-3


class AsymmetryWarning(UserWarning):
    """A derivative tensor came out asymmetric beyond 1e-9 before averaging."""


@dataclass(frozen=True)
class MultilinearMap:
    """A dense real multilinear map.

    ``entries`` has the output axes first (``out_rank`` of them, so values
    may themselves be operators) followed by one axis per argument.
    Currying is pure reindexing, realizing the canonical isometry between
    (l+1)-linear maps and l-linear maps into operators.
    """

    entries: np.ndarray = field(compare=False)
    out_rank: int = 1

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))
        if self.out_rank < 1 or self.out_rank > self.entries.ndim:
            raise ShapeError("out_rank out of range")

    @property
    def order(self) -> int:
        return self.entries.ndim - self.out_rank

    @property
    def out_shape(self) -> tuple[int, ...]:
        return self.entries.shape[: self.out_rank]

    @property
    def in_dims(self) -> tuple[int, ...]:
        return self.entries.shape[self.out_rank:]

    def apply(self, *args) -> np.ndarray:
        if len(args) != self.order:
            raise ShapeError(f"expected {self.order} arguments, got {len(args)}")
        v = self.entries
        for a in args:
            v = np.tensordot(v, np.asarray(a, dtype=float), axes=(self.out_rank, 0))
        return v


def curry_last(t: MultilinearMap) -> MultilinearMap:
    """Turn the last argument slot into an output axis (exact reindexing)."""
    if t.order < 1:
        raise OrderError("cannot curry a map of order 0")
    return MultilinearMap(np.moveaxis(t.entries, -1, t.out_rank), t.out_rank + 1)


def uncurry_last(t: MultilinearMap) -> MultilinearMap:
    """Inverse of :func:`curry_last`."""
    if t.out_rank < 2:
        raise OrderError("nothing to uncurry")
    return MultilinearMap(np.moveaxis(t.entries, t.out_rank - 1, -1), t.out_rank - 1)


def contract_last(t: MultilinearMap, h) -> MultilinearMap:
    """Fix the last argument to ``h`` (the contraction written T¬h)."""
    if t.order < 1:
        raise OrderError("cannot contract a map of order 0")
    return MultilinearMap(
        np.tensordot(t.entries, np.asarray(h, dtype=float), axes=(t.entries.ndim - 1, 0)),
        t.out_rank,
    )


def _sign_vectors(d: int) -> list[np.ndarray]:
    # first component pinned to +1: flipping one whole argument flips only
    # the sign of the output, which the absolute value discards
    if d == 1:
        return [np.ones(1)]
    return [
        np.array((1.0,) + rest)
        for rest in itertools.product((1.0, -1.0), repeat=d - 1)
    ]


def op_norm(t: MultilinearMap, norm_kind: str = SUP) -> float:
    """Exact operator norm with the chosen norm on all arguments/outputs.

    Operator-valued outputs are uncurried first, so the norm is invariant
    under curry round trips bit for bit.
    """
    while t.out_rank > 1:
        t = uncurry_last(t)
    e = t.entries
    if norm_kind == EUCLIDEAN:
        if t.order == 0:
            return float(np.linalg.norm(e))
        if t.order == 1:
            return float(np.linalg.norm(e, 2))
        raise UnsupportedNormError("euclidean norms only for order <= 1")
    if norm_kind != SUP:
        raise UnsupportedNormError(f"unknown norm kind {norm_kind!r}")
    if t.order == 0:
        return float(np.max(np.abs(e))) if e.size else 0.0
    if sum(t.in_dims) > ENUM_BUDGET:
        raise EnumerationBudgetError(
            f"total argument dimension {sum(t.in_dims)} exceeds {ENUM_BUDGET}"
        )
    # enumerate sign vertices of all arguments but the last; the last is
    # optimized analytically by an absolute row sum
    lead = t.in_dims[:-1]
    best = 0.0
    for signs in itertools.product(*[_sign_vectors(d) for d in lead]):
        v = e
        for s in signs:
            v = np.tensordot(v, s, axes=(1, 0))
        best = max(best, float(np.max(np.abs(v).sum(axis=1))))
    return best


def opnorm_inf(a: np.ndarray) -> float:
    """Matrix norm induced by the sup norm: maximum absolute row sum."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return float(np.max(np.abs(a).sum(axis=1))) if a.size else 0.0


def symmetrize(entries: np.ndarray, out_rank: int) -> tuple[np.ndarray, float]:
    """Average over argument-axis permutations; returns (tensor, asymmetry)."""
    order = entries.ndim - out_rank
    if order < 2:
        return entries, 0.0
    dims = entries.shape[out_rank:]
    if len(set(dims)) != 1:
        return entries, 0.0  # mixed axes cannot be permuted
    acc = np.zeros_like(entries)
    perms = list(itertools.permutations(range(order)))
    base = tuple(range(out_rank))
    for p in perms:
        acc += np.transpose(entries, base + tuple(out_rank + i for i in p))
    acc /= len(perms)
    asym = float(np.max(np.abs(entries - acc))) if entries.size else 0.0
    return acc, asym


def _symmetrized(entries: np.ndarray, out_rank: int) -> np.ndarray:
    sym, asym = symmetrize(entries, out_rank)
    if asym > 1e-9:
        warnings.warn(
            f"derivative tensor asymmetric by {asym:.3e}", AsymmetryWarning
        )
    return sym


@dataclass(frozen=True)
class Jet:
    """Value and derivative tensors of one map at one point, orders 0..k."""

    point: np.ndarray = field(compare=False)
    tensors: tuple[MultilinearMap, ...]

    @property
    def order(self) -> int:
        return len(self.tensors) - 1

    @property
    def value(self) -> np.ndarray:
        return self.tensors[0].entries


def set_partitions(n: int):
    """All partitions of range(n); blocks sorted, first elements increasing."""
    if n == 0:
        yield ()
        return
    for part in set_partitions(n - 1):
        last = n - 1
        for i in range(len(part)):
            yield part[:i] + (part[i] + (last,),) + part[i + 1:]
        yield part + ((last,),)


def compose_tensor(
    outer: Sequence[MultilinearMap],
    inner: Sequence[MultilinearMap],
    ell: int,
) -> MultilinearMap:
    """Derivative tensor of a composition from the factors' tensors.

    ``outer[b]`` is the order-b tensor of the outer map at the inner value,
    ``inner[b]`` the order-b tensor of the inner map at the base point.
    Summing the block-contracted terms over all set partitions of the
    argument slots yields the (symmetric) chain-rule tensor.
    """
    if ell == 0:
        return outer[0]
    o = outer[0].out_rank
    m = inner[1].in_dims[0]
    out_shape = outer[0].out_shape
    total = np.zeros(out_shape + (m,) * ell)
    for part in set_partitions(ell):
        v = outer[len(part)].entries
        for block in part:
            v = np.tensordot(v, inner[len(block)].entries, axes=(o, 0))
        # axes are now: outputs, then the blocks' argument axes in order
        slot_order = [s for block in part for s in block]
        perm = list(range(o)) + [o + slot_order.index(s) for s in range(ell)]
        total += np.transpose(v, perm)
    return MultilinearMap(_symmetrized(total, o), o)


def compose_jet(outer: Jet, inner: Jet, order: int) -> Jet:
    tensors = [
        compose_tensor(outer.tensors, inner.tensors, ell)
        for ell in range(order + 1)
    ]
    return Jet(inner.point, tuple(tensors))


# ---------------------------------------------------------------------------
# maps with exact jets


class JetMap:
    """A C^k map on a box/ball domain with exact derivative tensors."""

    def __init__(
        self,
        domain: DomainSet,
        out_shape: tuple[int, ...],
        max_order: int | None = None,
        desc: dict | None = None,
        in_blocks: tuple[int, ...] | None = None,
        out_blocks: tuple[int, ...] | None = None,
    ):
        self.domain = domain
        self.out_shape = tuple(out_shape)
        self.max_order = max_order
        self.desc = desc
        self.in_blocks = in_blocks
        self.out_blocks = out_blocks

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def out_dim(self) -> int:
        return int(np.prod(self.out_shape))

    def _check_order(self, ell: int):
        if ell < 0:
            raise OrderError("negative derivative order")
        if self.max_order is not None and ell > self.max_order:
            raise OrderError(
                f"order {ell} exceeds declared max order {self.max_order}"
            )

    def tensor(self, x, ell: int) -> MultilinearMap:
        raise NotImplementedError

    def value(self, x) -> np.ndarray:
        return self.tensor(x, 0).entries

    def jet(self, x, order: int) -> Jet:
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        return Jet(x, tuple(self.tensor(x, ell) for ell in range(order + 1)))

    def differential(self) -> "DifferentialMap":
        return DifferentialMap(self)


class ConstMap(JetMap):
    def __init__(self, domain: DomainSet, value):
        c = np.asarray(value, dtype=float)
        super().__init__(domain, c.shape, desc={"kind": "const", "c": c.tolist()})
        self.c = c

    def tensor(self, x, ell):
        self._check_order(ell)
        if ell == 0:
            return MultilinearMap(self.c.copy(), len(self.out_shape))
        return MultilinearMap(
            np.zeros(self.out_shape + (self.dim,) * ell), len(self.out_shape)
        )


class AffineMap(JetMap):
    def __init__(self, domain: DomainSet, a, b=None):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[1] != domain.dim:
            raise ShapeError("matrix shape must be (out, dim)")
        b = np.zeros(a.shape[0]) if b is None else np.asarray(b, dtype=float)
        super().__init__(
            domain,
            (a.shape[0],),
            desc={"kind": "affine", "a": a.tolist(), "b": b.tolist()},
        )
        self.a, self.b = a, b

    def tensor(self, x, ell):
        self._check_order(ell)
        if ell == 0:
            return MultilinearMap(self.a @ np.asarray(x, float) + self.b, 1)
        if ell == 1:
            return MultilinearMap(self.a.copy(), 1)
        return MultilinearMap(np.zeros(self.out_shape + (self.dim,) * ell), 1)


def identity_map(domain: DomainSet) -> AffineMap:
    return AffineMap(domain, np.eye(domain.dim))


def zero_map(domain: DomainSet, out_dim: int) -> ConstMap:
    return ConstMap(domain, np.zeros(out_dim))


class PolynomialMap(JetMap):
    """sum over terms of coef * x^powers, with exact tensors of any order."""

    def __init__(self, domain: DomainSet, terms, in_blocks=None):
        terms = tuple(
            (np.asarray(c, dtype=float), tuple(int(p) for p in pw))
            for c, pw in terms
        )
        if not terms:
            raise ShapeError("polynomial needs at least one term")
        n = terms[0][0].shape[0]
        for c, pw in terms:
            if c.shape != (n,) or len(pw) != domain.dim:
                raise ShapeError("inconsistent polynomial term shapes")
        desc = {
            "kind": "poly",
            "terms": [{"coef": c.tolist(), "powers": list(p)} for c, p in terms],
        }
        super().__init__(domain, (n,), desc=desc, in_blocks=in_blocks)
        self.terms = terms

    def tensor(self, x, ell):
        self._check_order(ell)
        x = np.asarray(x, dtype=float)
        m, n = self.dim, self.out_shape[0]
        ent = np.zeros((n,) + (m,) * ell)
        if ell == 0:
            for c, pw in self.terms:
                ent += c * float(np.prod(x ** np.array(pw)))
            return MultilinearMap(ent, 1)
        for c, pw in self.terms:
            if sum(pw) < ell:
                continue
            for jidx in itertools.product(range(m), repeat=ell):
                beta = [0] * m
                for j in jidx:
                    beta[j] += 1
                if any(beta[a] > pw[a] for a in range(m)):
                    continue
                scale = 1.0
                for a in range(m):
                    for k in range(beta[a]):
                        scale *= pw[a] - k
                    scale *= x[a] ** (pw[a] - beta[a])
                ent[(slice(None),) + jidx] += c * scale
        return MultilinearMap(ent, 1)


class TrigPolynomialMap(JetMap):
    """sum over terms of coef * sin(freq . x + phase)."""

    def __init__(self, domain: DomainSet, terms, in_blocks=None):
        terms = tuple(
            (np.asarray(c, dtype=float), np.asarray(u, dtype=float), float(p))
            for c, u, p in terms
        )
        n = terms[0][0].shape[0]
        for c, u, _ in terms:
            if c.shape != (n,) or u.shape != (domain.dim,):
                raise ShapeError("inconsistent trig term shapes")
        desc = {
            "kind": "trig",
            "terms": [
                {"coef": c.tolist(), "freq": u.tolist(), "phase": p}
                for c, u, p in terms
            ],
        }
        super().__init__(domain, (n,), desc=desc, in_blocks=in_blocks)
        self.terms = terms

    def tensor(self, x, ell):
        self._check_order(ell)
        x = np.asarray(x, dtype=float)
        ent = np.zeros(self.out_shape + (self.dim,) * ell)
        for c, u, phase in self.terms:
            s = math.sin(float(np.dot(u, x)) + phase + ell * math.pi / 2.0)
            block = c
            for _ in range(ell):
                block = np.multiply.outer(block, u)
            ent += s * block
        return MultilinearMap(ent, 1)


class SumMap(JetMap):
    def __init__(self, parts: Sequence[JetMap]):
        parts = tuple(parts)
        first = parts[0]
        if any(p.out_shape != first.out_shape or p.dim != first.dim for p in parts):
            raise ShapeError("summands must share domain and codomain")
        orders = [p.max_order for p in parts if p.max_order is not None]
        desc = None
        if all(p.desc is not None for p in parts):
            desc = {"kind": "sum", "parts": [p.desc for p in parts]}
        super().__init__(
            first.domain,
            first.out_shape,
            min(orders) if orders else None,
            desc=desc,
            in_blocks=first.in_blocks,
        )
        self.parts = parts

    def tensor(self, x, ell):
        self._check_order(ell)
        ts = [p.tensor(x, ell) for p in self.parts]
        ent = ts[0].entries.copy()
        for t in ts[1:]:
            ent += t.entries
        return MultilinearMap(ent, ts[0].out_rank)


class ScaledMap(JetMap):
    def __init__(self, base: JetMap, c: float):
        desc = None
        if base.desc is not None:
            desc = {"kind": "scaled", "c": float(c), "base": base.desc}
        super().__init__(
            base.domain, base.out_shape, base.max_order, desc=desc,
            in_blocks=base.in_blocks, out_blocks=base.out_blocks,
        )
        self.base, self.c = base, float(c)

    def tensor(self, x, ell):
        t = self.base.tensor(x, ell)
        return MultilinearMap(self.c * t.entries, t.out_rank)


def difference_map(a: JetMap, b: JetMap) -> SumMap:
    return SumMap([a, ScaledMap(b, -1.0)])


class PairMap(JetMap):
    """Stack the outputs of maps sharing a domain; codomain blocks recorded."""

    def __init__(self, parts: Sequence[JetMap]):
        parts = tuple(parts)
        if any(len(p.out_shape) != 1 for p in parts):
            raise ShapeError("can only pair vector-valued maps")
        orders = [p.max_order for p in parts if p.max_order is not None]
        desc = None
        if all(p.desc is not None for p in parts):
            desc = {"kind": "pair", "parts": [p.desc for p in parts]}
        super().__init__(
            parts[0].domain,
            (sum(p.out_dim for p in parts),),
            min(orders) if orders else None,
            desc=desc,
            out_blocks=tuple(p.out_dim for p in parts),
        )
        self.parts = parts

    def tensor(self, x, ell):
        self._check_order(ell)
        return MultilinearMap(
            np.concatenate([p.tensor(x, ell).entries for p in self.parts], axis=0), 1
        )


class ComponentMap(JetMap):
    """An output-coordinate slice of a vector-valued map."""

    def __init__(self, base: JetMap, lo: int, hi: int):
        if len(base.out_shape) != 1 or not (0 <= lo < hi <= base.out_dim):
            raise ShapeError("bad component slice")
        desc = None
        if base.desc is not None:
            desc = {"kind": "component", "lo": lo, "hi": hi, "base": base.desc}
        super().__init__(base.domain, (hi - lo,), base.max_order, desc=desc)
        self.base, self.lo_idx, self.hi_idx = base, lo, hi

    def tensor(self, x, ell):
        t = self.base.tensor(x, ell)
        return MultilinearMap(t.entries[self.lo_idx:self.hi_idx], 1)


class ComposeMap(JetMap):
    """Composition outer(inner(x)) with chain-rule jets over set partitions."""

    def __init__(self, outer: JetMap, inner: JetMap):
        if len(inner.out_shape) != 1 or inner.out_dim != outer.dim:
            raise ShapeError("inner codomain must match outer domain")
        orders = [m.max_order for m in (outer, inner) if m.max_order is not None]
        super().__init__(
            inner.domain,
            outer.out_shape,
            min(orders) if orders else None,
            out_blocks=outer.out_blocks,
        )
        self.outer, self.inner = outer, inner

    def jet(self, x, order):
        self._check_order(order)
        inner_jet = self.inner.jet(x, order)
        outer_jet = self.outer.jet(inner_jet.value, order)
        return compose_jet(outer_jet, inner_jet, order)

    def tensor(self, x, ell):
        return self.jet(x, ell).tensors[ell]

    def value(self, x):
        return self.outer.value(self.inner.value(x))


class DifferentialMap(JetMap):
    """The Fréchet differential as an operator-valued map.

    Its order-l tensor is the curried order-(l+1) tensor of the base map,
    a pure reindexing, so reduction-to-lower-order identities hold bit for
    bit.
    """

    def __init__(self, base: JetMap):
        super().__init__(
            base.domain,
            base.out_shape + (base.dim,),
            None if base.max_order is None else base.max_order - 1,
        )
        self.base = base

    def tensor(self, x, ell):
        self._check_order(ell)
        return curry_last(self.base.tensor(x, ell + 1))


class PartialD2Map(JetMap):
    """The partial differential in the second block of a two-block map.

    Tensors are slices of the base map's next-order tensors: the operator
    slot is the last derivative direction restricted to the second block.
    """

    def __init__(self, base: JetMap):
        if base.in_blocks is None or len(base.in_blocks) != 2:
            raise ShapeError("base map must declare two input blocks")
        if len(base.out_shape) != 1:
            raise ShapeError("base map must be vector-valued")
        self.m1, self.m2 = base.in_blocks
        super().__init__(
            base.domain,
            base.out_shape + (self.m2,),
            None if base.max_order is None else base.max_order - 1,
            in_blocks=base.in_blocks,
        )
        self.base = base

    def tensor(self, x, ell):
        self._check_order(ell)
        t = self.base.tensor(x, ell + 1)
        sliced = t.entries[..., self.m1:]
        return MultilinearMap(np.moveaxis(sliced, -1, 1), 2)


class BilinearPairMap(JetMap):
    """x -> b(left(x), right(x)) for a constant bilinear b, Leibniz jets."""

    def __init__(self, b: np.ndarray, left: JetMap, right: JetMap):
        b = np.asarray(b, dtype=float)
        if b.ndim != 3 or b.shape[1] != left.out_dim or b.shape[2] != right.out_dim:
            raise ShapeError("bilinear tensor shape must be (out, left, right)")
        if left.dim != right.dim:
            raise ShapeError("factors must share a domain")
        orders = [m.max_order for m in (left, right) if m.max_order is not None]
        super().__init__(
            left.domain, (b.shape[0],), min(orders) if orders else None
        )
        self.b, self.left, self.right = b, left, right

    def tensor(self, x, ell):
        self._check_order(ell)
        lj = self.left.jet(x, ell)
        rj = self.right.jet(x, ell)
        m = self.dim
        ent = np.zeros(self.out_shape + (m,) * ell)
        for r in range(ell + 1):
            for subset in itertools.combinations(range(ell), r):
                v = np.tensordot(self.b, lj.tensors[r].entries, axes=(1, 0))
                v = np.tensordot(v, rj.tensors[ell - r].entries, axes=(1, 0))
                slots = list(subset) + [s for s in range(ell) if s not in subset]
                perm = [0] + [1 + slots.index(s) for s in range(ell)]
                ent += np.transpose(v, perm)
        return MultilinearMap(_symmetrized(ent, 1), 1)


class MultilinearPairMap(JetMap):
    """x -> b(f_1(x), ..., f_k(x)) for a constant k-linear b."""

    def __init__(self, b: np.ndarray, maps: Sequence[JetMap]):
        b = np.asarray(b, dtype=float)
        maps = tuple(maps)
        if b.ndim != len(maps) + 1:
            raise ShapeError("k-linear tensor rank must be k + 1")
        for j, mp in enumerate(maps):
            if b.shape[1 + j] != mp.out_dim:
                raise ShapeError(f"slot {j} dimension mismatch")
        orders = [m.max_order for m in maps if m.max_order is not None]
        super().__init__(
            maps[0].domain, (b.shape[0],), min(orders) if orders else None
        )
        self.b, self.maps = b, maps

    def tensor(self, x, ell):
        self._check_order(ell)
        jets = [mp.jet(x, ell) for mp in self.maps]
        k = len(self.maps)
        m = self.dim
        ent = np.zeros(self.out_shape + (m,) * ell)
        for assign in itertools.product(range(k), repeat=ell):
            blocks = [
                [s for s in range(ell) if assign[s] == j] for j in range(k)
            ]
            v = self.b
            for j in range(k):
                v = np.tensordot(v, jets[j].tensors[len(blocks[j])].entries, axes=(1, 0))
            slots = [s for block in blocks for s in block]
            perm = [0] + [1 + slots.index(s) for s in range(ell)]
            ent += np.transpose(v, perm)
        return MultilinearMap(_symmetrized(ent, 1), 1)


class PairedDerivativeMap(JetMap):
    """(u, e) -> pairing(g(u), e) for an operator-valued g, linear in e.

    With g the second-block partial differential of a two-block map this
    realizes the auxiliary maps used to push superposition through higher
    orders; with g a full differential it realizes the restricted
    directional-derivative map.  ``pairing`` is "evaluate" (apply the
    operator to a vector) or "compose" (compose with another operator).
    """

    def __init__(self, g: JetMap, pairing: str, e_box_radius: float,
                 compose_cols: int | None = None):
        if len(g.out_shape) != 2:
            raise ShapeError("g must be operator-valued, out_shape (p, q)")
        if pairing not in ("evaluate", "compose"):
            raise ShapeError(f"unknown pairing {pairing!r}")
        p, q = g.out_shape
        if pairing == "evaluate":
            e_shape: tuple[int, ...] = (q,)
            out_shape: tuple[int, ...] = (p,)
        else:
            s = compose_cols if compose_cols is not None else g.domain.dim
            e_shape = (q, s)
            out_shape = (p, s)
        me = int(np.prod(e_shape))
        dom = product_box(
            g.domain.as_box(), box([-e_box_radius] * me, [e_box_radius] * me)
        )
        super().__init__(
            dom,
            out_shape,
            g.max_order,
            in_blocks=(g.domain.dim, me),
        )
        self.g, self.pairing, self.e_shape = g, pairing, e_shape

    def _split(self, point):
        point = np.asarray(point, dtype=float)
        mu = self.g.domain.dim
        return point[:mu], point[mu:]

    def _pair(self, a: np.ndarray, e: np.ndarray) -> np.ndarray:
        if self.pairing == "evaluate":
            return a @ e
        return a @ e.reshape(self.e_shape)

    def value(self, point):
        u, e = self._split(point)
        return self._pair(self.g.value(u), e)

    def tensor(self, point, ell):
        self._check_order(ell)
        u, e = self._split(point)
        mu = self.g.domain.dim
        me = int(np.prod(self.e_shape))
        m = mu + me
        o = len(self.out_shape)
        if ell == 0:
            return MultilinearMap(self.value(point), o)
        ent = np.zeros(self.out_shape + (m,) * ell)
        out_sl = (slice(None),) * o
        # all argument slots in the u block
        tl = self.g.tensor(u, ell).entries  # (p, q) + (mu,)*ell
        if self.pairing == "evaluate":
            t1 = np.tensordot(tl, e, axes=(1, 0))  # (p,) + (mu,)*ell
        else:
            em = e.reshape(self.e_shape)
            t1 = np.tensordot(tl, em, axes=(1, 0))  # (p,) + (mu,)*ell + (s,)
            t1 = np.moveaxis(t1, -1, 1)  # (p, s) + (mu,)*ell
        ent[out_sl + (slice(0, mu),) * ell] = t1
        # exactly one argument slot in the e block
        tl1 = self.g.tensor(u, ell - 1).entries  # (p, q) + (mu,)*(ell-1)
        for j in range(ell):
            for kappa in range(me):
                if self.pairing == "evaluate":
                    piece = tl1[:, kappa, ...]
                else:
                    qi, si = divmod(kappa, self.e_shape[1])
                    piece = np.zeros(self.out_shape + (mu,) * (ell - 1))
                    piece[:, si, ...] = tl1[:, qi, ...]
                idx = (
                    out_sl
                    + (slice(0, mu),) * j
                    + (mu + kappa,)
                    + (slice(0, mu),) * (ell - 1 - j)
                )
                ent[idx] = piece
        return MultilinearMap(ent, o)


def xi2_build(xi: JetMap, pairing: str, e_box_radius: float = 1.0) -> PairedDerivativeMap:
    """The auxiliary map (x, y, e) -> pairing(d2 xi(x, y), e).

    For the composition pairing the operator slot holds elements of
    L(X, Y) with X the first input block of xi.
    """
    if xi.in_blocks is None or len(xi.in_blocks) != 2:
        raise ShapeError("xi must declare two input blocks")
    return PairedDerivativeMap(
        PartialD2Map(xi), pairing, e_box_radius, compose_cols=xi.in_blocks[0]
    )


# ---------------------------------------------------------------------------
# partial-derivative views of two-block maps


def partial1_tensor(xi: JetMap, point, ell: int) -> MultilinearMap:
    """The order-l derivative in the first block only (all axes sliced)."""
    if xi.in_blocks is None or len(xi.in_blocks) != 2:
        raise ShapeError("map must declare two input blocks")
    m1 = xi.in_blocks[0]
    t = xi.tensor(point, ell)
    ent = t.entries
    for axis in range(t.out_rank, ent.ndim):
        ent = np.take(ent, range(m1), axis=axis)
    return MultilinearMap(ent, t.out_rank)


def mixed_partial1_tensor(xi: JetMap, point, ell: int) -> MultilinearMap:
    """The (l+1)-linear map (h_1..h_l, y) -> d1^l xi(x, .)(h)(y).

    For maps linear in the second argument this is independent of the
    second coordinate of ``point``; it is the order-(l+1) tensor with l
    axes restricted to the first block and the last to the second.
    """
    if xi.in_blocks is None or len(xi.in_blocks) != 2:
        raise ShapeError("map must declare two input blocks")
    m1, _ = xi.in_blocks
    t = xi.tensor(point, ell + 1)
    ent = t.entries
    for axis in range(t.out_rank, ent.ndim - 1):
        ent = np.take(ent, range(m1), axis=axis)
    ent = np.take(ent, range(m1, m1 + xi.in_blocks[1]), axis=ent.ndim - 1)
    return MultilinearMap(ent, t.out_rank)


# ---------------------------------------------------------------------------
# finite differences (oracle only)


def fd_jet(map_: JetMap, x, order: int, h: float | None = None) -> Jet:
    """Central-difference jet with O(h^2) error; stencil must stay inside."""
    if order > 2:
        raise OrderError("finite differences provided for orders <= 2")
    x = np.asarray(x, dtype=float)
    m = map_.dim

    def val(p):
        if not map_.domain.contains(p):
            raise DomainMembershipError(
                f"finite-difference stencil point {p.tolist()} leaves the domain"
            )
        return map_.value(p)

    tensors = [MultilinearMap(val(x), len(map_.out_shape))]
    if order >= 1:
        h1 = FD_STEP_ORDER1 if h is None else h
        cols = []
        for j in range(m):
            e = np.zeros(m)
            e[j] = h1
            cols.append((val(x + e) - val(x - e)) / (2 * h1))
        tensors.append(
            MultilinearMap(np.stack(cols, axis=-1), len(map_.out_shape))
        )
    if order >= 2:
        h2 = FD_STEP_ORDER2 if h is None else h
        f0 = val(x)
        ent = np.zeros(map_.out_shape + (m, m))
        for i in range(m):
            ei = np.zeros(m)
            ei[i] = h2
            ent[..., i, i] = (val(x + ei) - 2 * f0 + val(x - ei)) / h2**2
            for j in range(i + 1, m):
                ej = np.zeros(m)
                ej[j] = h2
                v = (
                    val(x + ei + ej)
                    - val(x + ei - ej)
                    - val(x - ei + ej)
                    + val(x - ei - ej)
                ) / (4 * h2**2)
                ent[..., i, j] = v
                ent[..., j, i] = v
        tensors.append(MultilinearMap(ent, len(map_.out_shape)))
    return Jet(x, tuple(tensors))


def validate_jet_map(map_: JetMap, rng: np.random.Generator, points: int = 3,
                     rtol: float = 1e-4):
    """Ingest check: coded tensors agree with central differences."""
    if map_.max_order is not None and map_.max_order < 1:
        return  # value-only map, nothing differentiable to cross-check
    lo, hi = map_.domain.bounding_box()
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    tried = 0
    while tried < points:
        x = mid + 0.5 * half * rng.uniform(-1, 1, size=map_.dim)
        if not map_.domain.contains(x):
            continue
        tried += 1
        top = 1 if (map_.max_order is not None and map_.max_order < 2) else 2
        approx = fd_jet(map_, x, top)
        for ell in range(1, top + 1):
            exact = map_.tensor(x, ell)
            scale = max(1.0, float(np.max(np.abs(exact.entries))))
            err = float(np.max(np.abs(exact.entries - approx.tensors[ell].entries)))
            if err > rtol * scale:
                raise PreconditionError(
                    f"jet of order {ell} disagrees with finite differences "
                    f"by {err:.3e} at {x.tolist()}"
                )


# ---------------------------------------------------------------------------
# identities and estimates for maps linear in the second argument


def linear2_identities_check(
    xi: JetMap,
    point,
    direction1,
    direction2,
    ell: int,
    g: JetMap | None = None,
    b: np.ndarray | None = None,
    fd_step: float = 1e-5,
    tol: float = 1e-8,
) -> list[CheckReport]:
    """Check the derivative identity and norm estimates of a two-block map
    linear in its second argument; with ``xi = b(g(x), y)`` also the
    factored-form estimates."""
    if xi.in_blocks is None or len(xi.in_blocks) != 2:
        raise ShapeError("map must declare two input blocks")
    m1, m2 = xi.in_blocks
    point = np.asarray(point, dtype=float)
    x, y = point[:m1], point[m1:]
    h1 = np.asarray(direction1, dtype=float)
    h2 = np.asarray(direction2, dtype=float)

    # linearity probe in the second argument
    for alpha in (0.5, -1.25):
        probe = np.concatenate([x, alpha * y])
        dev = float(
            np.max(np.abs(xi.value(probe) - alpha * xi.value(point)))
        )
        if dev > 1e-9 * max(1.0, float(np.max(np.abs(xi.value(point))))):
            raise PreconditionError(
                f"map is not linear in its second argument (deviation {dev:.2e})"
            )

    reports = []

    # zero section: d1^l xi(x, 0) = 0
    zero_pt = np.concatenate([x, np.zeros(m2)])
    dev0 = float(np.max(np.abs(partial1_tensor(xi, zero_pt, ell).entries)))
    reports.append(
        identity_report(
            "id:Ableitung_Abb_linear_2Arg", dev0, tolerance=1e-12,
            detail=f"partial derivative of order {ell} vanishes at y = 0",
        )
    )

    # derivative of t -> d1^l xi(x + t h1, y + t h2) against the stated
    # splitting; the left side is a finite-difference oracle
    def p1(t):
        pt = np.concatenate([x + t * h1, y + t * h2])
        return partial1_tensor(xi, pt, ell).entries

    fd = (p1(fd_step) - p1(-fd_step)) / (2 * fd_step)
    lin_term = partial1_tensor(
        xi, np.concatenate([x, h2]), ell
    ).entries
    contr = contract_last(partial1_tensor(xi, point, ell + 1), h1).entries
    dev = float(np.max(np.abs(fd - (lin_term + contr))))
    reports.append(
        identity_report(
            "id:Ableitung_Abb_linear_2Arg", dev, tolerance=tol,
            detail="curve derivative splits into shift and contraction terms",
        )
    )

    if ell >= 1:
        lhs = op_norm(xi.tensor(point, ell))
        rhs = ell * op_norm(mixed_partial1_tensor(xi, point, ell - 1)) + op_norm(
            mixed_partial1_tensor(xi, point, ell)
        ) * float(np.max(np.abs(y)) if y.size else 0.0)
        reports.append(
            bound_report(
                "est:norm_l-te_Ableitung-Abb_linear_2Arg",
                lhs,
                rhs,
                tolerance=1e-9,
                lhs_provenance="exact",
                rhs_provenance="exact",
                witness=tuple(point.tolist()),
            )
        )

    if g is not None and b is not None:
        bnorm = op_norm(MultilinearMap(np.asarray(b, dtype=float), 1))
        lhs3 = op_norm(mixed_partial1_tensor(xi, point, ell))
        rhs3 = bnorm * op_norm(g.tensor(x, ell))
        reports.append(
            bound_report(
                "est:Abb_linear_2Arg-Spezialfall-hohes_Diff--partiell",
                lhs3,
                rhs3,
                tolerance=1e-9,
                lhs_provenance="exact",
                rhs_provenance="exact",
                witness=tuple(point.tolist()),
            )
        )
        if ell >= 1:
            lhs4 = op_norm(xi.tensor(point, ell))
            rhs4 = bnorm * ell * op_norm(g.tensor(x, ell - 1)) + bnorm * float(
                np.max(np.abs(y)) if y.size else 0.0
            ) * op_norm(g.tensor(x, ell))
            reports.append(
                bound_report(
                    "est:Abb_linear_2Arg-Spezialfall-hohes_Diff",
                    lhs4,
                    rhs4,
                    tolerance=1e-9,
                    lhs_provenance="exact",
                    rhs_provenance="exact",
                    witness=tuple(point.tolist()),
                )
            )
    return reports


def xi2_pointwise_check(
    xi: JetMap,
    xi2: PairedDerivativeMap,
    point,
    ell: int,
    tol: float = 1e-9,
) -> CheckReport:
    """Pointwise derivative bound for the paired-derivative auxiliary map:
    the order-l norm is at most l times the base order-l norm plus |e|
    times the order-(l+1) norm.

    The bound presumes the pairing has norm at most one, which holds
    exactly for the evaluation pairing; the composition pairing is only
    norm-exact when the operator slot is one-dimensional (the sign
    enumeration measures that slot entrywise).
    """
    if xi2.pairing == "compose" and min(xi2.e_shape) > 1:
        raise UnsupportedNormError(
            "composition-pairing estimate needs a one-dimensional operator slot"
        )
    point = np.asarray(point, dtype=float)
    mu = xi.domain.dim
    u, e = point[:mu], point[mu:]
    if xi2.pairing == "compose":
        e_norm = opnorm_inf(e.reshape(xi2.e_shape))
    else:
        e_norm = float(np.max(np.abs(e))) if e.size else 0.0
    lhs = op_norm(xi2.tensor(point, ell))
    rhs = ell * op_norm(xi.tensor(u, ell)) + e_norm * op_norm(xi.tensor(u, ell + 1))
    return bound_report(
        "lem:Abschaetzung_hoheDiffs_Spezialfall-linArg",
        lhs,
        rhs,
        tolerance=tol,
        lhs_provenance="exact",
        rhs_provenance="exact",
        witness=tuple(point.tolist()),
    )


# ---------------------------------------------------------------------------
# coefficient-arithmetic certified bounds for built-ins


def _axis_sups(domain: DomainSet) -> np.ndarray:
    lo, hi = domain.bounding_box()
    return np.maximum(np.abs(lo), np.abs(hi))


def _entry_bounds(map_: JetMap, ell: int) -> np.ndarray:
    """Entrywise bounds sup_x |tensor(x, ell)[o, j*]|, rows flattened."""
    m = map_.dim
    s = _axis_sups(map_.domain)
    if isinstance(map_, ConstMap):
        if ell == 0:
            return np.abs(map_.c).reshape(-1, 1)
        return np.zeros((map_.out_dim, m**ell))
    if isinstance(map_, AffineMap):
        if ell == 0:
            return (np.abs(map_.a) @ s + np.abs(map_.b)).reshape(-1, 1)
        if ell == 1:
            return np.abs(map_.a)
        return np.zeros((map_.out_dim, m**ell))
    if isinstance(map_, PolynomialMap):
        n = map_.out_dim
        out = np.zeros((n,) + (m,) * ell)
        for c, pw in map_.terms:
            if ell == 0:
                out[...] += np.abs(c) * float(np.prod(s ** np.array(pw)))
                continue
            for jidx in itertools.product(range(m), repeat=ell):
                beta = [0] * m
                for j in jidx:
                    beta[j] += 1
                if any(beta[a] > pw[a] for a in range(m)):
                    continue
                scale = 1.0
                for a in range(m):
                    for k in range(beta[a]):
                        scale *= pw[a] - k
                    scale *= s[a] ** (pw[a] - beta[a])
                out[(slice(None),) + jidx] += np.abs(c) * scale
        return out.reshape(n, -1)
    if isinstance(map_, TrigPolynomialMap):
        n = map_.out_dim
        out = np.zeros((n,) + (m,) * ell)
        for c, u, _ in map_.terms:
            block = np.abs(c)
            for _ in range(ell):
                block = np.multiply.outer(block, np.abs(u))
            out += block
        return out.reshape(n, -1)
    if isinstance(map_, SumMap):
        return sum(_entry_bounds(p, ell) for p in map_.parts)
    if isinstance(map_, ScaledMap):
        return abs(map_.c) * _entry_bounds(map_.base, ell)
    if isinstance(map_, PairMap):
        return np.concatenate([_entry_bounds(p, ell) for p in map_.parts], axis=0)
    if isinstance(map_, ComponentMap):
        return _entry_bounds(map_.base, ell)[map_.lo_idx:map_.hi_idx]
    raise ShapeError(f"no certified bound rule for {type(map_).__name__}")


def crude_sup_bound(map_: JetMap, ell: int) -> float:
    """A sound upper bound for sup_x of the order-l operator norm,
    obtained from coefficient arithmetic on the domain's bounding box."""
    if isinstance(map_, DifferentialMap):
        return crude_sup_bound(map_.base, ell + 1)
    e = _entry_bounds(map_, ell)
    return float(np.max(e.sum(axis=1))) if e.size else 0.0


def crude_partial2_sup(xi: JetMap) -> float:
    """A sound upper bound for sup |d2 xi| as an operator (order 0)."""
    if xi.in_blocks is None or len(xi.in_blocks) != 2:
        raise ShapeError("map must declare two input blocks")
    m1, m2 = xi.in_blocks
    e = _entry_bounds(xi, 1)  # (n, m1 + m2)
    return float(np.max(e[:, m1:].sum(axis=1))) if e.size else 0.0


# ---------------------------------------------------------------------------
# descriptors


def map_from_desc(desc: dict, domain: DomainSet) -> JetMap:
    kind = desc.get("kind")
    if kind == "const":
        return ConstMap(domain, desc["c"])
    if kind == "affine":
        return AffineMap(domain, desc["a"], desc.get("b"))
    if kind == "poly":
        terms = [(t["coef"], t["powers"]) for t in desc["terms"]]
        blocks = tuple(desc["in_blocks"]) if "in_blocks" in desc else None
        return PolynomialMap(domain, terms, in_blocks=blocks)
    if kind == "trig":
        terms = [(t["coef"], t["freq"], t["phase"]) for t in desc["terms"]]
        blocks = tuple(desc["in_blocks"]) if "in_blocks" in desc else None
        return TrigPolynomialMap(domain, terms, in_blocks=blocks)
    if kind == "sum":
        return SumMap([map_from_desc(d, domain) for d in desc["parts"]])
    if kind == "scaled":
        return ScaledMap(map_from_desc(desc["base"], domain), desc["c"])
    if kind == "pair":
        return PairMap([map_from_desc(d, domain) for d in desc["parts"]])
    if kind == "component":
        return ComponentMap(map_from_desc(desc["base"], domain), desc["lo"], desc["hi"])
    raise ShapeError(f"unknown map kind {kind!r}")


def map_to_desc(map_: JetMap) -> dict:
    if map_.desc is None:
        raise ShapeError(f"{type(map_).__name__} carries no descriptor")
    d = dict(map_.desc)
    if map_.in_blocks is not None:
        d["in_blocks"] = list(map_.in_blocks)
    return d
