"""Finite-family restricted products and simultaneous operators.

A runtime family is a finite ordered index set with one weighted function
space per factor, all sharing one weight family over the disjoint union
of the factor domains.  Family seminorms are exact maxima of factor
values; the topology statements of the underlying theory become finite,
checkable assertions.  Simultaneous operators act factor by factor with
deterministic per-factor outputs, so restricting a scenario to a
sub-family reproduces the surviving factors bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DataError,
    GeometryError,
    OrderError,
    PreconditionError,
    ShapeError,
    SpectralConditionError,
)
from .jets import (
    BilinearPairMap,
    ComposeMap,
    JetMap,
    MultilinearMap,
    MultilinearPairMap,
    PairMap,
    ScaledMap,
    SumMap,
    difference_map,
    identity_map,
    op_norm,
    opnorm_inf,
)
from .operators import (
    ContractionConfig,
    InverseMap,
    NeumannConfig,
    SuperpositionOperand,
    compose_perturbed,
    invert_perturbed,
    quasi_inverse,
    superpose,
    superpose_derivative_check,
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
from .seminorms import SampleGrid, WeightedFunction, weighted_seminorm
from .spaces import (
    DomainSet,
    DominanceCertificate,
    FactorizationCertificate,
    FamilyWeight,
    Weight,
    WeightFamily,
)


@dataclass(frozen=True)
class FactorSpace:
    """Geometry of one family factor."""

    u: DomainSet
    grid_u: SampleGrid
    v: DomainSet | None = None
    w: DomainSet | None = None
    grid_w: SampleGrid | None = None
    v_tilde: DomainSet | None = None
    grid_vt: SampleGrid | None = None


@dataclass(frozen=True)
class RestrictedElement:
    """One element of the restricted product: a function per factor."""

    factors: tuple[WeightedFunction, ...]

    def __len__(self) -> int:
        return len(self.factors)

    def __getitem__(self, i: int) -> WeightedFunction:
        return self.factors[i]

    def scaled(self, c: float) -> "RestrictedElement":
        return RestrictedElement(
            tuple(
                WeightedFunction(
                    ScaledMap(f.map, c),
                    f.grid,
                    f.max_order,
                    tuple((n, l, abs(c) * b) for n, l, b in f.certified),
                )
                for f in self.factors
            )
        )

    def minus(self, other: "RestrictedElement") -> "RestrictedElement":
        return RestrictedElement(
            tuple(
                WeightedFunction(
                    difference_map(a.map, b.map), a.grid, min(a.max_order, b.max_order)
                )
                for a, b in zip(self.factors, other.factors)
            )
        )


@dataclass(frozen=True)
class FamilySeminorm:
    weight_name: str
    ell: int
    value: float
    argmax: int
    witness: tuple[float, ...] | None


def family_seminorm(elem: RestrictedElement, fw: FamilyWeight, ell: int) -> FamilySeminorm:
    """Exact maximum of the per-factor grid seminorms, argmax recorded."""
    if len(fw) != len(elem):
        raise DataError("weight family and element factor counts disagree")
    best, arg, witness = -1.0, 0, None
    for i, (wf, w) in enumerate(zip(elem.factors, fw.factors)):
        sv = weighted_seminorm(wf, w, ell)
        if sv.value > best:
            best, arg, witness = sv.value, i, sv.witness
    return FamilySeminorm(fw.name, ell, best, arg, witness)


def lipschitz_bound_check(
    family_map: Callable[[float], RestrictedElement],
    samples: Sequence[float],
    fw: FamilyWeight,
    ell: int,
    factor_lipschitz: Sequence[float],
    check_id: str = "lem:L-Stetigkeit_Abb_in_LinfProd",
    tolerance: float = 1e-9,
) -> CheckReport:
    """Family Lipschitz bound: the family seminorm of A(s) - A(t) is at
    most (sup over factors of the certified factor constants) |s - t|."""
    if len(samples) < 2:
        raise PreconditionError("need at least two parameter samples")
    sup_l = max(factor_lipschitz)
    reports = []
    for a_idx in range(len(samples)):
        for b_idx in range(a_idx + 1, len(samples)):
            s, t = samples[a_idx], samples[b_idx]
            gap = family_map(s).minus(family_map(t))
            lhs = family_seminorm(gap, fw, ell).value
            reports.append(
                bound_report(
                    check_id, lhs, sup_l * abs(s - t), tolerance=tolerance,
                    lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                    witness=(s, t),
                )
            )
    return merge_min_margin(check_id, reports)


def product_iso_roundtrip(
    elem: RestrictedElement,
    fw: FamilyWeight,
    ell: int,
    check_id: str = "lem:pktwProduktLInf",
) -> CheckReport:
    """Split a family of two-block-valued functions into two families and
    recombine: bit-exact round trip plus the two seminorm comparisons."""
    first, second = [], []
    for wf in elem.factors:
        blocks = wf.map.out_blocks
        if blocks is None or len(blocks) != 2:
            raise ShapeError("factor codomains are not declared products")
        from .seminorms import pair_split

        a, b = pair_split(wf)
        first.append(a)
        second.append(b)
    e1, e2 = RestrictedElement(tuple(first)), RestrictedElement(tuple(second))
    reports = []
    whole = family_seminorm(elem, fw, ell).value
    p1 = family_seminorm(e1, fw, ell).value
    p2 = family_seminorm(e2, fw, ell).value
    # split is bounded by the combined seminorm, which is bounded by the sum
    reports.append(
        bound_report(
            check_id, max(p1, p2), whole, tolerance=0.0,
            lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
            detail="projections against the combined family seminorm",
        )
    )
    reports.append(
        bound_report(
            check_id, whole, p1 + p2, tolerance=0.0,
            lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
            detail="combination against the sum of part seminorms",
        )
    )
    for i, wf in enumerate(elem.factors):
        rec = PairMap([e1.factors[i].map, e2.factors[i].map])
        for x in wf.grid.points[:: max(1, len(wf.grid.points) // 4)]:
            for order in range(min(ell, wf.max_order) + 1):
                if not np.array_equal(
                    rec.tensor(x, order).entries, wf.map.tensor(x, order).entries
                ):
                    reports.append(
                        identity_report(
                            check_id, math.inf, tolerance=0.0,
                            detail=f"recombination not bit-exact on factor {i}",
                        )
                    )
    return merge_min_margin(check_id, reports)


def cauchy_limit_check(
    elements: Sequence[RestrictedElement],
    limit: RestrictedElement,
    fw: FamilyWeight,
    ell: int,
    increment_envelope: Callable[[int], float],
    tail_envelope: Callable[[int], float],
    check_id: str = "lem:Linf_compl_wenn_Faktoren_c",
    tolerance: float = 1e-12,
) -> CheckReport:
    """Cauchy increments below the declared envelope and convergence of
    the sequence to the closed-form limit at the envelope rate."""
    reports = []
    for n in range(len(elements) - 1):
        inc = family_seminorm(elements[n + 1].minus(elements[n]), fw, ell).value
        reports.append(
            bound_report(
                check_id, inc, increment_envelope(n), tolerance=tolerance,
                lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                witness=(n,), detail="increment envelope",
            )
        )
    for n in range(len(elements)):
        gap = family_seminorm(elements[n].minus(limit), fw, ell).value
        reports.append(
            bound_report(
                check_id, gap, tail_envelope(n), tolerance=tolerance,
                lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                witness=(n,), detail="distance to the limit",
            )
        )
    return merge_min_margin(check_id, reports)


# ---------------------------------------------------------------------------
# adjusting-weight neighborhoods


def neighborhood_inclusion_check(
    elem: RestrictedElement,
    omega: FamilyWeight,
    v_domains: Sequence[DomainSet],
    tau: float,
    check_id: str = "incl:1-Kugel_f0-norm_sub_CFof",
) -> CheckReport:
    """Elements with adjusted norm below tau map into tau-scaled value
    domains, with the worst-case perturbation radius of the proof route.

    Fails with a witness when the containment chain is violated, which can
    only happen if the claimed adjusting weight is not one.
    """
    nu = family_seminorm(elem, omega, 0).value
    if not nu < tau:
        raise PreconditionError(
            f"family seminorm {nu} is not below tau = {tau}"
        )
    s = tau - nu
    reports = []
    for i, (wf, w, v) in enumerate(zip(elem.factors, omega.factors, v_domains)):
        if not v.star_shaped_at_zero:
            raise PreconditionError(f"value domain {i} is not star-shaped at 0")
        d_i = v.boundary_distance(np.zeros(v.dim))
        tv = v.scaled(tau)
        for x in wf.grid.points:
            val = wf.map.value(x)
            member = tv.contains(val)
            q = float(np.max(np.abs(val))) + s / abs(w(x))
            rep = bound_report(
                check_id, q, tau * d_i, tolerance=1e-12,
                lhs_provenance=EXACT, rhs_provenance=EXACT,
                witness=(i,) + tuple(float(c) for c in x),
                detail=f"factor {i}: worst perturbed value vs tau * d_i",
            )
            if not member and rep.status == "pass":
                rep = CheckReport(
                    check_id, "fail", rep.lhs, rep.rhs, rep.margin, rep.tolerance,
                    EXACT, EXACT, rep.witness, "scaled-domain membership violated",
                )
            reports.append(rep)
    return merge_min_margin(check_id, reports)


def neighborhood_openness_check(
    gamma: RestrictedElement,
    eta: RestrictedElement,
    omega: FamilyWeight,
    v_domains: Sequence[DomainSet],
    clearance: float,
    check_id: str = "lem:CFof_offen",
) -> CheckReport:
    """If gamma has clearance r in the adjusted sense and eta is within r
    of gamma, eta keeps a positive adjusted clearance s = r - |eta-gamma|."""
    for i, (wf, w, v) in enumerate(zip(gamma.factors, omega.factors, v_domains)):
        for x in wf.grid.points:
            val = wf.map.value(x)
            if not v.contains(val) or v.boundary_distance(val) < clearance / abs(w(x)):
                raise PreconditionError(
                    f"base element lacks the claimed clearance on factor {i}"
                )
    nu = family_seminorm(eta.minus(gamma), omega, 0).value
    if not nu < clearance:
        raise PreconditionError(
            f"distance {nu} to the base element is not below the clearance"
        )
    s = clearance - nu
    reports = []
    for i, (wf, w, v) in enumerate(zip(eta.factors, omega.factors, v_domains)):
        for x in wf.grid.points:
            val = wf.map.value(x)
            inside = v.contains(val)
            dist = v.boundary_distance(val) if inside else 0.0
            reports.append(
                bound_report(
                    check_id, s / abs(w(x)), dist, tolerance=1e-12,
                    lhs_provenance=EXACT, rhs_provenance=EXACT,
                    witness=(i,) + tuple(float(c) for c in x),
                    detail=f"factor {i}: remaining adjusted clearance",
                )
            )
    return merge_min_margin(check_id, reports)


# ---------------------------------------------------------------------------
# simultaneous operators (factor-wise, deterministic)


def sim_multiply(
    multipliers: Sequence[WeightedFunction],
    bilinears: Sequence[np.ndarray],
    x: RestrictedElement,
    f: FamilyWeight,
    cert: DominanceCertificate,
    grids: Sequence[np.ndarray],
    check_id: str = "lem:simultane_mult-multiplier",
) -> tuple[RestrictedElement, CheckReport]:
    """Factor-wise b_i(M_i, gamma_i) with Leibniz jets and the family
    estimate against the dominating weight of the certificate."""
    from .spaces import check_dominance_certificate

    gate = check_dominance_certificate(cert, grids, check_id="cond:est_sim-multiplier_weights")
    if gate.status != "pass":
        raise PreconditionError("dominance certificate fails on the grid")
    sup_b = max(op_norm(MultilinearMap(np.asarray(b, float), 1)) for b in bilinears)
    out = []
    for m_i, b_i, x_i in zip(multipliers, bilinears, x.factors):
        out.append(
            WeightedFunction(
                BilinearPairMap(b_i, m_i.map, x_i.map),
                x_i.grid,
                min(m_i.max_order, x_i.max_order),
            )
        )
    result = RestrictedElement(tuple(out))
    lhs = family_seminorm(result, f, 0).value
    rhs = sup_b * family_seminorm(x, cert.g, 0).value
    report = bound_report(
        check_id, lhs, rhs, tolerance=1e-9,
        lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
        detail="pointwise-transferred family bound",
    )
    return result, report


def sim_multilinear(
    betas: Sequence[np.ndarray],
    args: Sequence[RestrictedElement],
    f: FamilyWeight,
    factorization: FactorizationCertificate,
    grids: Sequence[np.ndarray],
    check_id: str = "lem:multilineareSuperpos-Linf",
) -> tuple[RestrictedElement, CheckReport]:
    """Factor-wise constant-multilinear superposition with the product
    bound over the factorized weights."""
    from .spaces import check_factorization_certificate

    gate = check_factorization_certificate(factorization, grids)
    if gate.status != "pass":
        raise PreconditionError("weight factorization fails on the grid")
    n = len(args)
    sup_b = max(op_norm(MultilinearMap(np.asarray(b, float), 1)) for b in betas)
    out = []
    for i, b_i in enumerate(betas):
        maps = [arg.factors[i].map for arg in args]
        grid = args[0].factors[i].grid
        order = min(arg.factors[i].max_order for arg in args)
        out.append(WeightedFunction(MultilinearPairMap(b_i, maps), grid, order))
    result = RestrictedElement(tuple(out))
    lhs = family_seminorm(result, f, 0).value
    rhs = sup_b
    for j in range(n):
        rhs *= family_seminorm(args[j], factorization.parts[j], 0).value
    report = bound_report(
        check_id, lhs, rhs, tolerance=1e-9,
        lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
        detail=f"{n}-linear family bound",
    )
    return result, report


def sim_superpose(
    ops: Sequence[SuperpositionOperand],
    x: RestrictedElement,
    f: FamilyWeight,
    g: FamilyWeight,
    omega: FamilyWeight,
    v_domains: Sequence[DomainSet],
    tau: float,
    f_single: Sequence[Weight] | None = None,
    directions: RestrictedElement | None = None,
) -> tuple[RestrictedElement, list[CheckReport]]:
    """Factor-wise superposition on an adjusted neighborhood.

    Emits the per-factor estimates, the family-level bound against the
    dominating weight family, and (when directions are supplied) the
    directional-derivative convergence check on the argmax factor.
    """
    gate = neighborhood_inclusion_check(x, omega, v_domains, tau)
    if gate.status != "pass":
        raise PreconditionError("element leaves the adjusted neighborhood")
    results = []
    factor_reports: list[CheckReport] = []
    for i, (op, x_i) in enumerate(zip(ops, x.factors)):
        weights = [f.factors[i]] if f_single is None else [f_single[i]]
        res_i, reps_i = superpose(op, x_i, weights=weights)
        results.append(res_i)
        factor_reports.extend(reps_i)
    result = RestrictedElement(tuple(results))
    reports = [merge_min_margin("est:f0-Norm_SPid", [
        r for r in factor_reports if r.check_id == "est:f0-Norm_SPid"
    ])]
    lhs = family_seminorm(result, f, 0).value
    rhs = family_seminorm(x, g, 0).value
    reports.append(
        bound_report(
            "prop:simultane_SP_BCinf0_Produkt", lhs, rhs, tolerance=1e-9,
            lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
            detail="family bound through the dominating weight",
        )
    )
    if directions is not None:
        arg = family_seminorm(result, f, 0).argmax
        reports.append(
            superpose_derivative_check(
                ops[arg], x.factors[arg], directions.factors[arg],
                check_id="lem:Abb_nach_Linf_Ck_wenn_Komp_Ck_mit_stetigem_Diff",
            )
        )
    return result, reports


class PointwiseQIMap(JetMap):
    """Value-level quasi-inversion of an operator-valued function."""

    def __init__(self, base: JetMap, op_dim: int, neumann: NeumannConfig):
        super().__init__(base.domain, (op_dim * op_dim,), max_order=0)
        self.base = base
        self.op_dim = op_dim
        self.neumann = neumann

    def tensor(self, x, ell):
        self._check_order(ell)
        p = self.op_dim
        a = self.base.value(x).reshape(p, p)
        return MultilinearMap(quasi_inverse(a, self.neumann).reshape(-1), 1)


def sim_power_series(
    x: RestrictedElement,
    op_dim: int,
    q: float,
    cfg: NeumannConfig = NeumannConfig(),
    check_id: str = "lem:sim-SuperPos_QuasiInversion",
) -> tuple[RestrictedElement, CheckReport]:
    """Pointwise quasi-inversion across the family; the spectral bound q
    must hold at every grid point of every factor."""
    if not q < 1.0:
        raise SpectralConditionError(f"certified bound q = {q} is not below 1")
    reports = []
    out = []
    for i, wf in enumerate(x.factors):
        for pt in wf.grid.points:
            a = wf.map.value(pt).reshape(op_dim, op_dim)
            norm_a = opnorm_inf(a)
            if norm_a > q + 1e-12:
                return RestrictedElement(tuple(out)), CheckReport(
                    check_id, "fail", norm_a, q, q - norm_a, 0.0,
                    EXACT, CERTIFIED_UPPER,
                    (i,) + tuple(float(c) for c in pt),
                    "spectral certificate violated",
                )
            qi = quasi_inverse(a, cfg)
            residual = opnorm_inf(a + qi - a @ qi)
            reports.append(
                bound_report(
                    check_id, residual, 2.0 * cfg.tail_tol, tolerance=0.0,
                    lhs_provenance=EXACT, rhs_provenance=EXACT,
                    witness=(i,) + tuple(float(c) for c in pt),
                )
            )
        out.append(
            WeightedFunction(PointwiseQIMap(wf.map, op_dim, cfg), wf.grid, 0)
        )
    return RestrictedElement(tuple(out)), merge_min_margin(check_id, reports)


def sim_compose(
    gamma: RestrictedElement,
    eta: RestrictedElement,
    factors: Sequence[FactorSpace],
    omega: FamilyWeight,
    gamma_lips: Sequence[float],
    f: FamilyWeight,
    tau: float,
    pairs=None,
    directions: tuple[RestrictedElement, RestrictedElement] | None = None,
) -> tuple[RestrictedElement, list[CheckReport]]:
    """Factor-wise composition with the perturbed identity, guarded by the
    adjusted neighborhood of the perturbations."""
    v_domains = [fs.v for fs in factors]
    gate = neighborhood_inclusion_check(eta, omega, v_domains, tau)
    if gate.status != "pass":
        raise PreconditionError("perturbation leaves the adjusted neighborhood")
    results = []
    reports: list[CheckReport] = []
    per_factor = []
    for i, fs in enumerate(factors):
        pair_i = None if pairs is None else pairs[i]
        res_i, reps_i = compose_perturbed(
            gamma.factors[i], eta.factors[i], fs.u, fs.v, fs.w,
            gamma_lips[i], weights=[f.factors[i]], pair=pair_i,
        )
        results.append(res_i)
        per_factor.extend(reps_i)
    result = RestrictedElement(tuple(results))
    for cid in ("est:Funktionswerte_Gewicht_K-Kompo", "est:f,0-Norm_Differenz_Kompo"):
        sub = [r for r in per_factor if r.check_id == cid and r.status != "skipped-precondition"]
        if sub:
            reports.append(merge_min_margin(cid, sub))
    fam = family_seminorm(result, f, 0)
    reports.append(
        bound_report(
            "prop:Simultane_Koor-Kompo_diffbar",
            fam.value,
            max(
                weighted_seminorm(result.factors[i], f.factors[i], 0).value
                for i in range(len(factors))
            ),
            tolerance=0.0,
            lhs_provenance=GRID_LOWER, rhs_provenance=GRID_LOWER,
            detail="family seminorm is the exact factor max",
        )
    )
    if directions is not None:
        from .operators import compose_derivative_check

        arg = fam.argmax
        g_dir, e_dir = directions
        reports.append(
            compose_derivative_check(
                gamma.factors[arg], eta.factors[arg],
                factors[arg].u, factors[arg].v,
                g_dir.factors[arg].map, e_dir.factors[arg].map,
                check_id="prop:Simultane_Koor-Kompo_diffbar",
            )
        )
    return result, reports


def sim_invert(
    phi: RestrictedElement,
    factors: Sequence[FactorSpace],
    cfg: ContractionConfig,
    f: FamilyWeight,
) -> tuple[RestrictedElement, list[CheckReport]]:
    """Factor-wise inversion with one shared contraction configuration;
    the family membership bounds use the same tau and r on every factor."""
    c11 = max(wf.require_bound("one", 1) for wf in phi.factors)
    c10 = max(wf.require_bound("one", 0) for wf in phi.factors)
    if not (c11 < cfg.tau and c10 < cfg.r / 2 * (1 - cfg.tau)):
        raise PreconditionError(
            "family element is outside the shared operator domain"
        )
    results = []
    residuals = []
    per_factor: list[CheckReport] = []
    for i, fs in enumerate(factors):
        res_i, reps_i = invert_perturbed(
            phi.factors[i], fs.u, fs.v_tilde, fs.grid_vt, cfg,
            weights=[f.factors[i]],
        )
        results.append(res_i)
        per_factor.extend(reps_i)
        residuals.append(
            max(
                r.lhs for r in reps_i
                if r.check_id == "prop:Zsf_Inversion_gewAbb"
                and "residual" in r.detail
            )
        )
    result = RestrictedElement(tuple(results))
    reports = [
        bound_report(
            "prop:Simultane_Inv-Kompo_glatt", max(residuals), 2 * cfg.fix_tol,
            tolerance=0.0, lhs_provenance=EXACT, rhs_provenance=EXACT,
            detail="family right-inverse residual",
        ),
        merge_min_margin(
            "est:Abschaetzung_gewichteter_FWert_der_K-Inversion",
            [r for r in per_factor
             if r.check_id == "est:Abschaetzung_gewichteter_FWert_der_K-Inversion"],
        ),
    ]
    # the derivative chain: pointwise quasi-inversion of -D phi, operator
    # multiplication, and composition with the inverse, checked against the
    # assembled first-order jets on the argmax factor
    arg = family_seminorm(result, f, 0).argmax
    inv_map = result.factors[arg].map
    chain_dev = 0.0
    for y in factors[arg].grid_vt.points[:: max(1, len(factors[arg].grid_vt) // 3)]:
        x_star, _, _ = inv_map.solve(y)
        a = phi.factors[arg].map.tensor(x_star, 1).entries
        chain = a @ quasi_inverse(-a) - a
        chain_dev = max(
            chain_dev,
            float(np.max(np.abs(chain - inv_map.tensor(y, 1).entries))),
        )
    reports.append(
        identity_report(
            "prop:Simultane_Inv-Kompo_glatt", chain_dev, tolerance=1e-12,
            detail="first-order jets agree with the derivative chain",
        )
    )
    return result, reports


def restrict_scenario_outputs(
    apply_fn: Callable[[Sequence[int]], RestrictedElement],
    n_factors: int,
    sub_indices: Sequence[int],
    probe_order: int = 1,
) -> CheckReport:
    """Factor-restriction bit-identity: running on a sub-family reproduces
    the surviving factors exactly."""
    full = apply_fn(list(range(n_factors)))
    sub = apply_fn(list(sub_indices))
    dev = 0.0
    for j, i in enumerate(sub_indices):
        a, b = full.factors[i], sub.factors[j]
        for x in a.grid.points:
            for order in range(min(probe_order, a.max_order, b.max_order) + 1):
                if not np.array_equal(
                    a.map.tensor(x, order).entries, b.map.tensor(x, order).entries
                ):
                    dev = math.inf
    return identity_report(
        "sim:factor_restriction",
        dev,
        tolerance=0.0,
        detail=f"sub-family {list(sub_indices)} of {n_factors} factors",
    )
