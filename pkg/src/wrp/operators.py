"""Single-factor nonlinear operators between weighted function spaces.

Superposition and composition results carry exact chain-rule jets built
from the factor maps; inversion of a perturbed identity runs a guarded
fixed-point iteration whose stopping rule converts the tolerance into a
guaranteed error via the a-posteriori contraction bound.  The
quasi-inverse of a small operator is a truncated Neumann series with the
truncation order chosen from the geometric tail bound.  Every estimate a
result is known to satisfy is attached as a check report with explicit
margins; right-hand sides that need a sup over the domain come from
certified bounds, never from grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ContractionViolationError,
    GeometryError,
    IterationError,
    PreconditionError,
    RangeEscapeError,
    SpectralConditionError,
    TruncationError,
)
from .jets import (
    AffineMap,
    ComposeMap,
    JetMap,
    MultilinearMap,
    PairMap,
    ScaledMap,
    SumMap,
    difference_map,
    fd_jet,
    identity_map,
    op_norm,
    opnorm_inf,
)
from .report import (
    CERTIFIED_UPPER,
    EXACT,
    GRID_LOWER,
    CheckReport,
    bound_report,
    identity_report,
    merge_min_margin,
    skipped_report,
)
from .seminorms import SampleGrid, WeightedFunction, weighted_seminorm
from .spaces import DomainSet, Weight

SLOPE_WINDOW = (1.7, 2.3)
EXACTNESS_TOL = 1e-12
DEFAULT_FD_STEPS = (0.1, 0.05, 0.025, 0.0125)


@dataclass(frozen=True)
class ContractionConfig:
    """Fixed-point inversion parameters; membership in the operator domain
    requires certified bounds |phi|_{1,1} < tau and |phi|_{1,0} < (r/2)(1-tau)."""

    tau: float
    r: float
    fix_tol: float = 1e-12
    max_iters: int = 200

    def __post_init__(self):
        if not (0.0 < self.tau < 1.0):
            raise PreconditionError("tau must lie in (0, 1)")
        if self.r <= 0:
            raise PreconditionError("r must be positive")


@dataclass(frozen=True)
class NeumannConfig:
    tail_tol: float = 1e-12
    max_terms: int = 128


def convergence_report(
    check_id: str,
    steps: Sequence[float],
    errors: Sequence[float],
    window: tuple[float, float] = SLOPE_WINDOW,
    exact_tol: float = EXACTNESS_TOL,
    detail: str = "",
) -> CheckReport:
    """Least-squares slope of log error against log step; passes inside the
    window or on the exactness branch (all errors below exact_tol)."""
    pairs = [(h, e) for h, e in zip(steps, errors) if math.isfinite(e)]
    if not pairs:
        return skipped_report(check_id, "no finite difference steps survived")
    errs = [e for _, e in pairs]
    if max(errs) <= exact_tol:
        return CheckReport(
            check_id, "pass", max(errs), exact_tol, 0.0, exact_tol,
            EXACT, EXACT, (), detail + " (exactness branch)",
        )
    if any(e <= 0 for e in errs) or len(pairs) < 3:
        return skipped_report(check_id, "degenerate error sequence for slope fit")
    logs_h = np.log([h for h, _ in pairs])
    logs_e = np.log(errs)
    slope = float(np.polyfit(logs_h, logs_e, 1)[0])
    margin = min(slope - window[0], window[1] - slope)
    status = "pass" if margin >= 0 else "fail"
    return CheckReport(
        check_id, status, slope, window[1], margin, 0.0, EXACT, EXACT, (),
        detail + f" slope {slope:.3f} in [{window[0]}, {window[1]}]",
    )


# ---------------------------------------------------------------------------
# weak integrals (oracle for mean-value arguments)


def weak_integral(g, a: float, b: float, quad_n: int = 64) -> np.ndarray:
    """Composite Simpson quadrature of a vector-valued integrand."""
    if quad_n < 2 or quad_n % 2 != 0:
        raise PreconditionError("quad_n must be even and >= 2")
    ts = np.linspace(a, b, quad_n + 1)
    vals = np.array([np.asarray(g(t), dtype=float) for t in ts])
    w = np.ones(quad_n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (b - a) / quad_n
    return h / 3.0 * np.tensordot(w, vals, axes=(0, 0))


# ---------------------------------------------------------------------------
# superposition


@dataclass(frozen=True)
class SuperpositionOperand:
    """A two-block map xi on U x V with xi(., 0) = 0 and certified bounds:
    sup_1[l] bounds the unweighted order-l seminorm of xi over U x V, and
    d2_sup bounds the sup of the second-block partial differential."""

    xi: JetMap
    u: DomainSet
    v: DomainSet
    sup_1: tuple[tuple[int, float], ...]
    d2_sup: float

    def bound(self, ell: int) -> float | None:
        for order, b in self.sup_1:
            if order == ell:
                return b
        return None


def _probe_zero_section(op: SuperpositionOperand, points: np.ndarray):
    m2 = op.v.dim
    for x in points[:: max(1, len(points) // 3)][:3]:
        pt = np.concatenate([np.asarray(x, float), np.zeros(m2)])
        v = op.xi.value(pt)
        if float(np.max(np.abs(v))) > 1e-12:
            raise PreconditionError("xi does not vanish on the zero section")


def superpose(
    op: SuperpositionOperand,
    gamma: WeightedFunction,
    weights: Sequence[Weight] = (),
    pair: tuple[WeightedFunction, WeightedFunction] | None = None,
) -> tuple[WeightedFunction, list[CheckReport]]:
    """x -> xi(x, gamma(x)) with chain-rule jets.

    ``pair`` optionally supplies a second argument together with the
    symbolic difference (carrying its own certified bounds) to check the
    two-argument distance estimate.
    """
    if not op.v.star_shaped_at_zero:
        raise PreconditionError("the value domain must be star-shaped at 0")
    pts = gamma.grid.points
    for x in pts:
        if not op.v.contains(gamma.map.value(x)):
            raise RangeEscapeError(
                f"gamma({np.asarray(x).tolist()}) escapes the value domain"
            )
    _probe_zero_section(op, pts)

    result_map = ComposeMap(op.xi, PairMap([identity_map(op.u), gamma.map]))
    max_order = gamma.max_order
    if op.xi.max_order is not None:
        max_order = min(max_order, op.xi.max_order)
    certified = []
    for name, ell, bnd in gamma.certified:
        if ell == 0:
            certified.append((name, 0, op.d2_sup * bnd))
            b12 = op.bound(2)
            b1 = gamma.certified_bound(name, 1)
            if b12 is not None and b1 is not None:
                certified.append((name, 1, b12 * bnd + op.d2_sup * b1))
    result = WeightedFunction(result_map, gamma.grid, max_order, tuple(certified))

    reports: list[CheckReport] = []
    for w in weights:
        lhs = weighted_seminorm(result, w, 0).value
        cert0 = gamma.certified_bound(w.name, 0)
        if cert0 is None:
            reports.append(
                skipped_report("est:f0-Norm_SPid", f"no certificate ({w.name}, 0)")
            )
        else:
            reports.append(
                bound_report(
                    "est:f0-Norm_SPid", lhs, op.d2_sup * cert0, tolerance=1e-9,
                    lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                    detail=f"weight {w.name}",
                )
            )
        cert1 = gamma.certified_bound(w.name, 1)
        b2 = op.bound(2)
        if max_order >= 1 and cert0 is not None and cert1 is not None and b2 is not None:
            lhs1 = weighted_seminorm(result, w, 1).value
            reports.append(
                bound_report(
                    "est:f1-Norm_SPid", lhs1, b2 * cert0 + op.d2_sup * cert1,
                    tolerance=1e-9,
                    lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                    detail=f"weight {w.name}",
                )
            )
        if pair is not None:
            gamma_alt, gamma_diff = pair
            dcert = gamma_diff.certified_bound(w.name, 0)
            if dcert is None:
                reports.append(
                    skipped_report(
                        "est:f0-Norm_SPid-Differenz",
                        f"no difference certificate ({w.name}, 0)",
                    )
                )
                continue
            alt_map = ComposeMap(op.xi, PairMap([identity_map(op.u), gamma_alt.map]))
            gap = WeightedFunction(difference_map(result_map, alt_map), gamma.grid, 0)
            lhs_d = weighted_seminorm(gap, w, 0).value
            seg = "segment condition automatic (convex value domain)" if op.v.convex \
                else "segment condition checked at grid midpoints only"
            if not op.v.convex:
                for x in pts:
                    midv = 0.5 * (gamma.map.value(x) + gamma_alt.map.value(x))
                    if not op.v.contains(midv):
                        raise RangeEscapeError("segment midpoint escapes value domain")
            reports.append(
                bound_report(
                    "est:f0-Norm_SPid-Differenz", lhs_d, op.d2_sup * dcert,
                    tolerance=1e-9,
                    lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                    detail=f"weight {w.name}; {seg}",
                )
            )
    return result, reports


def superpose_derivative_check(
    op: SuperpositionOperand,
    gamma: WeightedFunction,
    direction: WeightedFunction,
    steps: Sequence[float] = DEFAULT_FD_STEPS,
    check_id: str = "id:Differential_SuperposCWZweiVars-id",
) -> CheckReport:
    """Symmetric difference quotients of the superposition against the
    stated directional derivative, with a second-order convergence fit."""
    pts = gamma.grid.points
    m2 = op.v.dim
    d2 = lambda x, y: op.xi.tensor(np.concatenate([x, y]), 1).entries[:, -m2:]
    used_steps, errors = [], []
    for t in steps:
        ok = True
        worst = 0.0
        for x in pts:
            g, d = gamma.map.value(x), direction.map.value(x)
            if not (op.v.contains(g + t * d) and op.v.contains(g - t * d)):
                ok = False
                break
            plus = op.xi.value(np.concatenate([x, g + t * d]))
            minus = op.xi.value(np.concatenate([x, g - t * d]))
            exact = d2(np.asarray(x, float), g) @ d
            worst = max(worst, float(np.max(np.abs((plus - minus) / (2 * t) - exact))))
        if ok:
            used_steps.append(t)
            errors.append(worst)
    detail = "" if len(used_steps) == len(steps) else \
        f"{len(steps) - len(used_steps)} step(s) rejected by range checks;"
    return convergence_report(check_id, used_steps, errors, detail=detail)


# ---------------------------------------------------------------------------
# composition with a perturbed identity


def compose_perturbed(
    gamma: WeightedFunction,
    eta: WeightedFunction,
    u: DomainSet,
    v: DomainSet,
    w: DomainSet,
    gamma_lip: float,
    weights: Sequence[Weight] = (),
    pair: tuple[WeightedFunction, WeightedFunction, WeightedFunction, WeightedFunction] | None = None,
) -> tuple[WeightedFunction, list[CheckReport]]:
    """x -> gamma(eta(x) + x) with chain-rule jets.

    ``gamma_lip`` is a certified bound for the unweighted order-1 seminorm
    of gamma on its whole domain.  ``pair`` supplies (gamma0, eta0,
    gamma_diff, eta_diff) for the distance estimate, where the symbolic
    differences carry the certified bounds the right-hand side needs.
    """
    if not v.balanced:
        raise PreconditionError("the perturbation range must be balanced")
    if not w.contains_set(v.minkowski_sum(u)):
        raise GeometryError("V + U is not contained in W")
    pts = eta.grid.points
    for x in pts:
        if not v.contains(eta.map.value(x)):
            raise RangeEscapeError(
                f"eta({np.asarray(x).tolist()}) escapes the perturbation range"
            )
    shifted = SumMap([eta.map, identity_map(u)])
    result_map = ComposeMap(gamma.map, shifted)
    max_order = min(gamma.max_order, eta.max_order)
    result = WeightedFunction(result_map, eta.grid, max_order)

    sup = lambda vec: float(np.max(np.abs(vec)))
    reports: list[CheckReport] = []
    for wgt in weights:
        per_point = []
        for x in pts:
            fx = abs(wgt(x))
            ex = eta.map.value(x)
            lhs = fx * sup(result_map.value(x))
            rhs = fx * (gamma_lip * sup(ex) + sup(gamma.map.value(x)))
            per_point.append(
                bound_report(
                    "est:Funktionswerte_Gewicht_K-Kompo", lhs, rhs, tolerance=1e-9,
                    lhs_provenance=EXACT, rhs_provenance=CERTIFIED_UPPER,
                    witness=tuple(float(c) for c in x), detail=f"weight {wgt.name}",
                )
            )
        reports.append(
            merge_min_margin("est:Funktionswerte_Gewicht_K-Kompo", per_point)
        )
        if pair is not None:
            gamma0, eta0, gamma_diff, eta_diff = pair
            needed = (
                eta_diff.certified_bound(wgt.name, 0),
                gamma_diff.certified_bound("one", 1),
                eta0.certified_bound(wgt.name, 0),
                gamma_diff.certified_bound(wgt.name, 0),
            )
            if any(b is None for b in needed):
                reports.append(
                    skipped_report(
                        "est:f,0-Norm_Differenz_Kompo",
                        f"missing pair certificates for weight {wgt.name}",
                    )
                )
                continue
            other = ComposeMap(gamma0.map, SumMap([eta0.map, identity_map(u)]))
            gapf = WeightedFunction(difference_map(result_map, other), eta.grid, 0)
            lhs_d = weighted_seminorm(gapf, wgt, 0).value
            rhs_d = gamma_lip * needed[0] + needed[1] * needed[2] + needed[3]
            reports.append(
                bound_report(
                    "est:f,0-Norm_Differenz_Kompo", lhs_d, rhs_d, tolerance=1e-9,
                    lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
                    detail=f"weight {wgt.name}",
                )
            )
    return result, reports


def compose_derivative_check(
    gamma: WeightedFunction,
    eta: WeightedFunction,
    u: DomainSet,
    v: DomainSet,
    gamma_dir: JetMap,
    eta_dir: JetMap,
    steps: Sequence[float] = DEFAULT_FD_STEPS,
    check_id: str = "id:Ableitung_Kompo",
) -> CheckReport:
    """The derivative of composition splits into the two stated terms."""
    pts = eta.grid.points
    dgamma = gamma.map.differential()
    used, errors = [], []
    for t in steps:
        ok, worst = True, 0.0
        for x in pts:
            ex, dx = eta.map.value(x), eta_dir.value(x)
            if not (v.contains(ex + t * dx) and v.contains(ex - t * dx)):
                ok = False
                break
            z = ex + np.asarray(x, float)
            plus = (gamma.map.value(z + t * dx) + t * gamma_dir.value(z + t * dx))
            minus = (gamma.map.value(z - t * dx) - t * gamma_dir.value(z - t * dx))
            exact = dgamma.value(z) @ dx + gamma_dir.value(z)
            worst = max(worst, float(np.max(np.abs((plus - minus) / (2 * t) - exact))))
        if ok:
            used.append(t)
            errors.append(worst)
    return convergence_report(check_id, used, errors)


# ---------------------------------------------------------------------------
# quasi-inverse by Neumann series


def neumann_terms(q: float, cfg: NeumannConfig = NeumannConfig()) -> int:
    """Smallest truncation order N with geometric tail q^(N+1)/(1-q) at or
    below the tail tolerance."""
    if not 0.0 <= q < 1.0:
        raise SpectralConditionError(f"operator norm {q} is not below 1")
    if q == 0.0:
        return 1
    n_terms = 1
    while q ** (n_terms + 1) / (1.0 - q) > cfg.tail_tol:
        n_terms += 1
        if n_terms > cfg.max_terms:
            raise TruncationError(
                f"needs more than {cfg.max_terms} terms for tail {cfg.tail_tol}"
            )
    return n_terms


def quasi_inverse(a, cfg: NeumannConfig = NeumannConfig()):
    """QI(a) = -(a + a^2 + ...) truncated so the geometric tail is below
    tail_tol; satisfies a + QI(a) - a QI(a) = 0 within twice the tail."""
    wrap = isinstance(a, MultilinearMap)
    mat = np.atleast_2d(np.asarray(a.entries if wrap else a, dtype=float))
    if mat.shape[0] != mat.shape[1]:
        raise SpectralConditionError("quasi-inverse needs a square operator")
    n_terms = neumann_terms(opnorm_inf(mat), cfg)
    power = mat.copy()
    acc = mat.copy()
    for _ in range(1, n_terms):
        power = power @ mat
        acc += power
    qi = -acc
    if wrap:
        return MultilinearMap(qi, 1)
    return qi


def quasi_inverse_report(
    a: np.ndarray, cfg: NeumannConfig = NeumannConfig(),
    check_id: str = "qi:neumann_relation",
) -> tuple[np.ndarray, CheckReport]:
    qi = quasi_inverse(a, cfg)
    residual = opnorm_inf(np.atleast_2d(a) + qi - np.atleast_2d(a) @ qi)
    return qi, bound_report(
        check_id, residual, 2.0 * cfg.tail_tol, tolerance=0.0,
        lhs_provenance=EXACT, rhs_provenance=EXACT,
        detail="algebra relation a + QI(a) - a QI(a) = 0 up to the tail",
    )


# ---------------------------------------------------------------------------
# inversion of a perturbed identity


class InverseMap(JetMap):
    """y -> (phi + id)^{-1}(y) - y on the smaller domain, by fixed point.

    The first-order jet is assembled from the derivative identity
    D Inv = (D phi . QI(-D phi) - D phi) o (Inv + id), whose quasi-inverse
    appears with the sign pinned by the algebra relation.
    """

    def __init__(self, phi: JetMap, u: DomainSet, v: DomainSet,
                 cfg: ContractionConfig, neumann: NeumannConfig = NeumannConfig()):
        super().__init__(v, (phi.out_dim,), max_order=1)
        self.phi, self.u, self.v, self.cfg, self.neumann = phi, u, v, cfg, neumann
        self._cache: dict[bytes, tuple[np.ndarray, int, float]] = {}

    def solve(self, y) -> tuple[np.ndarray, int, float]:
        """Fixed point of x -> y - phi(x); returns (x, iterations, worst
        contraction ratio observed)."""
        y = np.asarray(y, dtype=float)
        key = y.tobytes()
        if key in self._cache:
            return self._cache[key]
        cfg = self.cfg
        stop = cfg.fix_tol * (1.0 - cfg.tau) / cfg.tau
        x = y.copy()
        prev_inc = None
        worst_ratio = 0.0
        for it in range(1, cfg.max_iters + 1):
            if not self.u.contains(x):
                raise ContractionViolationError(
                    f"iterate {x.tolist()} escaped the domain; a certificate is wrong"
                )
            x_next = y - self.phi.value(x)
            inc = float(np.max(np.abs(x_next - x)))
            if prev_inc is not None and prev_inc > 1e-14:
                worst_ratio = max(worst_ratio, inc / prev_inc)
            x = x_next
            if inc <= stop:
                out = (x, it, worst_ratio)
                self._cache[key] = out
                return out
            prev_inc = inc
        raise IterationError(f"no convergence within {cfg.max_iters} iterations")

    def value(self, y):
        x, _, _ = self.solve(y)
        return x - np.asarray(y, dtype=float)

    def tensor(self, y, ell):
        self._check_order(ell)
        if ell == 0:
            return MultilinearMap(self.value(y), 1)
        x, _, _ = self.solve(y)
        a = self.phi.tensor(x, 1).entries
        qi = quasi_inverse(-a, self.neumann)
        return MultilinearMap(a @ qi - a, 1)


def invert_perturbed(
    phi: WeightedFunction,
    u: DomainSet,
    v: DomainSet,
    grid_v: SampleGrid,
    cfg: ContractionConfig,
    weights: Sequence[Weight] = (),
) -> tuple[WeightedFunction, list[CheckReport]]:
    """Invert phi + id on V; phi must carry certified unweighted bounds
    ("one", 1) < tau and ("one", 0) < (r/2)(1 - tau)."""
    if not u.convex:
        raise PreconditionError("the large domain must be convex")
    ball_r = v.minkowski_sum(
        DomainSet(u.space, "ball", center=(0.0,) * u.dim, radius=cfg.r)
    )
    if not u.contains_set(ball_r):
        raise GeometryError("V + ball(0, r) is not contained in U")
    c11 = phi.require_bound("one", 1)
    c10 = phi.require_bound("one", 0)
    if not (c11 < cfg.tau and c10 < cfg.r / 2.0 * (1.0 - cfg.tau)):
        raise PreconditionError(
            f"not in the operator domain: |phi|_(1,1) = {c11} vs tau = {cfg.tau}, "
            f"|phi|_(1,0) = {c10} vs (r/2)(1-tau) = {cfg.r / 2 * (1 - cfg.tau)}"
        )
    inv = InverseMap(phi.map, u, v, cfg)
    result = WeightedFunction(inv, grid_v, 1)

    residuals, ratios = [], []
    sup = lambda vec: float(np.max(np.abs(vec)))
    est_reports = {w.name: [] for w in weights}
    for y in grid_v.points:
        x, _, ratio = inv.solve(y)
        residuals.append(sup(x + phi.map.value(x) - y))
        ratios.append(ratio)
        for w in weights:
            fy = abs(w(y))
            lhs = fy * sup(x - y)
            rhs = fy * sup(phi.map.value(y)) / (1.0 - c11)
            est_reports[w.name].append(
                bound_report(
                    "est:Abschaetzung_gewichteter_FWert_der_K-Inversion",
                    lhs, rhs, tolerance=1e-9,
                    lhs_provenance=EXACT, rhs_provenance=CERTIFIED_UPPER,
                    witness=tuple(float(c) for c in y), detail=f"weight {w.name}",
                )
            )
    reports = [
        bound_report(
            "prop:Zsf_Inversion_gewAbb", max(residuals), 2.0 * cfg.fix_tol,
            tolerance=0.0, lhs_provenance=EXACT, rhs_provenance=EXACT,
            detail="right-inverse residual over the evaluation grid",
        ),
        bound_report(
            "prop:Zsf_Inversion_gewAbb", max(ratios) if ratios else 0.0,
            cfg.tau + 1e-9, tolerance=0.0,
            lhs_provenance=EXACT, rhs_provenance=EXACT,
            detail="observed contraction ratio of fixed-point increments",
        ),
    ]
    for w in weights:
        reports.append(
            merge_min_margin(
                "est:Abschaetzung_gewichteter_FWert_der_K-Inversion",
                est_reports[w.name],
            )
        )
    return result, reports


def inversion_pair_difference_check(
    phi: WeightedFunction,
    psi: WeightedFunction,
    diff: WeightedFunction,
    u: DomainSet,
    v: DomainSet,
    grid_v: SampleGrid,
    cfg: ContractionConfig,
    weight: Weight,
    check_id: str = "est:f0-norm_Diff_KoorInv",
) -> CheckReport:
    """Weighted distance of two inverses against the certified bound built
    from the pair's certificates (diff = phi - psi symbolically)."""
    c_psi_11 = psi.require_bound("one", 1)
    c_phi_11 = phi.require_bound("one", 1)
    c_diff_11 = diff.require_bound("one", 1)
    c_phi_f0 = phi.require_bound(weight.name, 0)
    c_diff_f0 = diff.require_bound(weight.name, 0)
    inv_phi = InverseMap(phi.map, u, v, cfg)
    inv_psi = InverseMap(psi.map, u, v, cfg)
    lhs = 0.0
    witness = ()
    for y in grid_v.points:
        gap = abs(weight(y)) * float(
            np.max(np.abs(inv_psi.value(y) - inv_phi.value(y)))
        )
        if gap > lhs:
            lhs, witness = gap, tuple(float(c) for c in y)
    rhs = (c_diff_11 * c_phi_f0 / (1.0 - c_phi_11) + c_diff_f0) / (1.0 - c_psi_11)
    return bound_report(
        check_id, lhs, rhs, tolerance=1e-9,
        lhs_provenance=GRID_LOWER, rhs_provenance=CERTIFIED_UPPER,
        witness=witness, detail=f"weight {weight.name}",
    )


def inversion_direction_check(
    phi: WeightedFunction,
    direction: WeightedFunction,
    u: DomainSet,
    v: DomainSet,
    probes: np.ndarray,
    cfg: ContractionConfig,
    steps: Sequence[float] = (0.05, 0.025, 0.0125, 0.00625),
    check_id: str = "id:Ableitung_Inversion",
) -> CheckReport:
    """Directional derivative of the inversion operator in its function
    argument against the closed form -(1 - QI(-D phi)) phi_1 composed with
    the inverse; the quasi-inverse sign is the one pinned by the algebra
    relation (see the operator-domain notes)."""
    c11 = phi.require_bound("one", 1)
    d11 = direction.require_bound("one", 1)
    c10 = phi.require_bound("one", 0)
    d10 = direction.require_bound("one", 0)
    base = InverseMap(phi.map, u, v, cfg)
    used, errors = [], []
    for t in steps:
        if c11 + t * d11 >= cfg.tau or c10 + t * d10 >= cfg.r / 2 * (1 - cfg.tau):
            continue
        plus = InverseMap(SumMap([phi.map, ScaledMap(direction.map, t)]), u, v, cfg)
        minus = InverseMap(SumMap([phi.map, ScaledMap(direction.map, -t)]), u, v, cfg)
        worst = 0.0
        for y in probes:
            x_star, _, _ = base.solve(y)
            a = phi.map.tensor(x_star, 1).entries
            qi = quasi_inverse(-a)
            exact = -((np.eye(a.shape[0]) - qi) @ direction.map.value(x_star))
            fd = (plus.value(y) - minus.value(y)) / (2 * t)
            worst = max(worst, float(np.max(np.abs(fd - exact))))
        used.append(t)
        errors.append(worst)
    # each quotient carries solver noise up to 2 fix_tol / (2t); below a few
    # times that floor the slope carries no information and the errors are
    # already at the achievable precision
    noise_floor = 4.0 * cfg.fix_tol / min(used) if used else EXACTNESS_TOL
    return convergence_report(
        check_id, used, errors,
        exact_tol=max(EXACTNESS_TOL, noise_floor),
        detail="derivative in the operator argument;",
    )


def inversion_jacobian_check(
    phi: WeightedFunction,
    u: DomainSet,
    v: DomainSet,
    probes: np.ndarray,
    cfg: ContractionConfig,
    tol: float = 1e-6,
    check_id: str = "id:Differential_der_inversen_Abb",
) -> CheckReport:
    """The assembled first-order jet of the inverse against a central
    finite-difference Jacobian at probe points."""
    inv = InverseMap(phi.map, u, v, cfg)
    reports = []
    for y in probes:
        exact = inv.tensor(y, 1)
        approx = fd_jet(inv, y, 1).tensors[1]
        dev = op_norm(
            MultilinearMap(exact.entries - approx.entries, 1)
        )
        reports.append(
            identity_report(
                check_id, dev, tolerance=tol,
                witness=tuple(float(c) for c in y),
            )
        )
    return merge_min_margin(check_id, reports)
