"""Explicit upper-bound disks: axis case, generic case and resonant case.

The axis and generic builders produce an approximate map phi^0, fix the
interpolation errors with a Lagrange-type correction phi^1, and measure the
overshoot gamma of phi^0 - phi^1 beyond the bidisk. ``rescale_to_bidisk``
then trades the overshoot for a slightly larger node triple. The resonant
builder only chooses nodes; its witness map comes from the exact reduction.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import arg_condition
from .core import (Method, NodeTriple, PoleConfig, interpolation_conditions, node_feasible,
                   normalized_cost)
from .errors import (ArgCondViolated, AssumptionViolated, DomainError, Infeasible, NodeEscapes,
                     NodesTooClose, OvershootTooLarge)
from .geometry import Verdict, mobius
from .green import BidiskPoint
from .maps import (ZERO, ZETA, AnalyticDiskMap, Blaschke, Const, boundary_sup, circle_grid)

GRID_N = 4096
TAU_IMG = 1e-10
MIN_NODE_SEPARATION = 1e-8
# used to report, not assert, the suppressed-constant estimates
AUDIT_CONSTANT = 10.0
RESONANT_C1 = 40.0
RESONANT_W_BOUNDS = (1 / 8, 1 / 10, 1 / 20, 1 / 2)


# -- Lagrange correction ------------------------------------------------------

@dataclass(frozen=True)
class CorrectionTerm:
    errors: tuple          # (errors of coordinate 1, errors of coordinate 2), one per condition
    first: object
    second: object
    sup: float

    def as_map(self):
        return AnalyticDiskMap(self.first, self.second)


def _factor(kind, node):
    if kind == "blaschke":
        return Blaschke(node)
    return ZETA - node


def _factor_value(kind, node, at):
    return mobius(node, at) if kind == "blaschke" else at - node


def lagrange_correct(base: AnalyticDiskMap, conditions, kinds=None, grid_n=GRID_N) -> CorrectionTerm:
    """Correction phi^1 such that base - phi^1 meets every condition.

    Each error E_j is carried by a basis function that vanishes at all the
    other condition nodes and equals 1 at node j. ``kinds[k][i]`` picks the
    vanishing factor used for node i in coordinate k: ``"linear"`` gives
    (zeta - node_i), ``"blaschke"`` gives phi_{node_i}(zeta).
    """
    nodes = [complex(nd) for nd, _ in conditions]
    for a, b in itertools.combinations(nodes, 2):
        if abs(a - b) < MIN_NODE_SEPARATION:
            raise NodesTooClose(f"condition nodes {a} and {b} are closer than {MIN_NODE_SEPARATION}")
    if kinds is None:
        kinds = (("linear",) * len(nodes),) * 2
    coords, errs = [], []
    for k, coord in enumerate((base.first, base.second)):
        e_k = tuple(complex(coord(nd) - tgt[k]) for nd, tgt in conditions)
        errs.append(e_k)
        terms = []
        for j, e in enumerate(e_k):
            if e == 0:
                continue
            expr = Const(e)
            for i, nd in enumerate(nodes):
                if i != j:
                    expr = expr * _factor(kinds[k][i], nd) * (1 / _factor_value(kinds[k][i], nd, nodes[j]))
            terms.append(expr)
        coords.append(sum(terms[1:], terms[0]) if terms else ZERO)
    corr = AnalyticDiskMap(coords[0], coords[1])
    f1, f2 = corr(circle_grid(grid_n))
    sup = float(max(np.max(np.abs(f1)), np.max(np.abs(f2))))
    return CorrectionTerm(tuple(errs), coords[0], coords[1], sup)


# -- results ------------------------------------------------------------------

@dataclass(frozen=True)
class ConstructionResult:
    map: AnalyticDiskMap
    nodes: NodeTriple
    cost: float            # normalized cost at the construction nodes, before rescaling
    gamma: float
    method: Method
    base: AnalyticDiskMap = None
    correction: CorrectionTerm = None
    swapped: bool = False
    info: dict = field(default_factory=dict)

    @property
    def rescaled_cost_estimate(self):
        return self.cost + 3 * math.log1p(self.gamma)


def _swap_map(m: AnalyticDiskMap):
    return AnalyticDiskMap(m.second, m.first, m.overshoot, m.label)


def _finish(m, grid_n, max_overshoot):
    sup = boundary_sup(m, grid_n)
    gamma = max(0.0, sup - 1.0)
    if gamma > max_overshoot:
        raise OvershootTooLarge(f"overshoot {gamma:.3e} exceeds the allowed {max_overshoot:.3e}")
    # an independent, finer grid must not see more than the declared overshoot
    f1, f2 = m(circle_grid(4 * grid_n))
    fine = float(max(np.max(np.abs(f1)), np.max(np.abs(f2))))
    if fine > 1 + gamma + TAU_IMG:
        raise OvershootTooLarge(f"fine-grid sup {fine} exceeds 1 + gamma = {1 + gamma}")
    return m.with_overshoot(gamma), gamma


def axis_zeta2(z1, eps_norm):
    return 1.0 - min(eps_norm * abs(z1), 1e-4)


def build_axis_case(z: BidiskPoint, p: PoleConfig, zeta2=None, grid_n=GRID_N,
                    max_overshoot=0.5) -> ConstructionResult:
    """Disk through the poles and (z1, 0) with nodes zeta0 = z1, zeta1 = eps1, zeta2 ~ 1."""
    if z.z2 != 0:
        if z.z1 == 0:
            r = build_axis_case(z.swapped(), p.swapped(), zeta2, grid_n, max_overshoot)
            return ConstructionResult(_swap_map(r.map), r.nodes.swapped(), r.cost, r.gamma, r.method,
                                      _swap_map(r.base), r.correction, True, r.info)
        raise AssumptionViolated("the axis construction needs z1 = 0 or z2 = 0")
    z1, e1, e2 = z.z1, p.eps1, p.eps2
    if not 0 < abs(z1) <= 0.5:
        raise AssumptionViolated(f"axis case needs 0 < |z1| <= 1/2, got {abs(z1)}")
    if abs(e1) > abs(z1) / 2:
        raise AssumptionViolated("axis case needs |eps1| <= |z1|/2")
    if zeta2 is None:
        zeta2 = axis_zeta2(z1, p.norm)
    zeta2 = complex(zeta2)
    nodes = NodeTriple(z1, e1, zeta2)

    scale2 = e2 / (mobius(e1, 1.0) * mobius(z1, 1.0))
    base = AnalyticDiskMap(ZETA * Blaschke(zeta2),
                           ZETA * Blaschke(e1) * Blaschke(z1) * Const(scale2), label="axis-base")
    conds = interpolation_conditions(nodes, p, z)   # nodes 0, zeta1, zeta2, zeta0
    kinds = (("linear", "linear", "blaschke", "linear"), ("blaschke",) * 4)
    corr = lagrange_correct(base, conds, kinds, grid_n)
    m, gamma = _finish(AnalyticDiskMap(base.first - corr.first, base.second - corr.second,
                                       label="axis"), grid_n, max_overshoot)
    E1, E3 = corr.errors[0][1], corr.errors[0][3]
    E2 = corr.errors[1][2]
    d = abs(1 - zeta2)
    info = {
        "E1": E1, "E2": E2, "E3": E3,
        "E1_formula": e1 * (mobius(zeta2, e1) - 1),
        "E3_formula": z1 * (mobius(zeta2, z1) - 1),
        "E2_formula": e2 * (zeta2 * mobius(e1, zeta2) / mobius(e1, 1.0)
                            * mobius(z1, zeta2) / mobius(z1, 1.0) - 1),
        "E1_bound_ok": abs(E1) <= 5 / 3 * d * abs(e1),
        "E3_bound_ok": abs(E3) <= 3 * d * abs(z1),
        "E2_audit_ok": abs(E2) <= AUDIT_CONSTANT * d * abs(e2),
        "correction_sup": corr.sup,
    }
    return ConstructionResult(m, nodes, normalized_cost(nodes), gamma, Method.AXIS, base, corr,
                              False, info)


def _generic_branch(z, p, zeta0, zeta1, grid_n, max_overshoot):
    mu = z.z2 / z.z1
    sigma = p.eps2 / p.eps1
    zeta2 = -(sigma / mu) * zeta1
    nodes = NodeTriple(zeta0, zeta1, zeta2)
    # zeta (zeta - a)/(1 - zeta conj a) = -zeta phi_a(zeta)
    base = AnalyticDiskMap(-(ZETA * Blaschke(zeta2)), Const(-mu) * ZETA * Blaschke(zeta1),
                           label="generic-base")
    conds = interpolation_conditions(nodes, p, z)
    corr = lagrange_correct(base, conds, grid_n=grid_n)
    m, gamma = _finish(AnalyticDiskMap(base.first - corr.first, base.second - corr.second,
                                       label="generic"), grid_n, max_overshoot)
    e1, e2 = p.eps1, p.eps2
    z0c, z1c, z2c = zeta0.conjugate(), zeta1.conjugate(), zeta2.conjugate()
    info = {
        "mu": mu, "sigma": sigma,
        "identity1": zeta1 * (zeta1 - zeta2) - e1,
        "identity2": mu * zeta2 * (zeta2 - zeta1) - e2,
        "E": (corr.errors[0][1], corr.errors[1][2], corr.errors[0][3], corr.errors[1][3]),
        "E_formula": (e1 * zeta1 * z2c / (1 - zeta1 * z2c),
                      e2 * z1c * zeta2 / (1 - z1c * zeta2),
                      zeta0 * (zeta0 ** 2 * z2c - zeta2) / (1 - zeta0 * z2c),
                      mu * zeta0 * (zeta0 ** 2 * z1c - zeta1) / (1 - zeta0 * z1c)),
        "correction_sup": corr.sup,
    }
    return ConstructionResult(m, nodes, normalized_cost(nodes), gamma, Method.GENERIC, base, corr,
                              False, info)


def build_generic_case(z: BidiskPoint, p: PoleConfig, c0=0.5, grid_n=GRID_N,
                       max_overshoot=0.5) -> ConstructionResult:
    """Nodes zeta0^2 = z1, zeta1 = nu sqrt(eps1), zeta2 = -(sigma/mu) zeta1; cost -> (3/2) log|z1|.

    All sign choices of the three square roots are tried; the variant with
    the smallest cost + 3 log(1 + gamma) is returned.
    """
    if z.z1 == 0 or z.z2 == 0:
        raise AssumptionViolated("the generic construction needs z1 != 0 and z2 != 0")
    if abs(z.z2) > abs(z.z1):
        r = build_generic_case(z.swapped(), p.swapped(), c0, grid_n, max_overshoot)
        info = dict(r.info, swapped_frame=True)
        return ConstructionResult(_swap_map(r.map), r.nodes.swapped(), r.cost, r.gamma, r.method,
                                  _swap_map(r.base), r.correction, True, info)
    ac = arg_condition(z, p)
    if ac < c0:
        raise ArgCondViolated(f"argument condition {ac:.3e} < c0 = {c0}")
    mu, sigma = z.z2 / z.z1, p.eps2 / p.eps1
    q = 1 + sigma / mu
    if abs(q) < c0:
        raise ArgCondViolated(f"|1 + sigma/mu| = {abs(q):.3e} < c0 = {c0}")
    r0, re1, rnu = cmath.sqrt(z.z1), cmath.sqrt(p.eps1), 1 / cmath.sqrt(q)
    best, last_err = None, None
    seen = set()
    for s0, s1, s2 in itertools.product((1, -1), repeat=3):
        zeta0, zeta1 = s0 * r0, (s1 * rnu) * (s2 * re1)
        key = (zeta0, zeta1)
        if key in seen:
            continue
        seen.add(key)
        try:
            res = _generic_branch(z, p, zeta0, zeta1, grid_n, max_overshoot)
        except (DomainError, NodesTooClose, OvershootTooLarge) as exc:
            last_err = exc
            continue
        res.info["branch"] = (s0, s1, s2)
        if best is None or res.rescaled_cost_estimate < best.rescaled_cost_estimate:
            best = res
    if best is None:
        raise last_err
    return best


# -- resonant case ------------------------------------------------------------

@dataclass(frozen=True)
class ResonantResult:
    nodes: NodeTriple
    report: object        # FeasibilityReport for the problem as given
    cost: float
    C_res: float          # cost - 2 log|z|, bounded by -log 2 + log 2|xi| + log 4|xi + xi'| - 2 log|z1|
    xi: complex
    xi_prime: complex
    gamma_drift: complex
    w_canonical: tuple    # w1..w4 in the frame with |z2| <= |z1|
    w_bounds_ok: tuple
    swapped: bool = False

    @property
    def method(self):
        return Method.RESONANT


def resonant_constant(C1=RESONANT_C1):
    """Limit of the resonant cost constant as eps -> 0 (xi' -> 0): log(4 C1^2)."""
    return math.log(4 * C1 * C1)


def build_resonant_case(z: BidiskPoint, p: PoleConfig, C1=RESONANT_C1) -> ResonantResult:
    """Nodes zeta0 = 1/2, zeta1 = zeta0 + C1 z1, zeta2 = zeta1 + xi' along eps2 ~ -(z2/z1) eps1."""
    swapped = abs(z.z2) > abs(z.z1)
    zc, pc = (z.swapped(), p.swapped()) if swapped else (z, p)
    z1, z2 = zc.z1, zc.z2
    if z1 == 0 or z2 == 0:
        raise AssumptionViolated("the resonant construction needs z1 != 0 and z2 != 0")
    mu = z2 / z1
    drift = mu + pc.eps2 / pc.eps1
    zeta0 = 0.5
    xi = C1 * z1
    if abs(xi) > 0.25:
        raise AssumptionViolated(f"|xi| = C1 |z1| = {abs(xi):.4g} exceeds 1/4")
    if abs(drift) > 1:
        raise AssumptionViolated(f"resonance drift |gamma| = {abs(drift):.3g} exceeds 1")
    zeta1 = zeta0 + xi
    xi_p = (pc.eps1 / z1) * (zeta0 / zeta1) * ((1 - abs(zeta1) ** 2) / (1 - zeta0 * zeta1.conjugate())) * xi
    zeta2 = zeta1 + xi_p
    try:
        nodes_c = NodeTriple(zeta0, zeta1, zeta2)
    except DomainError as exc:
        raise AssumptionViolated(str(exc)) from exc
    rep_c = node_feasible(nodes_c, pc, zc)
    if rep_c.verdict is Verdict.INFEASIBLE:
        raise Infeasible(f"resonant nodes infeasible ({', '.join(rep_c.failed)}); take eps smaller")
    nodes = nodes_c.swapped() if swapped else nodes_c
    rep = node_feasible(nodes, p, z)
    cost = normalized_cost(nodes)
    bounds_ok = tuple(abs(w) <= b for w, b in zip(rep_c.ws, RESONANT_W_BOUNDS))
    C_res = -math.log(2) + math.log(2 * abs(xi)) + math.log(4 * abs(xi + xi_p)) - 2 * math.log(abs(z1))
    return ResonantResult(nodes, rep, cost, C_res, xi, xi_p, drift, rep_c.ws, bounds_ok, swapped)


# -- overshoot removal ----------------------------------------------------------

def rescale_to_bidisk(m: AnalyticDiskMap, n: NodeTriple, gamma=None):
    """psi(zeta) = m(zeta/(1+gamma)) with nodes (1+gamma) zeta_j."""
    if gamma is None:
        gamma = m.overshoot
    s = 1.0 + gamma
    for v in n.as_tuple():
        if s * abs(v) >= 1:
            raise NodeEscapes(f"node {v} leaves the disk under scaling by {s}")
    psi = m.precomposed_with_scaling(1 / s)
    return AnalyticDiskMap(psi.first, psi.second, 0.0, m.label + "-rescaled"), n.scaled(s)


@dataclass(frozen=True)
class BidiskAutomorphism:
    """w -> (phi_{z1}(w1), phi_{z2}(w2)), exchanging z and (0, 0)."""
    z: BidiskPoint

    def __call__(self, w1, w2):
        return mobius(self.z.z1, w1), mobius(self.z.z2, w2)

    def distortion(self, gamma):
        r = self.z.norm
        return gamma * (1 + r) / (1 - (1 + gamma) * r)


def bidisk_automorphism(z: BidiskPoint) -> BidiskAutomorphism:
    return BidiskAutomorphism(z)


@dataclass(frozen=True)
class CertifiedNodes:
    nodes: NodeTriple
    cost: float
    scale: float
    verdict: Verdict


def _scaled_pinned(n, s):
    vals = [s * v if s * abs(v) < 1 - 1e-15 else v for v in n.as_tuple()]
    try:
        return NodeTriple(*vals)
    except DomainError:
        return None


def _ok(n, p, z):
    if n is None:
        return False
    try:
        rep = node_feasible(n, p, z)
    except Exception:
        return False
    # strict: no use of the equality band, so certified triples are honest upper bounds
    return rep.moduli_ok and rep.gap1 >= 0 and rep.gap2 >= 0


def certify_nodes(n: NodeTriple, p: PoleConfig, z: BidiskPoint, s_max=2.0) -> CertifiedNodes:
    """Smallest node scaling s >= 1 whose triple passes the exact feasibility test.

    Nodes that would leave the disk under the scaling stay where they are
    (the axis construction puts zeta2 within 1e-4 of the circle, well inside
    the overshoot it causes).
    """
    if _ok(n, p, z):
        return CertifiedNodes(n, normalized_cost(n), 1.0, node_feasible(n, p, z).verdict)
    lo, hi, step = 1.0, None, 1e-12
    while 1.0 + step <= s_max:
        cand = _scaled_pinned(n, 1.0 + step)
        if _ok(cand, p, z):
            hi = 1.0 + step
            break
        lo = 1.0 + step
        step *= 2
    if hi is None:
        raise Infeasible(f"no node scaling up to {s_max} makes the triple feasible")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _ok(_scaled_pinned(n, mid), p, z):
            hi = mid
        else:
            lo = mid
    best = _scaled_pinned(n, hi)
    return CertifiedNodes(best, normalized_cost(best), hi, node_feasible(best, p, z).verdict)
