"""Lower-bound side: the inequality chain as a checkable certificate and the constant C(c0).

A certificate evaluates every link of the chain that rules out node triples
with cost <= (3/2) log|z| - log C'_H at concrete data. Each link is a record
(lhs, rhs, holds). The last link compares the argument-condition quantity with
an upper bound that is below c0 once eps is small. So a triple for which the
cost hypothesis holds, every link holds and the argument condition holds
would be a counterexample. ``ChainReport.contradiction_witness`` flags
exactly that.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import HypothesisViolated, ZeroInput
from .geometry import circle_projection, mobius, pseudo_distance
from .green import BidiskPoint

C1_AUDIT = 50.0
C2_AUDIT = 100.0
SMALLNESS_FACTOR = 1e-3   # |eps| <= 1e-3 |z|^3


def _unit(w):
    if w == 0:
        raise ZeroInput("argument of 0 is undefined")
    return w / abs(w)


def arg_condition(z: BidiskPoint, p) -> float:
    """|z1* / z2* + eps1* / eps2*| in [0, 2]; zero in the resonant direction."""
    return abs(_unit(z.z1) / _unit(z.z2) + _unit(p.eps1) / _unit(p.eps2))


# -- the constant C(c0) -------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundConstants:
    c0: float
    CH_prime: float
    C: float
    c1_audit: float = C1_AUDIT
    c2_audit: float = C2_AUDIT

    @property
    def K(self):
        return self.c0 * self.CH_prime


def _thresholds_ok(c0, ch):
    k = c0 * ch
    return (6 / k ** 2 < c0 / 2      # final contradiction
            and k ** 2 >= 2           # lower bounds for |w1|, |w4| and for |zeta1|, |zeta2|
            and k >= 2)               # |phi_{zeta1}(zeta0)| <= 1/2 for the argument lemma


def lower_bound_constant(c0: float) -> LowerBoundConstants:
    """Smallest C'_H in {1, 2, 4, ...} meeting every threshold of the chain."""
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    ch = 1.0
    while not _thresholds_ok(c0, ch):
        ch *= 2
    return LowerBoundConstants(float(c0), ch, math.log(ch))


# -- certificate -------------------------------------------------------------

@dataclass(frozen=True)
class ChainStep:
    name: str
    lhs: float
    rhs: float
    relation: str
    holds: bool

    def to_dict(self):
        return asdict(self)


def _step(name, lhs, rhs, relation="<="):
    lhs, rhs = float(lhs), float(rhs)
    ok = {"<=": lhs <= rhs, "<": lhs < rhs, ">=": lhs >= rhs, ">": lhs > rhs}[relation]
    return ChainStep(name, lhs, rhs, relation, bool(ok))


@dataclass(frozen=True)
class ChainReport:
    cost: float
    bar: float
    hypothesis: bool
    argcond: float
    c0: float
    steps: tuple
    final: ChainStep
    smallness: ChainStep
    final_rhs_below_c0: bool
    info: dict = field(default_factory=dict)

    @property
    def chain_holds(self):
        return all(s.holds for s in self.steps)

    @property
    def failed_steps(self):
        return [s.name for s in self.steps + (self.final, self.smallness) if not s.holds]

    @property
    def contradiction_witness(self):
        """True for a triple that would refute the chain: nothing should ever set this."""
        return (self.hypothesis and self.chain_holds and self.final.holds and self.smallness.holds
                and self.argcond >= self.c0)

    def step(self, name):
        for s in self.steps + (self.final, self.smallness):
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self):
        return {
            "cost": self.cost, "bar": self.bar, "hypothesis": self.hypothesis,
            "argcond": self.argcond, "c0": self.c0,
            "steps": [s.to_dict() for s in self.steps],
            "final": self.final.to_dict(), "smallness": self.smallness.to_dict(),
            "final_rhs_below_c0": self.final_rhs_below_c0,
            "contradiction_witness": self.contradiction_witness,
            "failed_steps": self.failed_steps,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def check_hypotheses(z: BidiskPoint, p, c0):
    if z.z1 == 0 or z.z2 == 0:
        raise HypothesisViolated("both coordinates of z must be nonzero")
    q = abs(z.z1 / z.z2)
    if not c0 <= q <= 1 / c0:
        raise HypothesisViolated(f"|z1/z2| = {q:.4g} is outside [c0, 1/c0] for c0 = {c0}")
    ac = arg_condition(z, p)
    if ac < c0:
        raise HypothesisViolated(f"argument condition {ac:.4g} < c0 = {c0}")
    return ac


def _abs_arg(a, b):
    return abs(cmath.phase(a / b))


def chain_certificate(z: BidiskPoint, p, n, c0, consts: LowerBoundConstants = None,
                      cost=None) -> ChainReport:
    """Evaluate the chain at (z, eps, nodes). ``cost`` overrides the node cost (fault injection)."""
    from .core import node_feasible, normalized_cost, w_values

    if consts is None:
        consts = lower_bound_constant(c0)
    ac = check_hypotheses(z, p, c0)
    z0, x1, x2 = n.as_tuple()
    w1, w2, w3, w4 = w_values(n, p, z)
    r = z.norm
    a1, a2 = abs(z.z1), abs(z.z2)
    e1, e2 = abs(p.eps1), abs(p.eps2)
    ch, K = consts.CH_prime, consts.K
    c1, c2 = consts.c1_audit, consts.c2_audit
    real_cost = normalized_cost(n)
    cost = real_cost if cost is None else float(cost)
    bar = 1.5 * math.log(r) - math.log(ch)
    hyp = cost <= bar

    d10 = pseudo_distance(x1, z0)
    d20 = pseudo_distance(x2, z0)
    d12 = pseudo_distance(x1, x2)
    rep = node_feasible(n, p, z)
    s = []
    s.append(_step("ineqex1", pseudo_distance(w1, w2), d10, "<"))
    s.append(_step("ineqex1_moduli", max(abs(w1), abs(w2)), 1.0, "<"))
    s.append(_step("ineqex2", pseudo_distance(w3, w4), d20, "<"))
    s.append(_step("ineqex2_moduli", max(abs(w3), abs(w4)), 1.0, "<"))
    s.append(_step("inphi10", d10, r ** 1.5 / (a1 * ch)))
    s.append(_step("inphi10_c0", r ** 1.5 / (a1 * ch), r ** 0.5 / K))
    s.append(_step("inphi20", d20, r ** 1.5 / (a2 * ch)))
    s.append(_step("inphi20_c0", r ** 1.5 / (a2 * ch), r ** 0.5 / K))
    s.append(_step("inzeta0", abs(z0), K * r ** 0.5, ">"))
    s.append(_step("inzeta0_phi", abs(z0), K ** 2 * max(d10, d20), ">="))
    s.append(_step("lbw2", abs(w2), K * r ** 0.5 / abs(z0), ">"))
    s.append(_step("lbw3", abs(w3), K * r ** 0.5 / abs(z0), ">"))
    garnett1 = (abs(w2) - d10) / (1 - abs(w2) * d10)
    garnett4 = (abs(w3) - d20) / (1 - abs(w3) * d20)
    s.append(_step("lbw1_invariant", abs(w1), garnett1, ">="))
    s.append(_step("lbw1", abs(w1), K * r ** 0.5 / (2 * abs(z0)), ">="))
    s.append(_step("lbw4_invariant", abs(w4), garnett4, ">="))
    s.append(_step("lbw4", abs(w4), K * r ** 0.5 / (2 * abs(z0)), ">="))
    s.append(_step("lbzeta1", abs(x1), abs(z0) / 2, ">="))
    s.append(_step("lbzeta2", abs(x2), abs(z0) / 2, ">="))
    s.append(_step("inphi12", d12, 4 * e1 / (K * r ** 0.5)))
    s.append(_step("argzeta12", _abs_arg(x1, x2), 24 * e1 / (K ** 2 * r)))
    # the c1 term bounds 2 arg(1 - conj(zeta2) zeta1); the argzeta12 term covers zeta2/zeta1
    t14 = c1 * e1 / (K * r ** 0.5) + 24 * e1 / (K ** 2 * r)
    s.append(_step("argest14", abs(circle_projection(w1 / w4) - circle_projection(-p.eps1 / p.eps2)), t14))
    g1, g2 = mobius(z0, x1), mobius(z0, x2)
    s.append(_step("argestphi12", _abs_arg(g1, g2), 12 * e1 / (c0 ** 2 * ch * r ** 1.5)))
    twz_mid = c1 * e1 / (K * r ** 0.5) + 12 * e1 / (c0 ** 2 * ch * r ** 1.5)
    twz = c2 * e1 / (K * r ** 1.5)
    s.append(_step("argestwz", abs(circle_projection(w2 / w3) - circle_projection(z.z1 / z.z2)), twz_mid))
    s.append(_step("argestwz_c2", twz_mid, twz))
    s.append(_step("arg_w1w2", abs(circle_projection(w1 / w2) - 1), 3 / K ** 2))
    s.append(_step("arg_w3w4", abs(circle_projection(w3 / w4) - 1), 3 / K ** 2))
    tri_lhs = abs(circle_projection(w1 / w4) - circle_projection(z.z1 / z.z2))
    s.append(_step("triangle", tri_lhs, 6 / K ** 2 + twz))
    final_rhs = 6 / K ** 2 + t14 + twz
    final = _step("final", ac, final_rhs)
    small = _step("smallness", max(e1, e2), SMALLNESS_FACTOR * r ** 3)
    info = {"real_cost": real_cost, "verdict": rep.verdict.value, "K": K}
    return ChainReport(cost, bar, hyp, ac, float(c0), tuple(s), final, small, final_rhs < c0, info)


# -- empirical audit of c1, c2 ----------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    samples: int
    premise_true: dict
    violations: dict

    @property
    def ok(self):
        return not any(self.violations.values())


def _random_dataset(rng, c0):
    """Nodes and feasible w-values; (z, eps) are then read off from the w formulas."""
    def polar(lo, hi, log=False):
        m = math.exp(rng.uniform(math.log(lo), math.log(hi))) if log else rng.uniform(lo, hi)
        return m * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))

    z0 = polar(0.3, 0.95)
    x1 = mobius(z0, polar(1e-4, 0.5, log=True))
    x2 = mobius(x1, polar(1e-9, 1e-2, log=True))
    w2 = polar(0.05, 0.999)
    # |z2|/|z1| is drawn from [c0, 1/c0] so the ratio hypothesis holds by construction
    q = rng.uniform(c0, 1 / c0)
    m3 = q * abs(w2) * abs(mobius(x2, z0)) / abs(mobius(x1, z0))
    if not m3 < 1:
        return None
    w3 = m3 * polar(1, 1)
    w1 = mobius(w2, rng.uniform(0, 1) * pseudo_distance(x1, z0) * polar(1, 1))
    w4 = mobius(w3, rng.uniform(0, 1) * pseudo_distance(x2, z0) * polar(1, 1))
    z1 = w2 * z0 * mobius(x2, z0)
    z2 = w3 * z0 * mobius(x1, z0)
    e1 = w1 * x1 * mobius(x2, x1)
    e2 = w4 * x2 * mobius(x1, x2)
    return (z0, x1, x2), (w1, w2, w3, w4), (z1, z2), (e1, e2)


def audit_constants(consts: LowerBoundConstants, samples=10_000, seed=0) -> AuditReport:
    """Check the three links that use c1, c2 on random data satisfying their premises.

    Premises: the d_G bound on (zeta1, zeta2), the lower bound on |zeta1|,
    |z1|, |z2| >= c0 |z|, and the separation lemma's own conditions.
    """
    rng = np.random.default_rng(seed)
    c0, K, ch = consts.c0, consts.K, consts.CH_prime
    c1, c2 = consts.c1_audit, consts.c2_audit
    names = ("arg_one_minus", "ratio_w2w3", "argestwz")
    prem = dict.fromkeys(names, 0)
    viol = dict.fromkeys(names, 0)
    done = 0
    while done < samples:
        data = _random_dataset(rng, c0)
        if data is None:
            continue
        done += 1
        (z0, x1, x2), (w1, w2, w3, w4), (z1, z2), (e1, e2) = data
        r = max(abs(z1), abs(z2))
        ea = abs(e1)
        d12 = pseudo_distance(x1, x2)
        base = (d12 <= 4 * ea / (K * r ** 0.5) and abs(x1) >= abs(z0) / 2
                and min(abs(z1), abs(z2)) >= c0 * r * (1 - 1e-12) and d12 <= 0.5)
        if not base:
            continue
        lim = c1 * ea / (K * r ** 0.5)
        # link 1: 2|arg(1 - conj(zeta2) zeta1)|, which is what w1/w4 sees besides zeta2/zeta1
        prem["arg_one_minus"] += 1
        u = (1 - x2.conjugate() * x1) / (1 - x1.conjugate() * x2)
        if abs(circle_projection(u) - 1) > lim:
            viol["arg_one_minus"] += 1
        # link 2: the Moebius-ratio factor in w2/w3
        prem["ratio_w2w3"] += 1
        v = (mobius(x1, z0) / mobius(z0, x1)) * (mobius(z0, x2) / mobius(x2, z0))
        if abs(circle_projection(v) - 1) > lim:
            viol["ratio_w2w3"] += 1
        # link 3: full w2/w3 estimate with the c2 constant
        g1, g2 = mobius(z0, x1), mobius(z0, x2)
        if pseudo_distance(g1, g2) < abs(g1) and abs(g1) > abs(z2):
            prem["argestwz"] += 1
            lhs = abs(circle_projection(w2 / w3) - circle_projection(z1 / z2))
            if lhs > c2 * ea / (K * r ** 1.5):
                viol["argestwz"] += 1
    return AuditReport(samples, prem, viol)
