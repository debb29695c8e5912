"""Multi-start upper bound for the Lempert function over feasible node triples.

A node triple is coded as

    zeta0 = exp(u0 + i t0),  zeta_j = phi_{zeta0}(exp(u_j + i t_j))  (j = 1, 2)

so the normalized cost is exactly u0 + u1 + u2. Feasibility (the two
Schwarz-Pick tests) is enforced by a hinge penalty. Only points that pass the
exact test are ever reported, so every returned value is a genuine upper
bound for the function.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .core import (LempertEstimate, Method, NodeTriple, PoleConfig, assemble_map,
                   interpolation_conditions, node_feasible, normalized_cost)
from .errors import NoFeasiblePoint
from .geometry import Verdict
from .green import BidiskPoint
from .maps import verify_map

BIG = 1e6
COLLISION = 1e-8
SIMPLEX_STEPS = (0.05, 1e-3, 1e-5)


@dataclass(frozen=True)
class OptimizerOptions:
    seed: int = 0
    starts: int = 64
    evals: int = 2000          # function evaluations per start, split over the simplex phases
    penalty: float = 1e3
    seed_pool: int = 8         # random candidates drawn per start before the best are kept
    use_constructions: bool = True
    jobs: int = 1
    grid_n: int = 4096

    def escalated(self, starts=256, evals=None):
        return replace(self, starts=starts, evals=evals or 2 * self.evals)


def _phi(a, z):
    return (a - z) / (1 - z * a.conjugate())


class Objective:
    """Penalized cost with a record of the best exactly feasible point seen."""

    def __init__(self, z: BidiskPoint, p: PoleConfig, penalty):
        self.z1, self.z2, self.e1, self.e2 = z.z1, z.z2, p.eps1, p.eps2
        self.penalty = penalty
        self.best = (math.inf, math.inf, None)    # (cost, |zeta0|, x)
        self.calls = 0

    @staticmethod
    def nodes(x):
        u0, t0, u1, t1, u2, t2 = x
        z0 = complex(math.cos(t0), math.sin(t0)) * math.exp(u0)
        s1 = complex(math.cos(t1), math.sin(t1)) * math.exp(u1)
        s2 = complex(math.cos(t2), math.sin(t2)) * math.exp(u2)
        return z0, _phi(z0, s1), _phi(z0, s2), s1, s2

    def __call__(self, x):
        self.calls += 1
        u0, u1, u2 = x[0], x[2], x[4]
        if max(u0, u1, u2) >= 0 or min(u0, u1, u2) < -700:
            return BIG
        z0, x1, x2, s1, s2 = self.nodes(x)
        if abs(_phi(x1, x2)) < COLLISION or abs(s1) < COLLISION or abs(s2) < COLLISION:
            return BIG
        if not (abs(x1) < 1 and abs(x2) < 1):
            return BIG
        d1, d2 = x1 * _phi(x2, x1), z0 * _phi(x2, z0)
        d3, d4 = z0 * _phi(x1, z0), x2 * _phi(x1, x2)
        if min(abs(d1), abs(d2), abs(d3), abs(d4)) < 1e-300:
            return BIG
        w1, w2, w3, w4 = self.e1 / d1, self.z1 / d2, self.z2 / d3, self.e2 / d4
        mods = (abs(w1), abs(w2), abs(w3), abs(w4))
        viol = sum(max(0.0, m - 1) for m in mods)
        feasible = max(mods) < 1
        if feasible:
            gap1 = abs(s1) - abs(_phi(w1, w2))     # |s1| = d_G(zeta0, zeta1)
            gap2 = abs(s2) - abs(_phi(w4, w3))
            viol += max(0.0, -gap1) + max(0.0, -gap2)
            feasible = gap1 >= 0 and gap2 >= 0
        cost = u0 + u1 + u2
        if feasible:
            key = (cost, abs(z0))
            if key < self.best[:2]:
                self.best = (cost, abs(z0), np.array(x, dtype=float))
        return cost + self.penalty * viol


def encode(n: NodeTriple):
    """Inverse of Objective.nodes."""
    z0 = n.zeta0
    s1, s2 = _phi(z0, n.zeta1), _phi(z0, n.zeta2)
    return np.array([math.log(abs(z0)), math.atan2(z0.imag, z0.real),
                     math.log(abs(s1)), math.atan2(s1.imag, s1.real),
                     math.log(abs(s2)), math.atan2(s2.imag, s2.real)])


def decode(x) -> NodeTriple:
    z0, x1, x2, _, _ = Objective.nodes(x)
    return NodeTriple(z0, x1, x2)


def _random_point(rng, z, p):
    """Random triple with zeta0^2 of the size of z and zeta1, zeta2 spread over many scales."""
    r = max(z.norm, 1e-300)
    u0 = rng.uniform(0.25, 1.0) * math.log(r) if rng.random() < 0.7 else math.log(rng.uniform(0.05, 0.99))
    u1 = -rng.exponential(1.0) - 1e-3
    t1 = rng.uniform(-math.pi, math.pi)
    if rng.random() < 0.5:
        # zeta2 near zeta1, separated on the scale of sqrt|eps| or smaller
        s1 = complex(math.cos(t1), math.sin(t1)) * math.exp(u1)
        lo = math.log(max(min(abs(p.eps1), abs(p.eps2)), 1e-300)) * 0.75
        rho = math.exp(rng.uniform(lo, 0.0)) * 0.5
        q = complex(math.cos(a := rng.uniform(-math.pi, math.pi)), math.sin(a)) * rho
        s2 = _phi(s1, q)
        if not 0 < abs(s2) < 1:
            s2 = 0.5j
        u2, t2 = math.log(abs(s2)), math.atan2(s2.imag, s2.real)
    else:
        u2, t2 = -rng.exponential(1.0) - 1e-3, rng.uniform(-math.pi, math.pi)
    return np.array([u0, rng.uniform(-math.pi, math.pi), u1, t1, u2, t2])


def _local_search(obj, x0, evals):
    x = np.asarray(x0, dtype=float)
    per = max(50, evals // len(SIMPLEX_STEPS))
    for step in SIMPLEX_STEPS:
        simplex = np.vstack([x] + [x + step * e for e in np.eye(len(x))])
        res = minimize(obj, x, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "maxfev": per,
                                "xatol": 1e-12, "fatol": 1e-14})
        x = res.x
    return x


def _warm_starts(z, p):
    """Certified construction nodes, tagged by method (best first)."""
    from .constructions import (build_axis_case, build_generic_case, build_resonant_case,
                                certify_nodes)
    out = []
    builders = ((Method.GENERIC, lambda: build_generic_case(z, p, c0=1e-3).nodes),
                (Method.AXIS, lambda: build_axis_case(z, p).nodes),
                (Method.RESONANT, lambda: build_resonant_case(z, p).nodes))
    for method, build in builders:
        try:
            cert = certify_nodes(build(), p, z)
        except Exception:
            continue
        out.append((cert.cost, method, cert.nodes))
    out.sort(key=lambda t: t[0])
    return out


def _run_starts(args):
    z, p, opts, xs = args
    obj = Objective(z, p, opts.penalty)
    for x0 in xs:
        obj(x0)
        _local_search(obj, x0, opts.evals)
    return obj.best, obj.calls


def lempert_upper_via_nodes(z: BidiskPoint, p: PoleConfig, opts: OptimizerOptions = None,
                            warm_starts=()) -> LempertEstimate:
    """Smallest feasible normalized cost found; deterministic for a fixed seed."""
    opts = opts or OptimizerOptions()
    # canonical coordinate order makes the result exactly symmetric under the swap
    swap = (abs(z.z2), abs(p.eps2), z.z2.real, z.z2.imag) > (abs(z.z1), abs(p.eps1), z.z1.real, z.z1.imag)
    if swap:
        est = lempert_upper_via_nodes(z.swapped(), p.swapped(), opts,
                                      [(c, m, n.swapped()) for c, m, n in warm_starts])
        return replace(est, nodes=est.nodes.swapped())

    rng = np.random.default_rng(opts.seed)
    warm = list(warm_starts)
    if opts.use_constructions:
        warm += _warm_starts(z, p)
    warm.sort(key=lambda t: t[0])
    warm_x = [encode(n) for _, _, n in warm]

    # screen a pool of random candidates and keep the most promising ones
    screen = Objective(z, p, opts.penalty)
    n_random = max(0, opts.starts - len(warm_x))
    pool = [_random_point(rng, z, p) for _ in range(opts.seed_pool * n_random)]
    pool.sort(key=lambda x: screen(x))
    starts = warm_x + pool[:n_random]

    if opts.jobs > 1 and len(starts) > 1:
        chunks = [starts[i::opts.jobs] for i in range(opts.jobs)]
        with ProcessPoolExecutor(opts.jobs) as ex:
            results = list(ex.map(_run_starts, [(z, p, opts, c) for c in chunks if c]))
    else:
        results = [_run_starts((z, p, opts, starts))]
    calls = sum(c for _, c in results) + screen.calls
    cands = [(b[0], b[1], 1, decode(b[2]), Method.OPTIMIZER) for b, _ in results if b[2] is not None]
    # warm starts compete as they are, so the result never loses to a construction
    for c, meth, n in warm:
        if _strictly_feasible(n, z, p):
            cands.append((normalized_cost(n), abs(n.zeta0), 0, n, meth))
    if not cands:
        raise NoFeasiblePoint(f"no feasible node triple found from {len(starts)} starts")
    _, _, _, nodes, method = min(cands, key=lambda c: c[:3])
    rep = node_feasible(nodes, p, z)
    m = assemble_map(nodes, p, z)
    chk = verify_map(m, interpolation_conditions(nodes, p, z), opts.grid_n)
    feasible_starts = sum(1 for x0 in starts if _feasible(x0, z, p))
    return LempertEstimate(normalized_cost(nodes), nodes, method, chk.residual, chk.boundary_sup,
                           rep.verdict, feasible_starts, calls)


def _feasible(x, z, p):
    try:
        return node_feasible(decode(x), p, z).verdict is not Verdict.INFEASIBLE
    except Exception:
        return False


def _strictly_feasible(n, z, p):
    rep = node_feasible(n, p, z)
    return rep.moduli_ok and rep.gap1 >= 0 and rep.gap2 >= 0
