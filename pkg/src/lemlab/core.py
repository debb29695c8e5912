"""Normalized Lempert objective and the reduction to two Schwarz-Pick problems.

With the pole a_0 = (0, 0) moved to the preimage 0, a disk through
a_1 = (eps1, 0), a_2 = (0, eps2) and z has the form

    phi(zeta) = (zeta phi_{zeta2}(zeta) h1(zeta), zeta phi_{zeta1}(zeta) h2(zeta))

with h1, h2 self-maps of the disk, and h1, h2 only have to hit two values
each. That turns the search over disks into a search over node triples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateNodes, DomainError, Infeasible
from .geometry import (TAU_FEAS, TwoPointProblem, Verdict, check_in_disk, mobius,
                       pseudo_distance, two_point_feasible, two_point_interpolant)
from .green import BidiskPoint
from .maps import ZETA, AnalyticDiskMap, Blaschke, Composed

TAU_INTERP = 1e-9
TAU_IMG = 1e-10
_DENOM_FLOOR = 1e-30


@dataclass(frozen=True)
class PoleConfig:
    eps1: complex
    eps2: complex

    def __post_init__(self):
        object.__setattr__(self, "eps1", complex(self.eps1))
        object.__setattr__(self, "eps2", complex(self.eps2))
        for name in ("eps1", "eps2"):
            v = getattr(self, name)
            if v == 0 or abs(v) >= 1:
                raise DomainError(f"{name}={v} must satisfy 0 < |{name}| < 1")

    @property
    def norm(self):
        return max(abs(self.eps1), abs(self.eps2))

    def swapped(self):
        return PoleConfig(self.eps2, self.eps1)

    def poles(self):
        return ((0j, 0j), (self.eps1, 0j), (0j, self.eps2))


@dataclass(frozen=True)
class NodeTriple:
    """Preimages of z, a_1 and a_2 under a disk map sending 0 to a_0."""
    zeta0: complex
    zeta1: complex
    zeta2: complex

    def __post_init__(self):
        for name in ("zeta0", "zeta1", "zeta2"):
            v = complex(getattr(self, name))
            object.__setattr__(self, name, v)
            check_in_disk(v, name)
            if v == 0:
                raise DomainError(f"{name} must be nonzero (0 is the preimage of a_0)")
        if len({self.zeta0, self.zeta1, self.zeta2}) < 3:
            raise DomainError("nodes must be pairwise distinct")

    def as_tuple(self):
        return (self.zeta0, self.zeta1, self.zeta2)

    def rotated(self, theta):
        u = complex(math.cos(theta), math.sin(theta))
        return NodeTriple(u * self.zeta0, u * self.zeta1, u * self.zeta2)

    def scaled(self, s):
        return NodeTriple(s * self.zeta0, s * self.zeta1, s * self.zeta2)

    def swapped(self):
        """Nodes for the coordinate-swapped problem."""
        return NodeTriple(self.zeta0, self.zeta2, self.zeta1)

    def min_separation(self):
        z0, z1, z2 = self.as_tuple()
        return min(pseudo_distance(z0, z1), pseudo_distance(z0, z2), pseudo_distance(z1, z2))


def normalized_cost(n: NodeTriple) -> float:
    """log|zeta0| + log|phi_{zeta0}(zeta1)| + log|phi_{zeta0}(zeta2)|."""
    return (math.log(abs(n.zeta0)) + math.log(pseudo_distance(n.zeta0, n.zeta1))
            + math.log(pseudo_distance(n.zeta0, n.zeta2)))


def w_values(n: NodeTriple, p: PoleConfig, z: BidiskPoint):
    """Targets (w1, w2, w3, w4) with h1(zeta1)=w1, h1(zeta0)=w2, h2(zeta0)=w3, h2(zeta2)=w4."""
    z0, z1, z2 = n.as_tuple()
    d1 = z1 * mobius(z2, z1)
    d2 = z0 * mobius(z2, z0)
    d4 = z2 * mobius(z1, z2)
    d3 = z0 * mobius(z1, z0)
    if min(abs(d1), abs(d2), abs(d3), abs(d4)) < _DENOM_FLOOR:
        raise DegenerateNodes("a node collision makes a w-value denominator vanish")
    return complex(p.eps1 / d1), complex(z.z1 / d2), complex(z.z2 / d3), complex(p.eps2 / d4)


@dataclass(frozen=True)
class FeasibilityReport:
    w1: complex
    w2: complex
    w3: complex
    w4: complex
    gap1: float
    gap2: float
    moduli_ok: bool
    verdict: Verdict

    @property
    def ws(self):
        return (self.w1, self.w2, self.w3, self.w4)

    @property
    def max_modulus(self):
        return max(abs(w) for w in self.ws)

    @property
    def failed(self):
        """Names of the violated conditions, for error messages."""
        out = [f"|w{i}|<1" for i, w in enumerate(self.ws, 1) if not abs(w) < 1]
        if self.gap1 < -TAU_FEAS:
            out.append("gap1")
        if self.gap2 < -TAU_FEAS:
            out.append("gap2")
        return out


def _subproblems(n, ws):
    w1, w2, w3, w4 = ws
    return (TwoPointProblem(n.zeta1, w1, n.zeta0, w2), TwoPointProblem(n.zeta2, w4, n.zeta0, w3))


def node_feasible(n: NodeTriple, p: PoleConfig, z: BidiskPoint, tol=TAU_FEAS) -> FeasibilityReport:
    ws = w_values(n, p, z)
    w1, w2, w3, w4 = ws
    moduli_ok = all(abs(w) < 1 for w in ws)
    gap1 = float(pseudo_distance(n.zeta1, n.zeta0) - pseudo_distance(w1, w2))
    gap2 = float(pseudo_distance(n.zeta2, n.zeta0) - pseudo_distance(w3, w4))
    if not moduli_ok:
        verdict = Verdict.INFEASIBLE
    else:
        r1, r2 = (two_point_feasible(sp, tol) for sp in _subproblems(n, ws))
        if Verdict.INFEASIBLE in (r1.verdict, r2.verdict):
            verdict = Verdict.INFEASIBLE
        elif Verdict.BOUNDARY in (r1.verdict, r2.verdict):
            verdict = Verdict.BOUNDARY
        else:
            verdict = Verdict.FEASIBLE
    return FeasibilityReport(w1, w2, w3, w4, gap1, gap2, moduli_ok, verdict)


def interpolation_conditions(n: NodeTriple, p: PoleConfig, z: BidiskPoint):
    return [(0j, (0j, 0j)), (n.zeta1, (p.eps1, 0j)), (n.zeta2, (0j, p.eps2)),
            (n.zeta0, (z.z1, z.z2))]


def assemble_map(n: NodeTriple, p: PoleConfig, z: BidiskPoint, force=False) -> AnalyticDiskMap:
    """The witness disk (zeta phi_{zeta2} h1, zeta phi_{zeta1} h2).

    ``force`` builds the candidate even when the d_G test fails; the result is
    then expected to leave the bidisk, which is what the oracle tests check.
    """
    ws = w_values(n, p, z)
    rep = node_feasible(n, p, z)
    if rep.verdict is Verdict.INFEASIBLE and not force:
        raise Infeasible(f"node triple is infeasible ({', '.join(rep.failed)})")
    sp1, sp2 = _subproblems(n, ws)
    h1 = two_point_interpolant(sp1, force=force)
    h2 = two_point_interpolant(sp2, force=force)
    # mobius(a, zeta) = (a - zeta)/(1 - zeta conj a) vanishes at zeta = a
    first = ZETA * Blaschke(n.zeta2) * Composed(h1)
    second = ZETA * Blaschke(n.zeta1) * Composed(h2)
    return AnalyticDiskMap(first, second, 0.0, "witness")


class Method(str, Enum):
    OPTIMIZER = "Optimizer"
    AXIS = "AxisConstruction"
    GENERIC = "GenericConstruction"
    RESONANT = "ResonantConstruction"


@dataclass(frozen=True)
class LempertEstimate:
    value: float
    nodes: NodeTriple
    method: Method
    residual: float
    boundary_sup: float
    verdict: Verdict
    feasible_starts: int = 0
    evaluations: int = 0
