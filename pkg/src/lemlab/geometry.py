"""Pseudohyperbolic geometry of the unit disk.

Everything here works on Python complex scalars and, where it makes sense,
on numpy arrays of complex numbers (so boundary grids can be evaluated in one
call).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, Infeasible, ZeroInput

# Width of the band in which a Schwarz-Pick comparison counts as an equality.
TAU_FEAS = 1e-10


def check_in_disk(value, name="point", closed=False):
    r = abs(value)
    if r > 1.0 or (not closed and r >= 1.0):
        raise DomainError(f"{name}={value!r} is not in the {'closed' if closed else 'open'} unit disk")
    return complex(value)


def mobius(a, zeta):
    """The involution phi_a(zeta) = (a - zeta) / (1 - zeta conj(a)) exchanging a and 0."""
    return (a - zeta) / (1 - zeta * a.conjugate())


def pseudo_distance(a, b):
    """d_G(a, b) = |phi_a(b)|."""
    return abs(mobius(a, b))


def circle_projection(w):
    """w* = w/|w|, the radial projection onto the unit circle."""
    r = abs(w)
    if r == 0:
        raise ZeroInput("circle projection of 0 is undefined")
    return w / r


@dataclass(frozen=True)
class PickDisk:
    """The Euclidean disk {b : d_G(a, b) <= delta}."""
    center: complex
    radius: float

    def contains(self, b, tol=0.0):
        return abs(b - self.center) <= self.radius + tol


def pick_disk(a, delta):
    a = check_in_disk(a, "a")
    if not 0 < delta < 1:
        raise DomainError(f"delta={delta} must lie in (0, 1)")
    r2 = abs(a) ** 2
    denom = 1 - r2 * delta ** 2
    return PickDisk(center=a * (1 - delta ** 2) / denom, radius=delta * (1 - r2) / denom)


def arg_separation_bound(a, delta, majorant=False):
    """Bound on |arg(a/b)| valid for every b with d_G(a, b) <= delta.

    Requires delta < |a| and delta <= 1/2. With ``majorant=True`` the cruder
    3*delta/|a| is returned instead of the arcsin expression.
    """
    r = abs(a)
    if not (0 < delta < r) or delta > 0.5:
        raise DomainError(f"need 0 < delta < |a| and delta <= 1/2 (delta={delta}, |a|={r})")
    if majorant:
        return 3 * delta / r
    x = delta * (1 - r * r) / (r * (1 - delta * delta))
    return math.asin(min(x, 1.0))


def reduced_arg(w):
    """Argument of w folded into [-pi/2, pi/2] (w and -w are identified)."""
    t = cmath.phase(w)
    if t > math.pi / 2:
        t -= math.pi
    elif t < -math.pi / 2:
        t += math.pi
    return t


# -- two-point Schwarz-Pick problems ------------------------------------------

class Verdict(str, Enum):
    FEASIBLE = "Feasible"
    BOUNDARY = "Boundary"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class TwoPointProblem:
    """Find h: D -> D with h(node_a) = target_a and h(node_b) = target_b."""
    node_a: complex
    target_a: complex
    node_b: complex
    target_b: complex

    def __post_init__(self):
        check_in_disk(self.node_a, "node_a")
        check_in_disk(self.node_b, "node_b")
        if self.node_a == self.node_b:
            raise DomainError("two-point problem needs distinct nodes")


@dataclass(frozen=True)
class FeasibilityResult:
    verdict: Verdict
    # d_G(nodes) - d_G(targets); positive is margin, negative is deficit
    gap: float

    @property
    def margin(self):
        return self.gap if self.verdict is Verdict.FEASIBLE else 0.0

    @property
    def deficit(self):
        return -self.gap if self.verdict is Verdict.INFEASIBLE else 0.0

    @property
    def ok(self):
        return self.verdict is not Verdict.INFEASIBLE


def _classify(gap, tol):
    if gap > tol:
        return Verdict.FEASIBLE
    if gap >= -tol:
        return Verdict.BOUNDARY
    return Verdict.INFEASIBLE


def two_point_feasible(p: TwoPointProblem, tol=TAU_FEAS) -> FeasibilityResult:
    alpha, beta = p.target_a, p.target_b
    if not (abs(alpha) < 1 and abs(beta) < 1):
        gap = -max(abs(alpha), abs(beta))
        if math.isnan(gap):
            gap = -math.inf
        return FeasibilityResult(Verdict.INFEASIBLE, gap)
    gap = pseudo_distance(p.node_a, p.node_b) - pseudo_distance(alpha, beta)
    return FeasibilityResult(_classify(gap, tol), gap)


# -- compositions of disk automorphisms ---------------------------------------

@dataclass(frozen=True)
class MobiusAtom:
    a: complex

    def __call__(self, zeta):
        return mobius(self.a, zeta)


@dataclass(frozen=True)
class ScaleAtom:
    c: complex

    def __call__(self, zeta):
        return self.c * zeta


@dataclass(frozen=True)
class IdentityAtom:
    def __call__(self, zeta):
        return zeta


@dataclass(frozen=True)
class MoebiusComposition:
    """Atoms applied left to right: ``atoms[0]`` acts first."""
    atoms: tuple = ()

    def __call__(self, zeta):
        for atom in self.atoms:
            zeta = atom(zeta)
        return zeta

    @property
    def holomorphic_on_closed_disk(self):
        return all(abs(at.a) < 1 for at in self.atoms if isinstance(at, MobiusAtom))


def two_point_interpolant(p: TwoPointProblem, force=False, tol=TAU_FEAS) -> MoebiusComposition:
    """h = phi_alpha o (c * phi_a) with c = phi_alpha(beta) / phi_a(b).

    Raises Infeasible unless the problem is Feasible or Boundary. ``force``
    skips the d_G comparison (targets must still lie in the open disk) so that
    infeasible instances can be built and inspected.
    """
    res = two_point_feasible(p, tol)
    alpha, beta = complex(p.target_a), complex(p.target_b)
    if not (abs(alpha) < 1 and abs(beta) < 1):
        raise Infeasible(f"interpolation targets must lie in the open disk ({alpha}, {beta})")
    if res.verdict is Verdict.INFEASIBLE and not force:
        raise Infeasible(f"d_G(targets) exceeds d_G(nodes) by {res.deficit:.3e}")
    c = mobius(alpha, beta) / mobius(p.node_a, p.node_b)
    if res.verdict is Verdict.BOUNDARY and abs(c) > 1:
        c = c / abs(c)
    atoms = [MobiusAtom(complex(p.node_a))]
    if c != 1:
        atoms.append(ScaleAtom(complex(c)))
    atoms.append(MobiusAtom(alpha))
    return MoebiusComposition(tuple(atoms))
