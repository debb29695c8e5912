"""Evaluable holomorphic maps D -> C^2 built from Blaschke factors and polynomials.

A coordinate is a small expression tree over the variable ``zeta``, constants,
Moebius factors phi_a(.) (and compositions of them), sums and products. Trees
evaluate on scalars or numpy arrays, which is what boundary sampling needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import MoebiusComposition, mobius


class Expr:
    def __call__(self, zeta):
        raise NotImplementedError

    def params(self):
        """Moebius parameters occurring in the tree (holomorphy needs |a| < 1)."""
        return []

    def __add__(self, other):
        return Sum((self, _lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Sum((self, Prod((Const(-1.0), _lift(other)))))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        return Prod((self, _lift(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Prod((Const(-1.0), self))


def _lift(x):
    return x if isinstance(x, Expr) else Const(complex(x))


@dataclass(frozen=True, eq=False)
class Var(Expr):
    def __call__(self, zeta):
        return zeta


@dataclass(frozen=True, eq=False)
class Const(Expr):
    c: complex

    def __call__(self, zeta):
        if np.ndim(zeta):
            return np.full(np.shape(zeta), self.c, dtype=complex)
        return self.c


@dataclass(frozen=True, eq=False)
class Blaschke(Expr):
    """phi_a(inner)."""
    a: complex
    inner: Expr = field(default_factory=Var)

    def __call__(self, zeta):
        return mobius(self.a, self.inner(zeta))

    def params(self):
        return [self.a] + self.inner.params()


@dataclass(frozen=True, eq=False)
class Composed(Expr):
    comp: MoebiusComposition
    inner: Expr = field(default_factory=Var)

    def __call__(self, zeta):
        return self.comp(self.inner(zeta))

    def params(self):
        own = [at.a for at in self.comp.atoms if hasattr(at, "a")]
        return own + self.inner.params()


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    terms: tuple

    def __call__(self, zeta):
        out = self.terms[0](zeta)
        for t in self.terms[1:]:
            out = out + t(zeta)
        return out

    def params(self):
        return [a for t in self.terms for a in t.params()]


@dataclass(frozen=True, eq=False)
class Prod(Expr):
    factors: tuple

    def __call__(self, zeta):
        out = self.factors[0](zeta)
        for f in self.factors[1:]:
            out = out * f(zeta)
        return out

    def params(self):
        return [a for f in self.factors for a in f.params()]


ZETA = Var()
ZERO = Const(0j)


@dataclass(frozen=True, eq=False)
class AnalyticDiskMap:
    first: Expr
    second: Expr
    # the map promises an image inside D(0, 1 + overshoot)^2
    overshoot: float = 0.0
    label: str = ""

    def __call__(self, zeta):
        return self.first(zeta), self.second(zeta)

    @property
    def holomorphic(self):
        return all(abs(a) < 1 for a in self.first.params() + self.second.params())

    def with_overshoot(self, gamma):
        return AnalyticDiskMap(self.first, self.second, gamma, self.label)

    def precomposed_with_scaling(self, s):
        """zeta -> self(s * zeta)."""
        inner = Const(complex(s)) * ZETA
        return AnalyticDiskMap(_Substituted(self.first, inner), _Substituted(self.second, inner),
                               self.overshoot, self.label)


@dataclass(frozen=True, eq=False)
class _Substituted(Expr):
    outer: Expr
    inner: Expr

    def __call__(self, zeta):
        return self.outer(self.inner(zeta))

    def params(self):
        return self.outer.params() + self.inner.params()


def circle_grid(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def _coord_modulus(m, theta):
    f1, f2 = m(np.exp(1j * np.asarray(theta)))
    return np.maximum(np.abs(f1), np.abs(f2))


@dataclass(frozen=True)
class MapCheck:
    residual: float
    boundary_sup: float

    def ok(self, tau_interp=1e-9, sup_bound=1.0 + 1e-10):
        return self.residual < tau_interp and self.boundary_sup <= sup_bound


def verify_map(m: AnalyticDiskMap, conditions, grid_n=4096) -> MapCheck:
    """Interpolation residual and boundary sup of max(|m_1|, |m_2|).

    ``conditions`` is a list of (node, (target_1, target_2)). By the maximum
    principle the boundary sup bounds the sup over the closed disk.
    """
    if grid_n < 256:
        raise ValueError("grid_n must be at least 256")
    residual = 0.0
    for node, (t1, t2) in conditions:
        f1, f2 = m(complex(node))
        residual = max(residual, abs(f1 - t1), abs(f2 - t2))
    f1, f2 = m(circle_grid(grid_n))
    sup = float(max(np.max(np.abs(f1)), np.max(np.abs(f2))))
    return MapCheck(float(residual), sup)


def boundary_sup(m: AnalyticDiskMap, grid_n=4096, refine=3):
    """Grid sup on the unit circle, sharpened by local maximisation at the best ``refine`` samples."""
    theta = 2 * np.pi * np.arange(grid_n) / grid_n
    vals = _coord_modulus(m, theta)
    best = float(vals.max())
    if refine:
        h = 2 * np.pi / grid_n
        for k in np.argsort(vals)[-refine:]:
            res = minimize_scalar(lambda t: -float(_coord_modulus(m, t)),
                                  bounds=(theta[k] - h, theta[k] + h), method="bounded",
                                  options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
    return best
