"""Random data for the reduction: feasible instances are built backwards from w-values."""
import cmath
import math

from lemlab.core import NodeTriple, PoleConfig
from lemlab.geometry import mobius, pseudo_distance
from lemlab.green import BidiskPoint


def polar(rng, lo, hi):
    return cmath.rect(rng.uniform(lo, hi), rng.uniform(-math.pi, math.pi))


def random_nodes(rng, rmax=0.9):
    while True:
        zs = [polar(rng, 0.05, rmax) for _ in range(3)]
        try:
            n = NodeTriple(*zs)
        except Exception:
            continue
        if n.min_separation() > 0.05:
            return n


def feasible_instance(rng, slack=0.9):
    """(z, eps, nodes) whose w-values satisfy both Schwarz-Pick tests with margin."""
    while True:
        n = random_nodes(rng)
        z0, x1, x2 = n.as_tuple()
        w2, w3 = polar(rng, 0.05, 0.9), polar(rng, 0.05, 0.9)
        w1 = mobius(w2, rng.uniform(0.05, slack) * pseudo_distance(x1, z0) * cmath.exp(1j * rng.uniform(0, 6.3)))
        w4 = mobius(w3, rng.uniform(0.05, slack) * pseudo_distance(x2, z0) * cmath.exp(1j * rng.uniform(0, 6.3)))
        if max(abs(w1), abs(w4)) >= 0.999:
            continue
        z = BidiskPoint(w2 * z0 * mobius(x2, z0), w3 * z0 * mobius(x1, z0))
        try:
            p = PoleConfig(w1 * x1 * mobius(x2, x1), w4 * x2 * mobius(x1, x2))
        except Exception:
            continue
        return z, p, n


def random_instance(rng):
    while True:
        try:
            z = BidiskPoint(polar(rng, 0, 0.9), polar(rng, 0, 0.9))
            p = PoleConfig(polar(rng, 1e-3, 0.5), polar(rng, 1e-3, 0.5))
        except Exception:
            continue
        return z, p, random_nodes(rng)
