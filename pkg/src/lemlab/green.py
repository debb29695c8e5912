"""Limit Green functions of the three product pole sets and the sandwich between them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

NEG_INF = float("-inf")


@dataclass(frozen=True)
class BidiskPoint:
    z1: complex
    z2: complex

    def __post_init__(self):
        object.__setattr__(self, "z1", complex(self.z1))
        object.__setattr__(self, "z2", complex(self.z2))
        if not self.norm < 1:
            raise DomainError(f"({self.z1}, {self.z2}) is not in the open bidisk")

    @property
    def norm(self):
        return max(abs(self.z1), abs(self.z2))

    def swapped(self):
        return BidiskPoint(self.z2, self.z1)

    def as_tuple(self):
        return (self.z1, self.z2)


def _log_abs(w):
    r = abs(w)
    return math.log(r) if r > 0 else NEG_INF


def g1(z: BidiskPoint):
    return max(2 * _log_abs(z.z1), _log_abs(z.z2))


def g2(z: BidiskPoint):
    return max(_log_abs(z.z1), 2 * _log_abs(z.z2))


def g3(z: BidiskPoint):
    return 2 * max(_log_abs(z.z1), _log_abs(z.z2))


class Region(str, Enum):
    Z2_DOMINATED = "Z2_DOMINATED"  # |z2| <= |z1|^2
    Z1_DOMINATED = "Z1_DOMINATED"  # |z1| <= |z2|^2
    INTERMEDIATE = "INTERMEDIATE"


@dataclass(frozen=True)
class SandwichReport:
    g1: float
    g2: float
    g3: float
    min12: float
    region: Region

    @property
    def width(self):
        return self.min12 - self.g3


def region_of(z: BidiskPoint):
    # compared in the log domain so that the region identities hold bit for bit
    l1, l2 = _log_abs(z.z1), _log_abs(z.z2)
    if l2 <= 2 * l1:
        return Region.Z2_DOMINATED
    if l1 <= 2 * l2:
        return Region.Z1_DOMINATED
    return Region.INTERMEDIATE


def sandwich_report(z: BidiskPoint) -> SandwichReport:
    if z.z1 == 0 and z.z2 == 0:
        raise DomainError("the sandwich is degenerate at the origin")
    a, b, c = g1(z), g2(z), g3(z)
    m = min(a, b)
    assert c <= m, (z, a, b, c)
    return SandwichReport(a, b, c, m, region_of(z))


def three_half_log_norm(z: BidiskPoint):
    return 1.5 * _log_abs(z.norm)


def improves_on_sandwich(z: BidiskPoint):
    """True when (3/2) log|z| is strictly below min(g1, g2) at z.

    With |z1| >= |z2| this happens exactly when |z2| > |z1|^(3/2); such points
    always lie in the band |z2|^2 < |z1| < |z2|^(1/2).
    """
    return three_half_log_norm(z) < min(g1(z), g2(z))
