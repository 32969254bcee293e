"""K-orbit geometry of the projective line and the orbit map into s*.

The flag variety is P^1 with the torus acting by z -> a^2 z; it decomposes
into the two fixed points 0 = [0:1], infinity = [1:0] and the open orbit in
between, whose stabilizer is {+-1}.  For l != 0 the multiplication actions
of the contracted generators identify the open orbit with the conic
EF = l^2/4 in s* via z -> (-l/(2z), -lz/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .exactnum import GaussRational, gauss


class OrbitKind(Enum):
    ZERO_ORBIT = "zero_orbit"
    INFINITY_ORBIT = "infinity_orbit"
    OPEN_ORBIT = "open_orbit"

    @property
    def stabilizer(self) -> str:
        return "K" if self is not OrbitKind.OPEN_ORBIT else "{+1, -1}"


class FlagPoint:
    """A point [z0 : z1] of P^1, stored by its canonical representative."""

    __slots__ = ("z0", "z1")

    def __init__(self, z0, z1):
        z0, z1 = gauss(z0), gauss(z1)
        if not z0 and not z1:
            raise ValueError("[0 : 0] is not a point of P^1")
        if z1:
            z0, z1 = z0 / z1, gauss(1)
        else:
            z0, z1 = gauss(1), gauss(0)
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "z1", z1)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("FlagPoint is immutable")

    def __eq__(self, other):
        if not isinstance(other, FlagPoint):
            return NotImplemented
        return self.z0 == other.z0 and self.z1 == other.z1

    def __hash__(self):
        return hash((self.z0, self.z1))

    def is_infinity(self) -> bool:
        return not self.z1

    def affine(self) -> GaussRational:
        if self.is_infinity():
            raise ValueError("the point at infinity has no affine coordinate")
        return self.z0

    def __str__(self):
        return f"[{self.z0} : {self.z1}]"


@dataclass(frozen=True)
class SStarPoint:
    E_coord: GaussRational
    F_coord: GaussRational

    def __str__(self):
        return f"(E={self.E_coord}, F={self.F_coord})"


def k_orbit_of(pt: FlagPoint) -> OrbitKind:
    if pt.is_infinity():
        return OrbitKind.INFINITY_ORBIT
    if not pt.z0:
        return OrbitKind.ZERO_ORBIT
    return OrbitKind.OPEN_ORBIT


def phi_map(l, z) -> SStarPoint:
    """Image of the open-orbit point z on the conic EF = l^2/4."""
    l, z = gauss(l), gauss(z)
    if not l:
        raise ValueError("phi_map needs l != 0: the conic degenerates at l = 0")
    if not z:
        raise ValueError("phi_map needs z != 0: the map lives on the open orbit")
    return SStarPoint(-l / (z * 2), -l * z / 2)


def lambda_involution(pt: SStarPoint) -> SStarPoint:
    """The sign involution of s*; swaps the l and -l orbit maps."""
    return SStarPoint(-pt.E_coord, -pt.F_coord)
