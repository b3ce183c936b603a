"""Exact arithmetic on rational angles of the circle R/Z and the doubling map.

Angles are the universal coordinate for external rays; everything downstream
(laminations, puzzle pieces, slices) is built on exact comparisons here, so
this module is deliberately allergic to floats.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class InvalidDenominatorError(ValueError):
    pass


@dataclass(frozen=True)
class Angle:
    """A point of R/Z written as a reduced fraction num/den with 0 <= num < den.

    Deliberately unordered: circle points have no linear order. Sort by the
    representative ``.frac`` explicitly where one is needed.
    """

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise InvalidDenominatorError(f"denominator must be positive, got {self.den}")
        if not (0 <= self.num < self.den) or gcd(self.num, self.den) != 1:
            raise ValueError(f"unnormalized angle {self.num}/{self.den}; use normalize()")

    @property
    def frac(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"

    def __float__(self) -> float:
        return self.num / self.den

    def __add__(self, other: "Angle | Fraction | int") -> "Angle":
        f = self.frac + (other.frac if isinstance(other, Angle) else Fraction(other))
        return normalize(f.numerator, f.denominator)

    def __sub__(self, other: "Angle | Fraction | int") -> "Angle":
        f = self.frac - (other.frac if isinstance(other, Angle) else Fraction(other))
        return normalize(f.numerator, f.denominator)


def normalize(p: int, q: int) -> Angle:
    """Reduced representative of p/q mod 1. Raises for q = 0 (or negative)."""
    if q == 0:
        raise InvalidDenominatorError("denominator is zero")
    if q < 0:
        p, q = -p, -q
    p %= q
    g = gcd(p, q)
    return Angle(p // g, q // g)


def from_fraction(f: Fraction) -> Angle:
    return normalize(f.numerator, f.denominator)


ZERO = Angle(0, 1)


def double(theta: Angle, n: int = 1) -> Angle:
    """2^n * theta mod 1, exactly."""
    if n < 0:
        raise ValueError("n must be a natural number")
    return normalize(theta.num * pow(2, n, theta.den) if theta.den > 1 else 0, theta.den)


@dataclass(frozen=True)
class OrbitInfo:
    """Eventual periodicity data of an angle under doubling.

    ``orbit`` lists the first preperiod+period iterates; the entry at index
    preperiod+period would close the cycle back onto orbit[preperiod].
    """

    preperiod: int
    period: int
    orbit: tuple[Angle, ...]


def orbit(theta: Angle) -> OrbitInfo:
    """Exact preperiod/period of theta under doubling (rationals always cycle)."""
    seen: dict[Angle, int] = {}
    seq: list[Angle] = []
    cur = theta
    while cur not in seen:
        seen[cur] = len(seq)
        seq.append(cur)
        cur = double(cur)
    pre = seen[cur]
    return OrbitInfo(preperiod=pre, period=len(seq) - pre, orbit=tuple(seq))


class ArcPosition(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


def in_arc(theta: Angle, a: Angle, b: Angle) -> ArcPosition:
    """Position of theta relative to the open counterclockwise arc from a to b.

    Three-valued on purpose: ray angles sit on partition boundaries all the
    time and callers must handle that case explicitly.
    """
    if a == b:
        raise ValueError("arc endpoints must be distinct")
    if theta == a or theta == b:
        return ArcPosition.BOUNDARY
    ta, tb, tt = a.frac, b.frac, theta.frac
    if ta < tb:
        inside = ta < tt < tb
    else:
        inside = tt > ta or tt < tb
    return ArcPosition.INSIDE if inside else ArcPosition.OUTSIDE


def cyclic_sorted(angles) -> list[Angle]:
    """Angles sorted by circle position starting from the smallest representative."""
    return sorted(angles, key=lambda t: t.frac)
