"""Model dynamical systems and the ``(X, f, Phi)`` triple.

Every map exposes ``step`` (one application), ``power`` (the k-th iterate),
``distance`` (the metric on its domain) and ``exact`` (whether iterates are
computed without rounding, so that ``f^k(x) == x`` is meaningful).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Tuple

from descprox.angles import (
    SQRT2_HALF,
    Angle,
    check_angle,
    circle_distance,
    is_exact,
    normalize,
)
from descprox.errors import DomainError, PreconditionError
from descprox.proximity import DEFAULT_EPSILON, Probe, Tolerance

GridPoint = Tuple[int, int]

CAT_MATRIX = ((1, 1), (1, 2))
CAT_INVERSE = ((2, -1), (-1, 1))


class CircleRotation:
    """``theta -> theta + lam`` (mod one turn)."""

    domain = "circle"

    def __init__(self, lam=Fraction(1, 4)):
        self.lam = normalize(lam)

    @property
    def exact(self) -> bool:
        return is_exact(self.lam)

    def check(self, theta) -> bool:
        return check_angle(theta)

    def step(self, theta) -> Angle:
        return normalize(theta + self.lam)

    def power(self, theta, k: int) -> Angle:
        # one rounding per query instead of k accumulated ones for real angles
        return normalize(theta + k * self.lam)

    def distance(self, a, b) -> float:
        return circle_distance(a, b)

    def __repr__(self):
        return f"CircleRotation({self.lam!r})"


def irrational_rotation(lam: float = SQRT2_HALF) -> CircleRotation:
    return CircleRotation(float(lam))


class DoublingMap:
    """``theta -> 2 theta`` (mod one turn)."""

    domain = "circle"
    exact = True

    def check(self, theta) -> bool:
        return check_angle(theta)

    def step(self, theta) -> Angle:
        return normalize(2 * theta)

    def power(self, theta, k: int) -> Angle:
        if is_exact(theta):
            f = Fraction(theta)
            return Fraction(f.numerator * pow(2, k, f.denominator), f.denominator) % 1
        # doubling a float mod 1 is exact, so stepping loses nothing
        t = float(theta)
        for _ in range(k):
            t = normalize(2 * t)
            if t == 0.0:
                break
        return t

    def distance(self, a, b) -> float:
        return circle_distance(a, b)

    def __repr__(self):
        return "DoublingMap()"


def _matmul_mod(x, y, n):
    return (
        ((x[0][0] * y[0][0] + x[0][1] * y[1][0]) % n, (x[0][0] * y[0][1] + x[0][1] * y[1][1]) % n),
        ((x[1][0] * y[0][0] + x[1][1] * y[1][0]) % n, (x[1][0] * y[0][1] + x[1][1] * y[1][1]) % n),
    )


def matrix_power_mod(m, k: int, n: int):
    """``m**k`` mod ``n`` for a 2x2 integer matrix, by repeated squaring."""
    result = ((1 % n, 0), (0, 1 % n))
    base = tuple(tuple(v % n for v in row) for row in m)
    while k:
        if k & 1:
            result = _matmul_mod(result, base, n)
        base = _matmul_mod(base, base, n)
        k >>= 1
    return result


class CatMap:
    """Arnold's cat map ``(a, b) -> (a + b, a + 2b)`` on the N x N torus."""

    domain = "grid"
    exact = True

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("modulus must be positive")
        self.N = N

    def check(self, p) -> bool:
        return (
            isinstance(p, tuple) and len(p) == 2
            and all(isinstance(v, int) and 0 <= v < self.N for v in p)
        )

    def step(self, p: GridPoint) -> GridPoint:
        a, b = p
        return ((a + b) % self.N, (a + 2 * b) % self.N)

    def inverse_step(self, p: GridPoint) -> GridPoint:
        a, b = p
        return ((2 * a - b) % self.N, (b - a) % self.N)

    def power(self, p: GridPoint, k: int) -> GridPoint:
        if k < 0:
            return self.inverse_power(p, -k)
        m = matrix_power_mod(CAT_MATRIX, k, self.N)
        a, b = p
        return ((m[0][0] * a + m[0][1] * b) % self.N, (m[1][0] * a + m[1][1] * b) % self.N)

    def inverse_power(self, p: GridPoint, k: int) -> GridPoint:
        m = matrix_power_mod(CAT_INVERSE, k, self.N)
        a, b = p
        return ((m[0][0] * a + m[0][1] * b) % self.N, (m[1][0] * a + m[1][1] * b) % self.N)

    def points(self):
        return [(a, b) for b in range(self.N) for a in range(self.N)]

    def distance(self, p, q) -> float:
        return toroidal_distance(p, q, self.N)

    def __repr__(self):
        return f"CatMap({self.N})"


class IntervalMap:
    """A user-supplied self-map of (a subset of) the real line."""

    domain = "interval"

    def __init__(self, func: Callable, name: str = "user", exact: bool = True):
        self.func = func
        self.name = name
        self.exact = exact

    def check(self, x) -> bool:
        return isinstance(x, (int, float, Fraction))

    def step(self, x):
        return self.func(x)

    def power(self, x, k: int):
        for _ in range(k):
            x = self.func(x)
        return x

    def distance(self, x, y) -> float:
        return abs(float(x) - float(y))

    def __repr__(self):
        return f"IntervalMap({self.name})"


class CarriedMap:
    """Moves ``(point, feature)`` objects by an inner map, leaving the feature alone.

    This models features that travel with the object rather than being read
    off a fixed background at the object's current location.
    """

    domain = "carried"

    def __init__(self, inner):
        self.inner = inner

    @property
    def exact(self) -> bool:
        return self.inner.exact

    def check(self, obj) -> bool:
        return isinstance(obj, tuple) and len(obj) == 2 and self.inner.check(obj[0])

    def step(self, obj):
        return (self.inner.step(obj[0]), obj[1])

    def power(self, obj, k: int):
        return (self.inner.power(obj[0], k), obj[1])

    def distance(self, x, y) -> float:
        return self.inner.distance(x[0], y[0])

    def __repr__(self):
        return f"CarriedMap({self.inner!r})"


def carried_probe(dimension: int = 3) -> Probe:
    return Probe("carried", dimension, lambda obj: tuple(obj[1]), exact=True, domain="carried")


def toroidal_distance(p: GridPoint, q: GridPoint, N: int) -> float:
    """Euclidean distance on the N x N torus (minimum over wraparound images)."""
    dx = abs(p[0] - q[0]) % N
    dy = abs(p[1] - q[1]) % N
    dx, dy = min(dx, N - dx), min(dy, N - dy)
    return math.hypot(dx, dy)


@dataclass
class DescriptiveSystem:
    """The triple (domain, self-map, probe)."""

    map: object
    probe: Probe
    epsilon: float = DEFAULT_EPSILON
    name: str = field(default="")

    def __post_init__(self):
        if self.probe.domain not in ("any", self.domain):
            raise PreconditionError(
                f"probe {self.probe.name!r} is defined on {self.probe.domain!r}, "
                f"system domain is {self.domain!r}"
            )
        if not self.name:
            self.name = f"{self.map!r} with {self.probe.name}"

    @property
    def domain(self) -> str:
        return self.map.domain

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(0.0 if self.probe.exact else self.epsilon)

    def __call__(self, x):
        return self.map.step(x)

    def features(self, x):
        return self.probe(x)

    def distance(self, x, y) -> float:
        return self.map.distance(x, y)


def _map_of(system):
    return system.map if isinstance(system, DescriptiveSystem) else system


def rotate(rot: CircleRotation, theta) -> Angle:
    return rot.step(theta)


def double(theta) -> Angle:
    return DoublingMap().step(theta)


def cat_step(cat: CatMap, p: GridPoint) -> GridPoint:
    return cat.step(p)


def iterate(system, x, k: int):
    """``f^k(x)`` for a system or a bare map."""
    if k < 0:
        raise PreconditionError("iteration count must be nonnegative")
    f = _map_of(system)
    if hasattr(f, "check") and not f.check(x):
        raise DomainError(f"{x!r} is outside the domain of {f!r}")
    return x if k == 0 else f.power(x, k)
