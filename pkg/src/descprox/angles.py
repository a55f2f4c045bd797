"""Angles on the circle, measured in turns.

An angle is either a :class:`fractions.Fraction` in ``[0, 1)`` (the exact
angle ``2*pi*p/q``) or a ``float`` in ``[0, 1)``.  Arithmetic between a
Fraction and a float promotes to float, which is what we want: mixing an
exact angle with a real one gives a real one.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from descprox.errors import ConfigurationError

Angle = Union[Fraction, float]

SQRT2_HALF = math.sqrt(2) / 2

_SQRT_RE = re.compile(r"^\s*sqrt\(\s*(\d+)\s*\)\s*(?:/\s*(\d+)\s*)?$")


def is_exact(theta) -> bool:
    return isinstance(theta, (Fraction, int)) and not isinstance(theta, bool)


def normalize(theta) -> Angle:
    """Reduce ``theta`` (in turns) into ``[0, 1)``."""
    if is_exact(theta):
        return Fraction(theta) % 1
    t = float(theta) % 1.0
    # -tiny % 1.0 rounds up to exactly 1.0
    return 0.0 if t == 1.0 else t


def check_angle(theta) -> bool:
    if is_exact(theta):
        return 0 <= theta < 1
    if isinstance(theta, float):
        return math.isfinite(theta) and 0.0 <= theta < 1.0
    return False


def parse_angle(text: str) -> Angle:
    """Parse ``"p/q"``, an integer, a decimal or ``"sqrt(n)/m"`` (turns).

    Fractions and integers give exact angles; decimals and square roots give
    real angles.  The result is *not* reduced mod 1, so it can be used as a
    rotation amount or an offset as well.
    """
    s = text.strip()
    m = _SQRT_RE.match(s)
    if m:
        value = math.sqrt(int(m.group(1)))
        if m.group(2):
            value /= int(m.group(2))
        return value
    try:
        if re.fullmatch(r"[+-]?\d+(\s*/\s*\d+)?", s):
            return Fraction(s.replace(" ", ""))
        return float(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"bad angle literal {text!r}") from exc


def format_angle(theta) -> str:
    """Exact angles print as ``p/q``, real ones with 12 significant digits."""
    if is_exact(theta):
        f = Fraction(theta)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return f"{float(theta):.12g}"


def format_pi(turns, den: int | None = None) -> str:
    """Render an angle given in turns as a multiple of pi, e.g. ``9π/20``.

    With ``den`` the fraction is written over that denominator when it divides
    evenly, so ``format_pi(1/10, 20)`` gives ``4π/20`` rather than ``π/5``.
    """
    if not is_exact(turns):
        return f"{2 * math.pi * float(turns):.12g}"
    f = 2 * Fraction(turns)
    if f == 0:
        return "0"
    sign = "-" if f < 0 else ""
    num, den_ = abs(f.numerator), f.denominator
    if den and den % den_ == 0:
        num, den_ = num * (den // den_), den
    den = den_
    head = "π" if num == 1 else f"{num}π"
    return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"


def turn_distance(a, b) -> Angle:
    """Shortest distance between two angles, in turns (at most 1/2)."""
    d = abs(a - b) % 1
    return min(d, 1 - d)


def circle_distance(a, b) -> float:
    """Shortest arc length between two angles, in radians."""
    return 2 * math.pi * float(turn_distance(a, b))
