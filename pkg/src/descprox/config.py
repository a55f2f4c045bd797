"""Text configuration for systems and conjugacy instances.

A system descriptor is a list of ``key = value`` lines::

    kind = rotation        # rotation | identity | doubling | cat | shift
    lambda = 1/4           # p/q, decimal or sqrt(n)/m (turns); rotations only
    N = 256                # cat map modulus
    probe = sector         # sector[:n] | constant[:c1,c2..] | step | rgb:<synthetic>
    epsilon = 1e-9

A conjugacy instance uses INI sections ``[source]`` and ``[target]`` (system
descriptors), ``[bridge]`` and optionally ``[basis]``::

    [bridge]
    kind = identity        # identity | affine | cat-power | table
    shift = 1/2            # affine: theta -> multiplier*theta + shift
    multiplier = 1
    t = 3                  # cat-power
    entries = 0 -> 0, 1/4 -> 1/2   # table

    [basis]
    arcs = 8
    samples = 16
    radius = 0             # grid bases: ball radius
"""

from __future__ import annotations

import configparser
import re
from fractions import Fraction

from descprox.angles import SQRT2_HALF, parse_angle
from descprox.chaos import DEFAULT_ARCS, DEFAULT_SAMPLES, arc_basis, grid_basis
from descprox.conjugacy import (
    ConjugacyInstance,
    affine_angle_bridge,
    cat_power_bridge,
    identity_bridge,
    table_bridge,
)
from descprox.errors import ConfigurationError
from descprox.image import color_probe, synthetic_image
from descprox.proximity import DEFAULT_EPSILON, constant_probe, sector_probe, step_probe
from descprox.systems import (
    CatMap,
    CircleRotation,
    DescriptiveSystem,
    DoublingMap,
    IntervalMap,
)


def _read(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if not re.search(r"^\s*\[", text, re.M):
        text = "[system]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(str(exc)) from exc
    return cp


def parse_probe(text: str, domain: str, N: int | None = None):
    name, _, arg = text.strip().partition(":")
    if name == "sector":
        return sector_probe(int(arg) if arg else 4)
    if name == "constant":
        values = tuple(parse_number(v) for v in arg.split(",")) if arg else (1,)
        return constant_probe(values, domain=domain)
    if name == "step":
        lo, hi = (parse_number(v) for v in (arg.split(",") if arg else ("0", "1")))
        return step_probe(lo, hi)
    if name == "rgb":
        if N is None:
            raise ConfigurationError("rgb probe needs a grid system with N")
        return color_probe(synthetic_image(arg or "gradient", N))
    raise ConfigurationError(f"unknown probe {text!r}")


def parse_number(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"bad number {text!r}") from exc


def system_from_mapping(opts) -> DescriptiveSystem:
    kind = opts.get("kind", "rotation").strip()
    eps = float(opts.get("epsilon", DEFAULT_EPSILON))
    N = None
    if kind == "rotation":
        f = CircleRotation(parse_angle(opts.get("lambda", "1/4")))
    elif kind == "irrational":
        f = CircleRotation(float(parse_angle(opts.get("lambda", str(SQRT2_HALF)))))
    elif kind == "identity":
        f = CircleRotation(Fraction(0))
    elif kind == "doubling":
        f = DoublingMap()
    elif kind == "cat":
        try:
            N = int(opts["N"])
        except (KeyError, ValueError) as exc:
            raise ConfigurationError("cat system needs an integer N") from exc
        f = CatMap(N)
    elif kind == "shift":
        c = parse_number(opts.get("shift", "1"))
        f = IntervalMap(lambda x, c=c: x + c, f"x+{c}")
    else:
        raise ConfigurationError(f"unknown system kind {kind!r}")
    default_probe = {"grid": "rgb:gradient", "interval": "step"}.get(f.domain, "sector")
    probe = parse_probe(opts.get("probe", default_probe), f.domain, N)
    try:
        return DescriptiveSystem(f, probe, eps)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def parse_system(text: str) -> DescriptiveSystem:
    cp = _read(text)
    section = "system" if cp.has_section("system") else cp.sections()[0]
    return system_from_mapping(cp[section])


def parse_point(text: str):
    text = text.strip()
    if text.startswith("("):
        a, b = text.strip("()").split(",")
        return (int(a), int(b))
    return parse_angle(text)


def _bridge(opts, source, target):
    kind = opts.get("kind", "identity").strip()
    if kind == "identity":
        return identity_bridge()
    if kind == "affine":
        return affine_angle_bridge(parse_angle(opts.get("shift", "0")), int(opts.get("multiplier", "1")))
    if kind == "cat-power":
        N = getattr(target.map, "N", None)
        if N is None:
            raise ConfigurationError("cat-power bridge needs a cat-map target")
        return cat_power_bridge(N, int(opts.get("t", "1")))
    if kind == "table":
        entries = {}
        for item in opts.get("entries", "").split(";" if ";" in opts.get("entries", "") else ","):
            if not item.strip():
                continue
            x, _, y = item.partition("->")
            entries[parse_point(x)] = parse_point(y)
        if not entries:
            raise ConfigurationError("table bridge needs entries")
        return table_bridge(entries)
    raise ConfigurationError(f"unknown bridge kind {kind!r}")


def _basis(opts, system):
    if system.domain == "grid":
        return grid_basis(system.map.N, float(opts.get("radius", "0")))
    return arc_basis(int(opts.get("arcs", DEFAULT_ARCS)), int(opts.get("samples", DEFAULT_SAMPLES)))


def parse_instance(text: str) -> ConjugacyInstance:
    cp = _read(text)
    for sec in ("source", "target"):
        if not cp.has_section(sec):
            raise ConfigurationError(f"instance needs a [{sec}] section")
    source = system_from_mapping(cp["source"])
    target = system_from_mapping(cp["target"])
    bridge = _bridge(cp["bridge"] if cp.has_section("bridge") else {}, source, target)
    basis_opts = cp["basis"] if cp.has_section("basis") else {}
    basis_x = _basis(basis_opts, source)
    basis_y = _basis(basis_opts, target)
    if cp.has_section("bridge") and cp["bridge"].get("kind", "").strip() == "table":
        sample = [x for x in _table_keys(cp["bridge"])]
    else:
        sample = [p for s in basis_x.sample_sets() for p in s]
    return ConjugacyInstance(source, target, bridge, sample, basis_y, basis_x)


def _table_keys(opts):
    raw = opts.get("entries", "")
    for item in raw.split(";" if ";" in raw else ","):
        if item.strip():
            yield parse_point(item.partition("->")[0])


PRESETS = {
    "identity-rotation": """
[source]
kind = rotation
lambda = 1/4
probe = sector
[target]
kind = rotation
lambda = 1/4
probe = sector
[bridge]
kind = identity
""",
    "broken-bridge": """
[source]
kind = doubling
probe = sector
[target]
kind = doubling
probe = sector
[bridge]
kind = affine
shift = 1/2
""",
    "discontinuous": """
[source]
kind = rotation
lambda = 1/4
probe = sector
[target]
kind = rotation
lambda = 1/4
probe = sector:8
[bridge]
kind = identity
""",
    "cat-self": """
[source]
kind = cat
N = 8
probe = rgb:gradient
[target]
kind = cat
N = 8
probe = rgb:gradient
[bridge]
kind = cat-power
t = 1
""",
}
