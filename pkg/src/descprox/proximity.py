"""Feature vectors, probes and descriptive nearness over finite samples.

Sets are represented by finite samples (any iterable of objects).  Two
samples are descriptively near when their feature sets share a vector.
Integer-valued probes compare features exactly; real-valued probes compare
componentwise within ``Tolerance.epsilon``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Sequence

from descprox.angles import check_angle
from descprox.errors import DomainError, PreconditionError

DEFAULT_EPSILON = 1e-9


@dataclass(frozen=True)
class FeatureVector:
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if not vals:
            raise ValueError("feature vector needs at least one component")
        for v in vals:
            if not math.isfinite(v):
                raise ValueError(f"non-finite feature component {v!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        return f"FeatureVector{self.values}"

    def distance(self, other: "FeatureVector") -> float:
        """Euclidean distance in feature space."""
        if len(self) != len(other):
            raise ValueError("feature vectors of different dimension")
        return math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(self, other)))


@dataclass(frozen=True)
class Tolerance:
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")


EXACT = Tolerance(0.0)


@dataclass(frozen=True)
class Probe:
    """A named total map from objects of one domain to feature vectors.

    ``domain`` names the kind of object accepted (``"circle"``, ``"grid"``,
    ``"interval"``, ``"objects"`` or ``"any"``); ``accepts`` optionally
    narrows it further.  ``exact`` marks integer-valued probes, whose
    features are compared without tolerance.
    """

    name: str
    dimension: int
    rule: Callable[[Any], Sequence] = field(repr=False, compare=False)
    exact: bool = True
    domain: str = "any"
    accepts: Callable[[Any], bool] | None = field(default=None, repr=False, compare=False)

    def __call__(self, obj) -> FeatureVector:
        return evaluate(self, obj)

    def epsilon(self, tol: Tolerance | None = None) -> float:
        if self.exact:
            return 0.0
        return (tol or Tolerance()).epsilon


def evaluate(probe: Probe, obj) -> FeatureVector:
    if probe.accepts is not None and not probe.accepts(obj):
        raise DomainError(f"{obj!r} is outside the domain of probe {probe.name!r}")
    value = probe.rule(obj)
    if not isinstance(value, (tuple, list, FeatureVector)):
        value = (value,)
    fv = value if isinstance(value, FeatureVector) else FeatureVector(tuple(value))
    if len(fv) != probe.dimension:
        raise ValueError(
            f"probe {probe.name!r} produced dimension {len(fv)}, expected {probe.dimension}"
        )
    return fv


def features_equal(u: FeatureVector, v: FeatureVector, eps: float = 0.0) -> bool:
    if eps == 0.0:
        return u.values == v.values
    return len(u) == len(v) and all(abs(a - b) <= eps for a, b in zip(u, v))


def feature_set(sample: Iterable, probe: Probe, tol: Tolerance | None = None) -> list[FeatureVector]:
    """Deduplicated feature vectors of a sample, in first-seen order.

    Real-valued probes use greedy clustering: a vector is dropped when it is
    within epsilon of an already kept one.
    """
    eps = probe.epsilon(tol)
    kept: list[FeatureVector] = []
    seen: set = set()
    for obj in sample:
        fv = evaluate(probe, obj)
        if eps == 0.0:
            if fv.values not in seen:
                seen.add(fv.values)
                kept.append(fv)
        elif not any(features_equal(fv, k, eps) for k in kept):
            kept.append(fv)
    return kept


def _features(sample, probe):
    return [evaluate(probe, obj) for obj in sample]


def _meets(fvs_a: list[FeatureVector], fvs_b: list[FeatureVector], eps: float) -> bool:
    if eps == 0.0:
        return not {f.values for f in fvs_a}.isdisjoint(f.values for f in fvs_b)
    return any(features_equal(u, v, eps) for u in fvs_a for v in fvs_b)


def descriptively_near(A: Iterable, B: Iterable, probe: Probe, tol: Tolerance | None = None) -> bool:
    """True iff the feature sets of the samples ``A`` and ``B`` intersect."""
    A, B = list(A), list(B)
    if not A or not B:
        raise PreconditionError("descriptive nearness needs nonempty samples")
    return _meets(_features(A, probe), _features(B, probe), probe.epsilon(tol))


def descriptive_intersection(A: Iterable, B: Iterable, probe: Probe, tol: Tolerance | None = None) -> list:
    """Members of ``A`` union ``B`` whose feature lies in both feature sets.

    Order is that of ``A`` followed by the new members of ``B``.
    """
    A, B = list(A), list(B)
    eps = probe.epsilon(tol)
    fa, fb = _features(A, probe), _features(B, probe)
    union: list = []
    feats: list[FeatureVector] = []
    seen: set = set()
    for obj, fv in zip(A + B, fa + fb):
        key = _hashable(obj)
        if key in seen:
            continue
        seen.add(key)
        union.append(obj)
        feats.append(fv)
    return [
        obj
        for obj, fv in zip(union, feats)
        if _meets([fv], fa, eps) and _meets([fv], fb, eps)
    ]


def _hashable(obj) -> Hashable:
    try:
        hash(obj)
        return obj
    except TypeError:
        return repr(obj)


@dataclass
class ContinuityVerdict:
    passed: bool
    pairs_checked: int
    near_pairs: int
    witness: tuple | None = None

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"


def check_descriptive_continuity(
    h: Callable,
    probe_src: Probe,
    probe_dst: Probe,
    pairs: Iterable[tuple[Sequence, Sequence]],
    tol: Tolerance | None = None,
) -> ContinuityVerdict:
    """Check that ``A`` near ``B`` implies ``h(A)`` near ``h(B)`` on each pair.

    Stops at the first pair violating the implication and returns it as the
    witness.
    """
    checked = near = 0
    for A, B in pairs:
        A, B = list(A), list(B)
        checked += 1
        if not descriptively_near(A, B, probe_src, tol):
            continue
        near += 1
        if not descriptively_near([h(a) for a in A], [h(b) for b in B], probe_dst, tol):
            return ContinuityVerdict(False, checked, near, (A, B))
    return ContinuityVerdict(True, checked, near)


# -- stock probes ---------------------------------------------------------


def constant_probe(c: Sequence = (1,), domain: str = "any") -> Probe:
    c = tuple(c)
    exact = all(isinstance(v, int) for v in c)
    return Probe(f"constant{c}", len(c), lambda _x: c, exact=exact, domain=domain)


def basis_vector(i: int, n: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(n))


def sector_probe(n: int = 4, values: Sequence[Sequence] | None = None) -> Probe:
    """Probe on angles (turns) constant on the half-open sectors [i/n, (i+1)/n).

    By default sector ``i`` maps to the ``i``-th standard basis vector of R^n.
    """
    if n < 1:
        raise ValueError("need at least one sector")
    if values is None:
        values = [basis_vector(i, n) for i in range(n)]
    values = [tuple(v) for v in values]
    if len(values) != n or len({len(v) for v in values}) != 1:
        raise ValueError("need n sector values of one common dimension")
    exact = all(isinstance(x, int) for v in values for x in v)

    def rule(theta):
        return values[sector_index(theta, n)]

    return Probe(f"sector{n}", len(values[0]), rule, exact=exact, domain="circle", accepts=check_angle)


def sector_index(theta, n: int = 4) -> int:
    """Index of the half-open sector containing ``theta``; exact for Fractions."""
    if isinstance(theta, Fraction):
        return math.floor(theta * n)
    return min(int(math.floor(theta * n)), n - 1)


def step_probe(lo=0, hi=1, r1: float = 1.0, r2: float = 2.0) -> Probe:
    """Real-line probe taking ``r1`` on the closed interval [lo, hi], ``r2`` elsewhere."""
    if r1 == r2:
        raise ValueError("step probe needs distinct values")

    def rule(x):
        return (r1 if lo <= x <= hi else r2,)

    return Probe(f"step[{lo},{hi}]", 1, rule, exact=False, domain="interval")


# -- the wavelength example on the six objects of W ----------------------

WAVELENGTHS_NM = {
    "A": 617,
    "A'": 510,
    "B": 639,
    "B'": 411,
    "C": 480,
    "C'": 617,
}

# Entries of the comparison table, in printed order and orientation.
TABLE1_NEAR = [
    ("A", "A"), ("A", "C'"), ("A'", "A'"), ("B", "B"),
    ("C", "C"), ("C'", "C'"), ("B'", "B'"),
]
TABLE1_FAR = [
    ("A", "A'"), ("A'", "B'"), ("A'", "C'"), ("A", "B'"), ("A", "C'"),
    ("A", "B"), ("A", "C"), ("C", "C'"),
    ("B", "B'"), ("B", "C"), ("B", "C'"), ("B'", "C'"), ("B", "A'"),
    ("C", "B'"), ("C", "A'"),
]


def wavelength_probe(table: dict[str, int] | None = None) -> Probe:
    table = dict(WAVELENGTHS_NM if table is None else table)
    return Probe("wavelength_nm", 1, lambda name: (table[name],), exact=True,
                 domain="objects", accepts=lambda name: name in table)


def table1_relation(probe: Probe | None = None) -> list[tuple[str, str, int]]:
    """Computed nearness for every entry listed in the comparison table."""
    probe = probe or wavelength_probe()
    return [
        (a, b, int(descriptively_near([a], [b], probe)))
        for a, b in TABLE1_NEAR + TABLE1_FAR
    ]


def full_relation(probe: Probe | None = None) -> list[tuple[str, str, int]]:
    """Nearness for every unordered pair of the six objects, self-pairs included."""
    probe = probe or wavelength_probe()
    names = list(WAVELENGTHS_NM)
    return [
        (a, b, int(descriptively_near([a], [b], probe)))
        for i, a in enumerate(names)
        for b in names[i:]
    ]


def relation_csv(rows: Iterable[tuple[str, str, int]], header: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["obj1", "obj2", "near"])
    writer.writerows(rows)
    return buf.getvalue()
