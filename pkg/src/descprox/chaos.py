"""Descriptive orbits, periodicity, transitivity and sensitivity.

Quantifiers over "every nonempty open set" are replaced by a declared finite
:class:`OpenSetBasis`; every verdict here is therefore a verdict *on that
basis*.  Topological transitivity of rotations and of the doubling map on
arcs is decided exactly by arc arithmetic; on grids it is decided exactly on
finite point sets.  Descriptive checks compare feature sets of the sampled
points.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from descprox.angles import format_angle, format_pi, is_exact, normalize, turn_distance
from descprox.errors import PreconditionError, UnsupportedError
from descprox.proximity import FeatureVector, constant_probe, evaluate, features_equal
from descprox.systems import (
    CatMap,
    CircleRotation,
    DescriptiveSystem,
    DoublingMap,
    toroidal_distance,
)

HOLDS, FAILS = "HOLDS", "FAILS"
DENSE, NOT_DENSE = "DENSE-ON-BASIS", "NOT-DENSE-ON-BASIS"
SENSITIVE, NOT_OBSERVED = "SENSITIVE", "NOT-OBSERVED"

DEFAULT_ARCS = 8
DEFAULT_SAMPLES = 16
DEFAULT_TRIALS = 32
DEFAULT_MMAX = 1000


# -- open-set bases --------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Open arc of the circle, ``(center - half_width, center + half_width)`` in turns."""

    center: object
    half_width: object

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("arc needs positive width")

    @classmethod
    def from_endpoints(cls, lo, hi) -> "Arc":
        if not hi > lo:
            raise ValueError("arc endpoints must satisfy lo < hi")
        return cls(normalize((lo + hi) / 2), (hi - lo) / 2)

    @property
    def full(self) -> bool:
        return self.half_width >= Fraction(1, 2)

    @property
    def lo(self):
        return self.center - self.half_width

    @property
    def hi(self):
        return self.center + self.half_width

    def contains(self, theta) -> bool:
        return self.full or turn_distance(theta, self.center) < self.half_width

    def overlaps(self, other: "Arc") -> bool:
        if self.full or other.full:
            return True
        return turn_distance(self.center, other.center) < self.half_width + other.half_width

    def sample(self, S: int) -> list:
        """``S`` evenly spaced interior points (midpoints of S equal sub-arcs), plus the center."""
        if S < 1:
            raise ValueError("need at least one sample per set")
        c, w = self.center, self.half_width
        if is_exact(c) and is_exact(w):
            offsets = [Fraction(2 * j + 1, S) - 1 for j in range(S)]
        else:
            offsets = [(2 * j + 1) / S - 1 for j in range(S)]
        pts = [normalize(c + w * o) for o in offsets]
        if S % 2 == 0:
            pts.insert(S // 2, normalize(c))
        return pts

    def __str__(self):
        return self.format()

    def format(self, den: int | None = None) -> str:
        return f"({format_pi(self.lo, den)}, {format_pi(self.hi, den)})"


@dataclass(frozen=True)
class Ball:
    """Closed toroidal ball of grid cells; radius 0 is a single cell."""

    center: tuple
    radius: float
    N: int

    def points(self) -> list:
        if self.radius < 1:
            return [self.center]
        R = int(math.floor(self.radius))
        a0, b0 = self.center
        pts = {
            ((a0 + da) % self.N, (b0 + db) % self.N)
            for da in range(-R, R + 1)
            for db in range(-R, R + 1)
            if math.hypot(da, db) <= self.radius
        }
        return sorted(pts, key=lambda p: (p[1], p[0]))

    def contains(self, p) -> bool:
        return toroidal_distance(p, self.center, self.N) <= self.radius

    def sample(self, S: int | None = None) -> list:
        return self.points()

    def __str__(self):
        return f"B({self.center},{self.radius:g})"


@dataclass(frozen=True)
class OpenSetBasis:
    kind: str
    members: tuple
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not self.members:
            raise PreconditionError("basis must have at least one member")
        if self.samples < 1:
            raise PreconditionError("need at least one sample per set")
        object.__setattr__(self, "members", tuple(self.members))

    def __len__(self):
        return len(self.members)

    def sample_sets(self, S: int | None = None) -> list[list]:
        return [m.sample(S or self.samples) for m in self.members]

    def describe(self) -> str:
        if self.kind == "circle":
            return f"{len(self)} arcs, S={self.samples}"
        return f"{len(self)} grid balls"


def arc_basis(M: int = DEFAULT_ARCS, samples: int = DEFAULT_SAMPLES) -> OpenSetBasis:
    """``M`` equal open arcs ``(i/M, (i+1)/M)`` with exact endpoints."""
    if M < 1:
        raise PreconditionError("need at least one arc")
    arcs = [Arc(Fraction(2 * i + 1, 2 * M), Fraction(1, 2 * M)) for i in range(M)]
    return OpenSetBasis("circle", tuple(arcs), samples)


def grid_basis(N: int, radius: float = 0, centers: Iterable | None = None) -> OpenSetBasis:
    """Balls around ``centers`` (default: every cell) on the N x N torus."""
    if centers is None:
        centers = [(a, b) for b in range(N) for a in range(N)]
    return OpenSetBasis("grid", tuple(Ball(tuple(c), radius, N) for c in centers), 1)


# -- orbits and periods ----------------------------------------------------


def orbit_points(system, a, K: int) -> list:
    """``[a, f(a), ..., f^K(a)]``."""
    f = system.map if isinstance(system, DescriptiveSystem) else system
    if isinstance(f, CircleRotation) and not f.exact:
        return [a] + [f.power(a, j) for j in range(1, K + 1)]
    pts = [a]
    for _ in range(K):
        pts.append(f.step(pts[-1]))
    return pts


@dataclass
class DescriptiveOrbit:
    seed: object
    points: list
    features: list[FeatureVector]

    @property
    def horizon(self) -> int:
        return len(self.features) - 1


def descriptive_orbit(system: DescriptiveSystem, a, K: int) -> DescriptiveOrbit:
    if K < 1:
        raise PreconditionError("orbit horizon must be at least 1")
    pts = orbit_points(system, a, K)
    return DescriptiveOrbit(a, pts, [evaluate(system.probe, p) for p in pts])


def _same(system: DescriptiveSystem, u: FeatureVector, v: FeatureVector) -> bool:
    return features_equal(u, v, system.tolerance.epsilon)


def find_descriptive_period(system: DescriptiveSystem, a, m_max: int) -> int | None:
    """Smallest ``m <= m_max`` with ``Phi(f^m(a)) == Phi(a)``, else None."""
    if m_max < 1:
        raise PreconditionError("m_max must be at least 1")
    f = system.map
    base = evaluate(system.probe, a)
    x = a
    for m in range(1, m_max + 1):
        if isinstance(f, CircleRotation) and not f.exact:
            x = f.power(a, m)
        else:
            x = f.step(x)
        if _same(system, evaluate(system.probe, x), base):
            return m
    return None


def _has_float(x) -> bool:
    if isinstance(x, float):
        return True
    if isinstance(x, (tuple, list)):
        return any(_has_float(v) for v in x)
    return False


def supports_exact_period(system, a) -> bool:
    f = system.map if isinstance(system, DescriptiveSystem) else system
    return bool(f.exact) and not _has_float(a)


def find_classical_period(system, a, m_max: int) -> int | None:
    """Smallest ``m <= m_max`` with ``f^m(a) == a`` exactly, else None."""
    if m_max < 1:
        raise PreconditionError("m_max must be at least 1")
    if not supports_exact_period(system, a):
        raise UnsupportedError("exact periods are undefined for real-valued points or maps")
    f = system.map if isinstance(system, DescriptiveSystem) else system
    x = a
    for m in range(1, m_max + 1):
        x = f.step(x)
        if x == a:
            return m
    return None


@dataclass
class PeriodReport:
    seed: object
    classical_period: int | None
    descriptive_period: int | None
    m_max: int
    classical_supported: bool = True


def period_report(system: DescriptiveSystem, a, m_max: int) -> PeriodReport:
    supported = supports_exact_period(system, a)
    classical = find_classical_period(system, a, m_max) if supported else None
    return PeriodReport(a, classical, find_descriptive_period(system, a, m_max), m_max, supported)


@dataclass
class PeriodicSets:
    m_max: int
    descriptive: dict[int, list]
    classical: dict[int, list] | None

    @property
    def descriptive_union(self) -> list:
        return _union(self.descriptive)

    @property
    def classical_union(self) -> list | None:
        return None if self.classical is None else _union(self.classical)

    @property
    def classical_supported(self) -> bool:
        return self.classical is not None


def _union(table: dict[int, list]) -> list:
    out, seen = [], set()
    for m in sorted(table):
        for p in table[m]:
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def periodic_object_sets(system: DescriptiveSystem, sample: Sequence, m_max: int) -> PeriodicSets:
    """``Per_m`` tables (``m = 1..m_max``, not necessarily minimal periods).

    The classical table is None when any sampled point is real-valued.
    """
    sample = list(sample)
    if not sample:
        raise PreconditionError("need a nonempty sample")
    exact = all(supports_exact_period(system, a) for a in sample)
    desc = {m: [] for m in range(1, m_max + 1)}
    classical = {m: [] for m in range(1, m_max + 1)} if exact else None
    for a in sample:
        pts = orbit_points(system, a, m_max)
        base = evaluate(system.probe, a)
        for m in range(1, m_max + 1):
            if _same(system, evaluate(system.probe, pts[m]), base):
                desc[m].append(a)
            if classical is not None and pts[m] == a:
                classical[m].append(a)
    return PeriodicSets(m_max, desc, classical)


# -- transitivity ----------------------------------------------------------


@dataclass
class PairWitness:
    u: int
    v: int
    k: int | None


@dataclass
class TransitivityVerdict:
    mode: str
    basis: OpenSetBasis
    horizon: int
    pairs: list[PairWitness]
    exact: bool = True

    @property
    def holds(self) -> bool:
        return all(p.k is not None for p in self.pairs)

    @property
    def result(self) -> str:
        return HOLDS if self.holds else FAILS

    def witness(self, u: int, v: int) -> int | None:
        index = self.__dict__.get("_index")
        if index is None or len(index) != len(self.pairs):
            index = self.__dict__["_index"] = {(p.u, p.v): p.k for p in self.pairs}
        return index[(u, v)]

    def failures(self) -> list[PairWitness]:
        return [p for p in self.pairs if p.k is None]

    def lines(self) -> list[str]:
        how = ""
        if self.mode == "topological":
            how = " (exact)" if self.exact else " (sampled)"
        head = f"{self.mode} transitivity on basis [{self.basis.describe()}], K={self.horizon}{how}: {self.result}"
        out = [head]
        bad = self.failures()
        if bad:
            p = bad[0]
            out.append(f"  first failing pair: U={self.basis.members[p.u]} V={self.basis.members[p.v]}")
        return out

    def csv(self) -> str:
        return _csv(
            ["u", "v", "U", "V", "k_witness", "verdict"],
            [
                [p.u, p.v, self.basis.members[p.u], self.basis.members[p.v],
                 "" if p.k is None else p.k, "ok" if p.k is not None else "fail"]
                for p in self.pairs
            ],
        )


def arc_image(f, arc: Arc, k: int) -> Arc:
    """Exact image of an open arc under ``f^k`` for rotations and the doubling map."""
    if isinstance(f, CircleRotation):
        return Arc(normalize(arc.center + k * f.lam), arc.half_width)
    if isinstance(f, DoublingMap):
        w = arc.half_width * 2 ** k
        if w >= Fraction(1, 2):
            return Arc(Fraction(0), Fraction(1, 2))
        return Arc(f.power(arc.center, k), w)
    raise UnsupportedError(f"no exact arc image for {f!r}")


def arc_iterates(system, arc: Arc, n: int) -> list[Arc]:
    f = system.map if isinstance(system, DescriptiveSystem) else system
    return [arc_image(f, arc, k) for k in range(1, n + 1)]


def check_transitivity(system: DescriptiveSystem, basis: OpenSetBasis, K: int, mode: str = "descriptive") -> TransitivityVerdict:
    """For every ordered basis pair (U, V), the smallest ``1 <= k <= K`` that works.

    Topological mode asks ``f^k(U)`` to overlap ``V``; descriptive mode asks
    the feature sets of the sampled ``f^k(U)`` and ``V`` to intersect.
    """
    if K < 1:
        raise PreconditionError("horizon must be at least 1")
    if mode == "descriptive":
        return _descriptive_transitivity(system, basis, K)
    if mode == "topological":
        return _topological_transitivity(system, basis, K)
    raise ValueError(f"unknown mode {mode!r}")


def _feature_keys(system, points) -> list:
    return [evaluate(system.probe, p) for p in points]


def _meets(system, fa: list[FeatureVector], fb: list[FeatureVector], fb_keys: set | None) -> bool:
    eps = system.tolerance.epsilon
    if eps == 0.0:
        return any(u.values in fb_keys for u in fa)
    return any(features_equal(u, v, eps) for u in fa for v in fb)


def _descriptive_transitivity(system, basis, K) -> TransitivityVerdict:
    sets = basis.sample_sets()
    feats = [_feature_keys(system, s) for s in sets]
    keys = [{f.values for f in fs} for fs in feats]
    n = len(sets)
    witnesses = {}
    for i, U in enumerate(sets):
        pending = list(range(n))
        orbits = [orbit_points(system, u, K) for u in U]
        for k in range(1, K + 1):
            if not pending:
                break
            fk = _feature_keys(system, [o[k] for o in orbits])
            still = []
            for j in pending:
                if _meets(system, fk, feats[j], keys[j]):
                    witnesses[i, j] = k
                else:
                    still.append(j)
            pending = still
    pairs = [PairWitness(i, j, witnesses.get((i, j))) for i in range(n) for j in range(n)]
    return TransitivityVerdict("descriptive", basis, K, pairs)


def _topological_transitivity(system, basis, K) -> TransitivityVerdict:
    f = system.map
    n = len(basis)
    witnesses = {}
    exact = True
    if basis.kind == "circle" and isinstance(f, (CircleRotation, DoublingMap)):
        for i, U in enumerate(basis.members):
            for k in range(1, K + 1):
                img = arc_image(f, U, k)
                for j, V in enumerate(basis.members):
                    if (i, j) not in witnesses and img.overlaps(V):
                        witnesses[i, j] = k
    elif basis.kind == "grid" and isinstance(f, CatMap):
        targets = [set(V.points()) for V in basis.members]
        for i, U in enumerate(basis.members):
            img = list(U.points())
            for k in range(1, K + 1):
                img = [f.step(p) for p in img]
                for j in range(n):
                    if (i, j) not in witnesses and not targets[j].isdisjoint(img):
                        witnesses[i, j] = k
    elif hasattr(basis.members[0], "contains") and system.domain != "carried":
        # no exact image available: only sampled points are pushed forward
        exact = False
        for i, U in enumerate(basis.sample_sets()):
            orbits = [orbit_points(system, u, K) for u in U]
            for k in range(1, K + 1):
                for j, V in enumerate(basis.members):
                    if (i, j) not in witnesses and any(V.contains(o[k]) for o in orbits):
                        witnesses[i, j] = k
    else:
        raise UnsupportedError(f"topological transitivity not available for {system.name}")
    pairs = [PairWitness(i, j, witnesses.get((i, j))) for i in range(n) for j in range(n)]
    return TransitivityVerdict("topological", basis, K, pairs, exact)


# -- periodic density ------------------------------------------------------


@dataclass
class SetWitness:
    index: int
    point: object
    period: int | None


@dataclass
class DensityReport:
    mode: str
    basis: OpenSetBasis
    m_max: int
    sets: list[SetWitness]

    @property
    def dense(self) -> bool:
        return all(s.period is not None for s in self.sets)

    @property
    def result(self) -> str:
        return DENSE if self.dense else NOT_DENSE

    def lines(self) -> list[str]:
        out = [f"{self.mode} periodic density on basis [{self.basis.describe()}], m_max={self.m_max}: {self.result}"]
        for s in self.sets:
            where = self.basis.members[s.index]
            if s.period is None:
                out.append(f"  {where}: no periodic sample found <= m_max")
            else:
                out.append(f"  {where}: {_fmt_point(s.point)} period {s.period}")
        return out

    def csv(self) -> str:
        return _csv(
            ["set", "U", "witness", "period", "verdict"],
            [[s.index, self.basis.members[s.index], "" if s.period is None else _fmt_point(s.point),
              "" if s.period is None else s.period, "ok" if s.period is not None else "fail"]
             for s in self.sets],
        )


def check_descriptive_periodic_density(
    system: DescriptiveSystem, basis: OpenSetBasis, m_max: int = DEFAULT_MMAX,
    S: int | None = None, mode: str = "descriptive",
) -> DensityReport:
    """Per basis set, the first sampled point with a (descriptive) period <= m_max.

    ``mode="classical"`` asks for exact periods instead; it raises
    UnsupportedError on real-valued samples.
    """
    finder = find_descriptive_period if mode == "descriptive" else find_classical_period
    out = []
    for i, U in enumerate(basis.sample_sets(S)):
        hit = SetWitness(i, None, None)
        for a in U:
            m = finder(system, a, m_max)
            if m is not None:
                hit = SetWitness(i, a, m)
                break
        out.append(hit)
    return DensityReport(mode, basis, m_max, out)


# -- sensitivity -----------------------------------------------------------


@dataclass
class SeedSeparation:
    seed: object
    max_separation: float
    k: int | None
    partner: object


@dataclass
class SensitivityReport:
    mode: str
    delta: float
    horizon: int
    radius: float
    trials: int
    rng_seed: int
    seeds: list[SeedSeparation]

    @property
    def sensitive(self) -> bool:
        return all(s.max_separation > self.delta for s in self.seeds)

    @property
    def verdict(self) -> str:
        return SENSITIVE if self.sensitive else NOT_OBSERVED

    @property
    def max_separation(self) -> float:
        return max(s.max_separation for s in self.seeds)

    @property
    def min_separation(self) -> float:
        return min(s.max_separation for s in self.seeds)

    def lines(self) -> list[str]:
        return [
            f"{self.mode} sensitivity: delta={self.delta:g} r={self.radius:g} K={self.horizon} "
            f"trials={self.trials} rng_seed={self.rng_seed}: {self.verdict}",
            f"  per-seed max separation: min={self.min_separation:.12g} max={self.max_separation:.12g}",
        ]

    def csv(self) -> str:
        return _csv(
            ["seed", "max_separation", "k", "partner", "verdict"],
            [[_fmt_point(s.seed), f"{s.max_separation:.12g}", "" if s.k is None else s.k,
              _fmt_point(s.partner), "ok" if s.max_separation > self.delta else "fail"]
             for s in self.seeds],
        )


def _neighbor(system, a, r: float, rng: np.random.Generator):
    dom = system.domain
    if dom == "circle":
        u = rng.uniform(-1.0, 1.0)
        return normalize(float(a) + u * r / (2 * math.pi))
    if dom == "interval":
        return float(a) + rng.uniform(-1.0, 1.0) * r
    if dom == "grid":
        R = int(math.floor(r))
        if R < 1:
            return a
        N = system.map.N
        while True:
            da, db = (int(v) for v in rng.integers(-R, R + 1, size=2))
            if (da, db) != (0, 0) and math.hypot(da, db) <= r:
                return ((a[0] + da) % N, (a[1] + db) % N)
    raise UnsupportedError(f"no neighborhood sampler for domain {dom!r}")


def estimate_sensitivity(
    system: DescriptiveSystem,
    seeds: Sequence,
    r: float,
    K: int,
    delta: float,
    mode: str = "descriptive",
    trials: int = DEFAULT_TRIALS,
    rng_seed: int = 0,
) -> SensitivityReport:
    """Largest separation ``max_{b, 1<=k<=K}`` over sampled neighbours b of each seed.

    Metric mode measures domain distance; descriptive mode the Euclidean
    norm of the feature difference.
    """
    if not (r > 0 and delta > 0 and K >= 1):
        raise PreconditionError("need r > 0, delta > 0 and K >= 1")
    if mode not in ("metric", "descriptive"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(rng_seed)
    out = []
    for a in seeds:
        oa = orbit_points(system, a, K)
        fa = [evaluate(system.probe, x) for x in oa] if mode == "descriptive" else None
        best = SeedSeparation(a, 0.0, None, None)
        for _ in range(trials):
            b = _neighbor(system, a, r, rng)
            ob = orbit_points(system, b, K)
            for k in range(1, K + 1):
                if mode == "metric":
                    sep = system.distance(oa[k], ob[k])
                else:
                    sep = fa[k].distance(evaluate(system.probe, ob[k]))
                if sep > best.max_separation:
                    best = SeedSeparation(a, sep, k, b)
            if best.partner is None:
                best.partner = b
        out.append(best)
    return SensitivityReport(mode, delta, K, r, trials, rng_seed, out)


# -- Banks' theorem in the descriptive setting -------------------------------


@dataclass
class BanksReport:
    transitivity: TransitivityVerdict
    density: DensityReport
    sensitivity: SensitivityReport
    topological: TransitivityVerdict
    metric_sensitivity: SensitivityReport

    @property
    def violations(self) -> list[str]:
        bad = []
        if not self.transitivity.holds:
            bad.append("descriptive transitivity does not hold")
        if not self.density.dense:
            bad.append("descriptive periodic objects not dense on basis")
        elif any(s.period != 1 for s in self.density.sets):
            bad.append("constant probe gave a descriptive period other than 1")
        if self.sensitivity.sensitive or self.sensitivity.max_separation != 0.0:
            bad.append("descriptive sensitivity observed")
        return bad

    def check(self) -> None:
        if self.violations:
            raise AssertionError("; ".join(self.violations))

    def lines(self) -> list[str]:
        out = ["doubling map with constant probe"]
        out.append(f"descriptively transitive: {self.transitivity.result}")
        out.append(f"descriptive periodic density: {self.density.result}"
                   f" (periods {sorted({s.period for s in self.density.sets if s.period})})")
        out.append(f"descriptively sensitive: {self.sensitivity.verdict}"
                   f" (max separation {self.sensitivity.max_separation:.12g})")
        out.append("classical comparison")
        out.append(f"topologically transitive: {self.topological.result}")
        out.append(f"metric sensitive: {self.metric_sensitivity.verdict}"
                   f" (min per-seed separation {self.metric_sensitivity.min_separation:.12g} rad"
                   f" > delta={self.metric_sensitivity.delta:g})")
        return out


def banks_failure_report(
    delta: float = 0.5,
    K: int = 50,
    *,
    radius: float = 1e-3,
    metric_delta: float = 1.0,
    M: int = DEFAULT_ARCS,
    S: int = DEFAULT_SAMPLES,
    m_max: int = 16,
    trials: int = DEFAULT_TRIALS,
    rng_seed: int = 0,
    n_seeds: int = 16,
    probe=None,
    system: DescriptiveSystem | None = None,
) -> BanksReport:
    """Run the doubling map with a constant probe through all three descriptive checks.

    ``system`` replaces the doubling map (for comparisons on other circle maps).
    """
    if system is None:
        system = DescriptiveSystem(DoublingMap(), probe or constant_probe((1,), domain="circle"))
    basis = arc_basis(M, S)
    seeds = [(j + 0.5) / n_seeds for j in range(n_seeds)]
    return BanksReport(
        transitivity=check_transitivity(system, basis, K, "descriptive"),
        density=check_descriptive_periodic_density(system, basis, m_max),
        sensitivity=estimate_sensitivity(system, seeds, radius, K, delta, "descriptive", trials, rng_seed),
        topological=check_transitivity(system, basis, K, "topological"),
        metric_sensitivity=estimate_sensitivity(system, seeds, radius, K, metric_delta, "metric", trials, rng_seed),
    )


# -- formatting --------------------------------------------------------------


def _fmt_point(p) -> str:
    if p is None:
        return ""
    if isinstance(p, tuple):
        return "(" + ",".join(_fmt_point(v) for v in p) + ")"
    if isinstance(p, (Fraction, float)):
        return format_angle(p)
    return str(p)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[str(c) for c in row] for row in rows])
    return buf.getvalue()
