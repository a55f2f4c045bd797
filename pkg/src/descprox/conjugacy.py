"""Semi-conjugacies ``h o f = g o h`` and transport of descriptive properties.

The two transport results are implications; when a hypothesis fails on the
sampled evidence the check reports NOT-APPLICABLE instead of asserting
anything about the target system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from descprox.angles import format_angle, normalize
from descprox.chaos import (
    OpenSetBasis,
    _fmt_point,
    check_descriptive_periodic_density,
    check_transitivity,
    find_descriptive_period,
    orbit_points,
    supports_exact_period,
)
from descprox.errors import ConfigurationError
from descprox.proximity import ContinuityVerdict, check_descriptive_continuity
from descprox.systems import CatMap, DescriptiveSystem

CONFIRMED, VIOLATED, NOT_APPLICABLE = "CONFIRMED", "VIOLATED", "NOT-APPLICABLE"


class Bridge:
    """A named map between system domains."""

    def __init__(self, func: Callable, name: str):
        self.func = func
        self.name = name

    def __call__(self, x):
        return self.func(x)

    def __repr__(self):
        return f"Bridge({self.name})"


def identity_bridge() -> Bridge:
    return Bridge(lambda x: x, "identity")


def affine_angle_bridge(shift=Fraction(0), multiplier: int = 1) -> Bridge:
    """``theta -> multiplier * theta + shift`` (mod one turn)."""
    return Bridge(lambda t: normalize(multiplier * t + shift),
                  f"affine {multiplier}*theta+{format_angle(shift)}")


def cat_power_bridge(N: int, t: int) -> Bridge:
    cat = CatMap(N)
    return Bridge(lambda p: cat.power(p, t), f"cat-power {t}")


def table_bridge(table: dict) -> Bridge:
    table = dict(table)

    def h(x):
        try:
            return table[x]
        except KeyError:
            raise ConfigurationError(f"bridge table has no entry for {x!r}") from None

    return Bridge(h, f"table[{len(table)}]")


@dataclass
class ConjugacyInstance:
    source: DescriptiveSystem
    target: DescriptiveSystem
    bridge: Callable
    sample: list
    basis_y: OpenSetBasis
    basis_x: OpenSetBasis | None = None

    def __post_init__(self):
        self.sample = list(self.sample)
        if self.basis_x is None:
            if self.source.domain != self.target.domain:
                raise ConfigurationError("source basis required when domains differ")
            self.basis_x = self.basis_y


@dataclass
class SemiConjugacyVerdict:
    passed: bool
    residual: float
    checked: int
    witness: tuple | None = None  # (x, k, h(f^k x), g^k(h x))

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def lines(self) -> list[str]:
        out = [f"semi-conjugacy h.f = g.h on {self.checked} (x, k) checks: {self.label}"
               f" (worst residual {self.residual:.12g})"]
        if self.witness:
            x, k, lhs, rhs = self.witness
            out.append(f"  witness x={_fmt_point(x)} k={k}: h(f^k x)={_fmt_point(lhs)}"
                       f" g^k(h x)={_fmt_point(rhs)}")
        return out


def verify_semi_conjugacy(inst: ConjugacyInstance, K: int = 8, tol: float = 1e-9) -> SemiConjugacyVerdict:
    """Check ``h(f^k(x)) == g^k(h(x))`` for every sampled x and ``1 <= k <= K``.

    Comparison is exact when both sides are exact points, else within ``tol``
    of the target metric.
    """
    if K < 1:
        raise ConfigurationError("K must be at least 1")
    h, g = inst.bridge, inst.target
    worst, witness, checked = 0.0, None, 0
    for x in inst.sample:
        fx = orbit_points(inst.source, x, K)
        gx = orbit_points(g, h(x), K)
        for k in range(1, K + 1):
            lhs, rhs = h(fx[k]), gx[k]
            checked += 1
            if supports_exact_period(g, lhs) and supports_exact_period(g, rhs):
                ok = lhs == rhs
                res = 0.0 if ok else g.distance(lhs, rhs)
            else:
                res = g.distance(lhs, rhs)
                ok = res <= tol
            if res > worst:
                worst = res
            if not ok and witness is None:
                witness = (x, k, lhs, rhs)
    return SemiConjugacyVerdict(witness is None, worst, checked, witness)


def _continuity_pairs(inst: ConjugacyInstance) -> list:
    sets = inst.basis_x.sample_sets()
    pairs = [(U, V) for U in sets for V in sets]
    points = [p for s in sets for p in s]
    pairs += [([a], [b]) for a in points for b in points]
    return pairs


def bridge_continuity(inst: ConjugacyInstance) -> ContinuityVerdict:
    """Descriptive continuity of the bridge on basis sample sets and their points."""
    tol = inst.target.tolerance if not inst.target.probe.exact else inst.source.tolerance
    return check_descriptive_continuity(
        inst.bridge, inst.source.probe, inst.target.probe, _continuity_pairs(inst), tol
    )


def surjective_on_basis(inst: ConjugacyInstance) -> bool:
    """Every target basis set contains the image of some source sample point."""
    images = [inst.bridge(p) for s in inst.basis_x.sample_sets() for p in s]
    images += [inst.bridge(p) for p in inst.sample]
    return all(any(V.contains(y) for y in images) for V in inst.basis_y.members)


@dataclass
class TransportReport:
    lemma: str
    semi_conjugacy: SemiConjugacyVerdict
    source: object
    continuity: ContinuityVerdict
    surjective: bool
    target: object | None
    status: str
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status != VIOLATED

    def lines(self) -> list[str]:
        src = getattr(self.source, "result", self.source)
        tgt = "-" if self.target is None else getattr(self.target, "result", self.target)
        out = [f"{self.lemma}: {self.status}",
               f"  source: {src}; bridge descriptive continuity: {self.continuity.label}"
               f" ({self.continuity.near_pairs} near pairs); surjective on basis: {self.surjective}",
               f"  target: {tgt}"]
        out += [f"  {n}" for n in self.notes]
        return out


def _require_conjugacy(inst, K):
    sc = verify_semi_conjugacy(inst, K)
    if not sc.passed:
        raise ConfigurationError(
            "instance is not a semi-conjugacy on its sample: " + " ".join(sc.lines()[1:]).strip()
        )
    return sc


def transported_transitivity_check(inst: ConjugacyInstance, K: int = 16) -> TransportReport:
    """Descriptive transitivity of f plus descriptive continuity of h, then that of g."""
    sc = _require_conjugacy(inst, K)
    source = check_transitivity(inst.source, inst.basis_x, K, "descriptive")
    cont = bridge_continuity(inst)
    surj = surjective_on_basis(inst)
    if not (source.holds and cont.passed and surj):
        return TransportReport("transitivity transport", sc, source, cont, surj, None, NOT_APPLICABLE)
    target = check_transitivity(inst.target, inst.basis_y, K, "descriptive")
    status = CONFIRMED if target.holds else VIOLATED
    return TransportReport("transitivity transport", sc, source, cont, surj, target, status)


@dataclass
class PulledBackDensity:
    """Target periodic density witnessed through h-images of source witnesses."""

    basis: OpenSetBasis
    witnesses: list  # per target set: (source point, h(point), target period) or None

    @property
    def dense(self) -> bool:
        return all(w is not None for w in self.witnesses)

    @property
    def result(self) -> str:
        return "DENSE-ON-BASIS" if self.dense else "NOT-DENSE-ON-BASIS"


def transported_periodic_density_check(inst: ConjugacyInstance, m_max: int = 1000, K: int = 8) -> TransportReport:
    """Density of descriptive periodic objects of f plus continuity of h, then for g.

    The target verdict asks, for each target basis set, for an h-image of a
    descriptively periodic source sample that lies in the set and is itself
    descriptively periodic for g.
    """
    sc = _require_conjugacy(inst, K)
    source = check_descriptive_periodic_density(inst.source, inst.basis_x, m_max)
    cont = bridge_continuity(inst)
    surj = surjective_on_basis(inst)
    if not (source.dense and cont.passed and surj):
        return TransportReport("periodic density transport", sc, source, cont, surj, None, NOT_APPLICABLE)
    candidates = []
    for U in inst.basis_x.sample_sets():
        for a in U:
            if find_descriptive_period(inst.source, a, m_max) is not None:
                candidates.append(a)
    witnesses = []
    for V in inst.basis_y.members:
        found = None
        for a in candidates:
            y = inst.bridge(a)
            if V.contains(y):
                m = find_descriptive_period(inst.target, y, m_max)
                if m is not None:
                    found = (a, y, m)
                    break
        witnesses.append(found)
    target = PulledBackDensity(inst.basis_y, witnesses)
    direct = check_descriptive_periodic_density(inst.target, inst.basis_y, m_max)
    notes = [f"direct target check: {direct.result}"]
    status = CONFIRMED if target.dense else VIOLATED
    return TransportReport("periodic density transport", sc, source, cont, surj, target, status, notes)
