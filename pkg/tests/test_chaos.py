import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from descprox.chaos import (
    DENSE,
    FAILS,
    HOLDS,
    NOT_OBSERVED,
    SENSITIVE,
    Arc,
    OpenSetBasis,
    arc_basis,
    arc_image,
    banks_failure_report,
    check_descriptive_periodic_density,
    check_transitivity,
    descriptive_orbit,
    estimate_sensitivity,
    find_classical_period,
    find_descriptive_period,
    grid_basis,
    periodic_object_sets,
)
from descprox.errors import UnsupportedError
from descprox.image import checker_image, color_probe, gradient_image
from descprox.proximity import basis_vector, constant_probe, sector_probe
from descprox.systems import (
    CarriedMap,
    carried_probe,
    CatMap,
    CircleRotation,
    DescriptiveSystem,
    DoublingMap,
    irrational_rotation,
)

from oracles import point_period, sector_of

SECTOR = sector_probe()
QUARTER = DescriptiveSystem(CircleRotation(Fraction(1, 4)), SECTOR)
EXQ_U = Arc.from_endpoints(Fraction(-1, 40), Fraction(1, 40))
EXQ_V = Arc.from_endpoints(Fraction(4, 40), Fraction(6, 40))
CONST = constant_probe((1,), domain="circle")

fractions = st.fractions(min_value=0, max_value=1).filter(lambda f: f < 1)


def test_orbit_quarter_rotation_sectors():
    orb = descriptive_orbit(QUARTER, Fraction(0), 4)
    expected = [basis_vector(sector_of(Fraction(j, 4) % 1), 4) for j in range(5)]
    assert [f.values for f in orb.features] == expected
    assert expected == [basis_vector(i, 4) for i in (0, 1, 2, 3, 0)]
    assert orb.horizon == 4


def test_orbit_constant_probe():
    orb = descriptive_orbit(DescriptiveSystem(DoublingMap(), CONST), Fraction(1, 7), 3)
    assert [f.values for f in orb.features] == [(1,)] * 4


def test_orbit_carried_cat_n2():
    system = DescriptiveSystem(CarriedMap(CatMap(2)), carried_probe(3))
    orb = descriptive_orbit(system, ((1, 0), (10, 20, 30)), 3)
    assert [p[0] for p in orb.points] == [(1, 0), (1, 1), (0, 1), (1, 0)]
    assert {f.values for f in orb.features} == {(10, 20, 30)}


@given(fractions)
def test_quarter_rotation_descriptive_period_four(theta):
    assert find_descriptive_period(QUARTER, theta, 10) == 4
    assert find_classical_period(QUARTER, theta, 10) == 4


@given(st.fractions(min_value=0, max_value=Fraction(1, 4)).filter(lambda f: f < Fraction(1, 4)))
def test_half_rotation_period_two_in_first_sector(theta):
    half = DescriptiveSystem(CircleRotation(Fraction(1, 2)), SECTOR)
    seq = [sector_of((theta + Fraction(j, 2)) % 1) for j in range(3)]
    assert seq == [0, 2, 0]
    assert find_descriptive_period(half, theta, 10) == 2


def test_constant_probe_fixed_objects():
    for f in (DoublingMap(), CircleRotation(Fraction(1, 3)), irrational_rotation()):
        system = DescriptiveSystem(f, CONST)
        assert find_descriptive_period(system, Fraction(2, 9), 5) == 1


def test_classical_periods():
    cat256 = DescriptiveSystem(CatMap(256), constant_probe())
    # (32, 32) = 32 * (1, 1) cycles with period 6, which divides the return time 192
    assert find_classical_period(cat256, (32, 32), 500) == point_period((32, 32), 256) == 6
    assert find_classical_period(cat256, (32, 33), 500) == point_period((32, 33), 256) == 192
    assert find_classical_period(CatMap(3), (1, 0), 10) == point_period((1, 0), 3) == 4
    with pytest.raises(UnsupportedError):
        find_classical_period(QUARTER, 0.25, 10)
    with pytest.raises(UnsupportedError):
        find_classical_period(DescriptiveSystem(irrational_rotation(), SECTOR), Fraction(0), 10)


def test_periodic_sets_quarter_rotation():
    sample = [Fraction(j, 8) + Fraction(1, 100) for j in range(8)]
    sets = periodic_object_sets(QUARTER, sample, 4)
    assert sets.classical[4] == sample and sets.descriptive[4] == sample
    assert sets.classical[1] == [] and sets.descriptive[1] == []


def test_periodic_sets_doubling_fixed_point():
    sets = periodic_object_sets(DescriptiveSystem(DoublingMap(), CONST), [Fraction(0)], 3)
    assert sets.classical[1] == [Fraction(0)]


def test_periodic_sets_irrational_rotation():
    system = DescriptiveSystem(irrational_rotation(), SECTOR)
    sample = [(j + 0.5) / 100 for j in range(100)]
    sets = periodic_object_sets(system, sample, 500)
    assert not sets.classical_supported and sets.classical_union is None
    assert sets.descriptive_union
    assert set(sets.descriptive_union) >= set(sample[1:-1])


def test_exq_pair_topological_fails_and_iterates():
    basis = OpenSetBasis("circle", (EXQ_U, EXQ_V), 16)
    topo = check_transitivity(QUARTER, basis, 100, "topological")
    assert topo.witness(0, 1) is None and topo.result == FAILS
    its = [str(arc_image(QUARTER.map, EXQ_U, k)) for k in (1, 2, 3)]
    assert its == ["(9π/20, 11π/20)", "(19π/20, 21π/20)", "(29π/20, 31π/20)"]
    desc = check_transitivity(QUARTER, basis, 16, "descriptive")
    assert desc.result == HOLDS


def test_quarter_rotation_descriptively_transitive_default_basis():
    assert check_transitivity(QUARTER, arc_basis(), 16, "descriptive").holds
    assert not check_transitivity(QUARTER, arc_basis(), 16, "topological").holds


def test_identity_single_arc_holds():
    ident = DescriptiveSystem(CircleRotation(0), SECTOR)
    basis = OpenSetBasis("circle", (Arc(Fraction(1, 3), Fraction(1, 50)),), 4)
    v = check_transitivity(ident, basis, 1, "descriptive")
    assert v.holds and v.witness(0, 0) == 1


def test_doubling_topologically_transitive_exact():
    v = check_transitivity(DescriptiveSystem(DoublingMap(), CONST), arc_basis(), 10, "topological")
    # half-width 1/16 doubles to 1/2 (full circle) at k = 3
    assert v.holds and v.exact and max(p.k for p in v.pairs) <= 3


def test_density_examples():
    assert check_descriptive_periodic_density(QUARTER, arc_basis(M=5, samples=3), 10).result == DENSE
    irr = DescriptiveSystem(irrational_rotation(), SECTOR)
    rep = check_descriptive_periodic_density(irr, arc_basis(), 1000)
    assert rep.dense and all(s.period <= 1000 for s in rep.sets)
    const = check_descriptive_periodic_density(DescriptiveSystem(DoublingMap(), CONST), arc_basis(), 5)
    assert const.dense and {s.period for s in const.sets} == {1}


def test_density_classical_mode_rejects_reals():
    irr = DescriptiveSystem(irrational_rotation(), SECTOR)
    with pytest.raises(UnsupportedError):
        check_descriptive_periodic_density(irr, arc_basis(), 10, mode="classical")


def test_sensitivity_constant_probe_zero():
    system = DescriptiveSystem(DoublingMap(), CONST)
    rep = estimate_sensitivity(system, [0.1, 0.3], 0.01, 20, 1e-6, "descriptive", trials=8)
    assert rep.verdict == NOT_OBSERVED and rep.max_separation == 0.0


def test_sensitivity_doubling_metric():
    system = DescriptiveSystem(DoublingMap(), CONST)
    seeds = [(j + 0.5) / 8 for j in range(8)]
    rep = estimate_sensitivity(system, seeds, 1e-3, 50, 1.0, "metric", trials=8, rng_seed=3)
    assert rep.verdict == SENSITIVE


def test_sensitivity_doubling_oracle_pair():
    # brute force: separation of a single sampled pair, doubled by hand until it wraps
    system = DescriptiveSystem(DoublingMap(), CONST)
    a, b = 0.2, 0.2 + 1e-3 / (2 * math.pi)
    seps, x, y = [], a, b
    for _ in range(50):
        x, y = (2 * x) % 1, (2 * y) % 1
        d = abs(x - y) % 1
        seps.append(2 * math.pi * min(d, 1 - d))
    first = next(k for k, s in enumerate(seps, 1) if s > 1)
    assert 8 <= first <= 11          # 1e-3 * 2^k > 1 first at k = 10
    assert max(seps) > 1
    assert system.distance(system.map.power(a, first), system.map.power(b, first)) == pytest.approx(seps[first - 1])


def test_rotation_metric_not_observed():
    rep = estimate_sensitivity(QUARTER, [0.1, 0.6], 1e-3, 30, 0.5, "metric", trials=8)
    assert rep.verdict == NOT_OBSERVED
    assert rep.max_separation <= 1e-3 + 1e-12


def test_sensitivity_deterministic_and_recorded():
    args = (DescriptiveSystem(DoublingMap(), CONST), [0.1, 0.7], 1e-3, 30, 1.0, "metric")
    r1 = estimate_sensitivity(*args, trials=4, rng_seed=42)
    r2 = estimate_sensitivity(*args, trials=4, rng_seed=42)
    assert r1.csv() == r2.csv() and r1.rng_seed == 42


def test_banks_report_defaults():
    rep = banks_failure_report()
    assert rep.transitivity.result == HOLDS
    assert rep.density.result == DENSE
    assert rep.sensitivity.verdict == NOT_OBSERVED and rep.sensitivity.max_separation == 0.0
    assert rep.topological.holds and rep.metric_sensitivity.sensitive
    assert rep.violations == []


def test_banks_constant_probe_on_rotation():
    rot = DescriptiveSystem(CircleRotation(Fraction(1, 4)), CONST)
    rep = banks_failure_report(system=rot)
    assert rep.sensitivity.verdict == NOT_OBSERVED and rep.sensitivity.max_separation == 0.0
    assert rep.metric_sensitivity.verdict == NOT_OBSERVED


def test_verdict_csv_rows():
    v = check_transitivity(QUARTER, arc_basis(M=2, samples=1), 4, "topological")
    rows = v.csv().strip().splitlines()
    assert rows[0] == "u,v,U,V,k_witness,verdict" and len(rows) == 5


# -- the two lemmas as properties ------------------------------------------------


def _grid_probes(N):
    return [color_probe(gradient_image(N)), color_probe(checker_image(N)), constant_probe((0,), "grid")]


@pytest.mark.parametrize("N", range(1, 17))
def test_periodic_implies_descriptive_periodic_cat(N):
    cat = CatMap(N)
    for probe in _grid_probes(N):
        system = DescriptiveSystem(cat, probe)
        for p in cat.points():
            k = find_classical_period(system, p, 3 * N + 1)
            assert k == point_period(p, N)
            m = find_descriptive_period(system, p, k)
            assert m is not None and m <= k


def test_minimality_of_descriptive_period():
    system = DescriptiveSystem(CatMap(16), color_probe(gradient_image(16)))
    for p in CatMap(16).points()[:64]:
        m = find_descriptive_period(system, p, 100)
        orb = descriptive_orbit(system, p, m)
        assert all(orb.features[j] != orb.features[0] for j in range(1, m))
        assert orb.features[m] == orb.features[0]


@given(fractions, fractions, st.integers(0, 50), st.integers(1, 12), st.integers(0, 11))
def test_rotation_isometry_exact(a, b, k, q, p):
    rot = CircleRotation(Fraction(p % q, q))
    d0 = rot.distance(a, b)
    assert rot.distance(rot.power(a, k), rot.power(b, k)) == d0


@settings(deadline=None, max_examples=40)
@given(st.integers(1, 12), st.integers(0, 11), st.sampled_from([4, 8, 12]))
def test_topological_witness_bounds_descriptive_rotations(q, p, M):
    # arcs nested in sectors and spacing 1/(M*S) <= 1/lcm(M, q): every exact
    # overlap contains a sampled point
    S = 16
    assert M * S >= math.lcm(M, q)
    system = DescriptiveSystem(CircleRotation(Fraction(p % q, q)), SECTOR)
    basis = arc_basis(M, S)
    topo = check_transitivity(system, basis, 2 * q, "topological")
    desc = check_transitivity(system, basis, 2 * q, "descriptive")
    for pw in topo.pairs:
        if pw.k is not None:
            kd = desc.witness(pw.u, pw.v)
            assert kd is not None and kd <= pw.k


def test_coarse_sampling_can_miss_thin_overlaps():
    # 3 arcs straddle sector boundaries; with 4 samples the k=1 overlap is missed
    system = DescriptiveSystem(CircleRotation(Fraction(3, 10)), SECTOR)
    basis = arc_basis(3, 4)
    topo = check_transitivity(system, basis, 20, "topological")
    desc = check_transitivity(system, basis, 20, "descriptive")
    gaps = [pw for pw in topo.pairs if pw.k is not None and (desc.witness(pw.u, pw.v) or 99) > pw.k]
    assert gaps


def test_constant_probe_sensitivity_always_zero():
    for f in (DoublingMap(), CircleRotation(Fraction(2, 5)), irrational_rotation()):
        rep = estimate_sensitivity(DescriptiveSystem(f, CONST), [0.05, 0.5, 0.9], 0.2, 25, 1e-9, "descriptive", trials=5)
        assert {s.max_separation for s in rep.seeds} == {0.0}


def test_grid_ball_basis_points():
    b = grid_basis(8, radius=1).members[0]
    assert sorted(b.points()) == sorted([(0, 0), (1, 0), (7, 0), (0, 1), (0, 7)])
    assert b.contains((7, 0)) and not b.contains((1, 1))
