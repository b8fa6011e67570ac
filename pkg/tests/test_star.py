import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import BOWEN_GOLDEN, GOLDEN_LEVEL, H_QUARTER, LOG2, LOG_1_PLUS_E, LOG_GOLDEN
from strategies import potentials, sfts
from thermopress.classic import classical_pressure, edge_system, integral_range
from thermopress.errors import DomainError, UnsupportedHypothesisError
from thermopress.measures import LocallyConstantPotential, MarkovMeasure, entropy, random_markov
from thermopress.star import (
    DiagnosticsConfig,
    MeasureFamily,
    bowen_root,
    classical_curve,
    dual_objective,
    irregular_set_pressure,
    level_set_pressure_dual,
    level_set_pressure_primal,
    level_set_spectrum,
    periodic_point_pressure,
    pressure_hash,
    star_equilibrium,
    star_pressure,
)
from thermopress.symbolic import PointSpec, cycle_shift, full_shift, golden_mean_shift
from thermopress.synthesis import generic_word

FULL2 = full_shift(2)
GOLDEN = golden_mean_shift()
PHI01 = LocallyConstantPotential.from_symbols(FULL2, [0, 1])
ZERO = LocallyConstantPotential.constant(FULL2, 0.0)


def test_family_examples():
    assert star_pressure(MeasureFamily.all_invariant(FULL2), ZERO).value == pytest.approx(LOG2, abs=1e-12)
    single = MeasureFamily.single(MarkovMeasure.bernoulli([0.75, 0.25]), FULL2)
    assert star_pressure(single, ZERO).value == pytest.approx(H_QUARTER, abs=1e-12)


def test_empty_family_sentinel_is_inf():
    res = star_pressure(MeasureFamily.empty(FULL2), PHI01)
    assert res.value == 0.0 and "empty" in res.flags


def test_periodic_point():
    assert periodic_point_pressure("001", PHI01) == pytest.approx(1 / 3)
    with pytest.raises(DomainError):
        periodic_point_pressure("11", LocallyConstantPotential.constant(GOLDEN, 0.0))


def test_level_set_examples():
    half = level_set_pressure_dual(FULL2, PHI01, ZERO, 0.5)
    assert half.value == pytest.approx(LOG2, abs=1e-10)
    assert half.q_star == pytest.approx(0.0, abs=1e-8)
    quarter = star_equilibrium(MeasureFamily.level_set(FULL2, PHI01, 0.25), ZERO)
    assert quarter.value == pytest.approx(H_QUARTER, abs=1e-10)
    assert np.allclose(quarter.maximizer.stationary, [0.75, 0.25], atol=1e-8)
    assert quarter.charges_Z


def test_level_set_boundary_and_outside():
    top = level_set_pressure_dual(FULL2, PHI01, ZERO, 1.0)
    assert top.value == pytest.approx(0.0, abs=1e-12) and "boundary" in top.flags
    out = level_set_pressure_dual(FULL2, PHI01, ZERO, 1.2)
    assert "outside_interval" in out.flags and out.value == ZERO.inf


@pytest.mark.parametrize("alpha", sorted(GOLDEN_LEVEL))
def test_golden_level_sets_against_closed_form(alpha):
    phi = LocallyConstantPotential.from_symbols(GOLDEN, [0, 1])
    zero = LocallyConstantPotential.constant(GOLDEN, 0.0)
    assert level_set_pressure_dual(GOLDEN, phi, zero, alpha).value == pytest.approx(GOLDEN_LEVEL[alpha], abs=1e-9)
    assert level_set_pressure_primal(GOLDEN, phi, zero, alpha).value == pytest.approx(GOLDEN_LEVEL[alpha], abs=1e-6)


@given(sfts(mixing=True, max_size=3), st.data(), st.floats(0.05, 0.95))
def test_primal_dual_agree(sft, data, t):
    phi = data.draw(potentials(sft))
    psi = data.draw(potentials(sft))
    w = edge_system(sft, phi).weights[0]
    lo, hi = integral_range(sft, w)
    if hi - lo < 1e-6:
        return
    alpha = lo + t * (hi - lo)
    dual = level_set_pressure_dual(sft, phi, psi, alpha)
    primal = level_set_pressure_primal(sft, phi, psi, alpha)
    assert primal.value == pytest.approx(dual.value, abs=1e-5)
    assert dual.value <= classical_pressure(sft, psi).value + 1e-10


@given(sfts(mixing=True, max_size=3), st.data(), st.floats(0.05, 0.95), st.floats(-3, 3))
def test_dual_objective_is_upper_bound(sft, data, t, q):
    phi = data.draw(potentials(sft))
    psi = data.draw(potentials(sft))
    lo, hi = integral_range(sft, edge_system(sft, phi).weights[0])
    alpha = lo + t * (hi - lo)
    assert level_set_pressure_dual(sft, phi, psi, alpha).value <= dual_objective(sft, phi, psi, alpha, q) + 1e-9


def test_spectrum_concave_and_peaks_at_equilibrium():
    alphas = np.linspace(0.05, 0.95, 19)
    curve = level_set_spectrum(FULL2, PHI01, ZERO, alphas)
    assert curve.is_concave()
    assert curve.value.max() == pytest.approx(LOG2, abs=1e-10)
    assert curve.to_csv().splitlines()[0] == "alpha,value,q_star,maximizer_id"


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_finite_family_is_max_of_members(p, r):
    a, b = MarkovMeasure.bernoulli([p, 1 - p]), MarkovMeasure.bernoulli([r, 1 - r])
    fam = MeasureFamily.single(a, FULL2).union(MeasureFamily.single(b, FULL2))
    assert star_pressure(fam, ZERO).value == pytest.approx(max(entropy(a), entropy(b)))


@given(sfts(mixing=True), st.integers(0, 2**31))
def test_single_family_below_all_invariant(sft, seed):
    mu = random_markov(sft, np.random.default_rng(seed))
    zero = LocallyConstantPotential.constant(sft, 0.0)
    assert star_pressure(MeasureFamily.single(mu, sft), zero).value <= classical_pressure(sft, zero).value + 1e-12


def test_irregular_set():
    assert irregular_set_pressure(GOLDEN, LocallyConstantPotential.constant(GOLDEN, 0.0)).value == pytest.approx(
        LOG_GOLDEN, abs=1e-12)
    res = irregular_set_pressure(FULL2, PHI01, phi=PHI01)
    assert res.value == pytest.approx(LOG_1_PLUS_E, abs=1e-12)
    with pytest.raises(UnsupportedHypothesisError):
        irregular_set_pressure(cycle_shift(2), LocallyConstantPotential.constant(cycle_shift(2), 0.0))
    with pytest.raises(UnsupportedHypothesisError):
        irregular_set_pressure(FULL2, ZERO, phi=ZERO)


def test_bowen_roots():
    for sft, expected in ((FULL2, 1.0), (GOLDEN, BOWEN_GOLDEN)):
        phi = LocallyConstantPotential.constant(sft, -np.log(2))
        r = bowen_root(classical_curve(sft, phi), phi)
        assert r.value == pytest.approx(expected, abs=1e-8) and r.unique
    with pytest.raises(DomainError):
        bowen_root(classical_curve(FULL2, PHI01), PHI01)


def test_generic_point_family():
    x = PointSpec.stored(generic_word(MarkovMeasure.bernoulli([0.5, 0.5]), 2**14, 7))
    cfg = DiagnosticsConfig(depth=1)
    res = star_pressure(MeasureFamily.empirical_closure(FULL2, [x], cfg), ZERO)
    assert res.value == pytest.approx(LOG2, abs=1e-3)
    assert pressure_hash([x], ZERO, cfg).value == pytest.approx(res.value)
