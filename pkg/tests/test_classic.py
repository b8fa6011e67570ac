import itertools
import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import LOG2, LOG_1_PLUS_E, LOG_GOLDEN, RENEWAL
from strategies import potentials, sfts
from thermopress.classic import (
    capacity_pressure_estimate,
    classical_pressure,
    countable_full_shift,
    critical_subshift,
    edge_system,
    integral_range,
    renewal_shift,
    truncation_pressure,
    variational_gap,
)
from thermopress.errors import ReducibleError
from thermopress.measures import LocallyConstantPotential, entropy, integrate, random_markov
from thermopress.symbolic import PointSpec, Sft, admissible_words, cycle_shift, full_shift, golden_mean_shift


def charpoly_pressure(sft, phi):
    """Log of the largest real root of the characteristic polynomial, in exact arithmetic."""
    n = sft.alphabet_size
    w = edge_system(sft, phi).weights[0]
    m = sympy.Matrix(n, n, lambda i, j: sympy.exp(sympy.Float(w[i, j], 30)) if sft.transition[i, j] else 0)
    x = sympy.Symbol("x")
    coeffs = [complex(c) for c in sympy.Poly(m.charpoly(x).as_expr(), x).all_coeffs()]
    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=60)
    return float(mpmath.log(max(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < 1e-12)))


def zero(sft):
    return LocallyConstantPotential.constant(sft, 0.0)


def test_exact_entropies():
    assert classical_pressure(full_shift(2), zero(full_shift(2))).value == pytest.approx(LOG2, abs=1e-12)
    g = golden_mean_shift()
    assert classical_pressure(g, zero(g)).value == pytest.approx(LOG_GOLDEN, abs=1e-10)


def test_range_one_full_shift():
    s = full_shift(2)
    assert classical_pressure(s, LocallyConstantPotential.from_symbols(s, [0, 1])).value == pytest.approx(
        LOG_1_PLUS_E, abs=1e-12)


def test_reducible_needs_decompose():
    s = Sft(3, [[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    with pytest.raises(ReducibleError):
        classical_pressure(s, zero(s))
    assert classical_pressure(s, zero(s), decompose=True).value == pytest.approx(LOG2, abs=1e-12)


@given(sfts(mixing=True), st.data())
def test_pressure_matches_characteristic_polynomial(sft, data):
    phi = data.draw(potentials(sft))
    res = classical_pressure(sft, phi)
    assert res.value == pytest.approx(charpoly_pressure(sft, phi), abs=1e-9)
    assert res.eigen_residual <= 1e-10


@given(sfts(mixing=True), st.data())
def test_variational_identity_and_inequality(sft, data):
    phi = data.draw(potentials(sft, max_range=3))
    res = classical_pressure(sft, phi)
    assert variational_gap(res) <= 1e-8
    if phi.range <= 2:
        mu = random_markov(sft, np.random.default_rng(data.draw(st.integers(0, 2**31))))
        assert entropy(mu) + integrate(phi, mu) <= res.value + 1e-10


@given(sfts(mixing=True), st.data(), st.floats(-3, 3))
def test_pressure_shift_and_lipschitz(sft, data, c):
    phi = data.draw(potentials(sft))
    other = data.draw(potentials(sft))
    p = classical_pressure(sft, phi).value
    assert classical_pressure(sft, phi + c).value == pytest.approx(p + c, abs=1e-10)
    assert abs(classical_pressure(sft, other).value - p) <= (phi - other).norm + 1e-10


def test_partition_sums_approach_pressure():
    g = golden_mean_shift()
    phi = LocallyConstantPotential.random(g, 3, np.random.default_rng(3))
    p = classical_pressure(g, phi).value

    def z(n):
        return sum(math.exp(phi.birkhoff_sums(np.array(w))[-1]) for w in admissible_words(g, n))

    errs = [abs(math.log(z(n + 1) / z(n)) - p) for n in (8, 14, 20)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-6


def test_capacity_estimate_brackets_pressure():
    s = full_shift(2)
    phi = LocallyConstantPotential.from_symbols(s, [0.0, 1.0])
    lo, hi = capacity_pressure_estimate(s, "all", phi, 12, 2)
    assert lo - 0.2 <= LOG_1_PLUS_E <= hi + 0.2
    lo, hi = capacity_pressure_estimate(s, [PointSpec.periodic("0")], phi, 12, 2)
    assert abs(hi) < 0.1


def test_integral_range_and_critical_cycles():
    g = golden_mean_shift()
    w = edge_system(g, LocallyConstantPotential.from_symbols(g, [0, 1])).weights[0]
    assert integral_range(g, w) == pytest.approx((0.0, 0.5))
    assert critical_subshift(g, w, "max").transition.tolist() == [[0, 1], [1, 0]]
    assert critical_subshift(g, w, "min").essential == [0]


def test_cycle_shift_pressure_is_mean():
    s = cycle_shift(2)
    phi = LocallyConstantPotential.from_symbols(s, [1.0, 3.0])
    assert classical_pressure(s, phi).value == pytest.approx(2.0, abs=1e-12)


def test_truncations():
    assert truncation_pressure(countable_full_shift, None, [2, 4, 8]) == pytest.approx(
        [math.log(2), math.log(4), math.log(8)], abs=1e-12)
    vals = truncation_pressure(renewal_shift, None, [2, 4, 8])
    assert vals == pytest.approx([RENEWAL[m] for m in (2, 4, 8)], abs=1e-10)
    assert vals == sorted(vals) and vals[-1] < LOG2
