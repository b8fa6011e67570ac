"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; the
lines are also repeated in the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

from oracles import BOWEN_GOLDEN, GOLDEN_ENTROPY_20, LOG2, LOG_GOLDEN
from thermopress.classic import (
    classical_pressure,
    countable_full_shift,
    edge_system,
    integral_range,
    truncation_pressure,
    variational_gap,
)
from thermopress.cli import run as cli_run
from thermopress.manneville import MPMap, acip_lyapunov, default_t_grid, mp_lyapunov_spectrum, mp_star_equilibrium
from thermopress.measures import LocallyConstantPotential, MarkovMeasure, edge_integral, entropy, integrate
from thermopress.northsouth import NORTH, SOUTH, distance_to_north, ns_orbit_stats, ns_star_pressure
from thermopress.pesin_pitskel import (
    bowen_count,
    bowen_count_bruteforce,
    point_pressure_oracle,
    pp_critical,
)
from thermopress.star import (
    DiagnosticsConfig,
    MeasureFamily,
    bowen_root,
    classical_curve,
    level_set_pressure_dual,
    level_set_pressure_primal,
    level_set_spectrum,
    pressure_hash,
    star_equilibrium,
    star_pressure,
)
from thermopress.symbolic import PointSpec, beta_count, full_shift, golden_mean_shift, is_admissible
from thermopress.synthesis import generic_word, irregular_witness

RESULTS = []

FULL2 = full_shift(2)
GOLDEN = golden_mean_shift()


def report(n, title, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = "criterion %2d [%s] %s: %s (%.2f s, budget %g s)" % (n, "PASS" if ok else "FAIL", title, detail, elapsed, budget)
    RESULTS.append(line)
    print(line)
    assert ok, line


def phi01(sft):
    return LocallyConstantPotential.from_symbols(sft, [0.0, 1.0])


def zero(sft):
    return LocallyConstantPotential.constant(sft, 0.0)


def test_criterion_01_classical_exactness():
    t0 = time.perf_counter()
    errs = [
        abs(classical_pressure(FULL2, zero(FULL2)).value - LOG2) / 1e-12,
        abs(classical_pressure(GOLDEN, zero(GOLDEN)).value - LOG_GOLDEN) / 1e-10,
    ]
    rng = np.random.default_rng(1)
    for a, b in rng.uniform(-3, 3, size=(10, 2)):
        p = classical_pressure(FULL2, LocallyConstantPotential.from_symbols(FULL2, [a, b])).value
        errs.append(abs(p - np.logaddexp(a, b)) / 1e-10)
    elapsed = time.perf_counter() - t0
    report(1, "classical pressure exactness", max(errs) <= 1,
           "worst error / tolerance = %.2e" % max(errs), elapsed, 1)


def test_criterion_02_variational_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for sft in (FULL2, GOLDEN):
        for _ in range(10):
            phi = LocallyConstantPotential.random(sft, 2, rng)
            res = classical_pressure(sft, phi)
            eq = res.equilibrium
            # recomputed from the measure, independent of the eigen-solver's bookkeeping
            gap = abs(entropy(eq) + integrate(phi, eq) - res.value)
            worst = max(worst, gap, variational_gap(res))
    elapsed = time.perf_counter() - t0
    report(2, "variational identity", worst <= 1e-8, "worst |h + int phi - P| = %.2e" % worst, elapsed, 5)


def test_criterion_03_level_set_duality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    gap = integral_err = 0.0
    concave = True
    for sft in (FULL2, GOLDEN):
        for _ in range(5):
            phi = LocallyConstantPotential.random(sft, 2, rng)
            psi = LocallyConstantPotential.random(sft, 2, rng)
            w = edge_system(sft, phi).weights[0]
            lo, hi = integral_range(sft, w)
            alphas = np.linspace(lo, hi, 13)[1:-1]
            for a in alphas:
                dual = level_set_pressure_dual(sft, phi, psi, a)
                primal = level_set_pressure_primal(sft, phi, psi, a)
                gap = max(gap, abs(dual.value - primal.value))
                integral_err = max(integral_err, abs(edge_integral(w, dual.maximizer) - a))
            concave &= level_set_spectrum(sft, phi, psi, alphas).is_concave()
    elapsed = time.perf_counter() - t0
    ok = gap <= 1e-5 and integral_err <= 1e-6 and concave
    report(3, "level-set duality", ok,
           "primal/dual gap %.2e, |int phi - alpha| %.2e, concave %s" % (gap, integral_err, concave), elapsed, 120)


def test_criterion_04_bowen_root():
    t0 = time.perf_counter()
    errs, unique = [], True
    for sft, expected in ((FULL2, 1.0), (GOLDEN, BOWEN_GOLDEN)):
        phi = LocallyConstantPotential.constant(sft, -math.log(2))
        r = bowen_root(classical_curve(sft, phi), phi)
        errs.append(abs(r.value - expected))
        unique &= r.unique
    elapsed = time.perf_counter() - t0
    report(4, "Bowen root", max(errs) <= 1e-8 and unique,
           "root errors %s, unique %s" % (", ".join("%.1e" % e for e in errs), unique), elapsed, 1)


def test_criterion_05_point_pressure():
    t0 = time.perf_counter()
    phi = phi01(FULL2)
    est = pp_critical([PointSpec.periodic("001")], phi)
    periodic_err = abs(est.critical - 1 / 3)
    x = PointSpec.stored(generic_word(MarkovMeasure.bernoulli([0.5, 0.5]), 2**14, 7))
    lo, hi = point_pressure_oracle(x, phi, range(1, 2**14 + 1))
    osc, cert = irregular_witness(FULL2, phi, 1)
    olo, ohi = point_pressure_oracle(osc, phi, cert.checkpoints)
    elapsed = time.perf_counter() - t0
    ok = periodic_err <= 1e-3 and abs(lo - 0.5) <= 0.03 and abs(hi - 0.5) <= 0.03 and ohi - olo >= 0.4
    report(5, "pressure at a point", ok,
           "periodic |crit - 1/3| %.1e; generic liminf %.4f limsup %.4f; oscillator gap %.4f"
           % (periodic_err, lo, hi, ohi - olo), elapsed, 30)


def test_criterion_06_irregular_set():
    t0 = time.perf_counter()
    phi = phi01(FULL2)
    x, cert = irregular_witness(FULL2, phi, 1)
    admissible = is_admissible(x.prefix(cert.checkpoints[-1]), FULL2)
    cfg = DiagnosticsConfig(depth=1, times=tuple(cert.checkpoints), burn_in=0.0)
    fam = MeasureFamily.empirical_closure(FULL2, [x], cfg, candidates=cert.targets)
    star = star_pressure(fam, zero(FULL2))
    hashed = pressure_hash([x], zero(FULL2), cfg, candidates=cert.targets)
    has_half = any(np.allclose(m.stationary, [0.5, 0.5]) for m in cert.targets)
    elapsed = time.perf_counter() - t0
    ok = admissible and has_half and cert.gap >= 0.4 and star.value >= LOG2 - 1e-9 and "empty" in hashed.flags
    report(6, "irregular set", ok,
           "gap %.4f, star %.12f, hash %s (sentinel %s)" % (cert.gap, star.value, hashed.value, "empty" in hashed.flags),
           elapsed, 30)


def test_criterion_07_north_south():
    t0 = time.perf_counter()
    f = distance_to_north
    expected = {"circle-minus-S": 2.0, "N": 0.0, "S": 2.0, "circle-minus-NS": 2.0, "circle": 2.0}
    exact = all(ns_star_pressure(k, f).value == v for k, v in expected.items())
    avg = ns_orbit_stats(NORTH - 1e-3, 10**4, [f])[0]
    res = ns_star_pressure("circle-minus-S", f)
    contrast = f(SOUTH) > f(NORTH) and res.nonwandering == f(NORTH) < res.value
    elapsed = time.perf_counter() - t0
    ok = exact and abs(avg - f(SOUTH)) <= 1e-2 and contrast
    report(7, "North-South", ok,
           "closed forms exact %s, |avg - phi(S)| %.2e, phi(N) %.1f < %.1f" % (exact, abs(avg - 2), res.nonwandering, res.value),
           elapsed, 5)


def test_criterion_08_manneville_pomeau():
    t0 = time.perf_counter()
    mp = MPMap(0.5)
    ts = default_t_grid()
    acip = acip_lyapunov(mp)
    spec = mp_lyapunov_spectrum(mp, [0.0], 24, t_grid=ts)
    curve = spec.pressure
    at_zero = abs(curve.value[np.argmin(np.abs(ts))] - LOG2)
    root = curve.root()
    lo, hi = spec.interval
    mid = np.linspace(lo + (hi - lo) / 3, hi - (hi - lo) / 3, 5)
    leg = mp_lyapunov_spectrum(mp, mid, 24, pressure=curve).curve
    leg_err = float(np.max(np.abs(leg.value - mid)))
    eq = mp_star_equilibrium(mp, acip.lyapunov / 2, acip)
    elapsed = time.perf_counter() - t0
    ok = at_zero <= 1e-6 and 0.9 <= root <= 1.1 and leg_err <= 0.05 and not eq.charges_Z
    report(8, "Manneville-Pomeau", ok,
           "|P(0) - log 2| %.1e, root %.4f, middle-third Legendre error %.4f on I=(%.4f, %.4f), charges_Z %s"
           % (at_zero, root, leg_err, lo, hi, eq.charges_Z), elapsed, 600)
    info = ("criterion  8 [INFO] detected I=(%.4f, %.4f) vs theoretical (0, h_acip=%.4f); depth-24 curve "
            "distortion %.3f" % (lo, hi, acip.entropy, curve.distortion))
    RESULTS.append(info)
    print(info)


def test_criterion_09_counting_lemma():
    t0 = time.perf_counter()
    worst = -math.inf
    for k in range(1, 17):
        for h in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6):
            n = bowen_count(k, h, 2)
            if n:
                worst = max(worst, math.log(n) / k - (h + 2 * math.log(k + 1) / k))
    brute = bowen_count_bruteforce(4, 0.5, 2)
    elapsed = time.perf_counter() - t0
    report(9, "counting lemma", worst <= 0 and brute == 2,
           "max excess over bound %.4f, brute count %d" % (worst, brute), elapsed, 10)


def test_criterion_10_property_suite(tmp_path):
    t0 = time.perf_counter()
    code = cli_run(["verify", "--seed", "1,2,3", "--out", str(tmp_path / "verify")])
    elapsed = time.perf_counter() - t0
    report(10, "property suite", code == 0, "verify --seed 1,2,3 exit %d" % code, elapsed, 120)


def test_criterion_11_beta_and_countable():
    t0 = time.perf_counter()
    beta2 = abs(math.log(beta_count(2, 20)) / 20 - LOG2)
    golden = math.log(beta_count("golden", 20)) / 20
    trunc = truncation_pressure(countable_full_shift, None, [2, 4, 8])
    exact = trunc == [math.log(2), math.log(4), math.log(8)]
    elapsed = time.perf_counter() - t0
    ok = beta2 <= 1e-15 and abs(golden - LOG_GOLDEN) <= 0.01 and abs(golden - GOLDEN_ENTROPY_20) <= 1e-12 and exact
    report(11, "beta-shift and countable truncations", ok,
           "beta=2 error %.1e, golden n=20 %.6f (log golden %.6f), truncations exact %s" % (beta2, golden, LOG_GOLDEN, exact),
           elapsed, 10)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
