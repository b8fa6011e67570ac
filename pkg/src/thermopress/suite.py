"""Randomised checks of the structural properties of classical and variational pressure."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classic import classical_pressure, edge_system, integral_range, variational_gap
from .measures import (
    LocallyConstantPotential,
    MarkovMeasure,
    cylinder_distance,
    edge_integral,
    empirical_from_prefix,
    entropy,
    integrate_words,
    random_markov,
)
from .pesin_pitskel import pp_critical
from .star import (
    MeasureFamily,
    bowen_root,
    classical_curve,
    dual_objective,
    level_set_pressure_dual,
    level_set_pressure_primal,
    level_set_spectrum,
    periodic_point_pressure,
    star_pressure,
)
from .symbolic import PointSpec, Sft, admissible_words, count_words, full_shift, recode_higher_block
from .synthesis import generic_word


@dataclass
class Check:
    name: str
    passed: bool
    worst: float
    tol: float
    instance: dict | None = None


@dataclass
class SuiteReport:
    seed: int
    system: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, errors: Sequence[float], tol: float, instances: Sequence = ()) -> None:
        """Record a check from its list of violations (``error <= tol`` passes)."""
        errs = np.asarray(errors, dtype=float)
        worst = float(errs.max()) if errs.size else 0.0
        bad = None
        if errs.size and worst > tol and instances:
            bad = instances[int(errs.argmax())]
        self.checks.append(Check(name, worst <= tol, worst, tol, bad))

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "system": self.system, "ok": self.ok,
                           "checks": [asdict(c) for c in self.checks]}, sort_keys=True, default=str)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            lines.append("%-4s %-34s worst=%.3g tol=%.3g" % ("ok" if c.passed else "FAIL", c.name, c.worst, c.tol))
        return "\n".join(lines)


def default_potentials(sft: Sft, rng: np.random.Generator, count: int = 5) -> list[LocallyConstantPotential]:
    return [LocallyConstantPotential.random(sft, 2, rng) for _ in range(count)]


def default_measures(sft: Sft, rng: np.random.Generator) -> list[MarkovMeasure]:
    parry = classical_pressure(sft, LocallyConstantPotential.constant(sft, 0.0)).equilibrium
    mus = [parry, random_markov(sft, rng), random_markov(sft, rng)]
    for w in admissible_words(sft, 2):
        if sft.transition[w[-1], w[0]] and len(set(w)) == len(w):
            mus.append(MarkovMeasure.periodic_orbit(w, sft.alphabet_size, sft))
            break
    for a in range(sft.alphabet_size):
        if sft.transition[a, a]:
            mus.append(MarkovMeasure.point_mass(a, sft.alphabet_size, sft))
            break
    return mus


def _periodic_words(sft: Sft, max_len: int = 3) -> list[tuple]:
    out = []
    for n in range(1, max_len + 1):
        for w in admissible_words(sft, n):
            if sft.transition[w[-1], w[0]] and w == min(w[i:] + w[:i] for i in range(n)):
                out.append(w)
    return out


def _lift_to_blocks(phi: LocallyConstantPotential, k: int):
    block_sft, blocks = recode_higher_block(phi.sft, k)
    r = max(phi.range - k + 1, 1)

    def expand(w):
        return blocks[w[0]] + tuple(blocks[b][-1] for b in w[1:])

    return block_sft, LocallyConstantPotential.from_function(block_sft, r, lambda w: phi.values[expand(w)[: phi.range]])


# ---------------------------------------------------------------------------


def classic_checks(rep: SuiteReport, sft: Sft, pots, rng) -> None:
    vals = {id(p): classical_pressure(sft, p) for p in pots}
    rep.add("variational_identity", [variational_gap(vals[id(p)]) for p in pots], 1e-8,
            [p.to_json() for p in pots])
    rep.add("eigen_residual", [vals[id(p)].eigen_residual for p in pots], 1e-10)

    errs = []
    for p in pots:
        h = LocallyConstantPotential.random(sft, 1, rng)
        errs.append(abs(classical_pressure(sft, p.add_coboundary(h)).value - vals[id(p)].value))
    rep.add("cohomology_invariance", errs, 1e-8)

    errs = []
    for p, q in zip(pots, pots[1:] + pots[:1]):
        errs.append(abs(vals[id(p)].value - vals[id(q)].value) - (p - q).norm)
    rep.add("lipschitz", errs, 1e-12)

    errs = []
    for p, q in zip(pots, pots[1:] + pots[:1]):
        for t in np.linspace(0.1, 0.9, 5):
            mix = classical_pressure(sft, p * (1 - t) + q * t).value
            errs.append(mix - ((1 - t) * vals[id(p)].value + t * vals[id(q)].value))
    rep.add("convexity_in_potential", errs, 1e-10)

    errs = []
    for p in pots:
        bsft, bp = _lift_to_blocks(p, 2)
        errs.append(abs(classical_pressure(bsft, bp).value - vals[id(p)].value))
    rep.add("conjugacy_invariance", errs, 1e-10)

    zero = classical_pressure(sft, LocallyConstantPotential.constant(sft, 0.0)).value
    growth = math.log(count_words(sft, 65)) - math.log(count_words(sft, 64))
    rep.add("count_words_growth", [abs(growth - zero)], 1e-6)


def star_checks(rep: SuiteReport, sft: Sft, pots, mus, rng) -> None:
    fams = [MeasureFamily.finite_set(mus[: k + 1], sft) for k in range(len(mus))]
    # monotone along the nested chain; a union takes the max
    errs = []
    for p in pots:
        v = [star_pressure(f, p).value for f in fams]
        errs += [v[k] - v[k + 1] for k in range(len(v) - 1)]
    rep.add("star_monotone", errs, 1e-12)
    errs = []
    for p in pots:
        singles = [star_pressure(MeasureFamily.single(m, sft), p).value for m in mus]
        errs.append(abs(star_pressure(fams[-1], p).value - max(singles)))
    rep.add("star_union", errs, 1e-12)
    # composition with the shift leaves every integral unchanged
    errs = [abs(integrate_words(p.pullback_shift(), m) - integrate_words(p, m)) for p in pots for m in mus]
    rep.add("star_shift_integral", errs, 1e-12)
    # cohomologous potentials
    errs = []
    for p in pots:
        h = LocallyConstantPotential.random(sft, 1, rng)
        errs.append(abs(star_pressure(fams[-1], p.add_coboundary(h)).value - star_pressure(fams[-1], p).value))
    rep.add("star_cohomology", errs, 1e-10)
    # additive bound with the largest integral over all invariant measures
    errs = []
    for p, q in zip(pots, pots[1:] + pots[:1]):
        system = edge_system(sft, q)
        beta = integral_range(system.sft, system.weights[0])[1]
        for f in fams:
            errs.append(star_pressure(f, p + q).value - star_pressure(f, p).value - beta)
    rep.add("star_additive", errs, 1e-10)
    # convexity and Lipschitz bound
    errs6, errs7 = [], []
    for p, q in zip(pots, pots[1:] + pots[:1]):
        for f in fams:
            a, b = star_pressure(f, p).value, star_pressure(f, q).value
            errs7.append(abs(a - b) - (p - q).norm)
            for t in (0.25, 0.5, 0.75):
                errs6.append(star_pressure(f, p * (1 - t) + q * t).value - ((1 - t) * a + t * b))
    rep.add("star_convexity", errs6, 1e-10)
    rep.add("star_lipschitz", errs7, 1e-12)
    # lower bound by inf, including the empty family
    errs = [p.inf - star_pressure(f, p).value for p in pots for f in fams + [MeasureFamily.empty(sft)]]
    rep.add("star_inf_bound", errs, 0.0)
    # shifting a point moves its empirical measures by at most 2k/n
    errs = []
    for m in mus:
        w = generic_word(m, 4096 + 16, rng)
        x = PointSpec.stored(w)
        for k in (1, 3, 7):
            n = 4096
            d = cylinder_distance(empirical_from_prefix(x, n, 2), empirical_from_prefix(x.shifted(k), n, 2), 2)
            errs.append(d - 2 * k / n)
    rep.add("star_shift_invariance_points", errs, 1e-12)
    # compact invariant case: the all-invariant family is the classical pressure
    errs = [abs(star_pressure(MeasureFamily.all_invariant(sft), p).value - classical_pressure(sft, p).value) for p in pots]
    rep.add("star_compact_invariant", errs, 1e-12)
    # inverse variational principle attained by generic points: star of single(mu) at 0 is h(mu)
    zero = LocallyConstantPotential.constant(sft, 0.0)
    errs = [abs(star_pressure(MeasureFamily.single(m, sft), zero).value - entropy(m)) for m in mus]
    rep.add("star_inverse_vp", errs, 1e-12)


def level_set_checks(rep: SuiteReport, sft: Sft, pots) -> None:
    errs, conc, cvx, integ = [], [], [], []
    for p, q in zip(pots, pots[1:] + pots[:1]):
        lo, hi = MeasureFamily.level_set(sft, p, 0.0).interval
        alphas = np.linspace(lo, hi, 13)[1:-1]
        curve = level_set_spectrum(sft, p, q, alphas)
        for a, v in zip(alphas, curve.value):
            errs.append(abs(v - level_set_pressure_primal(sft, p, q, a).value))
        conc.append(0.0 if curve.is_concave(1e-8) else 1.0)
        for a in alphas[::3]:
            res = level_set_pressure_dual(sft, p, q, a)
            integ.append(abs(_edge_int(res, 0) - a))
            qs = np.linspace(-3, 3, 13)
            vals = [dual_objective(sft, p, q, a, t) for t in qs]
            cvx += [0.5 * (vals[i - 1] + vals[i + 1]) - vals[i] for i in range(1, len(qs) - 1)]
    rep.add("level_set_primal_dual", errs, 1e-5)
    rep.add("spectrum_concave", conc, 0.0)
    rep.add("maximizer_integral", integ, 1e-6)
    rep.add("dual_curve_convex", [-c for c in cvx], 1e-10)


def _edge_int(res, which: int) -> float:
    return edge_integral(res.system.weights[which], res.maximizer)


def bowen_checks(rep: SuiteReport, sft: Sft, pots) -> None:
    resid, uniq = [], []
    for p in pots:
        neg = p - (p.sup + 0.1)
        r = bowen_root(classical_curve(sft, neg), neg)
        resid.append(r.residual)
        uniq.append(0.0 if r.unique else 1.0)
    rep.add("bowen_root_residual", resid, 1e-8)
    rep.add("bowen_root_unique", uniq, 0.0)


def sandwich_checks(rep: SuiteReport, sft: Sft, pots, rng) -> None:
    """Cover pressure <= variational pressure <= classical pressure on singletons."""
    errs = []
    for p in pots[:2]:
        ambient = classical_pressure(sft, p).value
        for w in _periodic_words(sft, 2):
            x = PointSpec.periodic(w)
            pp = pp_critical([x], p)
            star = periodic_point_pressure(w, p)
            errs.append(pp.critical - star - (pp.bracket[1] - pp.bracket[0]) - 1e-6)
            errs.append(star - ambient - 1e-6)
        parry = classical_pressure(sft, LocallyConstantPotential.constant(sft, 0.0)).equilibrium
        x = PointSpec.stored(generic_word(parry, 1 << 14, rng))
        pp = pp_critical([x], p)
        fam = MeasureFamily.empirical_closure(sft, [x])
        star = star_pressure(fam, p).value
        errs.append(pp.critical - star - (pp.bracket[1] - pp.bracket[0]) - 1e-6)
        errs.append(star - ambient - 1e-6)
    rep.add("sandwich_pp_star_classic", errs, 0.0)


def nonergodic_counterexample(rep: SuiteReport) -> None:
    """Mixture of a positive-entropy measure and a fixed point: generic points of the
    two components give max of the entropies, strictly above the mixture's entropy."""
    sft = full_shift(3)
    k = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
    mix = MarkovMeasure(k, np.array([0.25, 0.25, 0.5]), "mixture")
    mu1 = MarkovMeasure(k, np.array([0.5, 0.5, 0.0]), "bernoulli on 01")
    mu2 = MarkovMeasure.point_mass(2, 3)
    zero = LocallyConstantPotential.constant(sft, 0.0)
    via_generic = star_pressure(MeasureFamily.finite_set([mu1, mu2], sft), zero).value
    errs = [abs(via_generic - max(entropy(mu1), entropy(mu2))), abs(entropy(mix) - 0.5 * math.log(2))]
    strict = via_generic - entropy(mix)
    rep.add("nonergodic_max", errs, 1e-12)
    rep.add("nonergodic_strict", [0.0 if strict > 0.1 else 1.0], 0.0)
    rep.add("mixture_not_ergodic", [0.0 if not mix.is_ergodic else 1.0], 0.0)


def property_suite(
    sft: Sft,
    potentials: Sequence[LocallyConstantPotential] | None = None,
    families: Sequence[MarkovMeasure] | None = None,
    seed: int = 0,
    system: str = "",
    progress: Callable[[str], None] | None = None,
) -> SuiteReport:
    """Run every check on one shift; ``families`` are the measures generating the finite families."""
    rng = np.random.default_rng(seed)
    pots = list(potentials) if potentials is not None else default_potentials(sft, rng)
    mus = list(families) if families is not None else default_measures(sft, rng)
    rep = SuiteReport(seed, system or repr(sft))
    for step in (
        lambda: classic_checks(rep, sft, pots, rng),
        lambda: star_checks(rep, sft, pots, mus, rng),
        lambda: level_set_checks(rep, sft, pots),
        lambda: bowen_checks(rep, sft, pots),
        lambda: sandwich_checks(rep, sft, pots, rng),
        lambda: nonergodic_counterexample(rep),
    ):
        step()
        if progress:
            progress(rep.checks[-1].name)
    return rep
