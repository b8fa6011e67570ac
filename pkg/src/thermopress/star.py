"""Variational pressure over families of invariant measures.

A set of points enters only through the measures that arise as limits of its
empirical orbit measures; each :class:`MeasureFamily` kind encodes that
collection for a class of sets with known structure.
"""

from __future__ import annotations

import hashlib
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .classic import (
    EdgeSystem,
    classical_pressure,
    critical_subshift,
    edge_system,
    integral_range,
    weights_pressure,
)
from .errors import ContractError, ConvergenceError, DomainError, UnsupportedHypothesisError
from .measures import (
    LocallyConstantPotential,
    MarkovMeasure,
    cylinder_distance,
    edge_integral,
    entropy,
    integrate,
    limit_diagnostics,
    markov_from_edge_mass,
)
from .symbolic import PointSpec, Sft, is_cyclically_admissible, is_mixing

BOUNDARY_TOL = 1e-12
Q_CAP = 2.0**20


@dataclass(frozen=True)
class DiagnosticsConfig:
    """How empirical measures of a point are sampled and clustered."""

    depth: int = 2
    tol: float = 0.05
    horizon: int = 2**14
    times: tuple[int, ...] | None = None
    burn_in: float = 0.5

    def schedule(self) -> list[int]:
        if self.times is not None:
            return list(self.times)
        grid = np.unique(np.geomspace(self.horizon / 64, self.horizon, 13).astype(int))
        return [int(t) for t in grid]


@dataclass(frozen=True, eq=False)
class MeasureFamily:
    """A family of invariant measures standing in for ``{V(x) : x in the set}``.

    Build with the classmethods; ``kind`` is one of ``all_invariant``,
    ``single``, ``finite_set``, ``level_set``, ``empirical_closure``, ``empty``.
    """

    kind: str
    sft: Sft | None = None
    measures: tuple = ()
    phi: LocallyConstantPotential | None = None
    alpha: float | None = None
    points: tuple = ()
    config: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    candidates: tuple = ()
    interval: tuple[float, float] | None = None

    KINDS = ("all_invariant", "single", "finite_set", "level_set", "empirical_closure", "empty")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ContractError("unknown family kind %r" % self.kind)
        if self.kind in ("single", "finite_set") and not self.measures:
            raise ContractError("%s family needs at least one measure" % self.kind)
        if self.kind == "level_set" and self.interval is None:
            system = edge_system(self.sft, self.phi)
            object.__setattr__(self, "interval", integral_range(system.sft, system.weights[0]))

    @classmethod
    def all_invariant(cls, sft: Sft) -> "MeasureFamily":
        return cls("all_invariant", sft)

    @classmethod
    def single(cls, mu: MarkovMeasure, sft: Sft | None = None) -> "MeasureFamily":
        return cls("single", sft, (mu,))

    @classmethod
    def finite_set(cls, mus: Sequence[MarkovMeasure], sft: Sft | None = None) -> "MeasureFamily":
        return cls("finite_set", sft, tuple(mus))

    @classmethod
    def level_set(cls, sft: Sft, phi: LocallyConstantPotential, alpha: float) -> "MeasureFamily":
        return cls("level_set", sft, phi=phi, alpha=float(alpha))

    @classmethod
    def empirical_closure(
        cls,
        sft: Sft,
        points: Sequence[PointSpec],
        config: DiagnosticsConfig | None = None,
        candidates: Sequence[MarkovMeasure] = (),
    ) -> "MeasureFamily":
        """Limit measures of the given points, read off cluster centroids.

        A centroid within ``config.tol`` of a candidate measure is identified
        with it; otherwise it is replaced by its depth-2 Markov moment match.
        """
        if not points:
            return cls("empty", sft)
        return cls("empirical_closure", sft, points=tuple(points), config=config or DiagnosticsConfig(),
                   candidates=tuple(candidates))

    @classmethod
    def empty(cls, sft: Sft | None = None) -> "MeasureFamily":
        return cls("empty", sft)

    def union(self, other: "MeasureFamily") -> "MeasureFamily":
        """Union of two explicit (single/finite/empty) families."""
        kinds = {"single", "finite_set", "empty"}
        if self.kind not in kinds or other.kind not in kinds:
            raise ContractError("union is only defined for explicit finite families")
        mus = self.measures + other.measures
        return MeasureFamily.finite_set(mus, self.sft) if mus else MeasureFamily.empty(self.sft)


@dataclass(frozen=True)
class StarResult:
    value: float
    maximizer: MarkovMeasure | None = None
    charges_Z: bool | None = None
    flags: frozenset = frozenset()
    q_star: float | None = None
    system: EdgeSystem | None = None

    def to_json(self) -> dict:
        d = {"value": self.value, "charges_Z": self.charges_Z, "flags": sorted(self.flags)}
        if self.q_star is not None:
            d["q_star"] = self.q_star
        if self.maximizer is not None:
            d["maximizer"] = self.maximizer.to_json()
        return d


def _sentinel(psi: LocallyConstantPotential, *flags: str) -> StarResult:
    return StarResult(psi.inf, flags=frozenset(("empty",) + flags))


def _free_energy(mu: MarkovMeasure, psi: LocallyConstantPotential) -> float:
    return entropy(mu) + integrate(psi, mu)


# ---------------------------------------------------------------------------
# explicit families


def periodic_point_pressure(x: Sequence[int] | PointSpec, psi: LocallyConstantPotential) -> float:
    """Average of ``psi`` over one period of the periodic point ``x``."""
    word = x.word if isinstance(x, PointSpec) else tuple(int(s) for s in x)
    if not is_cyclically_admissible(word, psi.sft):
        raise DomainError("word is not cyclically admissible")
    n, r = len(word), psi.range
    ext = word * (1 + (r - 1) // n + 1)
    return float(sum(psi.values[ext[i : i + r]] for i in range(n)) / n)


def _best_of(mus, psi) -> tuple[float, MarkovMeasure]:
    vals = [_free_energy(mu, psi) for mu in mus]
    i = int(np.argmax(vals))
    return vals[i], mus[i]


def _centroid_measure(centroid: dict, family: MeasureFamily):
    if family.candidates:
        d = [cylinder_distance(centroid, c, family.config.depth) for c in family.candidates]
        i = int(np.argmin(d))
        if d[i] <= family.config.tol:
            return family.candidates[i]
    a = family.sft.alphabet_size
    mass = np.zeros((a, a))
    if family.config.depth >= 2:
        for w, f in centroid.items():
            mass[w[0], w[1]] += f
    else:
        p = np.zeros(a)
        for w, f in centroid.items():
            p[w[0]] += f
        return MarkovMeasure.bernoulli(p / p.sum())
    return markov_from_edge_mass(mass, "moment-match")


def _point_limits(x: PointSpec, family: MeasureFamily):
    cfg = family.config
    times = [t for t in cfg.schedule() if t + cfg.depth - 1 <= x.available]
    if not times:
        raise ContractError("point prefix is shorter than the first checkpoint")
    diag = limit_diagnostics(x, times, cfg.depth, cfg.tol, cfg.burn_in, family.sft)
    return diag, [_centroid_measure(c.centroid, family) for c in diag.clusters]


def _empirical_value(family: MeasureFamily, psi, require_convergent: bool = False) -> StarResult:
    best = None
    for x in family.points:
        if x.kind == "periodic":
            cand = (periodic_point_pressure(x, psi), None)
        else:
            diag, mus = _point_limits(x, family)
            if require_convergent and not diag.converged:
                continue
            v, mu = _best_of(mus, psi)
            cand = (v, mu)
        if best is None or cand[0] > best[0]:
            best = cand
    if best is None:
        return _sentinel(psi, "no_convergent_point")
    return StarResult(best[0], best[1])


def star_pressure(family: MeasureFamily, psi: LocallyConstantPotential) -> StarResult:
    """Supremum of ``entropy + integral of psi`` over the family."""
    k = family.kind
    if k == "empty":
        return _sentinel(psi)
    if k == "all_invariant":
        r = classical_pressure(family.sft, psi)
        return StarResult(r.value, r.equilibrium, True, system=r.system)
    if k in ("single", "finite_set"):
        v, mu = _best_of(family.measures, psi)
        return StarResult(v, mu)
    if k == "level_set":
        return level_set_pressure_dual(family.sft, family.phi, psi, family.alpha)
    return _empirical_value(family, psi)


def pressure_hash(
    points: Sequence[PointSpec],
    psi: LocallyConstantPotential,
    config: DiagnosticsConfig | None = None,
    candidates: Sequence[MarkovMeasure] = (),
) -> StarResult:
    """Like :func:`star_pressure` on an empirical family, but only points whose
    empirical measures converge (one cluster) contribute."""
    fam = MeasureFamily.empirical_closure(psi.sft, points, config, candidates)
    if fam.kind == "empty":
        return _sentinel(psi)
    return _empirical_value(fam, psi, require_convergent=True)


# ---------------------------------------------------------------------------
# level sets of Birkhoff averages


class _Tilt:
    """Pressure of ``q*phi + psi`` on a common edge presentation."""

    def __init__(self, sft, phi, psi):
        self.system = edge_system(sft, phi, psi)
        self.work = self.system.sft
        self.wphi, self.wpsi = self.system.weights
        self.mask = self.work.transition > 0

    def __call__(self, q: float):
        w = q * self.wphi + self.wpsi
        top = w[self.mask].max()
        val, eq, _ = weights_pressure(self.work, w - top)
        return val + top, eq

    def slope(self, q: float, alpha: float) -> float:
        return edge_integral(self.wphi, self(q)[1]) - alpha


def dual_objective(sft, phi, psi, alpha: float, q: float) -> float:
    """``P(q*phi + psi) - q*alpha``, the function minimised by the dual solver."""
    return _Tilt(sft, phi, psi)(q)[0] - q * alpha


def level_set_pressure_dual(
    sft: Sft, phi: LocallyConstantPotential, psi: LocallyConstantPotential, alpha: float, xtol: float = 1e-12
) -> StarResult:
    """``inf_q P(q*phi + psi) - q*alpha`` with its equilibrium maximizer.

    The objective is convex with derivative ``integral of phi against the
    q-equilibrium, minus alpha``; the minimiser is the root of that
    derivative, bracketed by doubling ``|q|``.  Endpoint levels are solved on
    the subshift of extremal cycles, where the constraint holds for every
    invariant measure.
    """
    tilt = _Tilt(sft, phi, psi)
    lo, hi = integral_range(tilt.work, tilt.wphi)
    eps = BOUNDARY_TOL * (1.0 + abs(lo) + abs(hi))
    if alpha < lo - eps or alpha > hi + eps:
        return _sentinel(psi, "outside_interval")
    if hi - lo <= eps or min(alpha - lo, hi - alpha) <= eps:
        which = "max" if hi - alpha <= eps else "min"
        crit = critical_subshift(tilt.work, tilt.wphi, which)
        val, eq, _ = weights_pressure(crit, tilt.wpsi, decompose=True)
        return StarResult(val, eq, flags=frozenset({"boundary"}), system=tilt.system)

    q = 1.0
    while tilt.slope(-q, alpha) > 0 or tilt.slope(q, alpha) < 0:
        q *= 2.0
        if q > Q_CAP:
            raise ConvergenceError("no sign change of the dual derivative up to |q| = %g" % Q_CAP)
    qs = brentq(lambda t: tilt.slope(t, alpha), -q, q, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    val, eq = tilt(qs)
    flags = set()
    if abs(edge_integral(tilt.wphi, eq) - alpha) > 1e-6:
        flags.add("sup_not_attained")
    return StarResult(val - qs * alpha, eq, flags=frozenset(flags), q_star=float(qs), system=tilt.system)


def level_set_pressure_primal(
    sft: Sft, phi: LocallyConstantPotential, psi: LocallyConstantPotential, alpha: float, tol: float = 1e-10
) -> StarResult:
    """Direct maximisation of ``entropy + integral of psi`` subject to ``integral of phi = alpha``.

    Variables are the shift-invariant edge masses ``m_ij``; the entropy
    ``-sum m_ij log(m_ij / sum_k m_ik)`` is jointly concave there, so a conic
    solver returns the global optimum.
    """
    import cvxpy as cp

    system = edge_system(sft, phi, psi)
    work = system.sft
    wphi, wpsi = system.weights
    src, dst = np.nonzero(work.transition)
    ne, n = src.size, work.alphabet_size
    m = cp.Variable(ne, nonneg=True)
    out = np.zeros((n, ne))
    inc = np.zeros((n, ne))
    out[src, np.arange(ne)] = 1.0
    inc[dst, np.arange(ne)] = 1.0
    row_of_edge = out[src]  # (ne, ne): picks the source marginal of each edge
    marg = row_of_edge @ m
    objective = cp.sum(-cp.rel_entr(m, marg)) + wpsi[src, dst] @ m
    cons = [cp.sum(m) == 1, out @ m == inc @ m, wphi[src, dst] @ m == alpha]
    prob = cp.Problem(cp.Maximize(objective), cons)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol, max_iter=500)
    except cp.error.SolverError as exc:
        raise ConvergenceError("conic solver failed: %s" % exc) from exc
    if prob.status == cp.INFEASIBLE:
        return _sentinel(psi, "outside_interval")
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or m.value is None:
        raise ConvergenceError("primal solver status %s" % prob.status, best=m.value)
    mass = np.zeros((n, n))
    mass[src, dst] = np.clip(m.value, 0.0, None)
    mass /= mass.sum()
    pi = mass.sum(axis=1)
    nz = mass > 0
    h = -float((mass[nz] * np.log(mass[nz] / np.broadcast_to(pi[:, None], mass.shape)[nz])).sum())
    value = h + float((mass * wpsi).sum())
    flags = {"inaccurate"} if prob.status == cp.OPTIMAL_INACCURATE else set()
    return StarResult(value, markov_from_edge_mass(mass, "primal"), flags=frozenset(flags), system=system)


@dataclass(frozen=True)
class SpectrumCurve:
    alpha: np.ndarray
    value: np.ndarray
    q_star: np.ndarray
    maximizer_id: tuple

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("alpha,value,q_star,maximizer_id\n")
        for a, v, q, mid in zip(self.alpha, self.value, self.q_star, self.maximizer_id):
            buf.write("%.17g,%.17g,%.17g,%s\n" % (a, v, q, mid))
        return buf.getvalue()

    def is_concave(self, tol: float = 1e-8) -> bool:
        """Midpoint test on consecutive triples (uniform or not)."""
        a, v = self.alpha, self.value
        for i in range(1, len(a) - 1):
            t = (a[i] - a[i - 1]) / (a[i + 1] - a[i - 1])
            if v[i] < (1 - t) * v[i - 1] + t * v[i + 1] - tol:
                return False
        return True


def measure_id(mu: MarkovMeasure | None) -> str:
    """Short content hash of a measure, stable across runs."""
    if mu is None:
        return "none"
    data = np.round(np.concatenate([mu.kernel.ravel(), mu.stationary]), 12).tobytes()
    return hashlib.sha1(data).hexdigest()[:12]


def level_set_spectrum(sft, phi, psi, alphas: Sequence[float]) -> SpectrumCurve:
    rows = [level_set_pressure_dual(sft, phi, psi, a) for a in alphas]
    return SpectrumCurve(
        np.asarray(alphas, dtype=float),
        np.array([r.value for r in rows]),
        np.array([np.nan if r.q_star is None else r.q_star for r in rows]),
        tuple(measure_id(r.maximizer) for r in rows),
    )


# ---------------------------------------------------------------------------
# irregular sets, Bowen's equation, equilibria


def irregular_set_pressure(sft: Sft, psi: LocallyConstantPotential, phi: LocallyConstantPotential | None = None) -> StarResult:
    """Pressure of the set of points whose Birkhoff averages (of ``phi``) fail to converge.

    On a mixing shift this equals the classical pressure of ``psi``.  When
    ``phi`` is given the non-degeneracy hypothesis is checked too, and
    ``result.system`` is left for a witness built by the synthesizer.
    """
    if not is_mixing(sft):
        raise UnsupportedHypothesisError("irregular-set pressure needs a topologically mixing shift")
    if phi is not None:
        system = edge_system(sft, phi)
        lo, hi = integral_range(system.sft, system.weights[0])
        if hi - lo <= BOUNDARY_TOL * (1 + abs(lo) + abs(hi)):
            raise UnsupportedHypothesisError("phi has the same integral for every invariant measure")
    r = classical_pressure(sft, psi)
    return StarResult(r.value, r.equilibrium, flags=frozenset({"witness:synthesis"}), system=r.system)


@dataclass(frozen=True)
class BowenRoot:
    value: float
    residual: float
    unique: bool
    bracket: tuple[float, float]
    flags: frozenset = frozenset()


def classical_curve(sft: Sft, phi: LocallyConstantPotential) -> Callable[[float], float]:
    return lambda t: classical_pressure(sft, phi * t).value


def bowen_root(
    pressure_curve: Callable[[float], float],
    phi: LocallyConstantPotential,
    xtol: float = 1e-14,
    scan: int = 64,
) -> BowenRoot:
    """Zero of ``t -> pressure_curve(t)`` for a strictly negative ``phi``.

    The curve has slopes between ``-norm(phi)`` and ``sup(phi) < 0``, which
    brackets the root in ``[p0 / norm, p0 / -sup]`` with ``p0 = curve(0)``.
    """
    if not phi.sup < 0:
        raise DomainError("phi must be strictly negative")
    p0 = pressure_curve(0.0)
    if p0 <= 0:
        return BowenRoot(0.0, abs(p0), True, (0.0, 0.0), frozenset({"nonpositive_at_zero"} if p0 < 0 else ()))
    lo, hi = p0 / phi.norm, p0 / -phi.sup
    f_lo, f_hi = pressure_curve(lo), pressure_curve(hi)
    if abs(f_lo) <= 1e-15:
        root = lo
    elif abs(f_hi) <= 1e-15:
        root = hi
    else:
        root = brentq(pressure_curve, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    grid = np.linspace(0.0, max(2 * hi, 1e-9), scan)
    vals = np.array([pressure_curve(t) for t in grid])
    unique = bool((np.diff(vals) < 0).all())
    return BowenRoot(float(root), abs(pressure_curve(root)), unique, (lo, hi))


def star_equilibrium(family: MeasureFamily, psi: LocallyConstantPotential) -> StarResult:
    """Maximizer of the family's variational problem, with whether it charges the set.

    For a level set the maximizer charges the set when it is ergodic with
    ``integral of phi == alpha``, since its generic points then lie in the level set.
    """
    res = star_pressure(family, psi)
    if res.maximizer is None:
        return StarResult(res.value, None, None, res.flags | {"sup_not_attained"}, res.q_star, res.system)
    charges = res.charges_Z
    if family.kind == "level_set":
        w = res.system.weights[0]
        charges = bool(res.maximizer.is_ergodic and abs(edge_integral(w, res.maximizer) - family.alpha) <= 1e-6)
    return StarResult(res.value, res.maximizer, charges, res.flags, res.q_star, res.system)
