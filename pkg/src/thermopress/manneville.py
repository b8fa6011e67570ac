"""Manneville-Pomeau maps ``x -> x + x**(1+s) mod 1``: pressure curve and Lyapunov spectrum.

The pressure of ``-t log f'`` is estimated from inverse-branch sums at depth
``n``: every word of ``n`` branch choices pulls a reference point back to a
point of the corresponding cylinder, where ``S_n log f'`` is evaluated.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np
from scipy.optimize import brentq

from .errors import BudgetError, ContractError, DomainError
from .star import SpectrumCurve

if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "workqueue"

MAX_DEPTH = 28
SPLIT_DEPTH = 8  # 2**8 independent subtrees for the parallel loop


def _set_threads():
    cap = os.environ.get("THERMOPRESS_THREADS")
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


@numba.njit(cache=True)
def _solve(target, s, hi):
    """Root of ``x + x**(1+s) = target`` on ``[0, hi]`` by Newton from the right (convex, increasing)."""
    x = min(target, hi)
    for _ in range(100):
        fx = x + x ** (1.0 + s) - target
        step = fx / (1.0 + (1.0 + s) * x**s)
        x_new = x - step
        if x_new < 0.0:
            x_new = 0.5 * x
        if abs(x_new - x) <= 1e-17 + 1e-16 * x:
            return x_new
        x = x_new
    return x


@numba.njit(cache=True)
def _logd(x, s):
    return math.log1p((1.0 + s) * x**s)


@numba.njit(cache=True)
def _expand(y0, s, c, levels):
    """Breadth-first pullbacks of ``y0``: points and accumulated ``log f'`` after ``levels`` steps."""
    ys = np.array([y0])
    ls = np.zeros(1)
    for _ in range(levels):
        m = ys.size
        ny = np.empty(2 * m)
        nl = np.empty(2 * m)
        for i in range(m):
            a = _solve(ys[i], s, c)
            b = _solve(ys[i] + 1.0, s, 1.0)
            ny[2 * i] = a
            ny[2 * i + 1] = b
            nl[2 * i] = ls[i] + _logd(a, s)
            nl[2 * i + 1] = ls[i] + _logd(b, s)
        ys, ls = ny, nl
    return ys, ls


@numba.njit(parallel=True, cache=True)
def _leaf_sums(ys, ls, s, c, levels, ts, shifts):
    """For each root, DFS ``levels`` more pullbacks; accumulate ``exp(-t L - shift)`` per ``t``."""
    nroot = ys.size
    nt = ts.size
    acc = np.zeros((nroot, nt))
    for r in numba.prange(nroot):
        stack_y = np.empty(levels + 1)
        stack_l = np.empty(levels + 1)
        choice = np.zeros(levels + 1, dtype=np.int64)
        stack_y[0] = ys[r]
        stack_l[0] = ls[r]
        d = 0
        choice[0] = 0
        while d >= 0:
            if d == levels:
                lv = stack_l[d]
                for k in range(nt):
                    acc[r, k] += math.exp(-ts[k] * lv - shifts[k])
                d -= 1
                continue
            ch = choice[d]
            if ch == 2:
                d -= 1
                continue
            choice[d] = ch + 1
            y = stack_y[d]
            x = _solve(y, s, c) if ch == 0 else _solve(y + 1.0, s, 1.0)
            stack_y[d + 1] = x
            stack_l[d + 1] = stack_l[d] + _logd(x, s)
            choice[d + 1] = 0
            d += 1
    return acc


@dataclass(frozen=True)
class MPMap:
    s: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise DomainError("s must lie in (0, 1)")

    @property
    def branch_point(self) -> float:
        """``c`` with ``c + c**(1+s) = 1``: the left branch is ``[0, c]``."""
        return brentq(lambda x: x + x ** (1 + self.s) - 1.0, 0.0, 1.0, xtol=1e-16)

    def __call__(self, x):
        return np.mod(x + np.power(x, 1 + self.s), 1.0)

    def derivative(self, x):
        return 1.0 + (1 + self.s) * np.power(x, self.s)

    def log_derivative(self, x):
        return np.log1p((1 + self.s) * np.power(x, self.s))


def branch_log_sums(mp: MPMap, depth: int, y_ref: float = 0.5) -> np.ndarray:
    """``S_n log f'`` at the pullback of ``y_ref`` along every word (``2**depth`` values)."""
    if depth > 20:
        raise BudgetError("use mp_pressure_curve for depths above 20")
    return _expand(y_ref, mp.s, mp.branch_point, depth)[1]


def _log_partition(mp: MPMap, ts: np.ndarray, depth: int, y_ref: float) -> np.ndarray:
    c = mp.branch_point
    top = min(SPLIT_DEPTH, depth)
    ys, ls = _expand(y_ref, mp.s, c, top)
    # every leaf sum lies in [0, depth * log f'(1)]; shift so the largest term is at most 1
    lmax = depth * math.log(2.0 + mp.s)
    shifts = np.where(ts >= 0, 0.0, -ts * lmax)
    acc = _leaf_sums(ys, ls, mp.s, c, depth - top, ts, shifts).sum(axis=0)
    return np.log(acc) + shifts


@dataclass(frozen=True)
class MPCurve:
    t: np.ndarray
    value: np.ndarray
    value_half: np.ndarray
    depth: int
    distortion: float

    def root(self) -> float:
        """Linear interpolation of the first sign change of the depth-``n`` curve."""
        v = self.value
        idx = np.flatnonzero((v[:-1] > 0) & (v[1:] <= 0))
        if idx.size == 0:
            raise ContractError("pressure curve has no sign change on the grid")
        i = int(idx[0])
        t0, t1, v0, v1 = self.t[i], self.t[i + 1], v[i], v[i + 1]
        return float(t0 + (t1 - t0) * v0 / (v0 - v1))

    def one_sided_slopes(self) -> tuple[float, float]:
        """Chord slopes of the grid cells adjacent to the root cell (left, right)."""
        r = self.root()
        i = int(np.searchsorted(self.t, r)) - 1  # root lies in [t_i, t_{i+1}]
        if i < 1 or i + 2 >= self.t.size:
            raise ContractError("root too close to the end of the grid")
        slope = np.diff(self.value) / np.diff(self.t)
        return float(slope[i - 1]), float(slope[i + 1])


def mp_pressure_curve(mp: MPMap, t_grid: Sequence[float], depth: int, y_ref: float = 0.5) -> MPCurve:
    """``(1/n) log sum_w exp(-t S_n log f'(x_w))`` at depth ``n`` and ``n // 2``.

    ``distortion`` is the largest change of the depth-``n // 2`` estimate
    when the reference point moves from 1/4 to 3/4.
    """
    if depth > MAX_DEPTH:
        raise BudgetError("depth %d exceeds %d (2**depth branch words)" % (depth, MAX_DEPTH))
    if depth < 2:
        raise ContractError("depth must be >= 2")
    _set_threads()
    ts = np.asarray(t_grid, dtype=float)
    half = depth // 2
    full = _log_partition(mp, ts, depth, y_ref) / depth
    part = _log_partition(mp, ts, half, y_ref) / half
    d1 = _log_partition(mp, ts, half, 0.25) / half
    d2 = _log_partition(mp, ts, half, 0.75) / half
    return MPCurve(ts, full, part, depth, float(np.abs(d1 - d2).max()))


@numba.njit(cache=True)
def _orbit_average(x, s, burn, n):
    for _ in range(burn):
        x = x + x ** (1.0 + s)
        if x >= 1.0:
            x -= 1.0
    total = 0.0
    for _ in range(n):
        total += math.log1p((1.0 + s) * x**s)
        x = x + x ** (1.0 + s)
        if x >= 1.0:
            x -= 1.0
    return total / n


@dataclass(frozen=True)
class AcipEstimate:
    lyapunov: float
    spread: float
    samples: tuple

    @property
    def entropy(self) -> float:
        """Equal to the exponent for the absolutely continuous measure (Pesin's formula)."""
        return self.lyapunov


def acip_lyapunov(mp: MPMap, steps: int = 10**6, seeds: Sequence[int] = tuple(range(10)), burn: int = 10**4) -> AcipEstimate:
    """Median over seeds of long-orbit averages of ``log f'`` from Lebesgue-random starts."""
    vals = []
    for sd in seeds:
        x0 = float(np.random.default_rng(sd).random())
        vals.append(_orbit_average(x0, mp.s, burn, steps))
    vals = np.array(vals)
    return AcipEstimate(float(np.median(vals)), float(vals.max() - vals.min()), tuple(vals.tolist()))


def default_t_grid() -> np.ndarray:
    return np.round(np.arange(-1.0, 3.0 + 1e-9, 0.05), 10)


@dataclass(frozen=True)
class MPSpectrum:
    curve: SpectrumCurve
    interval: tuple[float, float]
    inside: np.ndarray
    pressure: MPCurve


def mp_lyapunov_spectrum(
    mp: MPMap,
    alpha_grid: Sequence[float],
    depth: int,
    t_grid: Sequence[float] | None = None,
    pressure: MPCurve | None = None,
) -> MPSpectrum:
    """Legendre transform ``alpha -> min_t P(t) + t*alpha`` of the sampled pressure curve.

    The interval ``I`` runs between minus the one-sided slopes at the root of
    the curve; samples outside it are flagged in ``inside``.
    """
    if pressure is None:
        ts = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
        pressure = mp_pressure_curve(mp, ts, depth)
    alphas = np.asarray(alpha_grid, dtype=float)
    table = pressure.value[None, :] + pressure.t[None, :] * alphas[:, None]
    j = np.argmin(table, axis=1)
    left, right = pressure.one_sided_slopes()
    interval = (-right, -left)
    inside = (alphas > interval[0]) & (alphas < interval[1])
    curve = SpectrumCurve(alphas, table[np.arange(alphas.size), j], -pressure.t[j], tuple("legendre" for _ in alphas))
    return MPSpectrum(curve, interval, inside, pressure)


@dataclass(frozen=True)
class MPEquilibrium:
    p: float
    components: dict
    entropy: float
    lyapunov: float
    charges_Z: bool


def mp_star_equilibrium(mp: MPMap, alpha: float, acip: AcipEstimate | None = None, tol: float = 1e-9) -> MPEquilibrium:
    """Mixture ``p * delta_0 + (1 - p) * acip`` with Lyapunov exponent ``alpha``.

    ``charges_Z`` asks whether an ergodic component with positive weight has
    exponent ``alpha``; only then do its typical points lie in the level set.
    """
    acip = acip or acip_lyapunov(mp)
    lam = acip.lyapunov
    if not 0.0 <= alpha <= lam:
        raise DomainError("alpha must lie in [0, %g]" % lam)
    p = 1.0 - alpha / lam
    comps = {"delta_0": (p, 0.0), "acip": (1.0 - p, lam)}
    charges = any(w > tol and abs(exp - alpha) <= tol for w, exp in comps.values())
    return MPEquilibrium(p, comps, (1.0 - p) * acip.entropy, alpha, charges)
