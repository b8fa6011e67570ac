"""Classical pressure of locally constant potentials on subshifts of finite type."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetError, ContractError, DomainError, ReducibleError
from .measures import LocallyConstantPotential, MarkovMeasure, edge_integral, entropy
from .symbolic import PointSpec, Sft, Word, admissible_words, count_words, recode_higher_block

log = logging.getLogger(__name__)

EIGEN_TOL = 1e-14
MAX_POWER_ITER = 10**6


@dataclass(frozen=True)
class EdgeSystem:
    """Range-2 presentation: a shift plus one edge-weight matrix per potential.

    ``blocks`` maps work symbols back to words of the original shift when a
    higher-block recoding was needed (``None`` otherwise).
    """

    sft: Sft
    weights: tuple
    blocks: dict | None = None


def edge_system(sft: Sft, *phis: LocallyConstantPotential) -> EdgeSystem:
    """Bring potentials to a common range and recode to range 2 if needed."""
    r = max([p.range for p in phis] + [1])
    if r <= 2:
        work, blocks = sft, None
        mats = []
        for p in phis:
            w = np.zeros((sft.alphabet_size,) * 2)
            for i, j in zip(*np.nonzero(sft.transition)):
                w[i, j] = p.values[(i,)] if p.range == 1 else p.values[(i, j)]
            mats.append(w)
        return EdgeSystem(work, tuple(mats), None)
    work, blocks = recode_higher_block(sft, r - 1)
    mats = []
    for p in phis:
        pr = p.with_range(r)
        w = np.zeros((work.alphabet_size,) * 2)
        for u, v in zip(*np.nonzero(work.transition)):
            w[u, v] = pr.values[blocks[u] + (blocks[v][-1],)]
        mats.append(w)
    return EdgeSystem(work, tuple(mats), blocks)


# ---------------------------------------------------------------------------
# Perron data


def perron(matrix: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, float]:
    """Perron root with positive right/left vectors of an irreducible nonnegative matrix.

    LAPACK supplies the starting vectors; power iteration on the shifted
    (hence primitive) matrix polishes them.  Returns ``(root, right, left, residual)``.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    if n == 1:
        one = np.ones(1)
        return float(m[0, 0]), one, one, 0.0

    def dominant(a):
        vals, vecs = np.linalg.eig(a)
        i = int(np.argmax(vals.real))
        v = np.abs(vecs[:, i].real)
        return float(vals[i].real), v / v.sum()

    lam, right = dominant(m)
    _, left = dominant(m.T)
    shifted = m + lam * np.eye(n)
    for vec, mat in ((right, shifted), (left, shifted.T)):
        for _ in range(MAX_POWER_ITER):
            nxt = mat @ vec
            nxt /= nxt.sum()
            done = np.abs(nxt - vec).max() <= EIGEN_TOL
            vec[:] = nxt
            if done:
                break
    lam = float((m @ right).sum() / right.sum())
    residual = float(np.abs(m @ right - lam * right).max() / right.max())
    return lam, right, left, residual


@dataclass(frozen=True)
class PressureResult:
    value: float
    eigen_residual: float
    equilibrium: MarkovMeasure | None = None
    system: EdgeSystem | None = None

    def to_json(self) -> dict:
        d = {"value": self.value, "residual": self.eigen_residual}
        if self.equilibrium is not None:
            d["equilibrium"] = self.equilibrium.to_json()
        return d


def _component_pressure(a: np.ndarray, w: np.ndarray):
    lmat = a * np.exp(np.where(a > 0, w, 0.0))
    lam, v, u, res = perron(lmat)
    kernel = lmat * v[None, :] / (lam * v[:, None])
    kernel /= kernel.sum(axis=1, keepdims=True)
    pi = u * v
    pi /= pi.sum()
    return math.log(lam), kernel, pi, res


def weights_pressure(sft: Sft, weights: np.ndarray, decompose: bool = False):
    """Pressure and equilibrium measure for an edge-weight matrix on ``sft``."""
    a = sft.transition
    comps = sft.components()
    if not (len(comps) == 1 and len(comps[0]) == sft.alphabet_size):
        if not decompose:
            raise ReducibleError(comps)
    best = None
    for comp in comps:
        idx = np.array(comp)
        val, ker, pi, res = _component_pressure(a[np.ix_(idx, idx)], weights[np.ix_(idx, idx)])
        if best is None or val > best[0]:
            best = (val, idx, ker, pi, res)
    val, idx, ker, pi, res = best
    n = sft.alphabet_size
    kernel = np.zeros((n, n))
    for i in range(n):
        row = a[i].astype(float)
        kernel[i] = row / row.sum() if row.sum() else np.eye(n)[i]
    kernel[idx] = 0.0
    kernel[np.ix_(idx, idx)] = ker
    stationary = np.zeros(n)
    stationary[idx] = pi
    return val, MarkovMeasure(kernel, stationary, "equilibrium"), res


def classical_pressure(sft: Sft, phi: LocallyConstantPotential, decompose: bool = False) -> PressureResult:
    """Log Perron root of the weighted transfer matrix, with its Parry-type equilibrium.

    Potentials of range > 2 are handled on the higher-block recoding; the
    equilibrium measure then lives on ``result.system.sft``.
    """
    if phi.sft != sft:
        raise ContractError("potential is defined on a different shift")
    system = edge_system(sft, phi)
    val, eq, res = weights_pressure(system.sft, system.weights[0], decompose)
    return PressureResult(val, res, eq, system)


def variational_gap(result: PressureResult) -> float:
    """``|entropy + integral - pressure|`` for the stored equilibrium."""
    eq = result.equilibrium
    return abs(entropy(eq) + edge_integral(result.system.weights[0], eq) - result.value)


# ---------------------------------------------------------------------------
# extremal Birkhoff sums over cylinders


def cylinder_birkhoff_extreme(
    sft: Sft, phi: LocallyConstantPotential, word: Sequence[int], n: int, mode: str = "max"
) -> float:
    """Sup (``mode='max'``) or inf of ``S_n phi`` over the cylinder ``[word]``.

    Returns ``-inf`` for ``max`` (``+inf`` for ``min``) when the cylinder is empty.
    """
    pick = max if mode == "max" else min
    empty = -math.inf if mode == "max" else math.inf
    r = phi.range
    need = n + r - 1
    w = tuple(int(s) for s in word)
    a = sft.transition
    if len(w) > 1 and not a[list(w[:-1]), list(w[1:])].all():
        return empty
    essential = set(sft.essential)
    if w and w[-1] not in essential:
        return empty
    if len(w) >= need:
        return float(sum(phi.values[w[i : i + r]] for i in range(n)))
    keep = max(r - 1, 1)
    if w:
        fixed = sum(phi.values[w[i : i + r]] for i in range(max(0, len(w) - r + 1)))
        states = {w[-keep:] if len(w) >= keep else w: fixed}
        start = len(w)
    else:
        states = {(s,): 0.0 for s in essential}
        start = 1
        if r == 1:
            states = {(s,): phi.values[(s,)] for s in essential}
    # append symbols one by one; a window completes when its last symbol arrives
    for pos in range(start, need):
        nxt: dict = {}
        for st, val in states.items():
            for s in np.flatnonzero(a[st[-1]]):
                s = int(s)
                if s not in essential:
                    continue
                seq = st + (s,)
                i = pos - r + 1  # window index completed by this symbol
                add = phi.values[seq[-r:]] if 0 <= i < n and len(seq) >= r else 0.0
                key = seq[-keep:]
                cand = val + add
                nxt[key] = pick(nxt[key], cand) if key in nxt else cand
        states = nxt
        if not states:
            return empty
    return float(pick(states.values()))


def capacity_pressure_estimate(
    sft: Sft,
    points: Sequence[PointSpec] | str,
    phi: LocallyConstantPotential,
    n: int,
    eps_depth: int,
    budget: int = 2**20,
) -> tuple[float, float]:
    """Spanning-set sums ``(1/n) log Q_n(points, phi, 2**-k)`` at ``n`` and ``n + 1``.

    Bowen balls of radius ``2**-k`` are cylinders of length ``n + k``; the
    cheapest spanning set picks one point per cylinder met by ``points``, at the
    infimum of ``S_n phi`` over that cylinder.  ``points == 'all'`` means the whole shift.
    Returns ``(min, max)`` of the two values.
    """
    out = []
    for m in (n, n + 1):
        length = m + eps_depth
        if points == "all":
            if count_words(sft, length) > budget:
                raise BudgetError("too many cylinders to enumerate")
            cyls = admissible_words(sft, length)
        else:
            if not points:
                raise ContractError("points must be nonempty")
            cyls = sorted({tuple(p.prefix(length).tolist()) for p in points})
        sums = np.array([cylinder_birkhoff_extreme(sft, phi, c, m, "min") for c in cyls])
        top = sums.max()
        out.append((top + math.log(np.exp(sums - top).sum())) / m)
    return min(out), max(out)


# ---------------------------------------------------------------------------
# cycle means: the range of integrals over invariant measures


def _karp(a: np.ndarray, w: np.ndarray) -> float:
    n = a.shape[0]
    wt = np.where(a > 0, w, -np.inf)
    d = np.full((n + 1, n), -np.inf)
    d[0] = 0.0
    for k in range(1, n + 1):
        d[k] = np.max(d[k - 1][:, None] + wt, axis=0)
    best = -np.inf
    for v in range(n):
        if d[n, v] == -np.inf:
            continue
        vals = [(d[n, v] - d[k, v]) / (n - k) for k in range(n) if d[k, v] > -np.inf]
        best = max(best, min(vals))
    return float(best)


def max_cycle_mean(sft: Sft, weights: np.ndarray) -> float:
    """Largest mean weight of a cycle = max of the integral over invariant measures."""
    best = -np.inf
    for comp in sft.components():
        idx = np.array(comp)
        best = max(best, _karp(sft.transition[np.ix_(idx, idx)], weights[np.ix_(idx, idx)]))
    return best


def integral_range(sft: Sft, weights: np.ndarray) -> tuple[float, float]:
    """``[min, max]`` of the edge integral over all invariant measures."""
    return -max_cycle_mean(sft, -weights), max_cycle_mean(sft, weights)


def critical_subshift(sft: Sft, weights: np.ndarray, which: str = "max", tol: float = 1e-9) -> Sft:
    """Subshift carrying exactly the invariant measures with extremal integral.

    After normalising by a longest-path potential, every edge has reduced
    weight <= 0; the measures attaining the maximum are those supported on
    edges of reduced weight 0.
    """
    w = weights if which == "max" else -weights
    lam = max_cycle_mean(sft, w)
    a = sft.transition
    red = np.where(a > 0, w - lam, -np.inf)
    g = np.zeros(sft.alphabet_size)
    for _ in range(sft.alphabet_size + 1):
        g = np.maximum(g, np.max(g[:, None] + red, axis=0))
    scale = tol * (1.0 + np.abs(w[a > 0]).max())
    tight = (a > 0) & (g[:, None] + red >= g[None, :] - scale)
    return Sft(sft.alphabet_size, tight.astype(int))


# ---------------------------------------------------------------------------
# countable-state exhaustion


def countable_full_shift(i: int, j: int) -> bool:
    return True


def renewal_shift(i: int, j: int) -> bool:
    """State ``n`` steps down to ``n - 1``; state 1 jumps anywhere."""
    return j == i - 1 or i == 1


def truncation_pressure(
    countable_spec: Callable[[int, int], bool],
    phi_rule: Callable[[int], float] | None,
    sizes: Sequence[int],
) -> list[float]:
    """Classical pressures of the truncations to states ``1..m`` (1-based rules).

    Truncations are pruned and, when reducible, evaluated as the maximum over
    their irreducible pieces.  Empty truncations are skipped with a warning.
    """
    out = []
    for m in sizes:
        a = np.array([[1 if countable_spec(i, j) else 0 for j in range(1, m + 1)] for i in range(1, m + 1)])
        vals = np.array([phi_rule(i) if phi_rule else 0.0 for i in range(1, m + 1)], dtype=float)
        try:
            sft = Sft(m, a)
        except DomainError:
            log.warning("truncation to %d states is empty; skipped", m)
            continue
        w = np.repeat(vals[:, None], m, axis=1)
        val, _, _ = weights_pressure(sft, w, decompose=True)
        out.append(val)
    return out
