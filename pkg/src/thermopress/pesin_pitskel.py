"""Cover sums and the critical exponent for finite point sets, plus tuple counting.

Covers are families of cylinders (strings), so the infimum over covers of a
finite set is a finite search over prefix trees.
"""

from __future__ import annotations

import io
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .classic import cylinder_birkhoff_extreme
from .errors import BudgetError, ContractError
from .measures import LocallyConstantPotential
from .symbolic import Cylinder, PointSpec

log = logging.getLogger(__name__)

DEFAULT_DEPTHS = (8, 16, 32, 64)


@dataclass(frozen=True)
class StringCover:
    cylinders: tuple
    min_depth: int

    def __post_init__(self):
        cyl = tuple(c if isinstance(c, Cylinder) else Cylinder(c) for c in self.cylinders)
        if any(c.depth < self.min_depth for c in cyl):
            raise ContractError("every cylinder must have depth >= min_depth")
        object.__setattr__(self, "cylinders", cyl)

    def covers(self, points: Sequence[PointSpec]) -> bool:
        return all(any(c.contains(x.prefix(c.depth)) for c in self.cylinders) for x in points)


def _log_term(phi: LocallyConstantPotential, base, alpha: float) -> float:
    d = len(base)
    return -alpha * d + cylinder_birkhoff_extreme(phi.sft, phi, base, d, "max")


def q_value(points: Sequence[PointSpec], alpha: float, cover: StringCover, phi: LocallyConstantPotential) -> float:
    """Sum over the cover of ``exp(-alpha*depth + sup of S_depth phi on the cylinder)``.

    Empty cylinders contribute zero.
    """
    if not cover.covers(points):
        raise ContractError("cover does not cover points")
    terms = [_log_term(phi, c.base, alpha) for c in cover.cylinders]
    return float(np.exp(logsumexp(terms))) if terms else 0.0


@dataclass(frozen=True)
class MValue:
    value: float
    log_value: float
    optimal: bool
    min_depth: int
    window: int


def m_value(
    points: Sequence[PointSpec],
    alpha: float,
    min_depth: int,
    phi: LocallyConstantPotential,
    window: int | None = None,
    budget: int = 10**6,
) -> MValue:
    """Cheapest cover of ``points`` by cylinders of depths in ``[min_depth, min_depth + window]``.

    Useful cylinders are prefixes of the points and any two are nested
    or disjoint, so the optimum is a recursion over the prefix tree: a node
    either pays for its own cylinder (depth >= min_depth) or for the best covers of
    its children (depth < min_depth + window).
    """
    if not points:
        raise ContractError("points must be nonempty")
    window = min_depth if window is None else window
    top = min_depth + window
    prefixes = sorted({tuple(x.prefix(top).tolist()) for x in points})
    if len(prefixes) * (top + 1) > budget:
        # too many tree nodes: fall back to the single-depth cover at min_depth + window
        terms = [_log_term(phi, p, alpha) for p in prefixes]
        lv = float(logsumexp(terms))
        return MValue(math.exp(lv) if lv < 700 else math.inf, lv, False, min_depth, window)

    memo: dict = {}

    def best(node: tuple) -> float:
        if node in memo:
            return memo[node]
        d = len(node)
        own = _log_term(phi, node, alpha) if d >= min_depth else math.inf
        if d < top:
            kids = sorted({p[: d + 1] for p in prefixes if p[:d] == node})
            split = float(logsumexp([best(k) for k in kids]))
            val = min(own, split)
        else:
            val = own
        memo[node] = val
        return val

    lv = best(())
    return MValue(math.exp(lv) if lv < 700 else math.inf, lv, True, min_depth, window)


@dataclass(frozen=True)
class CaratheodoryEstimate:
    alpha_grid: np.ndarray
    m_values: np.ndarray
    flags: tuple
    critical: float
    bracket: tuple[float, float]
    depth: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("alpha,m_estimate,depth,flag\n")
        for a, m, f in zip(self.alpha_grid, self.m_values, self.flags):
            buf.write("%.17g,%.17g,%d,%s\n" % (a, m, self.depth, f))
        return buf.getvalue()


def _classify(points, alpha, phi, depths, window) -> tuple[str, float]:
    """``'zero'`` if the cover infimum shrinks along the depth schedule, else ``'infinite'``."""
    first = m_value(points, alpha, depths[0], phi, window)
    last = m_value(points, alpha, depths[-1], phi, window)
    flag = "zero" if last.log_value < first.log_value else "infinite"
    return flag, last.value


def pp_critical(
    points: Sequence[PointSpec],
    phi: LocallyConstantPotential,
    grid: tuple[float, float] | None = None,
    depths: Sequence[int] = DEFAULT_DEPTHS,
    tol: float = 1e-3,
    window: int | None = None,
) -> CaratheodoryEstimate:
    """Critical exponent: the ``alpha`` where cover sums switch from growing to vanishing.

    Each ``alpha`` is classified by comparing the cover infimum at the first
    and last depth of the schedule; bisection then narrows the switch to ``tol``.
    """
    lo, hi = grid if grid is not None else (phi.inf - 1.0, phi.sup + 1.0)
    seen: dict[float, tuple[str, float]] = {}

    def probe(a):
        if a not in seen:
            seen[a] = _classify(points, a, phi, depths, window)
        return seen[a][0]

    for _ in range(8):
        if probe(lo) == "infinite" and probe(hi) == "zero":
            break
        log.warning("grid [%g, %g] does not bracket the critical value; widening", lo, hi)
        width = hi - lo
        lo, hi = lo - width, hi + width
    else:
        raise ContractError("could not bracket the critical value")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid) == "zero":
            hi = mid
        else:
            lo = mid
    alphas = np.array(sorted(seen))
    return CaratheodoryEstimate(
        alphas,
        np.array([seen[a][1] for a in alphas]),
        tuple(seen[a][0] for a in alphas),
        0.5 * (lo + hi),
        (lo, hi),
        depths[-1],
    )


def point_pressure_oracle(x: PointSpec, phi: LocallyConstantPotential, horizons: Sequence[int]) -> tuple[float, float]:
    """Min and max of the Birkhoff averages ``S_n phi(x) / n`` over the last half of ``horizons``."""
    hs = np.asarray(sorted(int(h) for h in horizons))
    if hs.size == 0 or hs[0] < 1:
        raise ContractError("horizons must be positive")
    sums = phi.birkhoff_sums(x.prefix(int(hs[-1]) + phi.range - 1))
    tail = hs[hs.size // 2 :]
    avg = sums[tail - 1] / tail
    return float(avg.min()), float(avg.max())


def tuple_entropy(a: Sequence) -> float:
    """Entropy of the empirical distribution of the entries of ``a``."""
    if len(a) == 0:
        raise ContractError("tuple must be nonempty")
    _, counts = np.unique(np.asarray(a), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum()) + 0.0


def _compositions(k: int, parts: int):
    for cut in itertools.combinations(range(k + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cut + (k + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield out


def bowen_count(k: int, h: float, E: int, slack: float = 1e-12) -> int:
    """Number of tuples in ``E**k`` whose empirical entropy is at most ``h``.

    Sums multinomial coefficients over compositions of ``k`` (exact integers).
    """
    if k < 1 or E < 1:
        raise ContractError("need k >= 1 and a nonempty alphabet")
    total = 0
    for comp in _compositions(k, E):
        c = np.array([x for x in comp if x])
        p = c / k
        if -(p * np.log(p)).sum() <= h + slack:
            total += math.factorial(k) // math.prod(math.factorial(x) for x in comp)
    return total


def bowen_count_bruteforce(k: int, h: float, E: int, budget: int = 2**24, slack: float = 1e-12) -> int:
    """Enumeration over all of ``E**k`` (oracle for :func:`bowen_count`)."""
    if E**k > budget:
        raise BudgetError("E**k = %d exceeds the enumeration budget; use bowen_count" % E**k)
    return sum(tuple_entropy(a) <= h + slack for a in itertools.product(range(E), repeat=k))


def counting_bound(k: int, h: float, E: int) -> float:
    """``h + (E - 1) log(k + 1) / k``: compositions times the largest multinomial."""
    return h + (E - 1) * math.log(k + 1) / k

