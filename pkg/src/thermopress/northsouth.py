"""North-South map of the circle, through its conjugacy with ``u -> u/2`` on the line.

Points are angles ``theta`` in ``[0, 2 pi)`` with ``S`` at ``0`` and ``N`` at
``pi``; the chart ``u = 2 tan(theta / 2)`` sends ``S`` to ``0`` and ``N`` to infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError

NORTH = math.pi
SOUTH = 0.0


def to_line(theta: np.ndarray) -> np.ndarray:
    return 2.0 * np.tan(np.asarray(theta, dtype=float) / 2.0)


def to_circle(u: np.ndarray) -> np.ndarray:
    return np.mod(2.0 * np.arctan(np.asarray(u, dtype=float) / 2.0), 2 * math.pi)


def is_north(theta: float) -> bool:
    return bool(abs(math.remainder(theta - NORTH, 2 * math.pi)) < 1e-15)


def ns_map(theta, k: int = 1):
    """``k``-th iterate; ``N`` is fixed."""
    theta = np.asarray(theta, dtype=float)
    out = to_circle(to_line(theta) / 2.0**k)
    return np.where(np.abs(np.remainder(theta - NORTH + math.pi, 2 * math.pi) - math.pi) < 1e-15, NORTH, out)


def orbit(theta0: float, n: int) -> np.ndarray:
    """``theta_0, ..., theta_{n-1}`` computed in closed form (no error accumulation)."""
    if is_north(theta0):
        return np.full(n, NORTH)
    u0 = float(to_line(theta0))
    return to_circle(u0 * np.exp2(-np.arange(n, dtype=float)))


def distance_to_north(theta) -> np.ndarray:
    """Chordal distance on the unit circle; 0 at ``N``, 2 at ``S``, 1-Lipschitz in arc length."""
    return 2.0 * np.abs(np.sin((np.asarray(theta, dtype=float) - math.pi) / 2.0))


def ns_orbit_stats(theta0: float, n: int, test_functions: Sequence[Callable]) -> np.ndarray:
    """Birkhoff averages of each (vectorised) test function over ``n`` iterates."""
    xs = orbit(theta0, n)
    return np.array([float(np.mean(np.broadcast_to(f(xs), xs.shape))) for f in test_functions])


@dataclass(frozen=True)
class NSSet:
    """Coarse description of a subset of the circle: which of ``N``, ``S`` and the wandering points it contains."""

    north: bool
    south: bool
    wandering: bool

    @property
    def is_empty(self) -> bool:
        return not (self.north or self.south or self.wandering)


NS_SETS = {
    "circle-minus-S": NSSet(True, False, True),
    "N": NSSet(True, False, False),
    "S": NSSet(False, True, False),
    "circle-minus-NS": NSSet(False, False, True),
    "circle": NSSet(True, True, True),
    "empty": NSSet(False, False, False),
}


@dataclass(frozen=True)
class NSPressure:
    value: float
    nonwandering: float


def ns_star_pressure(subset: NSSet | str, phi: Callable, grid: int = 1 << 16) -> NSPressure:
    """Closed forms: every point other than ``N`` has limit measure the mass at ``S``.

    ``nonwandering`` is the same quantity for the subset intersected with ``{N, S}``.
    The empty set gets the minimum of ``phi`` over a fine grid.
    """
    if isinstance(subset, str):
        if subset not in NS_SETS:
            raise ContractError("unknown North-South set %r; choose from %s" % (subset, sorted(NS_SETS)))
        subset = NS_SETS[subset]
    fn, fs = float(phi(NORTH)), float(phi(SOUTH))

    def value(z: NSSet) -> float:
        vals = ([fn] if z.north else []) + ([fs] if z.south or z.wandering else [])
        if vals:
            return max(vals)
        return float(np.min(phi(np.linspace(0.0, 2 * math.pi, grid, endpoint=False))))

    return NSPressure(value(subset), value(NSSet(subset.north, subset.south, False)))
