"""Sample paths of Markov measures, and points glued from them with short connecting words."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

import numba
import numpy as np

from .classic import classical_pressure, critical_subshift, edge_system, integral_range
from .errors import ContractError, DomainError, UnsupportedHypothesisError
from .measures import LocallyConstantPotential, MarkovMeasure, cylinder_distance, empirical_from_prefix, integrate
from .pesin_pitskel import point_pressure_oracle
from .symbolic import PointSpec, Sft, is_admissible, mixing_gap


@numba.njit(cache=True)
def _walk(cum: np.ndarray, start: int, u: np.ndarray) -> np.ndarray:
    out = np.empty(u.size, dtype=np.int64)
    s = start
    n = cum.shape[1]
    for i in range(u.size):
        out[i] = s
        j = 0
        while j < n - 1 and u[i] >= cum[s, j]:
            j += 1
        s = j
    return out


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def generic_word(mu: MarkovMeasure, n: int, seed) -> np.ndarray:
    """Length-``n`` path of the chain started from its stationary law."""
    if not mu.is_ergodic:
        raise DomainError("kernel is reducible on the support of the stationary vector")
    rng = _rng(seed)
    start = int(rng.choice(mu.alphabet_size, p=mu.stationary))
    cum = np.cumsum(mu.kernel, axis=1)
    cum[:, -1] = 1.0
    return _walk(cum, start, rng.random(n))


@dataclass(frozen=True)
class SynthesisSchedule:
    """Block lengths and gaps; block ``k`` ends at checkpoint ``t_k``.

    ``gaps[0]`` is unused (the first block starts the point).
    """

    blocks: tuple[int, ...]
    gaps: tuple[int, ...]
    growth: float = 32.0

    def __post_init__(self):
        if len(self.blocks) != len(self.gaps) or not self.blocks:
            raise ContractError("need one gap per block")
        if self.growth < 2:
            raise ContractError("growth factor must be >= 2")
        t = self.checkpoints
        for k in range(1, len(self.blocks)):
            if self.blocks[k] < self.growth * t[k - 1]:
                raise ContractError("block %d is shorter than growth * t_%d" % (k + 1, k))

    @property
    def checkpoints(self) -> list[int]:
        t, out = 0, []
        for k, (b, g) in enumerate(zip(self.blocks, self.gaps)):
            t += b + (g if k else 0)
            out.append(t)
        return out

    def block(self, k: int) -> tuple[int, int]:
        """``(gap, length)`` of block ``k``, extending the rule past the listed blocks."""
        if k < len(self.blocks):
            return self.gaps[k], self.blocks[k]
        t = self.checkpoints[-1]
        n, g = self.blocks[-1], self.gaps[-1]
        for _ in range(len(self.blocks), k + 1):
            n = int(max(self.growth * t, 4 * n))
            t += g + n
        return g, n

    @classmethod
    def geometric(cls, first: int, count: int, gap: int, growth: float = 32.0) -> "SynthesisSchedule":
        """``N_{k+1} = max(growth * t_k, 4 * N_k)``."""
        blocks, t = [first], first
        for _ in range(count - 1):
            n = int(max(growth * t, 4 * blocks[-1]))
            blocks.append(n)
            t += gap + n
        return cls(tuple(blocks), (0,) + (gap,) * (count - 1), growth)

    def to_json(self) -> dict:
        return {"blocks": list(self.blocks), "gaps": list(self.gaps), "growth": self.growth,
                "checkpoints": self.checkpoints}


def connector(sft: Sft, a: int, b: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest ``w`` of length ``m`` with ``a w b`` admissible."""
    t = sft.transition.astype(bool)
    # reach[j][s]: from symbol s one can reach b in exactly j steps
    reach = [np.zeros(sft.alphabet_size, dtype=bool)]
    reach[0][b] = True
    for _ in range(m + 1):
        reach.append((t.astype(np.int64) @ reach[-1].astype(np.int64)) > 0)
    if not reach[m + 1][a]:
        raise AssertionError("no connecting word of length %d from %d to %d" % (m, a, b))
    word, cur = [], a
    for j in range(m, 0, -1):
        nxt = next(s for s in range(sft.alphabet_size) if t[cur, s] and reach[j][s])
        word.append(nxt)
        cur = nxt
    return tuple(word)


def specification_synthesizer(
    sft: Sft,
    mu1: MarkovMeasure,
    mu2: MarkovMeasure,
    schedule: SynthesisSchedule,
    seed: int,
) -> PointSpec:
    """Streamed point alternating generic blocks of ``mu1`` (odd) and ``mu2`` (even).

    Blocks are joined by the smallest connector of the scheduled gap length,
    which must be at least the mixing gap of ``sft``.
    """
    g = mixing_gap(sft)
    if min(schedule.gaps[1:], default=g) < g:
        raise ContractError("schedule gaps must be >= mixing gap %d" % g)
    for mu in (mu1, mu2):
        mu.check_compatible(sft)

    def source(s: int) -> Iterator[np.ndarray]:
        root = np.random.SeedSequence(s)
        last = None
        k = 0
        while True:
            gap, n = schedule.block(k)
            mu = mu1 if k % 2 == 0 else mu2
            w = generic_word(mu, n, np.random.default_rng(root.spawn(1)[0]))
            if last is not None:
                yield np.asarray(connector(sft, last, int(w[0]), gap), dtype=np.int64)
            yield w
            last = int(w[-1])
            k += 1

    return PointSpec.streamed(source, seed, schedule=schedule.to_json())


@dataclass
class WitnessCertificate:
    checkpoints: list
    distances: list
    averages: list
    liminf: float
    limsup: float
    target_integrals: list
    schedule: dict
    seed: int
    targets: tuple = field(default=(), repr=False)

    @property
    def gap(self) -> float:
        return self.limsup - self.liminf

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("targets")
        d["gap"] = self.gap
        return json.dumps(d, sort_keys=True)


def _extreme_cycle(sft: Sft, weights: np.ndarray, which: str) -> list[int]:
    """A simple cycle made of extremal-mean edges."""
    crit = critical_subshift(sft, weights, which).transition
    for start in range(sft.alphabet_size):
        path, seen, cur = [start], {start: 0}, start
        while True:
            nxt = np.flatnonzero(crit[cur])
            if nxt.size == 0:
                break
            cur = int(nxt[0])
            if cur in seen:
                return path[seen[cur]:]
            seen[cur] = len(path)
            path.append(cur)
    raise AssertionError("critical subshift has no cycle")


def witness_targets(sft: Sft, phi: LocallyConstantPotential) -> tuple[MarkovMeasure, MarkovMeasure]:
    """Maximal-entropy measure and the extremal periodic measure farthest from it in ``phi``."""
    if phi.range > 2:
        raise ContractError("witness construction needs a potential of range <= 2")
    w = edge_system(sft, phi).weights[0]
    lo, hi = integral_range(sft, w)
    if hi - lo <= 1e-12 * (1 + abs(lo) + abs(hi)):
        raise UnsupportedHypothesisError("phi has the same integral for every invariant measure")
    mu1 = classical_pressure(sft, LocallyConstantPotential.constant(sft, 0.0)).equilibrium
    mid = integrate(phi, mu1)
    which = "min" if mid - lo >= hi - mid else "max"
    cyc = _extreme_cycle(sft, w, which)
    return mu1, MarkovMeasure.periodic_orbit(cyc, sft.alphabet_size, sft)


def irregular_witness(
    sft: Sft,
    phi: LocallyConstantPotential,
    seed: int,
    schedule: SynthesisSchedule | None = None,
    depth: int = 1,
) -> tuple[PointSpec, WitnessCertificate]:
    """Point whose Birkhoff averages of ``phi`` oscillate, with the achieved gap.

    The certificate records, at each checkpoint, the distance of the
    empirical measure to its block's target and the Birkhoff average.
    """
    mu1, mu2 = witness_targets(sft, phi)
    if schedule is None:
        schedule = SynthesisSchedule.geometric(4096, 3, mixing_gap(sft))
    x = specification_synthesizer(sft, mu1, mu2, schedule, seed)
    ts = schedule.checkpoints
    pre = x.prefix(ts[-1] + max(depth, phi.range) - 1)
    if not is_admissible(pre, sft):
        raise AssertionError("synthesized prefix is not admissible")
    sums = phi.birkhoff_sums(pre[: ts[-1] + phi.range - 1])
    dists = [
        cylinder_distance(empirical_from_prefix(x, t, depth), mu1 if k % 2 == 0 else mu2, depth)
        for k, t in enumerate(ts)
    ]
    lo, hi = point_pressure_oracle(x, phi, ts)
    cert = WitnessCertificate(
        ts, dists, [float(sums[t - 1] / t) for t in ts], lo, hi,
        [integrate(phi, mu1), integrate(phi, mu2)], schedule.to_json(), seed, (mu1, mu2),
    )
    return x, cert
