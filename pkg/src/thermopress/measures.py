"""Locally constant potentials, with the Markov and empirical measures they are integrated against."""

from __future__ import annotations

import functools
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from .errors import ContractError, DomainError
from .symbolic import PointSpec, Sft, Word, admissible_words, format_word, is_admissible, parse_word

STOCHASTIC_TOL = 1e-12


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True, eq=False)
class LocallyConstantPotential:
    """Potential depending on the first ``range`` coordinates.

    ``values`` maps every admissible ``range``-word to a real number.
    """

    sft: Sft
    range: int
    values: Mapping[Word, float]

    def __post_init__(self):
        if self.range < 1:
            raise DomainError("range must be >= 1")
        vals = {tuple(int(s) for s in w): float(v) for w, v in self.values.items()}
        missing = [w for w in admissible_words(self.sft, self.range) if w not in vals]
        if missing:
            raise ContractError("potential has no value on %s" % format_word(missing[0]))
        object.__setattr__(self, "values", vals)

    # constructors ----------------------------------------------------------

    @classmethod
    def from_symbols(cls, sft: Sft, vals: Sequence[float]) -> "LocallyConstantPotential":
        """Range-1 potential with ``vals[a]`` on symbol ``a``."""
        if len(vals) != sft.alphabet_size:
            raise ContractError("need one value per symbol")
        return cls(sft, 1, {(a,): float(v) for a, v in enumerate(vals)})

    @classmethod
    def from_array(cls, sft: Sft, arr) -> "LocallyConstantPotential":
        """Potential of range ``arr.ndim``; entries on inadmissible words are ignored."""
        arr = np.asarray(arr, dtype=float)
        r = arr.ndim
        return cls(sft, r, {w: float(arr[w]) for w in admissible_words(sft, r)})

    @classmethod
    def from_function(cls, sft: Sft, r: int, fn: Callable[[Word], float]) -> "LocallyConstantPotential":
        return cls(sft, r, {w: float(fn(w)) for w in admissible_words(sft, r)})

    @classmethod
    def constant(cls, sft: Sft, c: float, r: int = 1) -> "LocallyConstantPotential":
        return cls.from_function(sft, r, lambda w: c)

    @classmethod
    def random(cls, sft: Sft, r: int, rng: np.random.Generator, scale: float = 1.0) -> "LocallyConstantPotential":
        words = admissible_words(sft, r)
        draws = rng.uniform(-scale, scale, size=len(words))
        return cls(sft, r, dict(zip(words, draws)))

    @classmethod
    def parse(cls, sft: Sft, text: str) -> "LocallyConstantPotential":
        """Comma-separated values: ``A`` of them gives range 1, ``A**2`` gives range 2
        (row-major over pairs, inadmissible pairs ignored)."""
        vals = [float(v) for v in text.split(",") if v.strip()]
        a = sft.alphabet_size
        for r in range(1, 5):
            if len(vals) == a**r:
                return cls.from_array(sft, np.array(vals).reshape((a,) * r))
        if len(vals) == 1:
            return cls.constant(sft, vals[0])
        raise ContractError("cannot infer potential range from %d values" % len(vals))

    # derived quantities ----------------------------------------------------

    @functools.cached_property
    def sup(self) -> float:
        return max(self.values.values())

    @functools.cached_property
    def inf(self) -> float:
        return min(self.values.values())

    @functools.cached_property
    def norm(self) -> float:
        return max(abs(self.sup), abs(self.inf))

    @functools.cached_property
    def table(self) -> np.ndarray:
        """Dense array over all ``range``-words, NaN on inadmissible ones."""
        t = np.full((self.sft.alphabet_size,) * self.range, np.nan)
        for w, v in self.values.items():
            t[w] = v
        return t

    def __call__(self, word: Sequence[int]) -> float:
        return self.values[tuple(int(s) for s in word[: self.range])]

    # algebra ---------------------------------------------------------------

    def with_range(self, r: int) -> "LocallyConstantPotential":
        """Same function viewed as depending on ``r >= range`` coordinates."""
        if r < self.range:
            raise ContractError("cannot lower the range of a potential")
        if r == self.range:
            return self
        return LocallyConstantPotential.from_function(self.sft, r, lambda w: self.values[w[: self.range]])

    def _combine(self, other, op):
        if isinstance(other, LocallyConstantPotential):
            if other.sft != self.sft:
                raise ContractError("potentials live on different shifts")
            r = max(self.range, other.range)
            a, b = self.with_range(r), other.with_range(r)
            return LocallyConstantPotential(self.sft, r, {w: op(a.values[w], b.values[w]) for w in a.values})
        c = float(other)
        return LocallyConstantPotential(self.sft, self.range, {w: op(v, c) for w, v in self.values.items()})

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __mul__(self, c):
        return LocallyConstantPotential(self.sft, self.range, {w: v * float(c) for w, v in self.values.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def pullback_shift(self) -> "LocallyConstantPotential":
        """The composition ``phi o shift`` (range grows by one)."""
        return LocallyConstantPotential.from_function(self.sft, self.range + 1, lambda w: self.values[w[1:]])

    def add_coboundary(self, h: "LocallyConstantPotential") -> "LocallyConstantPotential":
        """``phi + h - h o shift``, cohomologous to ``phi``."""
        return self + h - h.pullback_shift()

    def birkhoff_sums(self, prefix: np.ndarray) -> np.ndarray:
        """Cumulative sums ``S_1, ..., S_n`` along ``prefix`` with ``n = len - range + 1``."""
        x = np.asarray(prefix, dtype=np.int64)
        n = x.size - self.range + 1
        if n < 1:
            raise ContractError("prefix shorter than the potential range")
        a = self.sft.alphabet_size
        idx = np.zeros(n, dtype=np.int64)
        for j in range(self.range):
            idx = idx * a + x[j : j + n]
        terms = self.table.ravel()[idx]
        if np.isnan(terms).any():
            raise DomainError("prefix is not admissible")
        return np.cumsum(terms)

    def to_json(self) -> dict:
        return {"range": self.range, "values": {format_word(w): v for w, v in sorted(self.values.items())}}

    @classmethod
    def from_json(cls, sft: Sft, d: dict) -> "LocallyConstantPotential":
        return cls(sft, int(d["range"]), {parse_word(k): v for k, v in d["values"].items()})


# ---------------------------------------------------------------------------
# Markov measures


def _stationary_of(kernel: np.ndarray) -> np.ndarray:
    n = kernel.shape[0]
    a = np.vstack([kernel.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi = np.linalg.lstsq(a, b, rcond=None)[0]
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    for _ in range(50):
        if np.abs(pi @ kernel - pi).max() <= 1e-15:
            break
        pi = pi @ kernel
        pi /= pi.sum()
    return pi


def _irreducible_on(kernel: np.ndarray, support: np.ndarray) -> bool:
    from scipy.sparse.csgraph import connected_components

    idx = np.flatnonzero(support)
    sub = kernel[np.ix_(idx, idx)] > 0
    if (kernel[idx][:, ~support] > 0).any():
        return False
    n, _ = connected_components(sub, directed=True, connection="strong")
    return n == 1


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Shift-invariant Markov measure from a row-stochastic kernel and its stationary vector."""

    kernel: np.ndarray
    stationary: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        p = np.array(self.kernel, dtype=float)
        pi = np.array(self.stationary, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or pi.shape != (p.shape[0],):
            raise ContractError("kernel must be square and match the stationary vector")
        if (p < 0).any() or np.abs(p.sum(axis=1) - 1).max() > STOCHASTIC_TOL:
            raise ContractError("kernel rows must be probability vectors")
        if (pi < 0).any() or abs(pi.sum() - 1) > STOCHASTIC_TOL:
            raise ContractError("stationary vector must be a probability vector")
        if np.abs(pi @ p - pi).max() > STOCHASTIC_TOL:
            raise ContractError("stationary vector is not fixed by the kernel")
        p.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "kernel", p)
        object.__setattr__(self, "stationary", pi)

    @property
    def alphabet_size(self) -> int:
        return self.kernel.shape[0]

    @classmethod
    def from_kernel(cls, kernel, label: str = "") -> "MarkovMeasure":
        k = np.asarray(kernel, dtype=float)
        k = k / k.sum(axis=1, keepdims=True)
        return cls(k, _stationary_of(k), label)

    @classmethod
    def bernoulli(cls, probs: Sequence[float], label: str = "") -> "MarkovMeasure":
        p = np.asarray(probs, dtype=float)
        return cls(np.tile(p, (p.size, 1)), p, label or "bernoulli(%s)" % ",".join("%g" % v for v in p))

    @classmethod
    def periodic_orbit(cls, cycle: Sequence[int], alphabet_size: int, sft: Sft | None = None) -> "MarkovMeasure":
        """Uniform measure on the orbit of ``cycle^inf``; symbols must be distinct."""
        cyc = [int(s) for s in cycle]
        if len(set(cyc)) != len(cyc):
            raise ContractError("cycle repeats a symbol; recode to a higher block shift first")
        k = np.zeros((alphabet_size, alphabet_size))
        allowed = sft.transition if sft is not None else np.ones((alphabet_size, alphabet_size))
        for i in range(alphabet_size):
            row = allowed[i].astype(float)
            k[i] = row / row.sum() if row.sum() else np.eye(alphabet_size)[i]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            k[a] = 0.0
            k[a, b] = 1.0
        pi = np.zeros(alphabet_size)
        pi[cyc] = 1.0 / len(cyc)
        return cls(k, pi, "orbit(%s)" % format_word(cyc))

    @classmethod
    def point_mass(cls, symbol: int, alphabet_size: int, sft: Sft | None = None) -> "MarkovMeasure":
        """Dirac mass on the fixed point ``symbol^inf``."""
        return cls.periodic_orbit([symbol], alphabet_size, sft)

    @property
    def support(self) -> np.ndarray:
        return self.stationary > 0

    @property
    def is_ergodic(self) -> bool:
        return _irreducible_on(self.kernel, self.support)

    def check_compatible(self, sft: Sft) -> None:
        if sft.alphabet_size != self.alphabet_size:
            raise ContractError("measure and shift have different alphabets")
        used = (self.kernel > 0) & self.support[:, None]
        if (used & (sft.transition == 0)).any():
            raise ContractError("measure charges a forbidden transition")

    def word_probability(self, word: Sequence[int]) -> float:
        w = [int(s) for s in word]
        p = self.stationary[w[0]]
        for a, b in zip(w, w[1:]):
            p *= self.kernel[a, b]
        return float(p)

    def cylinder_distribution(self, k: int) -> dict[Word, float]:
        """Probabilities of all depth-``k`` words with positive mass."""
        dist = {(a,): float(self.stationary[a]) for a in range(self.alphabet_size) if self.stationary[a] > 0}
        for _ in range(k - 1):
            nxt = {}
            for w, p in dist.items():
                row = self.kernel[w[-1]]
                for b in np.flatnonzero(row > 0):
                    nxt[w + (int(b),)] = p * row[b]
            dist = nxt
        return dist

    def to_json(self) -> dict:
        return {"kernel": self.kernel.tolist(), "stationary": self.stationary.tolist()}

    @classmethod
    def from_json(cls, d: dict | str) -> "MarkovMeasure":
        if isinstance(d, str):
            d = json.loads(d)
        return cls(np.array(d["kernel"]), np.array(d["stationary"]))


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p, dtype=float)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def entropy(mu: MarkovMeasure) -> float:
    """Kolmogorov-Sinai entropy ``-sum_i pi_i sum_j P_ij log P_ij`` (0 log 0 = 0)."""
    return float(-(mu.stationary * _xlogx(mu.kernel).sum(axis=1)).sum())


def integrate(phi: LocallyConstantPotential, mu: MarkovMeasure) -> float:
    """Integral of a range-1 or range-2 potential against a Markov measure."""
    if phi.range > 2:
        raise ContractError("integrate needs range <= 2; recode with recode_higher_block first")
    if phi.sft.alphabet_size != mu.alphabet_size:
        raise ContractError("potential and measure have different alphabets")
    pi, k = mu.stationary, mu.kernel
    if phi.range == 1:
        return float(sum(pi[a] * phi.values[(a,)] for a in range(mu.alphabet_size) if pi[a] > 0))
    total = 0.0
    for a in np.flatnonzero(pi > 0):
        for b in np.flatnonzero(k[a] > 0):
            try:
                total += pi[a] * k[a, b] * phi.values[(int(a), int(b))]
            except KeyError:
                raise ContractError("measure charges a word where the potential is undefined") from None
    return float(total)


def integrate_words(phi: LocallyConstantPotential, mu: MarkovMeasure) -> float:
    """Integral of a potential of any range, summed over charged ``range``-words."""
    total = 0.0
    for w, p in mu.cylinder_distribution(phi.range).items():
        if w not in phi.values:
            raise ContractError("measure charges %s where the potential is undefined" % format_word(w))
        total += p * phi.values[w]
    return float(total)


def random_markov(sft: Sft, rng: np.random.Generator, label: str = "random") -> MarkovMeasure:
    """Markov measure with i.i.d. uniform(0.1, 1) weights on the allowed transitions."""
    if not sft.is_pruned:
        raise ContractError("prune the shift first")
    w = sft.transition * rng.uniform(0.1, 1.0, size=sft.transition.shape)
    return MarkovMeasure.from_kernel(w, label)


def edge_integral(weights: np.ndarray, mu: MarkovMeasure) -> float:
    """Integral of an edge weight matrix ``W[i, j]`` (terms with zero mass skipped)."""
    mass = mu.stationary[:, None] * mu.kernel
    pos = mass > 0
    return float((mass[pos] * weights[pos]).sum())


def edge_entropy_integral(mu: MarkovMeasure, weights: np.ndarray) -> float:
    """``entropy(mu) + edge_integral(weights, mu)``."""
    return entropy(mu) + edge_integral(weights, mu)


def markov_from_edge_mass(mass: np.ndarray, label: str = "") -> MarkovMeasure:
    """Markov measure whose two-step (edge) distribution is ``mass``.

    ``mass`` should be shift-consistent (equal row and column marginals);
    rows with zero marginal get a uniform row over the edges seen anywhere.
    """
    m = np.clip(np.asarray(mass, dtype=float), 0.0, None)
    m = m / m.sum()
    pi = m.sum(axis=1)
    k = np.zeros_like(m)
    fallback = (m.sum(axis=0) > 0).astype(float)
    for i in range(m.shape[0]):
        if pi[i] > 0:
            k[i] = m[i] / pi[i]
        else:
            k[i] = fallback / fallback.sum() if fallback.sum() else np.eye(m.shape[0])[i]
    # stationary of the normalised kernel; equal to pi up to marginal-consistency defect
    return MarkovMeasure(k, _stationary_of(k), label)


# ---------------------------------------------------------------------------
# empirical measures


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Depth-``k`` cylinder frequencies of ``delta_{x,n}``."""

    depth: int
    freq: Mapping[Word, float]
    sample_length: int

    def __post_init__(self):
        total = sum(self.freq.values())
        if abs(total - 1.0) > 1e-12:
            raise ContractError("frequencies must sum to 1")

    def restrict(self, k: int) -> dict[Word, float]:
        if k > self.depth:
            raise ContractError("empirical measure of depth %d cannot be refined to %d" % (self.depth, k))
        out: dict[Word, float] = {}
        for w, f in self.freq.items():
            out[w[:k]] = out.get(w[:k], 0.0) + f
        return out

    def marginal_defect(self) -> float:
        """L1 gap between the depth-(k-1) marginals over the first and the last symbol."""
        if self.depth < 2:
            return 0.0
        left: dict[Word, float] = {}
        right: dict[Word, float] = {}
        for w, f in self.freq.items():
            left[w[:-1]] = left.get(w[:-1], 0.0) + f
            right[w[1:]] = right.get(w[1:], 0.0) + f
        keys = set(left) | set(right)
        return sum(abs(left.get(w, 0.0) - right.get(w, 0.0)) for w in keys)

    def edge_mass(self, alphabet_size: int) -> np.ndarray:
        """Depth-2 frequencies as a matrix."""
        m = np.zeros((alphabet_size, alphabet_size))
        for w, f in self.restrict(2).items():
            m[w] += f
        return m

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# n=%d k=%d\n" % (self.sample_length, self.depth))
        buf.write("word,frequency\n")
        for w in sorted(self.freq):
            buf.write("%s,%.17g\n" % (format_word(w), self.freq[w]))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EmpiricalMeasure":
        lines = text.strip().splitlines()
        meta = dict(tok.split("=") for tok in lines[0].lstrip("# ").split())
        freq = {}
        for line in lines[2:]:
            w, f = line.split(",")
            freq[parse_word(w)] = float(f)
        return cls(int(meta["k"]), freq, int(meta["n"]))


def _window_counts(x: np.ndarray, n: int, k: int) -> dict[Word, float]:
    base = int(x.max()) + 1 if x.size else 1
    idx = np.zeros(n, dtype=np.int64)
    for j in range(k):
        idx = idx * base + x[j : j + n]
    codes, counts = np.unique(idx, return_counts=True)
    out = {}
    for c, cnt in zip(codes.tolist(), counts.tolist()):
        w = []
        for _ in range(k):
            w.append(c % base)
            c //= base
        out[tuple(reversed(w))] = cnt / n
    return out


def empirical_from_prefix(x: PointSpec, n: int, depth: int, sft: Sft | None = None) -> EmpiricalMeasure:
    """Sliding-window depth-``k`` word frequencies over positions ``0..n-1``."""
    if not n >= depth >= 1:
        raise ContractError("need n >= depth >= 1")
    pre = x.prefix(n + depth - 1)
    if sft is not None and not is_admissible(pre, sft):
        raise DomainError("point prefix is not admissible")
    return EmpiricalMeasure(depth, _window_counts(pre, n, depth), n)


def _distribution(m, k: int) -> dict[Word, float]:
    if isinstance(m, MarkovMeasure):
        return m.cylinder_distribution(k)
    if isinstance(m, EmpiricalMeasure):
        return m.restrict(k)
    if isinstance(m, Mapping):
        return dict(m)
    raise ContractError("cannot restrict %r to cylinders" % type(m).__name__)


def cylinder_distance(a, b, depth: int) -> float:
    """L1 distance (in ``[0, 2]``) between depth-``k`` word distributions."""
    da, db = _distribution(a, depth), _distribution(b, depth)
    return float(sum(abs(da.get(w, 0.0) - db.get(w, 0.0)) for w in set(da) | set(db)))


@dataclass(frozen=True)
class Cluster:
    members: tuple[int, ...]
    centroid: dict
    radius: float


@dataclass(frozen=True)
class LimitDiagnostics:
    """Empirical measures at checkpoint times, grouped into clusters.

    One cluster suggests ``delta_{x,n}`` converges; two or more stable
    clusters witness distinct limit measures.
    """

    checkpoints: list
    clusters: list
    depth: int
    tol: float
    discarded: int = 0

    @property
    def converged(self) -> bool:
        return len(self.clusters) == 1

    def nearest_cluster(self, target, depth: int | None = None) -> tuple[int, float]:
        d = [cylinder_distance(c.centroid, target, depth or self.depth) for c in self.clusters]
        i = int(np.argmin(d))
        return i, d[i]


def limit_diagnostics(
    x: PointSpec,
    times: Sequence[int],
    depth: int,
    tol: float,
    burn_in: float = 0.5,
    sft: Sft | None = None,
) -> LimitDiagnostics:
    """Cluster ``delta_{x,n}`` over a time schedule.

    The first ``burn_in`` fraction of checkpoints is dropped.  Clusters use
    complete linkage at threshold ``tol`` so every cluster radius is at most ``tol``.
    """
    times = [int(t) for t in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ContractError("schedule must be increasing")
    if tol <= 0:
        raise ContractError("tol must be positive")
    drop = min(int(np.floor(burn_in * len(times))), len(times) - 1)
    kept = times[drop:]
    pre = x.prefix(kept[-1] + depth - 1)
    if sft is not None and not is_admissible(pre, sft):
        raise DomainError("point prefix is not admissible")
    checkpoints = [(t, EmpiricalMeasure(depth, _window_counts(pre[: t + depth - 1], t, depth), t)) for t in kept]
    m = len(checkpoints)
    if m == 1:
        labels = np.array([1])
    else:
        dist = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                dist[i, j] = dist[j, i] = cylinder_distance(checkpoints[i][1], checkpoints[j][1], depth)
        labels = fcluster(linkage(squareform(dist, checks=False), method="complete"), t=tol, criterion="distance")
    clusters = []
    for lab in sorted(set(labels.tolist()), key=lambda l: int(np.flatnonzero(labels == l)[0])):
        members = tuple(int(i) for i in np.flatnonzero(labels == lab))
        centroid: dict[Word, float] = {}
        for i in members:
            for w, f in checkpoints[i][1].freq.items():
                centroid[w] = centroid.get(w, 0.0) + f / len(members)
        radius = max(cylinder_distance(checkpoints[i][1], centroid, depth) for i in members)
        clusters.append(Cluster(members, centroid, radius))
    return LimitDiagnostics(checkpoints, clusters, depth, tol, drop)
