"""Subshifts of finite type and the words, cylinders and points that live on them; beta-shift counting."""

from __future__ import annotations

import functools
import json
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import mpmath
import numpy as np
import sympy
from scipy.sparse.csgraph import connected_components

from .errors import BudgetError, ContractError, DomainError, SymbolRangeError

DIGITS = string.digits + string.ascii_lowercase

Word = tuple  # tuple[int, ...]


def parse_word(text: str) -> Word:
    """Decode a word written over ``0..9a..z``."""
    try:
        return tuple(DIGITS.index(c) for c in text.strip().lower())
    except ValueError as exc:
        raise SymbolRangeError("invalid symbol in %r" % text) from exc


def format_word(word: Iterable[int]) -> str:
    return "".join(DIGITS[int(s)] for s in word)


@dataclass(frozen=True, eq=False)
class Sft:
    """One-sided subshift of finite type on ``alphabet_size`` symbols.

    ``transition[i, j] == 1`` means symbol ``j`` may follow ``i``.
    """

    alphabet_size: int
    transition: np.ndarray

    def __post_init__(self):
        a = np.array(self.transition, dtype=np.int64)
        if a.ndim != 2 or a.shape != (self.alphabet_size, self.alphabet_size):
            raise DomainError("transition matrix must be %d x %d" % (self.alphabet_size,) * 2)
        if self.alphabet_size < 1 or self.alphabet_size > len(DIGITS):
            raise DomainError("alphabet size must be in 1..%d" % len(DIGITS))
        if not np.isin(a, (0, 1)).all():
            raise DomainError("transition matrix must be 0/1")
        a.setflags(write=False)
        object.__setattr__(self, "transition", a)
        if len(_essential_symbols(a)) == 0:
            raise DomainError("shift space is empty: no bi-infinite admissible path")

    def __eq__(self, other):
        return (
            isinstance(other, Sft)
            and self.alphabet_size == other.alphabet_size
            and np.array_equal(self.transition, other.transition)
        )

    def __hash__(self):
        return hash((self.alphabet_size, self.transition.tobytes()))

    def __repr__(self):
        return "Sft(%d, %s)" % (self.alphabet_size, self.transition.tolist())

    @property
    def essential(self) -> list[int]:
        """Symbols lying on some bi-infinite admissible path."""
        return _essential_symbols(self.transition)

    @property
    def is_pruned(self) -> bool:
        return len(self.essential) == self.alphabet_size

    def pruned(self) -> tuple["Sft", list[int]]:
        """Restriction to essential symbols, with the kept original indices."""
        keep = self.essential
        sub = self.transition[np.ix_(keep, keep)]
        return Sft(len(keep), sub), keep

    def components(self) -> list[list[int]]:
        """Nontrivial strongly connected classes (those carrying a cycle)."""
        a = self.transition
        n, labels = connected_components(a, directed=True, connection="strong")
        out = []
        for c in range(n):
            members = [int(i) for i in np.flatnonzero(labels == c)]
            if len(members) > 1 or a[members[0], members[0]]:
                out.append(members)
        return out

    @property
    def is_irreducible(self) -> bool:
        comps = self.components()
        return len(comps) == 1 and len(comps[0]) == self.alphabet_size

    def to_json(self) -> str:
        return json.dumps({"alphabet": self.alphabet_size, "transition": self.transition.tolist()})

    @classmethod
    def from_json(cls, text: str | dict) -> "Sft":
        d = json.loads(text) if isinstance(text, str) else text
        return cls(int(d["alphabet"]), np.array(d["transition"]))


def _essential_symbols(a: np.ndarray) -> list[int]:
    alive = np.ones(a.shape[0], dtype=bool)
    while True:
        sub = a[np.ix_(alive, alive)]
        idx = np.flatnonzero(alive)
        dead = (sub.sum(axis=1) == 0) | (sub.sum(axis=0) == 0)
        if not dead.any():
            return [int(i) for i in idx]
        alive[idx[dead]] = False
        if not alive.any():
            return []


def full_shift(n: int = 2) -> Sft:
    return Sft(n, np.ones((n, n), dtype=int))


def golden_mean_shift() -> Sft:
    """Binary shift forbidding the block ``11``."""
    return Sft(2, np.array([[1, 1], [1, 0]]))


def cycle_shift(n: int = 2) -> Sft:
    """Single periodic orbit ``0 -> 1 -> ... -> n-1 -> 0`` (irreducible, not mixing)."""
    return Sft(n, np.roll(np.eye(n, dtype=int), 1, axis=1))


NAMED_SYSTEMS = {
    "full2": lambda: full_shift(2),
    "full3": lambda: full_shift(3),
    "golden": golden_mean_shift,
    "cycle2": lambda: cycle_shift(2),
}


def _check_symbols(word: Sequence[int], sft: Sft) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64).ravel()
    if w.size and (w.min() < 0 or w.max() >= sft.alphabet_size):
        raise SymbolRangeError("symbol out of range 0..%d" % (sft.alphabet_size - 1))
    return w


def is_admissible(word: Sequence[int], sft: Sft) -> bool:
    """True iff every adjacent pair of ``word`` is an allowed transition."""
    w = _check_symbols(word, sft)
    if w.size < 2:
        return True
    return bool(sft.transition[w[:-1], w[1:]].all())


def is_cyclically_admissible(word: Sequence[int], sft: Sft) -> bool:
    w = _check_symbols(word, sft)
    if w.size == 0:
        return False
    return is_admissible(np.append(w, w[0]), sft)


def _bool_power_positive_exponent(a: np.ndarray) -> int | None:
    n = a.shape[0]
    bound = (n - 1) ** 2 + 1  # Wielandt
    b = a.astype(bool)
    p = b.copy()
    for e in range(1, bound + 1):
        if p.all():
            return e
        p = (p.astype(np.int64) @ b.astype(np.int64)) > 0
    return None


def is_mixing(sft: Sft) -> bool:
    """True iff some power of the transition matrix is entrywise positive."""
    if not sft.is_pruned:
        sft = sft.pruned()[0]
    return _bool_power_positive_exponent(sft.transition) is not None


def mixing_gap(sft: Sft) -> int:
    """Smallest ``p`` with ``A**p > 0``; any two symbols are joined by a path of ``p`` steps."""
    p = _bool_power_positive_exponent(sft.transition)
    if p is None:
        raise DomainError("shift is not topologically mixing")
    return p


def count_words(sft: Sft, n: int) -> int:
    """Exact number of admissible words of length ``n`` (Python integers)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    rows = [[j for j in range(sft.alphabet_size) if sft.transition[i, j]] for i in range(sft.alphabet_size)]
    v = [1] * sft.alphabet_size  # words of length 1 starting at i
    for _ in range(n - 1):
        v = [sum(v[j] for j in rows[i]) for i in range(sft.alphabet_size)]
    return sum(v)


def admissible_words(sft: Sft, n: int) -> list[Word]:
    """All admissible words of length ``n`` in lexicographic order."""
    words: list[Word] = [(i,) for i in range(sft.alphabet_size)]
    for _ in range(n - 1):
        words = [w + (j,) for w in words for j in range(sft.alphabet_size) if sft.transition[w[-1], j]]
    return words


def recode_higher_block(sft: Sft, k: int) -> tuple[Sft, dict[int, Word]]:
    """Block presentation on admissible ``k``-words, conjugate to ``sft``.

    Returns the new shift and a dictionary sending each new symbol to its ``k``-word.
    ``k == 1`` returns the input with the identity dictionary.
    """
    if k < 1:
        raise DomainError("block length must be >= 1")
    if k == 1:
        return sft, {i: (i,) for i in range(sft.alphabet_size)}
    words = admissible_words(sft, k)
    index = {w: i for i, w in enumerate(words)}
    m = len(words)
    if m > len(DIGITS):
        raise BudgetError("higher block shift has %d symbols (max %d)" % (m, len(DIGITS)))
    a = np.zeros((m, m), dtype=int)
    for w, i in index.items():
        for s in range(sft.alphabet_size):
            nxt = w[1:] + (s,)
            if nxt in index:
                a[i, index[nxt]] = 1
    return Sft(m, a), {i: w for w, i in index.items()}


def to_block_word(word: Sequence[int], index: dict[Word, int], k: int) -> Word:
    """Sliding-window image of ``word`` in a ``k``-block presentation."""
    w = tuple(int(s) for s in word)
    return tuple(index[w[i : i + k]] for i in range(len(w) - k + 1))


# ---------------------------------------------------------------------------
# beta-shifts


def _exact_beta(beta):
    if isinstance(beta, str):
        key = beta.strip().lower()
        if key in ("golden", "phi"):
            return (1 + sympy.sqrt(5)) / 2
        return sympy.sympify(key, rational=True)
    if isinstance(beta, float):
        return sympy.Rational(Fraction(beta))
    if isinstance(beta, (int, Fraction)):
        return sympy.Rational(beta)
    return sympy.sympify(beta)


class _ExactReal:
    """Exact remainders ``r = p(beta)`` for the greedy map ``r -> beta*r - floor(beta*r)``.

    ``p`` is a rational polynomial, reduced modulo the minimal polynomial
    when ``beta`` is algebraic.  Floors come from mpmath at doubling
    precision until the value is separated from the nearest integer.
    """

    def __init__(self, beta):
        self.expr = beta
        self.x = sympy.Symbol("x")
        try:
            self.minpoly = sympy.Poly(sympy.minimal_polynomial(beta, self.x), self.x, domain="QQ")
        except (NotImplementedError, sympy.polys.polyerrors.NotAlgebraic):
            self.minpoly = None
        self._values = {}

    def one(self):
        return sympy.Poly(1, self.x, domain="QQ")

    def _beta_at(self, dps):
        if dps not in self._values:
            self._values[dps] = mpmath.mpf(sympy.N(self.expr, dps + 10))
        return self._values[dps]

    def step(self, r):
        """Return ``(floor(beta*r), beta*r - floor(beta*r))``."""
        y = r * sympy.Poly(self.x, self.x, domain="QQ")
        if self.minpoly is not None:
            y = y.rem(self.minpoly)
        if y.degree() <= 0:
            val = sympy.Rational(y.as_expr())
            d = int(sympy.floor(val))
            return d, y - d
        coeffs = [mpmath.mpf(sympy.Rational(c).p) / sympy.Rational(c).q for c in y.all_coeffs()]
        dps = 30
        while dps <= 5000:
            with mpmath.workdps(dps):
                v = mpmath.polyval([mpmath.mpf(c) for c in coeffs], self._beta_at(dps))
                d = int(mpmath.floor(v))
                if min(v - d, d + 1 - v) > mpmath.mpf(10) ** (-(dps - 10)):
                    return d, y - d
            dps *= 2
        raise BudgetError("could not resolve beta-expansion digit")


def beta_expansion_of_one(beta, ndigits: int) -> list[int]:
    """First ``ndigits`` of the quasi-greedy beta-expansion of 1.

    The greedy expansion is computed exactly; a finite expansion
    ``d1..dm`` is replaced by the periodic ``(d1..d(m-1) (dm - 1))^inf``.
    """
    b = _exact_beta(beta)
    if not bool(b > 1):
        raise DomainError("beta must be > 1")
    return list(_expansion(b, ndigits))


@functools.lru_cache(maxsize=64)
def _expansion(b, ndigits: int) -> tuple[int, ...]:
    ex = _ExactReal(b)
    r = ex.one()
    greedy = []
    for _ in range(ndigits):
        d, r = ex.step(r)
        greedy.append(d)
        if r.is_zero:
            period = greedy[:-1] + [greedy[-1] - 1]
            return tuple(period[i % len(period)] for i in range(ndigits))
    return tuple(greedy)


def beta_count(beta, n: int) -> int:
    """Number of admissible beta-shift words of length ``n``.

    A word is admissible iff each of its suffixes is lexicographically at
    most the equal-length prefix of the quasi-greedy expansion of 1.
    Counted exactly with the standard prefix-matching automaton.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    t = beta_expansion_of_one(beta, n + 8)
    dp = {0: 1}
    for _ in range(n):
        new: dict[int, int] = {}
        for state, c in dp.items():
            d = t[state]
            if d:
                new[0] = new.get(0, 0) + c * d
            new[state + 1] = new.get(state + 1, 0) + c
        dp = new
    return sum(dp.values())


def beta_admissible(word: Sequence[int], beta) -> bool:
    """Direct check of the lexicographic criterion (oracle for :func:`beta_count`)."""
    w = tuple(word)
    t = tuple(beta_expansion_of_one(beta, len(w) + 8)) if not isinstance(beta, tuple) else beta
    return all(w[k:] <= t[: len(w) - k] for k in range(len(w)))


# ---------------------------------------------------------------------------
# cylinders and points


@dataclass(frozen=True)
class Cylinder:
    base: Word

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(s) for s in self.base))

    @property
    def depth(self) -> int:
        return len(self.base)

    def is_nonempty(self, sft: Sft) -> bool:
        if not self.base:
            return True
        ess = set(sft.essential)
        return is_admissible(self.base, sft) and self.base[-1] in ess

    def contains(self, prefix: Sequence[int]) -> bool:
        return tuple(int(s) for s in prefix[: self.depth]) == self.base


BlockSource = Callable[[int], Iterator[np.ndarray]]


@dataclass(frozen=True)
class PointSpec:
    """A point of a shift space known through its prefixes.

    ``periodic`` repeats ``word``; ``stored`` is a finite prefix of some
    longer point; ``streamed`` replays ``source(seed)``, an iterator of
    symbol blocks.  ``offset`` realises the shift map.
    """

    kind: str
    word: Word = ()
    source: BlockSource | None = None
    seed: int | None = None
    offset: int = 0
    meta: dict = field(default_factory=dict, compare=False, repr=False)
    _cache: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("periodic", "stored", "streamed"):
            raise ContractError("unknown point kind %r" % self.kind)
        object.__setattr__(self, "word", tuple(int(s) for s in self.word))
        if self.kind == "periodic" and not self.word:
            raise ContractError("periodic point needs a nonempty word")
        if self.kind == "streamed" and self.source is None:
            raise ContractError("streamed point needs a block source")

    @classmethod
    def periodic(cls, word: Sequence[int] | str) -> "PointSpec":
        return cls("periodic", parse_word(word) if isinstance(word, str) else tuple(word))

    @classmethod
    def stored(cls, word: Sequence[int] | str) -> "PointSpec":
        return cls("stored", parse_word(word) if isinstance(word, str) else tuple(int(s) for s in word))

    @classmethod
    def streamed(cls, source: BlockSource, seed: int, **meta) -> "PointSpec":
        return cls("streamed", source=source, seed=seed, meta=meta)

    @property
    def available(self) -> float:
        if self.kind == "stored":
            return len(self.word) - self.offset
        return float("inf")

    def prefix(self, n: int) -> np.ndarray:
        """First ``n`` symbols as an int64 array."""
        n = int(n)
        if self.kind == "periodic":
            p = len(self.word)
            idx = (np.arange(n) + self.offset) % p
            return np.asarray(self.word, dtype=np.int64)[idx]
        if self.kind == "stored":
            if n > self.available:
                raise ContractError("stored prefix has only %d symbols" % self.available)
            return np.asarray(self.word[self.offset : self.offset + n], dtype=np.int64)
        need = n + self.offset
        cached = self._cache[0] if self._cache else np.zeros(0, dtype=np.int64)
        if cached.size < need:
            blocks = []
            total = 0
            for block in self.source(self.seed):
                blocks.append(np.asarray(block, dtype=np.int64))
                total += blocks[-1].size
                if total >= need:
                    break
            if total < need:
                raise ContractError("stream ended after %d symbols" % total)
            cached = np.concatenate(blocks)
            self._cache[:] = [cached]
        return cached[self.offset : need].copy()

    def shifted(self, k: int = 1) -> "PointSpec":
        """Image of this point under the ``k``-th power of the shift."""
        return PointSpec(self.kind, self.word, self.source, self.seed, self.offset + k, dict(self.meta), self._cache)

    def check_admissible(self, sft: Sft, n: int) -> None:
        if not is_admissible(self.prefix(n), sft):
            raise DomainError("point prefix is not admissible")
