import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import GOLDEN_WORDS_5, GOLDEN_WORDS_20
from strategies import sfts
from thermopress.errors import BudgetError, DomainError
from thermopress.symbolic import (
    Cylinder,
    PointSpec,
    Sft,
    admissible_words,
    beta_admissible,
    beta_count,
    beta_expansion_of_one,
    count_words,
    cycle_shift,
    format_word,
    full_shift,
    golden_mean_shift,
    is_admissible,
    is_mixing,
    mixing_gap,
    parse_word,
    recode_higher_block,
    to_block_word,
)


def test_golden_admissibility():
    g = golden_mean_shift()
    assert is_admissible(parse_word("0101"), g)
    assert not is_admissible(parse_word("0110"), g)


def test_symbol_out_of_range():
    with pytest.raises(DomainError):
        is_admissible((0, 2), full_shift(2))


def test_mixing_examples():
    assert is_mixing(golden_mean_shift())
    assert not is_mixing(cycle_shift(2))
    assert mixing_gap(full_shift(2)) == 1
    assert mixing_gap(golden_mean_shift()) == 2


def test_counts_match_brute_force():
    g = golden_mean_shift()
    assert count_words(g, 5) == GOLDEN_WORDS_5
    assert count_words(g, 20) == GOLDEN_WORDS_20


def test_empty_shift_rejected():
    with pytest.raises(DomainError):
        Sft(2, [[0, 1], [0, 0]])


@given(sfts(), st.integers(1, 7))
def test_count_words_is_enumeration(sft, n):
    brute = sum(is_admissible(w, sft) for w in itertools.product(range(sft.alphabet_size), repeat=n))
    assert count_words(sft, n) == brute == len(admissible_words(sft, n))


@given(sfts(), st.integers(1, 6), st.integers(1, 5))
def test_count_words_submultiplicative(sft, m, n):
    assert count_words(sft, m + n) <= count_words(sft, m) * count_words(sft, n)


def test_higher_block_examples():
    full2, _ = recode_higher_block(full_shift(2), 2)
    assert full2.alphabet_size == 4
    g2, names = recode_higher_block(golden_mean_shift(), 2)
    assert sorted(names.values()) == [(0, 0), (0, 1), (1, 0)]


@given(sfts(max_size=3), st.integers(2, 3), st.integers(1, 6))
def test_higher_block_is_conjugate_on_words(sft, k, n):
    big, names = recode_higher_block(sft, k)
    index = {w: i for i, w in names.items()}
    assert count_words(big, n) == count_words(sft, n + k - 1)
    for w in admissible_words(sft, n + k - 1)[:20]:
        assert is_admissible(to_block_word(w, index, k), big)


def test_higher_block_budget():
    with pytest.raises(BudgetError):
        recode_higher_block(full_shift(3), 4)


def test_word_round_trip():
    assert format_word(parse_word("0a1z")) == "0a1z"


def test_beta_expansions():
    assert beta_expansion_of_one(2, 5) == [1, 1, 1, 1, 1]
    assert beta_expansion_of_one("golden", 6) == [1, 0, 1, 0, 1, 0]
    assert beta_count(2, 10) == 2**10
    assert beta_count("golden", 5) == 13


@pytest.mark.parametrize("beta", ["3/2", "5/2", "sqrt(2)", "golden"])
def test_beta_count_matches_lexicographic_rule(beta):
    n = 8
    top = max(beta_expansion_of_one(beta, n))
    brute = sum(beta_admissible(w, beta) for w in itertools.product(range(top + 1), repeat=n))
    assert beta_count(beta, n) == brute


def test_beta_must_exceed_one():
    with pytest.raises(DomainError):
        beta_count("1", 3)


def test_cylinders():
    g = golden_mean_shift()
    assert Cylinder((0, 1)).is_nonempty(g)
    assert not Cylinder((1, 1)).is_nonempty(g)
    assert Cylinder((0, 1)).contains((0, 1, 0))


def test_point_prefixes_and_shift():
    x = PointSpec.periodic("001")
    assert format_word(x.prefix(7)) == "0010010"
    assert format_word(x.shifted(2).prefix(4)) == "1001"
    y = PointSpec.stored("0101")
    assert y.available == 4
    with pytest.raises(Exception):
        y.prefix(5)


def test_streamed_point_replays():
    def source(seed):
        r = np.random.default_rng(seed)
        while True:
            yield r.integers(0, 2, 100)

    x = PointSpec.streamed(source, 5)
    a = x.prefix(250)
    assert np.array_equal(PointSpec.streamed(source, 5).prefix(250), a)
    assert np.array_equal(x.shifted(3).prefix(10), a[3:13])
