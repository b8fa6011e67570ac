import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from thermopress.errors import DomainError
from thermopress.measures import LocallyConstantPotential
from thermopress.symbolic import Sft, is_mixing


@st.composite
def sfts(draw, min_size=2, max_size=4, mixing=False):
    n = draw(st.integers(min_size, max_size))
    bits = draw(st.lists(st.integers(0, 1), min_size=n * n, max_size=n * n))
    try:
        sft = Sft(n, np.array(bits).reshape(n, n))
    except DomainError:
        assume(False)
    if mixing:
        sft = sft.pruned()[0]
        assume(sft.alphabet_size >= 2 and is_mixing(sft))
    return sft


@st.composite
def potentials(draw, sft, max_range=2, scale=2.0):
    r = draw(st.integers(1, max_range))
    seed = draw(st.integers(0, 2**32 - 1))
    return LocallyConstantPotential.random(sft, r, np.random.default_rng(seed), scale)
