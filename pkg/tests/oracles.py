"""Reference values computed outside the package and frozen here.

Closed forms were evaluated with mpmath at 30 digits; counts come from
brute-force enumeration with itertools.  Nothing in this file calls thermopress.
"""

LOG2 = 0.693147180559945309417232121458
LOG_GOLDEN = 0.481211825059603447497758913424
LOG_1_PLUS_E = 1.31326168751822283404899549497
# entropy of Bernoulli(3/4, 1/4)
H_QUARTER = 0.562335144618808350288030315224
BOWEN_GOLDEN = 0.694241913630617301738790266899  # log(golden) / log 2
PARRY_FREQ_ONE = 0.276393202250021030359082633127  # 1 / (1 + golden**2)

# golden-mean shift, phi = indicator of "1": maximum entropy with frequency a
# is attained in the family p -> (from 0, go to 1 w.p. p); entropy H(p)/(1+p), p = a/(1-a)
GOLDEN_LEVEL = {
    0.1: 0.313948886258728701910084334961,
    0.2: 0.44986811569504668023042425218,
    0.3: 0.478035673290330158621387652167,
}

# renewal truncations on m states: log of the root of x**m = 1 + x + ... + x**(m-1)
RENEWAL = {2: 0.481211825059603447497758913424, 4: 0.656255979236975808481661984313,
           8: 0.691160798877191114194993051096}

GOLDEN_WORDS_5 = 13  # words of length 5 without "11"
GOLDEN_WORDS_20 = 17711
GOLDEN_ENTROPY_20 = 0.489097059722831611686396841627  # log(17711) / 20

# Bernoulli(1/2) path, numpy default_rng(7), n = 2**14: regression value from the first run
GENERIC_SEED7_MEAN = 0.50335693359375
