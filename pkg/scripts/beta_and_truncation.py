"""Word-count entropies of beta-shifts and pressures of countable-state truncations."""

import math

from thermopress.classic import countable_full_shift, renewal_shift, truncation_pressure
from thermopress.symbolic import beta_count

BETAS = ["golden", "3/2", "sqrt(2)", "5/2", "2"]

if __name__ == "__main__":
    for beta in BETAS:
        ests = [math.log(beta_count(beta, n)) / n for n in (10, 20, 40, 80)]
        print("beta=%-8s %s" % (beta, "  ".join("%.5f" % e for e in ests)))
    sizes = [2, 4, 8, 16, 32]
    print("full     ", ["%.5f" % v for v in truncation_pressure(countable_full_shift, None, sizes)])
    print("renewal  ", ["%.5f" % v for v in truncation_pressure(renewal_shift, None, sizes)])
