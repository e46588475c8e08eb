"""rootsum: summatory functions of integer-root floors and fractional parts.

Exact closed forms (big integers and rationals only), their asymptotic
expansions with exact rational coefficients, high-precision evaluation
with tracked error bounds, brute-force oracles, and an empirical
residual/structure analysis toolkit.
"""

from .errors import BudgetExceeded, ConsistencyError
from .exact import (
    BernoulliTable,
    FloorSumResult,
    bernoulli,
    faulhaber_sum,
    floor_root_sum,
    floor_root_sum_special,
    floor_sqrt_sum,
    integer_nth_root,
)
from .hp import (
    DEFAULT_PRECISION,
    HPReal,
    ZetaEstimate,
    estimate_zeta_neg_inv,
    eval_expansion,
    frac_part,
    hp_root,
    power_sum,
    zeta_constant,
)
from .oracle import (
    DEFAULT_BUDGET,
    CountBelowResult,
    OracleSums,
    brute_floor_sum,
    brute_floor_sum_batch,
    brute_frac_sum,
    brute_frac_sum_checkpoints,
    count_frac_below,
    oracle_sums,
)
from .series import (
    Expansion,
    ExpansionTerm,
    binom_rational,
    build_power_sum_expansion,
    em_coeff_sqrt_paperform,
    em_correction_coeff,
)

__version__ = "0.1.0"
