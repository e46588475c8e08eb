"""Brute-force reference computations.

Direct summation of floor(k^(1/m)) and {k^(1/m)} used to validate the
closed forms and the asymptotic expansions.  Floor sums may iterate the
constant-value runs between consecutive m-th powers (cost O(n^(1/m))
instead of O(n)) but remain literally equal to the term-by-term sum;
fractional sums are term-by-term with compensated summation.

Work budgets: a computation is refused when its work measure exceeds
the budget.  The work measure is the number of summed terms for
fractional and power sums (n) and the number of constant-value runs for
floor sums (floor(n^(1/m))), which is what makes n = 10^12 floor-sum
oracles affordable under the default budget.
"""

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from .errors import BudgetExceeded
from .exact import integer_nth_root
from .hp import DEFAULT_PRECISION, HPReal, _ERR, _ctx, _half_ulp, _pow2, power_sum

__all__ = [
    "DEFAULT_BUDGET",
    "OracleSums",
    "brute_floor_sum",
    "brute_floor_sum_batch",
    "brute_frac_sum",
    "brute_frac_sum_checkpoints",
    "oracle_sums",
    "CountBelowResult",
    "count_frac_below",
]

DEFAULT_BUDGET = 10**8


def _check_budget(work: int, budget: int, what: str) -> None:
    if work > budget:
        raise BudgetExceeded(
            f"{what} needs {work} steps, over the budget of {budget}; "
            f"raise the budget to allow it"
        )


def brute_floor_sum(n: int, m: int, budget: int = DEFAULT_BUDGET) -> int:
    """Literal sum_{k=1..n} floor(k^(1/m)) by run-length iteration.

    Every k in [r^m, (r+1)^m - 1] contributes r, so the sum is built in
    floor(n^(1/m)) exact integer steps and equals the term-by-term sum.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0
    root = integer_nth_root(n, m)
    _check_budget(root, budget, f"floor-sum oracle at n={n}, m={m}")
    total = 0
    for r in range(1, root):
        total += r * ((r + 1) ** m - r**m)
    return total + root * (n - root**m + 1)


def brute_floor_sum_batch(ns: list[int], m: int, budget: int = DEFAULT_BUDGET) -> list[int]:
    """brute_floor_sum for many n in one ascending run-length sweep.

    Returns results in the order of the input (which may be unsorted);
    each value is identical to brute_floor_sum(n, m).
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if not ns:
        return []
    if min(ns) < 0:
        raise ValueError("all n must be >= 0")
    order = sorted(range(len(ns)), key=lambda i: ns[i])
    max_root = integer_nth_root(ns[order[-1]], m)
    _check_budget(max_root, budget, f"floor-sum oracle batch up to n={ns[order[-1]]}, m={m}")
    out = [0] * len(ns)
    acc = 0  # sum over complete runs below the current root
    r = 1
    for i in order:
        n = ns[i]
        if n == 0:
            continue
        root = integer_nth_root(n, m)
        while r < root:
            acc += r * ((r + 1) ** m - r**m)
            r += 1
        out[i] = acc + root * (n - root**m + 1)
    return out


def _frac_sum_sweep(
    checkpoints: list[int], m: int, prec: int, budget: int
) -> list[HPReal]:
    """Shared loop: literal sum of {k^(1/m)} with snapshots.

    Per-term arithmetic is identical to hp.frac_part (same working
    precision, same rounding to prec); terms are accumulated in
    ascending order with Neumaier compensation at prec + 32 bits.
    """
    n_max = checkpoints[-1]
    _check_budget(n_max, budget, f"fractional-sum oracle at n={n_max}, m={m}")
    ps = prec + 32
    cs = _ctx(ps)
    add, sub = cs.add, cs.sub

    s = mpfr(0)
    comp = mpfr(0)
    nonperfect = 0
    out: list[HPReal] = []
    ci = 0

    def snapshot():
        val = mpfr(add(s, comp), prec)
        # per-term bound 2^(1-prec) (see frac_part), Neumaier residual,
        # final rounding; comfortably below n * 2^(2-prec)
        err = _ERR.add(
            _ERR.mul(mpfr(nonperfect), _pow2(1 - prec)),
            _ERR.add(
                _ERR.mul(_ERR.add(abs(val), mpfr(1)), _pow2(1 - ps)),
                _half_ulp(val, prec),
            ),
        )
        out.append(HPReal(val, prec, err))

    r = 1
    boundary = 2**m
    cur_pw = 0
    rootn_w = sub_w = None
    base_pw = prec + r.bit_length() + 8
    for k in range(1, n_max + 1):
        if k == 1 or k == boundary:
            if k > 1:
                r += 1
                boundary = (r + 1) ** m
                base_pw = prec + r.bit_length() + 8
            # perfect power: fractional part exactly zero
            if checkpoints[ci] == k:
                snapshot()
                ci += 1
                if ci == len(checkpoints):
                    break
            continue
        pw = base_pw if base_pw > k.bit_length() + 2 else k.bit_length() + 2
        if pw != cur_pw:
            cw = _ctx(pw)
            rootn_w, sub_w = cw.rootn, cw.sub
            cur_pw = pw
        t = mpfr(sub_w(rootn_w(k, m), r), prec)
        nonperfect += 1
        tmp = add(s, t)
        if s >= t:
            comp = add(comp, add(sub(s, tmp), t))
        else:
            comp = add(comp, add(sub(t, tmp), s))
        s = tmp
        if checkpoints[ci] == k:
            snapshot()
            ci += 1
            if ci == len(checkpoints):
                break
    return out


def brute_frac_sum(
    n: int, m: int, prec: int = DEFAULT_PRECISION, budget: int = DEFAULT_BUDGET
) -> HPReal:
    """Literal sum_{k=1..n} {k^(1/m)} at precision prec.

    Reported error bound stays below n * 2^(2-prec).
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return HPReal(mpfr(0, prec), prec, mpfr(0))
    return _frac_sum_sweep([n], m, prec, budget)[0]


def brute_frac_sum_checkpoints(
    ns: list[int], m: int, prec: int = DEFAULT_PRECISION, budget: int = DEFAULT_BUDGET
) -> list[HPReal]:
    """brute_frac_sum at several n in a single ascending sweep.

    ns must be strictly increasing and >= 1; result i is bit-identical
    to brute_frac_sum(ns[i], m, prec).
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if not ns:
        return []
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if ns[0] < 1:
        raise ValueError("checkpoints must be >= 1")
    return _frac_sum_sweep(list(ns), m, prec, budget)


@dataclass(frozen=True)
class OracleSums:
    """The three literal sums at (n, m): floors, fractional parts, and
    the full power sum.  power_sum = floor_sum + frac_sum holds within
    the accumulated error bounds (the floor/fractional split)."""

    n: int
    m: int
    floor_sum: int
    frac_sum: HPReal
    power_sum: HPReal


def oracle_sums(
    n: int, m: int, prec: int = DEFAULT_PRECISION, budget: int = DEFAULT_BUDGET
) -> OracleSums:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_budget(n, budget, f"power-sum oracle at n={n}, m={m}")
    return OracleSums(
        n=n,
        m=m,
        floor_sum=brute_floor_sum(n, m, budget),
        frac_sum=brute_frac_sum(n, m, prec, budget),
        power_sum=power_sum(n, m, prec),
    )


@dataclass(frozen=True)
class CountBelowResult:
    """Both sides of the counting identity for {sqrt(k)} below x.

    formula_value is sum_{j=1..side-1} (1 + floor(x(2j+x))); direct_count
    is |{k <= side^2 : {sqrt(k)} in (0, x)}| by exact integer
    comparisons.  The two generically disagree (the printed formula
    counts the closed-at-zero interval and overshoots at integer block
    offsets), so the discrepancy is reported rather than asserted away.
    """

    side: int
    x: Fraction
    formula_value: int
    direct_count: int

    @property
    def discrepancy(self) -> int:
        return self.formula_value - self.direct_count


def count_frac_below(side: int, x) -> CountBelowResult:
    """Evaluate the counting identity at n = side^2 for x in (0, 1].

    x is taken as an exact rational so that every comparison
    {sqrt(k)} < x is an exact integer comparison k*b^2 < (rb+a)^2.
    """
    if side < 2:
        raise ValueError(f"side must be >= 2, got {side}")
    x = Fraction(x)
    if not 0 < x <= 1:
        raise ValueError(f"x must be in (0, 1], got {x}")
    a, b = x.numerator, x.denominator
    d = b * b
    formula = 0
    direct = 0
    for j in range(1, side):
        formula += 1 + (a * (2 * j * b + a)) // d
        # k in (j^2, (j + x)^2): count integers strictly between
        hi = ((j * b + a) ** 2 - 1) // d  # largest k with k < (j+x)^2
        direct += max(0, hi - j * j)
    return CountBelowResult(side=side, x=x, formula_value=formula, direct_count=direct)
