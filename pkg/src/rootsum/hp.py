"""High-precision real evaluation on top of MPFR (via gmpy2).

Values are carried as HPReal: an mpfr rounded at an explicit precision
plus a conservative absolute error bound.  Error accounting is
interval-style bookkeeping (per-operation ulp bounds, summed and rounded
up), not full interval arithmetic.  MPFR's basic operations and rootn
are correctly rounded, so single operations contribute at most half an
ulp each; working precisions carry guard bits so that documented bounds
hold with room to spare.

Provided here: correctly bounded m-th roots and fractional parts,
literal compensated power sums, evaluation of the exact-coefficient
expansions from `series`, and estimation of the expansion constant
zeta(-1/m) from the tail of the power sum.
"""

import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import ConsistencyError
from .exact import integer_nth_root
from .series import Expansion, build_power_sum_expansion, em_correction_coeff

__all__ = [
    "DEFAULT_PRECISION",
    "HPReal",
    "format_mpfr",
    "hp_from_int",
    "hp_root",
    "frac_part",
    "power_sum",
    "eval_expansion",
    "ZetaEstimate",
    "estimate_zeta_neg_inv",
    "zeta_constant",
    "exact_sub",
    "ulp",
]

DEFAULT_PRECISION = 128

_ZERO = mpfr(0)

# error-bound arithmetic: low precision, always rounded away from zero
_ERR = gmpy2.context(precision=64, round=gmpy2.RoundAwayZero)

_ctx_cache: dict[int, gmpy2.context] = {}


def _ctx(prec: int) -> gmpy2.context:
    ctx = _ctx_cache.get(prec)
    if ctx is None:
        ctx = gmpy2.context(precision=prec)
        _ctx_cache[prec] = ctx
    return ctx


def _check_prec(prec: int) -> None:
    if prec < 8:
        raise ValueError(f"precision must be >= 8 bits, got {prec}")


def _pow2(k: int) -> mpfr:
    """Exact power of two 2^k as an mpfr."""
    if k >= 0:
        return gmpy2.mul_2exp(mpfr(1), k)
    return gmpy2.div_2exp(mpfr(1), -k)


def ulp(x, prec: int) -> mpfr:
    """Unit in the last place of x at precision prec (0 for x = 0)."""
    if x == 0:
        return _ZERO
    return _pow2(gmpy2.get_exp(x) - prec)


def _half_ulp(x, prec: int) -> mpfr:
    if x == 0:
        return _ZERO
    return _pow2(gmpy2.get_exp(x) - prec - 1)


def format_mpfr(x, digits: int) -> str:
    """Deterministic scientific-notation rendering with `digits`
    significant digits (gmpy2's own float formatting is avoided so the
    output is identical across platforms and builds)."""
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    ds, exp, _ = x.digits(10, digits)
    sign = ""
    if ds.startswith("-"):
        sign, ds = "-", ds[1:]
    return f"{sign}{ds[0]}.{ds[1:]}e{exp - 1:+03d}"


@dataclass(frozen=True)
class HPReal:
    """A real number at an explicit binary precision with a conservative
    absolute error bound (err = 0 means the value is exact)."""

    value: mpfr
    prec: int
    err: mpfr

    def __float__(self) -> float:
        return float(self.value)

    def digits(self, n: int | None = None) -> str:
        if n is None:
            n = max(2, int(self.prec * 0.30103))
        return format_mpfr(self.value, n)

    def __str__(self) -> str:
        if self.err == 0:
            return f"{self.digits()} (exact)"
        return f"{self.digits()} +- {format_mpfr(self.err, 3)}"


def hp_from_int(v: int, prec: int = DEFAULT_PRECISION) -> HPReal:
    """Exact integer as an HPReal (stored wide enough not to round)."""
    _check_prec(prec)
    bits = max(prec, v.bit_length() + 1)
    return HPReal(mpfr(v, bits), prec, _ZERO)


def hp_root(k: int, m: int, prec: int = DEFAULT_PRECISION) -> HPReal:
    """k^(1/m) within half an ulp at precision prec.

    Perfect m-th powers are detected with integer arithmetic first and
    returned exactly, which removes the only case where floor of the
    rounded root could disagree with the integer root.
    """
    _check_prec(prec)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    r = integer_nth_root(k, m)
    if r**m == k:
        return HPReal(mpfr(r, max(prec, r.bit_length() + 1)), prec, _ZERO)
    kf = mpfr(k, max(prec, k.bit_length()) + 2)
    val = _ctx(prec).rootn(kf, m)
    return HPReal(val, prec, _half_ulp(val, prec))


def frac_part(k: int, m: int, prec: int = DEFAULT_PRECISION) -> HPReal:
    """Fractional part {k^(1/m)} in [0, 1); exactly 0 for perfect powers.

    The root is computed with extra guard bits so that after the exact
    subtraction of the integer part the absolute error is below
    2^(-prec-8); with the final rounding the total bound stays under
    one ulp at unit magnitude, 2^(1-prec).
    """
    _check_prec(prec)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    r = integer_nth_root(k, m)
    if r**m == k:
        return HPReal(mpfr(0, prec), prec, _ZERO)
    pw = max(prec + r.bit_length() + 8, k.bit_length() + 2)
    cw = _ctx(pw)
    root = cw.rootn(k, m)
    fw = cw.sub(root, r)  # exact: the result fits in pw bits
    val = mpfr(fw, prec)
    if not 0 < val < 1:
        raise ConsistencyError(f"fractional part of {k}^(1/{m}) outside (0,1): {val}")
    err = _ERR.add(_pow2(gmpy2.get_exp(root) - pw - 1), _half_ulp(val, prec))
    return HPReal(val, prec, err)


def power_sum(n: int, m: int, prec: int = DEFAULT_PRECISION) -> HPReal:
    """Literal sum_{k=1..n} k^(1/m) by compensated (Neumaier) summation.

    Terms are correctly rounded at prec+32 working bits and accumulated
    in ascending k order, so results are deterministic.  The reported
    bound covers the n term roundings, the summation residual, and the
    final rounding to prec.
    """
    _check_prec(prec)
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return HPReal(mpfr(0, prec), prec, _ZERO)
    pw = max(prec + 32, n.bit_length() + 2)
    cw = _ctx(pw)
    rootn, add, sub = cw.rootn, cw.add, cw.sub
    s = mpfr(0)
    comp = mpfr(0)
    for k in range(1, n + 1):
        t = rootn(k, m)
        tmp = add(s, t)
        if s >= t:  # all terms nonnegative
            comp = add(comp, add(sub(s, tmp), t))
        else:
            comp = add(comp, add(sub(t, tmp), s))
        s = tmp
    total = add(s, comp)
    val = mpfr(total, prec)
    e_term = n.bit_length() // m + 2  # magnitude bound of the largest term
    err = _ERR.add(
        _ERR.mul(mpfr(n), _pow2(e_term - pw - 1)),
        _ERR.add(
            _ERR.mul(_ERR.add(abs(val), mpfr(1)), _pow2(1 - pw)),
            _half_ulp(val, prec),
        ),
    )
    return HPReal(val, prec, err)


def eval_expansion(
    e: Expansion,
    zeta_value: HPReal | None,
    n: int,
    prec: int = DEFAULT_PRECISION,
) -> HPReal:
    """Evaluate sum of coeff * n^exponent plus the zeta constant.

    Each term is built from exact integer powers and a correctly rounded
    rootn at prec+32 working bits, so its error is far below the
    documented 2-ulp-per-term budget; the reported bound is the
    conservative (terms+1) * 2 ulp plus the constant's inherited bound.
    Pass zeta_value=None to evaluate the non-constant terms only.
    """
    _check_prec(prec)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    pw = prec + 32
    cw = _ctx(pw)
    nz = mpz(n)
    s = mpfr(0)
    comp = mpfr(0)

    def accumulate(x):
        nonlocal s, comp
        tmp = cw.add(s, x)
        if abs(s) >= abs(x):
            comp = cw.add(comp, cw.add(cw.sub(s, tmp), x))
        else:
            comp = cw.add(comp, cw.add(cw.sub(x, tmp), s))
        s = tmp

    for t in e.terms():
        a = t.exponent.numerator
        b = t.exponent.denominator
        power = nz ** abs(a)
        if b == 1:
            x = mpfr(power, pw)
        else:
            x = cw.rootn(power, b)
        if a < 0:
            x = cw.div(1, x)
        accumulate(cw.mul(x, mpq(t.coeff)))
    if zeta_value is not None:
        accumulate(mpfr(zeta_value.value, pw))
    val = mpfr(cw.add(s, comp), prec)
    n_terms = len(e.terms()) + (0 if zeta_value is None else 1)
    err = _ERR.mul(ulp(val, prec), mpfr(2 * (n_terms + 1)))
    if zeta_value is not None and zeta_value.err != 0:
        err = _ERR.add(err, zeta_value.err)
    return HPReal(val, prec, err)


@dataclass(frozen=True)
class ZetaEstimate:
    """zeta(-1/m) estimated from the power-sum tail at (n_used, p_used).

    error_estimate bounds |value - zeta(-1/m)|: the magnitude of the
    first omitted correction term (the truncation error is of its sign
    and smaller, since the odd derivatives of x^(1/m) are completely
    monotone) plus the numerical bookkeeping bound.
    """

    m: int
    value: HPReal
    n_used: int
    p_used: int
    error_estimate: HPReal


def _check_terms_decrease(m: int, n: int, p: int) -> None:
    # consecutive correction terms differ by exactly n^(-2); the run of
    # magnitudes |c_k| n^(1/m-2k+1) decreases iff |c_(k+1)| < |c_k| n^2,
    # an exact rational comparison.  Includes the first omitted term.
    n2 = n * n
    prev = abs(em_correction_coeff(m, 1).coeff)
    for k in range(2, p + 2):
        cur = abs(em_correction_coeff(m, k).coeff)
        if cur >= prev * n2:
            raise ValueError(
                f"correction terms do not decrease at n={n} (k={k}); "
                f"n is too small for p={p}"
            )
        prev = cur


def estimate_zeta_neg_inv(
    m: int, n: int, p: int, prec: int = DEFAULT_PRECISION
) -> ZetaEstimate:
    """Estimate zeta(-1/m) as the literal power sum at n minus all the
    non-constant expansion terms.

    Sharpened tail method: subtracting the p correction terms as well as
    the two leading terms makes the truncation error O(n^(1/m-2p-1)).
    Refuses when the correction terms do not decrease at this n.
    """
    _check_prec(prec)
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    _check_terms_decrease(m, n, p)
    expansion = build_power_sum_expansion(m, p)
    # the subtraction cancels ~mag(power sum) bits; add them as guards
    mag = (m + 1) * n.bit_length() // m + 4
    pw = prec + mag + 40
    total = power_sum(n, m, pw)
    terms = eval_expansion(expansion, None, n, pw)
    val = mpfr(_ctx(pw).sub(total.value, terms.value), prec)
    num_err = _ERR.add(_ERR.add(total.err, terms.err), _half_ulp(val, prec))
    # first omitted correction term, with a 1/16 cushion over its
    # nearest-rounded evaluation
    omitted = em_correction_coeff(m, p + 1)
    c96 = _ctx(96)
    a, b = omitted.exponent.numerator, omitted.exponent.denominator
    tb = c96.rootn(mpz(n) ** abs(a), b)
    if a < 0:
        tb = c96.div(1, tb)
    tb = abs(c96.mul(tb, mpq(omitted.coeff)))
    bound = _ERR.add(num_err, _ERR.mul(tb, mpfr("1.0625")))
    return ZetaEstimate(
        m=m,
        value=HPReal(val, prec, num_err),
        n_used=n,
        p_used=p,
        error_estimate=HPReal(bound, 64, _ZERO),
    )


_zeta_cache: dict[tuple[int, int], ZetaEstimate] = {}
_zeta_lock = threading.Lock()


def _log2_abs(q: Fraction) -> float:
    return q.numerator.bit_length() - q.denominator.bit_length()


def zeta_constant(m: int, prec: int = DEFAULT_PRECISION) -> ZetaEstimate:
    """Cached zeta(-1/m) at (m, prec), with (n, p) chosen automatically
    so the truncation error sits below the rounding floor of prec."""
    _check_prec(prec)
    key = (m, prec)
    got = _zeta_cache.get(key)
    if got is not None:
        return got
    with _zeta_lock:
        got = _zeta_cache.get(key)
        if got is not None:
            return got
        import math as _math

        target = -(prec + 8)
        n = 10**4
        while True:
            log2n = _math.log2(n)
            p = None
            for cand in range(1, 81):
                c = em_correction_coeff(m, cand + 1).coeff
                log2_term = _log2_abs(abs(c)) + (1 / m - 2 * cand - 1) * log2n
                if log2_term + 4 <= target:
                    p = cand
                    break
            if p is not None:
                break
            n *= 4
        est = estimate_zeta_neg_inv(m, n, p, prec)
        _zeta_cache[key] = est
        return est


def exact_sub(a: mpfr, b: mpfr) -> mpfr:
    """Difference of two mpfr values computed without any rounding
    (the working precision is chosen to hold the result exactly)."""
    if a == 0:
        return -b
    if b == 0:
        return +a
    ea, eb = gmpy2.get_exp(a), gmpy2.get_exp(b)
    lsb = min(ea - a.precision, eb - b.precision)
    need = max(ea, eb) - lsb + 4
    return _ctx(max(need, 8)).sub(a, b)
