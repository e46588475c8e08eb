"""Empirical verification engine.

Residual tables measure how fast the truncated expansion approaches the
brute-force fractional-part sums; the fitted log-log slope of the
residual must match the exponent of the first omitted correction term
(2p + 1 - 1/m).  This is the decisive check between the two printed
decay rates for the m = 2 corrections (2k - 3/2 versus k - 1/2, which
coincide only at k = 1).

Also here: the centered sequence y_n = x_n - n/2 + sqrt(n)/3 with its
extremum structure, equidistribution histograms, and the constant-term
check for x at square arguments.
"""

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import BudgetExceeded, ConsistencyError
from .exact import floor_root_sum, integer_nth_root
from .hp import (
    DEFAULT_PRECISION,
    HPReal,
    _ERR,
    _ctx,
    _half_ulp,
    _pow2,
    eval_expansion,
    exact_sub,
    format_mpfr,
    ulp,
    zeta_constant,
)
from .oracle import DEFAULT_BUDGET, brute_frac_sum_checkpoints
from .series import build_power_sum_expansion, em_correction_coeff

__all__ = [
    "ResidualRow",
    "residual_table",
    "fit_slope",
    "residual_rows_to_csv",
    "residual_rows_to_dicts",
    "YSeqPoint",
    "iter_y_sequence",
    "y_sequence",
    "ExtremaReport",
    "extrema_scan",
    "EquidistResult",
    "equidist_stats",
    "XsqRow",
    "XsqReport",
    "xsq_constant_check",
]


@dataclass(frozen=True)
class ResidualRow:
    """One comparison row: reference (oracle), predicted (expansion minus
    closed-form floor sum), their exact difference, and the local
    log-log slope against the previous row."""

    n: int
    reference: HPReal
    predicted: HPReal
    residual: mpfr
    local_slope: float | None
    flag: str  # "ok" or "precision-limited"


def _log_abs(x) -> float:
    # natural log of |x| without float underflow for tiny mpfr values
    return float(gmpy2.log(abs(x)))


def residual_table(
    m: int,
    p: int,
    ns: list[int],
    prec: int = DEFAULT_PRECISION,
    references: list[HPReal] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[ResidualRow]:
    """Residuals of the p-term expansion against the oracle at each n.

    references may carry precomputed oracle sums for ns (bit-identical
    to brute_frac_sum at the same prec); otherwise one checkpointed
    sweep computes them.  Rows whose residual is below its own error
    bound are flagged precision-limited; if every row is, the table is
    refused with the precision required to resolve the expected
    residual.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not ns:
        raise ValueError("ns must be non-empty")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    if references is None:
        references = brute_frac_sum_checkpoints(list(ns), m, prec, budget)
    elif len(references) != len(ns):
        raise ValueError("references must match ns")
    zc = zeta_constant(m, prec)
    # fold the estimate's full deviation bound (truncation + numerics)
    # into the constant fed to the evaluator
    zeta_val = HPReal(zc.value.value, prec, zc.error_estimate.value)
    expansion = build_power_sum_expansion(m, p)
    cp = _ctx(prec)
    rows: list[ResidualRow] = []
    for n, ref in zip(ns, references):
        kexp = eval_expansion(expansion, zeta_val, n, prec)
        floor_total = floor_root_sum(n, m).total
        pv = cp.sub(kexp.value, mpfr(floor_total, max(prec, floor_total.bit_length() + 1)))
        predicted = HPReal(pv, prec, _ERR.add(kexp.err, _half_ulp(pv, prec)))
        residual = exact_sub(ref.value, predicted.value)
        bound = _ERR.add(ref.err, predicted.err)
        flag = "ok" if abs(residual) > bound else "precision-limited"
        slope = None
        if rows:
            prev = rows[-1]
            if (
                flag == "ok"
                and prev.flag == "ok"
                and residual != 0
                and prev.residual != 0
            ):
                slope = (_log_abs(residual) - _log_abs(prev.residual)) / (
                    math.log(n) - math.log(prev.n)
                )
        rows.append(ResidualRow(n, ref, predicted, residual, slope, flag))
    if all(r.flag == "precision-limited" for r in rows):
        omitted = em_correction_coeff(m, p + 1)
        expected_log2 = (
            omitted.coeff.numerator.bit_length()
            - omitted.coeff.denominator.bit_length()
            + float(omitted.exponent) * math.log2(ns[-1])
        )
        bound_log2 = float(gmpy2.log2(_ERR.add(rows[-1].reference.err, rows[-1].predicted.err)))
        needed = prec + max(0, math.ceil(bound_log2 - expected_log2)) + 16
        raise ValueError(
            f"precision {prec} cannot resolve the m={m}, p={p} residuals "
            f"(all rows precision-limited); retry with about {needed} bits"
        )
    return rows


def fit_slope(rows: list[ResidualRow]) -> float:
    """Least-squares slope of log|residual| vs log n over the top decade
    of usable rows (smaller n contaminate the fit with lower-order
    terms, so they are excluded)."""
    ok = [r for r in rows if r.flag == "ok" and r.residual != 0]
    if not ok:
        raise ValueError("no usable rows to fit")
    n_max = ok[-1].n
    sel = [r for r in ok if 10 * r.n >= n_max]
    if len(sel) < 2:
        raise ValueError("need at least two usable rows in the top decade")
    xs = [math.log(r.n) for r in sel]
    ys = [_log_abs(r.residual) for r in sel]
    return statistics.linear_regression(xs, ys).slope


def residual_rows_to_dicts(rows: list[ResidualRow], digits: int = 30) -> list[dict]:
    return [
        {
            "n": r.n,
            "reference": format_mpfr(r.reference.value, digits),
            "predicted": format_mpfr(r.predicted.value, digits),
            "residual": format_mpfr(r.residual, digits),
            "slope": r.local_slope,
            "flag": r.flag,
        }
        for r in rows
    ]


def residual_rows_to_csv(rows: list[ResidualRow], digits: int = 30) -> str:
    lines = ["n,reference,predicted,residual,slope,flag"]
    for d in residual_rows_to_dicts(rows, digits):
        slope = "" if d["slope"] is None else repr(d["slope"])
        lines.append(
            f"{d['n']},{d['reference']},{d['predicted']},{d['residual']},{slope},{d['flag']}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class YSeqPoint:
    """y_n = sum_{k<=n} {sqrt(k)} - n/2 + sqrt(n)/3."""

    n: int
    y: HPReal


def iter_y_sequence(lo: int, hi: int, prec: int = DEFAULT_PRECISION):
    """Yield YSeqPoint for n = lo..hi.

    y is advanced incrementally: from the definition,

        y_{n+1} - y_n = {sqrt(n+1)} - 1/2 + (sqrt(n+1) - sqrt(n))/3.

    (Printed forms of this increment circulate without the -1/2 term;
    the definition is authoritative.)  The running value is checked
    against a direct recomputation from the accumulated fractional sum
    every 10^4 steps and at the end; drift beyond the rounding budget
    raises ConsistencyError.
    """
    if lo < 1:
        raise ValueError(f"lo must be >= 1, got {lo}")
    if hi < lo:
        raise ValueError(f"range is empty: [{lo}, {hi}]")
    pw = max(prec + 32, hi.bit_length() + 8)
    cw = _ctx(pw)
    add, sub, div = cw.add, cw.sub, cw.div
    rootn = cw.rootn
    half = mpq(1, 2)
    tol = _ERR.mul(mpfr(16 * hi), _ERR.mul(mpfr(hi), _pow2(-pw)))
    step_err = _pow2(hi.bit_length() // 2 + 4 - pw)

    y = mpfr(mpq(-1, 6), pw)  # y_1 = 0 - 1/2 + 1/3
    x = mpfr(0)
    prev_root = mpfr(1, pw)
    r = 1
    boundary = 4

    def emit(n):
        return YSeqPoint(n, HPReal(mpfr(y, prec), prec, _ERR.mul(mpfr(n), step_err)))

    if lo == 1:
        yield emit(1)
    for n in range(2, hi + 1):
        if n == boundary:
            r += 1
            boundary = (r + 1) ** 2
            root = mpfr(r, pw)
            frac = mpfr(0)
        else:
            root = rootn(n, 2)
            frac = sub(root, r)  # exact at pw guard bits
        y = add(y, add(sub(frac, half), div(sub(root, prev_root), 3)))
        x = add(x, frac)
        prev_root = root
        if n % 10_000 == 0 or n == hi:
            y_direct = add(sub(x, mpq(n, 2)), div(root, 3))
            if abs(sub(y, y_direct)) > tol:
                raise ConsistencyError(
                    f"incremental y_n drifted from its definition at n={n}: "
                    f"{format_mpfr(sub(y, y_direct), 6)} exceeds {format_mpfr(tol, 3)}"
                )
        if n >= lo:
            yield emit(n)


def y_sequence(lo: int, hi: int, prec: int = DEFAULT_PRECISION) -> list[YSeqPoint]:
    """Materialized iter_y_sequence (use the iterator for long ranges)."""
    return list(iter_y_sequence(lo, hi, prec))


def _is_pre_square(n: int) -> bool:
    # n = j^2 + 2j  <=>  n + 1 is a perfect square
    s = math.isqrt(n + 1)
    return s * s == n + 1


@dataclass(frozen=True)
class ExtremaReport:
    """Extremum structure of y over [lo, hi].

    Local minima are expected exactly at j^2 + 3j + 1 (one per root
    block), local maxima at the pre-square indices j^2 + 2j, the sign of
    y positive exactly on the pre-square set, the running maximum
    approaching zeta(-1/2) + 1/2 from below, and the per-block minima
    strictly decreasing (the liminf is -infinity).
    """

    lo: int
    hi: int
    n_blocks: int
    minima: list[tuple[int, int, float]]  # (block root, n, y)
    maxima: list[tuple[int, int, float]]
    minima_all_at_expected: bool
    minima_mismatches: list[int]
    maxima_all_at_expected: bool
    maxima_mismatches: list[int]
    running_max_n: int
    running_max: HPReal
    limsup_reference: HPReal  # zeta(-1/2) + 1/2
    running_max_gap: float
    approaches_from_below: bool
    block_minima: list[tuple[int, int, float]]  # (block root, n, min y)
    block_minima_strictly_decreasing: bool
    positives_match_expected: bool
    positive_mismatches: list[int]


def extrema_scan(lo: int, hi: int, prec: int = DEFAULT_PRECISION) -> ExtremaReport:
    """Scan y over [lo, hi] (needs at least 20 complete root blocks)."""
    if lo < 1:
        raise ValueError(f"lo must be >= 1, got {lo}")
    # complete blocks j: lo <= j^2 and (j+1)^2 - 1 <= hi
    j0 = 1 if lo == 1 else math.isqrt(lo - 1) + 1
    j1 = math.isqrt(hi + 1) - 1
    n_blocks = j1 - j0 + 1
    if n_blocks < 20:
        raise ValueError(
            f"range [{lo}, {hi}] covers only {max(n_blocks, 0)} complete "
            f"square-to-square blocks; at least 20 are required"
        )
    zc = zeta_constant(2, prec)
    c = _ctx(prec)
    ref_val = c.add(zc.value.value, mpq(1, 2))
    limsup_ref = HPReal(ref_val, prec, _ERR.add(zc.error_estimate.value, _half_ulp(ref_val, prec)))

    minima: list[tuple[int, int, float]] = []
    maxima: list[tuple[int, int, float]] = []
    minima_mismatches: list[int] = []
    maxima_mismatches: list[int] = []
    positive_mismatches: list[int] = []
    positives_ok = True
    run_max = None
    run_max_n = 0
    run_max_err = None
    block_minima: list[tuple[int, int, float]] = []
    cur_block = None
    cur_min = None
    cur_min_n = 0

    prev1 = None  # (n, value)
    prev2 = None
    # scan one index past hi so an extremum at hi still has a right
    # neighbor; the extra point is excluded from all other bookkeeping
    for pt in iter_y_sequence(lo, hi + 1, prec):
        v = pt.y.value
        n = pt.n
        if n <= hi:
            # positivity: y > 0 exactly on the pre-square set
            if (v > 0) != _is_pre_square(n):
                positives_ok = False
                if len(positive_mismatches) < 20:
                    positive_mismatches.append(n)
            if run_max is None or v > run_max:
                run_max, run_max_n, run_max_err = v, n, pt.y.err
            j = math.isqrt(n)
            if j0 <= j <= j1:
                if cur_block != j:
                    if cur_block is not None:
                        block_minima.append((cur_block, cur_min_n, float(cur_min)))
                    cur_block, cur_min, cur_min_n = j, v, n
                elif v < cur_min:
                    cur_min, cur_min_n = v, n
        if prev2 is not None:
            pn, pv = prev1
            if prev2[1] > pv < v or prev2[1] < pv > v:
                pj = math.isqrt(pn)
                if j0 <= pj <= j1:
                    if pv < v:  # local minimum at pn
                        minima.append((pj, pn, float(pv)))
                        if pn != pj * pj + pj - 1:  # == (pj-1)^2 + 3(pj-1) + 1
                            minima_mismatches.append(pn)
                    else:
                        maxima.append((pj, pn, float(pv)))
                        if pn != pj * pj + 2 * pj:
                            maxima_mismatches.append(pn)
        prev2, prev1 = prev1, (n, v)
    if cur_block is not None:
        block_minima.append((cur_block, cur_min_n, float(cur_min)))

    decreasing = all(b[2] < a[2] for a, b in zip(block_minima, block_minima[1:]))
    gap = float(c.sub(ref_val, run_max))
    return ExtremaReport(
        lo=lo,
        hi=hi,
        n_blocks=n_blocks,
        minima=minima,
        maxima=maxima,
        minima_all_at_expected=not minima_mismatches,
        minima_mismatches=minima_mismatches,
        maxima_all_at_expected=not maxima_mismatches,
        maxima_mismatches=maxima_mismatches,
        running_max_n=run_max_n,
        running_max=HPReal(run_max, prec, run_max_err),
        limsup_reference=limsup_ref,
        running_max_gap=gap,
        approaches_from_below=run_max < ref_val,
        block_minima=block_minima,
        block_minima_strictly_decreasing=decreasing,
        positives_match_expected=positives_ok,
        positive_mismatches=positive_mismatches,
    )


@dataclass(frozen=True)
class EquidistResult:
    """Histogram of {k^(1/m)} for k <= n over equal-width bins, with the
    maximum deviation max_j |count_j / n - 1/bins| as an exact rational
    (bin indices are computed by exact integer root comparisons, so
    the histogram is independent of floating point)."""

    m: int
    n: int
    bins: int
    counts: tuple[int, ...]
    max_deviation: Fraction


def equidist_stats(
    m: int, n: int, bins: int, budget: int = DEFAULT_BUDGET
) -> EquidistResult:
    """Bin counts of {k^(1/m)} for k = 1..n.

    The bin of {k^(1/m)} is floor(bins * {k^(1/m)}), obtained exactly:
    with r = floor(k^(1/m)) and t = floor((k * bins^m)^(1/m)) the bin
    index is t - r*bins.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if n > budget:
        raise BudgetExceeded(f"equidistribution scan at n={n} exceeds budget {budget}")
    scale = bins**m
    counts = [0] * bins
    r = 1
    boundary = 2**m
    for k in range(1, n + 1):
        if k == boundary:
            r += 1
            boundary = (r + 1) ** m
        counts[integer_nth_root(k * scale, m) - r * bins] += 1
    inv = Fraction(1, bins)
    max_dev = max(abs(Fraction(cnt, n) - inv) for cnt in counts)
    return EquidistResult(m, n, bins, tuple(counts), max_dev)


@dataclass(frozen=True)
class XsqRow:
    side: int  # evaluated at n = side^2
    value: HPReal  # x_{side^2} - side^2/2 + side/3
    gap: float  # |value - zeta(-1/2)|


@dataclass(frozen=True)
class XsqReport:
    rows: list[XsqRow]
    zeta_half: HPReal
    gaps_decreasing: bool


def xsq_constant_check(
    n_max: int,
    prec: int = DEFAULT_PRECISION,
    budget: int = DEFAULT_BUDGET,
) -> XsqReport:
    """Tabulate x_{n^2} - n^2/2 + n/3 at n = 10, 100, ... up to n_max and
    report convergence toward the estimated zeta(-1/2)."""
    if n_max < 10:
        raise ValueError(f"n_max must be >= 10, got {n_max}")
    sides = []
    s = 10
    while s <= n_max:
        sides.append(s)
        s *= 10
    if sides[-1] != n_max:
        sides.append(n_max)
    ns = [s * s for s in sides]
    fracs = brute_frac_sum_checkpoints(ns, 2, prec, budget)
    zc = zeta_constant(2, prec)
    cw = _ctx(prec + 16)
    rows = []
    for side, fs in zip(sides, fracs):
        dv = cw.add(cw.sub(fs.value, mpq(side * side, 2)), mpq(side, 3))
        val = mpfr(dv, prec)
        err = _ERR.add(fs.err, ulp(val, prec))
        gap = abs(float(cw.sub(dv, zc.value.value)))
        rows.append(XsqRow(side, HPReal(val, prec, err), gap))
    gaps = [r.gap for r in rows]
    return XsqReport(
        rows=rows,
        zeta_half=zc.value,
        gaps_decreasing=all(b < a for a, b in zip(gaps, gaps[1:])),
    )
