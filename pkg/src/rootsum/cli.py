"""Command-line interface.

Every operation in the package is reachable from a subcommand.  Output
is deterministic: identical invocations produce byte-identical stdout.
Formats: plain (values with explicit `+-` error bounds), json, csv.
Exit codes: 0 ok, 2 usage/budget errors, 3 internal consistency
failures (including --check mismatches).  The ROOTSUM_PRECISION
environment variable overrides the default precision of 128 bits.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import analysis, exact, hp, oracle, series
from .errors import BudgetExceeded, ConsistencyError

__all__ = ["Config", "main"]

_FORMATS = ("plain", "csv", "json")


@dataclass(frozen=True)
class Config:
    precision_bits: int = 128
    oracle_budget: int = 10**8
    output_format: str = "plain"

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError(
                f"precision must be >= 64 bits, got {self.precision_bits}"
            )
        if self.output_format not in _FORMATS:
            raise ValueError(f"unknown output format: {self.output_format}")

    @property
    def digits(self) -> int:
        return max(6, int(self.precision_bits * 0.30103) - 1)


def parse_natural(text: str) -> int:
    """Exact nonnegative-integer parse; scientific notation like 1e6 or
    2.5e3 is accepted as long as the value is integral."""
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None
    if q.denominator != 1 or q < 0:
        raise ValueError(f"not a nonnegative integer: {text!r}")
    return int(q)


def parse_natural_list(text: str) -> list[int]:
    return [parse_natural(part) for part in text.split(",") if part]


def _fmt(x, digits: int) -> str:
    return hp.format_mpfr(x, digits)


def _hp_plain(v: hp.HPReal, digits: int) -> str:
    if v.err == 0:
        return f"{_fmt(v.value, digits)} (exact)"
    return f"{_fmt(v.value, digits)} +- {_fmt(v.err, 3)}"


def _hp_json(v: hp.HPReal, digits: int) -> dict:
    return {"value": _fmt(v.value, digits), "err": _fmt(v.err, 3), "prec": v.prec}


def _emit(cfg: Config, plain_lines: list[str], payload: dict, csv_lines: list[str] | None = None):
    if cfg.output_format == "plain":
        for line in plain_lines:
            print(line)
    elif cfg.output_format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in csv_lines if csv_lines is not None else plain_lines:
            print(line)


def _cmd_floor_sum(args, cfg: Config) -> int:
    n = parse_natural(args.n)
    m = args.m
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    res = exact.floor_root_sum(n, m)
    payload = {"command": "floor-sum", "n": n, "m": m, "root": res.root, "total": res.total}
    plain = [str(res.total)]
    status = 0
    if m == 2:
        alt = exact.floor_sqrt_sum(n)
        if alt.total != res.total:
            print(f"closed forms disagree: {res.total} vs {alt.total}", file=sys.stderr)
            return 3
    if args.special:
        sp = exact.floor_root_sum_special(n, m)
        payload["special"] = sp
        plain.append(f"special: {sp}")
        if sp != res.total:
            print(f"special closed form disagrees: {sp} vs {res.total}", file=sys.stderr)
            status = 3
    if args.check:
        ora = oracle.brute_floor_sum(n, m, cfg.oracle_budget)
        match = ora == res.total
        payload["check"] = "match" if match else "mismatch"
        payload["oracle"] = ora
        plain.append(f"check: {'match' if match else f'mismatch (oracle {ora})'}")
        if not match:
            status = 3
    _emit(cfg, plain, payload, [f"n,m,root,total", f"{n},{m},{res.root},{res.total}"])
    return status


def _cmd_frac_sum(args, cfg: Config) -> int:
    n = parse_natural(args.n)
    m = args.m
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    prec, digits = cfg.precision_bits, cfg.digits
    payload = {"command": "frac-sum", "n": n, "m": m, "p": args.p, "mode": args.mode}
    plain, csv = [], ["quantity,value,err"]
    if args.mode in ("oracle", "both"):
        ora = oracle.brute_frac_sum(n, m, prec, cfg.oracle_budget)
        payload["oracle"] = _hp_json(ora, digits)
        plain.append(f"oracle:    {_hp_plain(ora, digits)}")
        csv.append(f"oracle,{_fmt(ora.value, digits)},{_fmt(ora.err, 3)}")
    if args.mode in ("expansion", "both"):
        zc = hp.zeta_constant(m, prec)
        zeta_val = hp.HPReal(zc.value.value, prec, zc.error_estimate.value)
        expn = series.build_power_sum_expansion(m, args.p)
        kv = hp.eval_expansion(expn, zeta_val, n, prec)
        floor_total = exact.floor_root_sum(n, m).total
        pv = hp._ctx(prec).sub(kv.value, hp.hp_from_int(floor_total, prec).value)
        pred = hp.HPReal(pv, prec, hp._ERR.add(kv.err, hp.ulp(pv, prec)))
        payload["expansion"] = _hp_json(pred, digits)
        plain.append(f"expansion: {_hp_plain(pred, digits)}")
        csv.append(f"expansion,{_fmt(pred.value, digits)},{_fmt(pred.err, 3)}")
    if args.mode == "both":
        residual = hp.exact_sub(ora.value, pred.value)
        payload["residual"] = _fmt(residual, 12)
        plain.append(f"residual:  {_fmt(residual, 12)}")
        csv.append(f"residual,{_fmt(residual, 12)},")
    if args.mode == "oracle" and cfg.output_format == "plain":
        plain = [_hp_plain(ora, digits)]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_zeta(args, cfg: Config) -> int:
    m = args.m
    prec, digits = cfg.precision_bits, cfg.digits
    if args.n is None and args.p is None:
        est = hp.zeta_constant(m, prec)
    else:
        n = parse_natural(args.n) if args.n is not None else 10**4
        p = args.p if args.p is not None else 3
        est = hp.estimate_zeta_neg_inv(m, n, p, prec)
    payload = {
        "command": "zeta",
        "m": m,
        "value": _fmt(est.value.value, digits),
        "error_estimate": _fmt(est.error_estimate.value, 3),
        "n_used": est.n_used,
        "p_used": est.p_used,
    }
    plain = [
        f"zeta(-1/{m}) = {_fmt(est.value.value, digits)} "
        f"+- {_fmt(est.error_estimate.value, 3)}  (n={est.n_used}, p={est.p_used})"
    ]
    csv = ["m,value,error_estimate,n_used,p_used",
           f"{m},{_fmt(est.value.value, digits)},{_fmt(est.error_estimate.value, 3)},{est.n_used},{est.p_used}"]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_residuals(args, cfg: Config) -> int:
    ns = parse_natural_list(args.ns)
    rows = analysis.residual_table(
        args.m, args.p, ns, cfg.precision_bits, budget=cfg.oracle_budget
    )
    slope = None
    try:
        slope = analysis.fit_slope(rows)
    except ValueError:
        pass
    dicts = analysis.residual_rows_to_dicts(rows)
    payload = {
        "command": "residuals",
        "m": args.m,
        "p": args.p,
        "rows": dicts,
        "fitted_slope": slope,
        "expected_slope": float(Fraction(1, args.m) - (2 * args.p + 1)),
    }
    plain = [
        f"{d['n']}: residual {d['residual']}"
        + (f"  slope {d['slope']:.4f}" if d["slope"] is not None else "")
        + ("" if d["flag"] == "ok" else f"  [{d['flag']}]")
        for d in dicts
    ]
    plain.append(
        f"fitted slope (top decade): {slope!r}; "
        f"first-omitted-term exponent: {payload['expected_slope']!r}"
    )
    csv = analysis.residual_rows_to_csv(rows).splitlines()
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_equidist(args, cfg: Config) -> int:
    n = parse_natural(args.n)
    res = analysis.equidist_stats(args.m, n, args.bins, cfg.oracle_budget)
    payload = {
        "command": "equidist",
        "m": args.m,
        "n": n,
        "bins": args.bins,
        "counts": list(res.counts),
        "max_deviation": str(res.max_deviation),
        "max_deviation_float": float(res.max_deviation),
    }
    plain = [f"bin {i}: {c}" for i, c in enumerate(res.counts)]
    plain.append(
        f"max deviation: {float(res.max_deviation):.8e} (= {res.max_deviation})"
    )
    csv = ["bin,count"] + [f"{i},{c}" for i, c in enumerate(res.counts)]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_extrema(args, cfg: Config) -> int:
    lo, hi = parse_natural(args.lo), parse_natural(args.hi)
    rep = analysis.extrema_scan(lo, hi, cfg.precision_bits)
    digits = cfg.digits
    payload = {
        "command": "extrema",
        "lo": rep.lo,
        "hi": rep.hi,
        "n_blocks": rep.n_blocks,
        "minima_all_at_expected": rep.minima_all_at_expected,
        "minima_mismatches": rep.minima_mismatches,
        "maxima_all_at_expected": rep.maxima_all_at_expected,
        "maxima_mismatches": rep.maxima_mismatches,
        "running_max_n": rep.running_max_n,
        "running_max": _fmt(rep.running_max.value, digits),
        "limsup_reference": _fmt(rep.limsup_reference.value, digits),
        "running_max_gap": rep.running_max_gap,
        "approaches_from_below": rep.approaches_from_below,
        "block_minima_strictly_decreasing": rep.block_minima_strictly_decreasing,
        "positives_match_expected": rep.positives_match_expected,
        "positive_mismatches": rep.positive_mismatches,
        "minima": rep.minima,
        "maxima": rep.maxima,
        "block_minima": rep.block_minima,
    }
    plain = [
        f"complete blocks: {rep.n_blocks}",
        f"local minima at j^2+3j+1: {'yes' if rep.minima_all_at_expected else f'NO {rep.minima_mismatches[:5]}'}",
        f"local maxima at j^2+2j: {'yes' if rep.maxima_all_at_expected else f'NO {rep.maxima_mismatches[:5]}'}",
        f"y > 0 exactly on j^2+2j: {'yes' if rep.positives_match_expected else f'NO {rep.positive_mismatches[:5]}'}",
        f"running max: {_fmt(rep.running_max.value, digits)} at n={rep.running_max_n}",
        f"limsup reference zeta(-1/2)+1/2: {_fmt(rep.limsup_reference.value, digits)}",
        f"gap to reference: {rep.running_max_gap:.6e} (from below: {'yes' if rep.approaches_from_below else 'no'})",
        f"block minima strictly decreasing: {'yes' if rep.block_minima_strictly_decreasing else 'no'}",
    ]
    csv = ["block,n,min_y"] + [f"{j},{n},{v!r}" for j, n, v in rep.block_minima]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_xsq_check(args, cfg: Config) -> int:
    nmax = parse_natural(args.nmax)
    rep = analysis.xsq_constant_check(nmax, cfg.precision_bits, cfg.oracle_budget)
    digits = cfg.digits
    payload = {
        "command": "xsq-check",
        "zeta_half": _fmt(rep.zeta_half.value, digits),
        "gaps_decreasing": rep.gaps_decreasing,
        "rows": [
            {"side": r.side, "value": _fmt(r.value.value, digits), "gap": r.gap}
            for r in rep.rows
        ],
    }
    plain = [
        f"n={r.side}: x(n^2) - n^2/2 + n/3 = {_fmt(r.value.value, digits)}  gap {r.gap:.6e}"
        for r in rep.rows
    ]
    plain.append(f"zeta(-1/2) = {_fmt(rep.zeta_half.value, digits)}")
    plain.append(f"|gap| decreasing: {'yes' if rep.gaps_decreasing else 'no'}")
    csv = ["side,value,gap"] + [
        f"{r.side},{_fmt(r.value.value, digits)},{r.gap!r}" for r in rep.rows
    ]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_y_seq(args, cfg: Config) -> int:
    lo, hi = parse_natural(args.lo), parse_natural(args.hi)
    step = args.step
    digits = cfg.digits
    rows = []
    for pt in analysis.iter_y_sequence(lo, hi, cfg.precision_bits):
        if (pt.n - lo) % step == 0:
            rows.append((pt.n, pt.y))
    payload = {
        "command": "y-seq",
        "lo": lo,
        "hi": hi,
        "rows": [{"n": n, "y": _fmt(y.value, digits)} for n, y in rows],
    }
    plain = [f"{n}: {_hp_plain(y, digits)}" for n, y in rows]
    csv = ["n,y"] + [f"{n},{_fmt(y.value, digits)}" for n, y in rows]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_expansion(args, cfg: Config) -> int:
    e = series.build_power_sum_expansion(args.m, args.p)
    payload = e.to_json_dict()
    plain = [
        f"({t.coeff}) * n^({t.exponent})" for t in e.terms()
    ]
    plain.append(f"+ zeta({e.zeta_arg})")
    csv = ["num,den,exp_num,exp_den"] + [
        f"{t.coeff.numerator},{t.coeff.denominator},{t.exponent.numerator},{t.exponent.denominator}"
        for t in e.terms()
    ]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_sqrt_coeffs(args, cfg: Config) -> int:
    rows = []
    status = 0
    for k in range(1, args.kmax + 1):
        generic = series.em_correction_coeff(2, k)
        printed = series.em_coeff_sqrt_paperform(k)
        equal = generic.coeff == printed
        if not equal:
            status = 3
        rows.append((k, generic.coeff, printed, generic.exponent, equal))
    payload = {
        "command": "sqrt-coeffs",
        "rows": [
            {
                "k": k,
                "generic": str(g),
                "printed_form": str(pr),
                "exponent": str(ex),
                "equal": eq,
            }
            for k, g, pr, ex, eq in rows
        ],
        "all_equal": status == 0,
    }
    plain = [
        f"k={k}: {g} * n^({ex})  printed form {pr}  {'ok' if eq else 'MISMATCH'}"
        for k, g, pr, ex, eq in rows
    ]
    csv = ["k,generic,printed_form,exp,equal"] + [
        f"{k},{g},{pr},{ex},{eq}" for k, g, pr, ex, eq in rows
    ]
    _emit(cfg, plain, payload, csv)
    if status:
        print("printed-form coefficients disagree with the generic form", file=sys.stderr)
    return status


def _cmd_count_below(args, cfg: Config) -> int:
    x = Fraction(args.x)
    res = oracle.count_frac_below(parse_natural(args.side), x)
    payload = {
        "command": "count-below",
        "side": res.side,
        "x": str(res.x),
        "formula_value": res.formula_value,
        "direct_count": res.direct_count,
        "discrepancy": res.discrepancy,
    }
    plain = [
        f"formula sum(1 + floor(x(2j+x))): {res.formula_value}",
        f"direct count of {{sqrt(k)}} in (0, {res.x}) for k <= {res.side}^2: {res.direct_count}",
        f"discrepancy: {res.discrepancy}",
    ]
    csv = [
        "side,x,formula_value,direct_count,discrepancy",
        f"{res.side},{res.x},{res.formula_value},{res.direct_count},{res.discrepancy}",
    ]
    _emit(cfg, plain, payload, csv)
    return 0


def _cmd_root(args, cfg: Config) -> int:
    k = parse_natural(args.k)
    prec, digits = cfg.precision_bits, cfg.digits
    rt = hp.hp_root(k, args.m, prec)
    fr = hp.frac_part(k, args.m, prec)
    ir = exact.integer_nth_root(k, args.m)
    payload = {
        "command": "root",
        "k": k,
        "m": args.m,
        "root": _hp_json(rt, digits),
        "integer_root": ir,
        "frac_part": _hp_json(fr, digits),
    }
    plain = [
        f"{k}^(1/{args.m}) = {_hp_plain(rt, digits)}",
        f"integer root: {ir}",
        f"fractional part: {_hp_plain(fr, digits)}",
    ]
    csv = [
        "k,m,root,integer_root,frac_part",
        f"{k},{args.m},{_fmt(rt.value, digits)},{ir},{_fmt(fr.value, digits)}",
    ]
    _emit(cfg, plain, payload, csv)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--precision",
        type=int,
        default=None,
        help="working precision in bits (default 128, env ROOTSUM_PRECISION)",
    )
    common.add_argument(
        "--format", choices=_FORMATS, default="plain", help="output format"
    )
    common.add_argument(
        "--budget",
        type=parse_natural,
        default=None,
        help="work budget for brute-force oracles (default 1e8 summed terms)",
    )

    parser = argparse.ArgumentParser(
        prog="rootsum",
        description="Summatory functions of integer-root floors and fractional "
        "parts: exact closed forms, asymptotic expansions, oracles, and "
        "residual analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("floor-sum", parents=[common], help="closed-form floor sum")
    sp.add_argument("--n", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--special", action="store_true", help="also run the dedicated m=3,4,5 closed form")
    sp.add_argument("--check", action="store_true", help="verify against the run-length oracle")
    sp.set_defaults(func=_cmd_floor_sum)

    sp = sub.add_parser("frac-sum", parents=[common], help="fractional-part sum")
    sp.add_argument("--n", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, default=2, help="expansion correction terms")
    sp.add_argument("--mode", choices=("oracle", "expansion", "both"), default="oracle")
    sp.set_defaults(func=_cmd_frac_sum)

    sp = sub.add_parser("zeta", parents=[common], help="estimate zeta(-1/m)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", default=None, help="power-sum length (default: auto)")
    sp.add_argument("--p", type=int, default=None, help="correction terms (default: auto)")
    sp.set_defaults(func=_cmd_zeta)

    sp = sub.add_parser("residuals", parents=[common], help="expansion residual table")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--ns", required=True, help="comma-separated n values, e.g. 1e3,1e4,1e5")
    sp.set_defaults(func=_cmd_residuals)

    sp = sub.add_parser("equidist", parents=[common], help="fractional-part histogram")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--bins", type=int, required=True)
    sp.set_defaults(func=_cmd_equidist)

    sp = sub.add_parser("extrema", parents=[common], help="extremum structure of y_n")
    sp.add_argument("--lo", required=True)
    sp.add_argument("--hi", required=True)
    sp.set_defaults(func=_cmd_extrema)

    sp = sub.add_parser("xsq-check", parents=[common], help="constant term of x at squares")
    sp.add_argument("--nmax", required=True)
    sp.set_defaults(func=_cmd_xsq_check)

    sp = sub.add_parser("y-seq", parents=[common], help="y_n = x_n - n/2 + sqrt(n)/3")
    sp.add_argument("--lo", required=True)
    sp.add_argument("--hi", required=True)
    sp.add_argument("--step", type=int, default=1)
    sp.set_defaults(func=_cmd_y_seq)

    sp = sub.add_parser("expansion", parents=[common], help="exact expansion coefficients")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.set_defaults(func=_cmd_expansion)

    sp = sub.add_parser("sqrt-coeffs", parents=[common], help="m=2 coefficient cross-check")
    sp.add_argument("--kmax", type=int, required=True)
    sp.set_defaults(func=_cmd_sqrt_coeffs)

    sp = sub.add_parser("count-below", parents=[common], help="counting identity comparison")
    sp.add_argument("--side", required=True, help="count over k <= side^2")
    sp.add_argument("--x", required=True, help="threshold in (0,1], e.g. 1/2 or 0.25")
    sp.set_defaults(func=_cmd_count_below)

    sp = sub.add_parser("root", parents=[common], help="high-precision m-th root")
    sp.add_argument("--k", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(func=_cmd_root)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is not None:
            precision = args.precision
        else:
            precision = int(os.environ.get("ROOTSUM_PRECISION", "128"))
        cfg = Config(
            precision_bits=precision,
            oracle_budget=args.budget if args.budget is not None else 10**8,
            output_format=args.format,
        )
        return args.func(args, cfg)
    except ConsistencyError as e:
        print(f"consistency failure: {e}", file=sys.stderr)
        return 3
    except (BudgetExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
