"""CLI surface: examples, exit codes, formats, determinism, coverage."""

import json

import pytest

from rootsum import cli


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParsing:
    def test_parse_natural(self):
        assert cli.parse_natural("7") == 7
        assert cli.parse_natural("1e6") == 10**6
        assert cli.parse_natural("2.5e3") == 2500
        assert cli.parse_natural("0") == 0

    @pytest.mark.parametrize("bad", ["1.5", "-3", "1e-2", "abc", ""])
    def test_parse_natural_rejects(self, bad):
        with pytest.raises(ValueError):
            cli.parse_natural(bad)

    def test_parse_list(self):
        assert cli.parse_natural_list("1e3,1e4,20") == [1000, 10000, 20]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            cli.Config(precision_bits=32)
        with pytest.raises(ValueError):
            cli.Config(output_format="xml")


class TestFloorSum:
    def test_example_7_2(self, capsys):
        code, out, _ = run(capsys, ["floor-sum", "--n", "7", "--m", "2"])
        assert code == 0
        assert out == "11\n"

    def test_special_and_check(self, capsys):
        code, out, _ = run(
            capsys, ["floor-sum", "--n", "30", "--m", "3", "--special", "--check"]
        )
        assert code == 0
        assert out.splitlines() == ["57", "special: 57", "check: match"]

    def test_n0_usage_error(self, capsys):
        code, _, err = run(capsys, ["floor-sum", "--n", "0", "--m", "2"])
        assert code == 2
        assert "n must be >= 1" in err

    def test_m1_usage_error(self, capsys):
        code, _, _ = run(capsys, ["floor-sum", "--n", "5", "--m", "1"])
        assert code == 2

    def test_special_mismatch_is_consistency_failure(self, capsys, monkeypatch):
        from rootsum import exact

        monkeypatch.setattr(cli.exact, "floor_root_sum_special", lambda n, m: 999)
        code, _, err = run(capsys, ["floor-sum", "--n", "30", "--m", "3", "--special"])
        assert code == 3
        assert "disagrees" in err

    def test_scientific_n(self, capsys):
        from rootsum.oracle import brute_floor_sum

        code, out, _ = run(capsys, ["floor-sum", "--n", "1e5", "--m", "2"])
        assert code == 0
        assert out.strip() == str(brute_floor_sum(10**5, 2)) == "21032170"


class TestFracSum:
    def test_oracle_example(self, capsys):
        code, out, _ = run(capsys, ["frac-sum", "--n", "10", "--m", "2", "--mode", "oracle"])
        assert code == 0
        assert out.startswith("3.468278186204100157")

    def test_trivial_n1(self, capsys):
        code, out, _ = run(capsys, ["frac-sum", "--n", "1", "--m", "2", "--mode", "oracle"])
        assert code == 0
        assert out.startswith("0 ")

    def test_both_mode(self, capsys):
        code, out, _ = run(
            capsys, ["frac-sum", "--n", "1e4", "--m", "2", "--p", "2", "--mode", "both"]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("oracle:")
        assert lines[1].startswith("expansion:")
        assert lines[2].startswith("residual:")

    def test_json(self, capsys):
        code, out, _ = run(
            capsys,
            ["frac-sum", "--n", "100", "--m", "3", "--mode", "both", "--format", "json"],
        )
        assert code == 0
        d = json.loads(out)
        assert d["command"] == "frac-sum"
        assert set(d) >= {"oracle", "expansion", "residual"}


class TestZeta:
    def test_plain(self, capsys):
        code, out, _ = run(capsys, ["zeta", "--m", "2"])
        assert code == 0
        assert out.startswith("zeta(-1/2) = -2.078862249773545660")

    def test_explicit_n_p(self, capsys):
        code, out, _ = run(capsys, ["zeta", "--m", "2", "--n", "1e4", "--p", "3"])
        assert code == 0
        assert "(n=10000, p=3)" in out

    def test_csv(self, capsys):
        code, out, _ = run(capsys, ["zeta", "--m", "3", "--format", "csv"])
        assert code == 0
        assert out.splitlines()[0] == "m,value,error_estimate,n_used,p_used"


class TestOtherCommands:
    def test_residuals_csv_schema(self, capsys):
        code, out, _ = run(
            capsys,
            ["residuals", "--m", "2", "--p", "1", "--ns", "1e3,1e4", "--format", "csv"],
        )
        assert code == 0
        assert out.splitlines()[0] == "n,reference,predicted,residual,slope,flag"

    def test_residuals_plain_slope(self, capsys):
        code, out, _ = run(capsys, ["residuals", "--m", "2", "--p", "1", "--ns", "1e3,1e4"])
        assert code == 0
        assert "fitted slope" in out

    def test_equidist(self, capsys):
        code, out, _ = run(
            capsys, ["equidist", "--m", "2", "--n", "1000", "--bins", "4", "--format", "json"]
        )
        assert code == 0
        d = json.loads(out)
        assert sum(d["counts"]) == 1000
        assert d["max_deviation_float"] < 0.1

    def test_extrema(self, capsys):
        code, out, _ = run(capsys, ["extrema", "--lo", "1", "--hi", "3000", "--format", "json"])
        assert code == 0
        d = json.loads(out)
        assert d["minima_all_at_expected"] is True
        assert d["positives_match_expected"] is True

    def test_xsq_check(self, capsys):
        code, out, _ = run(capsys, ["xsq-check", "--nmax", "100"])
        assert code == 0
        assert "|gap| decreasing: yes" in out

    def test_y_seq_step(self, capsys):
        code, out, _ = run(
            capsys, ["y-seq", "--lo", "1", "--hi", "9", "--step", "4", "--format", "csv"]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n,y"
        assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "5", "9"]

    def test_expansion_json_schema(self, capsys):
        code, out, _ = run(capsys, ["expansion", "--m", "2", "--p", "2", "--format", "json"])
        assert code == 0
        d = json.loads(out)
        assert d == {
            "m": 2,
            "p": 2,
            "terms": [
                {"num": 2, "den": 3, "exp_num": 3, "exp_den": 2},
                {"num": 1, "den": 2, "exp_num": 1, "exp_den": 2},
                {"num": 1, "den": 24, "exp_num": -1, "exp_den": 2},
                {"num": -1, "den": 1920, "exp_num": -5, "exp_den": 2},
            ],
            "zeta_arg_num": -1,
            "zeta_arg_den": 2,
        }

    def test_sqrt_coeffs(self, capsys):
        code, out, _ = run(capsys, ["sqrt-coeffs", "--kmax", "5", "--format", "json"])
        assert code == 0
        assert json.loads(out)["all_equal"] is True

    def test_count_below(self, capsys):
        code, out, _ = run(capsys, ["count-below", "--side", "10", "--x", "1"])
        assert code == 0
        assert "108" in out and "90" in out and "discrepancy: 18" in out

    def test_root(self, capsys):
        code, out, _ = run(capsys, ["root", "--k", "2", "--m", "2"])
        assert code == 0
        assert out.startswith("2^(1/2) = 1.414213562373095048")


class TestConfigPlumbing:
    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("ROOTSUM_PRECISION", "96")
        code, out, _ = run(capsys, ["root", "--k", "2", "--m", "2", "--format", "json"])
        assert code == 0
        assert json.loads(out)["root"]["prec"] == 96

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv("ROOTSUM_PRECISION", "96")
        code, out, _ = run(
            capsys, ["root", "--k", "2", "--m", "2", "--precision", "160", "--format", "json"]
        )
        assert code == 0
        assert json.loads(out)["root"]["prec"] == 160

    def test_precision_too_low(self, capsys):
        code, _, err = run(capsys, ["zeta", "--m", "2", "--precision", "32"])
        assert code == 2
        assert "precision" in err

    def test_budget_exceeded(self, capsys):
        code, _, err = run(
            capsys, ["frac-sum", "--n", "1e6", "--m", "2", "--budget", "1e3"]
        )
        assert code == 2
        assert "budget" in err

    def test_usage_error_from_argparse(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frac-sum", "--n", "10", "--m", "2", "--mode", "bogus"])
        assert exc.value.code == 2

    def test_determinism_byte_identical(self, capsys):
        argv = ["residuals", "--m", "2", "--p", "1", "--ns", "100,1000", "--format", "json"]
        _, out1, _ = run(capsys, argv)
        _, out2, _ = run(capsys, argv)
        assert out1 == out2
        argv = ["frac-sum", "--n", "500", "--m", "3", "--mode", "both"]
        _, out1, _ = run(capsys, argv)
        _, out2, _ = run(capsys, argv)
        assert out1 == out2


OPERATION_COVERAGE = {
    "exact.integer_nth_root": ["root", "--k", "10", "--m", "2"],
    "exact.bernoulli": ["expansion", "--m", "2", "--p", "3"],
    "exact.faulhaber_sum": ["floor-sum", "--n", "100", "--m", "3"],
    "exact.floor_sqrt_sum": ["floor-sum", "--n", "100", "--m", "2"],
    "exact.floor_root_sum": ["floor-sum", "--n", "100", "--m", "4"],
    "exact.floor_root_sum_special": ["floor-sum", "--n", "100", "--m", "5", "--special"],
    "series.binom_rational": ["expansion", "--m", "3", "--p", "2"],
    "series.em_correction_coeff": ["expansion", "--m", "2", "--p", "1"],
    "series.em_coeff_sqrt_paperform": ["sqrt-coeffs", "--kmax", "3"],
    "series.build_power_sum_expansion": ["expansion", "--m", "5", "--p", "2"],
    "hp.hp_root": ["root", "--k", "7", "--m", "3"],
    "hp.frac_part": ["root", "--k", "8", "--m", "2"],
    "hp.power_sum": ["zeta", "--m", "4"],
    "hp.eval_expansion": ["frac-sum", "--n", "100", "--m", "2", "--mode", "expansion"],
    "hp.estimate_zeta_neg_inv": ["zeta", "--m", "2", "--n", "2000", "--p", "2"],
    "hp.zeta_constant": ["zeta", "--m", "5"],
    "oracle.brute_floor_sum": ["floor-sum", "--n", "50", "--m", "2", "--check"],
    "oracle.brute_frac_sum": ["frac-sum", "--n", "50", "--m", "2", "--mode", "oracle"],
    "oracle.count_frac_below": ["count-below", "--side", "5", "--x", "1/2"],
    "analysis.residual_table": ["residuals", "--m", "2", "--p", "1", "--ns", "100,1000"],
    "analysis.y_sequence": ["y-seq", "--lo", "1", "--hi", "50"],
    "analysis.extrema_scan": ["extrema", "--lo", "1", "--hi", "2000"],
    "analysis.equidist_stats": ["equidist", "--m", "2", "--n", "500", "--bins", "5"],
    "analysis.xsq_constant_check": ["xsq-check", "--nmax", "20"],
}


@pytest.mark.parametrize("op", sorted(OPERATION_COVERAGE))
def test_every_operation_reachable(op, capsys):
    code = cli.main(OPERATION_COVERAGE[op])
    capsys.readouterr()
    assert code == 0
