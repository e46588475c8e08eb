"""Expansion coefficients: exact rational identities and structure."""

import json
from fractions import Fraction
from math import factorial

import pytest

from rootsum.series import (
    Expansion,
    ExpansionTerm,
    binom_rational,
    build_power_sum_expansion,
    em_coeff_sqrt_paperform,
    em_correction_coeff,
)

F = Fraction


class TestBinomRational:
    def test_examples(self):
        assert binom_rational(F(1, 2), 0) == 1
        assert binom_rational(F(1, 2), 2) == F(-1, 8)
        # direct product (1/3)(-2/3)(-5/3)/6
        assert F(1, 3) * F(-2, 3) * F(-5, 3) / 6 == F(10, 162)
        assert binom_rational(F(1, 3), 3) == F(5, 81)

    def test_integer_alpha_matches_comb(self):
        from math import comb

        for n in range(0, 9):
            for j in range(0, 9):
                expected = comb(n, j) if j <= n else 0
                assert binom_rational(n, j) == expected

    def test_falling_factorial_property(self):
        for alpha in (F(1, 2), F(1, 3), F(-2, 5), F(7, 3)):
            for j in range(0, 10):
                falling = F(1)
                for i in range(j):
                    falling *= alpha - i
                assert binom_rational(alpha, j) * factorial(j) == falling

    def test_sqrt_series_closed_form(self):
        # C(1/2, j) = (-1)^(j+1) (2j+1)! / (4^j (j!)^2 (4j^2-1))
        for j in range(0, 13):
            closed = F(
                (-1) ** (j + 1) * factorial(2 * j + 1),
                4**j * factorial(j) ** 2 * (4 * j * j - 1),
            )
            assert binom_rational(F(1, 2), j) == closed

    def test_negative_j(self):
        with pytest.raises(ValueError):
            binom_rational(F(1, 2), -1)


class TestCorrectionCoeff:
    @pytest.mark.parametrize(
        "m,k,coeff,exponent",
        [
            (2, 1, F(1, 24), F(-1, 2)),
            (2, 2, F(-1, 1920), F(-5, 2)),
            (3, 1, F(1, 36), F(-2, 3)),
        ],
    )
    def test_examples(self, m, k, coeff, exponent):
        term = em_correction_coeff(m, k)
        assert term.coeff == coeff
        assert term.exponent == exponent

    def test_exponent_pattern(self):
        for m in (2, 3, 4, 5):
            for k in range(1, 8):
                assert em_correction_coeff(m, k).exponent == F(1, m) - (2 * k - 1)

    def test_validation(self):
        with pytest.raises(ValueError):
            em_correction_coeff(1, 1)
        with pytest.raises(ValueError):
            em_correction_coeff(2, 0)


class TestPaperFormCoeff:
    def test_first_three(self):
        assert em_coeff_sqrt_paperform(1) == F(1, 24)
        assert em_coeff_sqrt_paperform(2) == F(-1, 1920)
        assert em_coeff_sqrt_paperform(3) == F(1, 9216)

    def test_matches_generic_to_k10(self):
        for k in range(1, 11):
            assert em_coeff_sqrt_paperform(k) == em_correction_coeff(2, k).coeff


class TestExpansion:
    def test_m2_p1(self):
        e = build_power_sum_expansion(2, 1)
        assert [(t.coeff, t.exponent) for t in e.leading_terms] == [
            (F(2, 3), F(3, 2)),
            (F(1, 2), F(1, 2)),
        ]
        assert e.zeta_arg == F(-1, 2)
        assert [(t.coeff, t.exponent) for t in e.correction_terms] == [(F(1, 24), F(-1, 2))]

    def test_m2_p2_adds_term(self):
        e = build_power_sum_expansion(2, 2)
        assert e.correction_terms[-1] == ExpansionTerm(F(-1, 1920), F(-5, 2))

    def test_m3_p1(self):
        e = build_power_sum_expansion(3, 1)
        assert [(t.coeff, t.exponent) for t in e.leading_terms] == [
            (F(3, 4), F(4, 3)),
            (F(1, 2), F(1, 3)),
        ]
        assert e.zeta_arg == F(-1, 3)
        assert [(t.coeff, t.exponent) for t in e.correction_terms] == [(F(1, 36), F(-2, 3))]

    def test_exponents_strictly_decrease(self):
        for m in (2, 3, 5):
            e = build_power_sum_expansion(m, 6)
            exps = [t.exponent for t in e.terms()]
            assert all(a > b for a, b in zip(exps, exps[1:]))
            # corrections differ by whole integers
            cexp = [t.exponent for t in e.correction_terms]
            assert all((a - b).denominator == 1 for a, b in zip(cexp, cexp[1:]))

    def test_container_validation(self):
        with pytest.raises(ValueError):
            Expansion(2, 0, (ExpansionTerm(F(0), F(1)),), F(-1, 2))
        with pytest.raises(ValueError):
            Expansion(
                2,
                0,
                (ExpansionTerm(F(1), F(1)), ExpansionTerm(F(1), F(1))),
                F(-1, 2),
            )

    def test_json_schema(self):
        e = build_power_sum_expansion(3, 2)
        d = json.loads(e.to_json())
        assert d["m"] == 3 and d["p"] == 2
        assert d["zeta_arg_num"] == -1 and d["zeta_arg_den"] == 3
        assert d["terms"][0] == {"num": 3, "den": 4, "exp_num": 4, "exp_den": 3}
        assert len(d["terms"]) == 4
        for td in d["terms"]:
            assert set(td) == {"num", "den", "exp_num", "exp_den"}
