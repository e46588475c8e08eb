"""Exact rational coefficients of the asymptotic expansion of sum k^(1/m).

Euler-Maclaurin applied to f(x) = x^(1/m) gives

    sum_{k=1..n} k^(1/m)
        = m/(m+1) n^(1+1/m) + 1/2 n^(1/m) + zeta(-1/m)
          + sum_{k=1..p} C(1/m, 2k-1) (2k-1)! B_2k / (2k)! * n^(1/m-(2k-1))
          + o(n^(1/m-2p-1))

where C(a, j) is the generalized binomial coefficient.  This module
builds the coefficient/exponent lists as exact Fractions; numerical
evaluation happens elsewhere, so every coefficient can be validated by
exact equality.  Note the correction exponents decay like 2k - 1 - 1/m
(for m = 2: 2k - 3/2); an alternative printing with k - 1/2 circulates,
and the residual analysis adjudicates between the two empirically.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exact import bernoulli

__all__ = [
    "ExpansionTerm",
    "Expansion",
    "binom_rational",
    "em_correction_coeff",
    "em_coeff_sqrt_paperform",
    "build_power_sum_expansion",
]


@dataclass(frozen=True)
class ExpansionTerm:
    """One term coeff * n^exponent, both exact rationals."""

    coeff: Fraction
    exponent: Fraction


@dataclass(frozen=True)
class Expansion:
    """Ordered term list for the power-sum expansion, plus the slot for
    the additive constant zeta(-1/m).

    Instances built by build_power_sum_expansion carry the canonical
    leading terms (m/(m+1)) n^(1+1/m) and (1/2) n^(1/m) and p correction
    terms with exponents 1/m - (2k-1); the container itself only
    enforces nonzero coefficients and strictly decreasing exponents, so
    degenerate expansions can be constructed for testing evaluators.
    """

    m: int
    p: int
    leading_terms: tuple[ExpansionTerm, ...]
    zeta_arg: Fraction
    correction_terms: tuple[ExpansionTerm, ...] = field(default=())

    def __post_init__(self):
        exps = [t.exponent for t in self.terms()]
        for t in self.terms():
            if t.coeff == 0:
                raise ValueError("expansion terms must have nonzero coefficients")
        if any(a <= b for a, b in zip(exps, exps[1:])):
            raise ValueError("expansion exponents must be strictly decreasing")

    def terms(self) -> tuple[ExpansionTerm, ...]:
        """All polynomial-like terms in decreasing-exponent order
        (the zeta constant is handled separately)."""
        return self.leading_terms + self.correction_terms

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "p": self.p,
            "terms": [
                {
                    "num": t.coeff.numerator,
                    "den": t.coeff.denominator,
                    "exp_num": t.exponent.numerator,
                    "exp_den": t.exponent.denominator,
                }
                for t in self.terms()
            ],
            "zeta_arg_num": self.zeta_arg.numerator,
            "zeta_arg_den": self.zeta_arg.denominator,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def binom_rational(alpha, j: int) -> Fraction:
    """Generalized binomial coefficient C(alpha, j) for rational alpha:
    the product prod_{k=1..j} (alpha - k + 1) / k, exactly."""
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    alpha = Fraction(alpha)
    out = Fraction(1)
    for k in range(1, j + 1):
        out *= Fraction(alpha - k + 1, k)
    return out


def em_correction_coeff(m: int, k: int) -> ExpansionTerm:
    """k-th Euler-Maclaurin correction term for f(x) = x^(1/m).

    coeff = C(1/m, 2k-1) (2k-1)! B_2k / (2k)!  at exponent 1/m - (2k-1);
    the binomial times the factorial is exactly the (2k-1)-st derivative
    coefficient of x^(1/m).
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    coeff = (
        binom_rational(Fraction(1, m), 2 * k - 1)
        * factorial(2 * k - 1)
        * bernoulli(2 * k)
        / factorial(2 * k)
    )
    return ExpansionTerm(coeff, Fraction(1, m) - (2 * k - 1))


def em_coeff_sqrt_paperform(k: int) -> Fraction:
    """The printed closed form of the m = 2 correction coefficient:

        B_2k (4k-1)! / (4^(2k-1) (2k-1)! (2k)! (4k-1) (4k-3))

    Kept as an independent transcription; must equal
    em_correction_coeff(2, k).coeff for all k.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    num = bernoulli(2 * k) * factorial(4 * k - 1)
    den = (
        4 ** (2 * k - 1)
        * factorial(2 * k - 1)
        * factorial(2 * k)
        * (4 * k - 1)
        * (4 * k - 3)
    )
    return num / den


def build_power_sum_expansion(m: int, p: int) -> Expansion:
    """Expansion of sum_{k=1..n} k^(1/m) with p correction terms.

    Leading terms (m/(m+1)) n^(1+1/m) and (1/2) n^(1/m), the constant
    slot zeta(-1/m), and corrections from em_correction_coeff.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    leading = (
        ExpansionTerm(Fraction(m, m + 1), 1 + Fraction(1, m)),
        ExpansionTerm(Fraction(1, 2), Fraction(1, m)),
    )
    corrections = tuple(em_correction_coeff(m, k) for k in range(1, p + 1))
    return Expansion(m, p, leading, Fraction(-1, m), corrections)
