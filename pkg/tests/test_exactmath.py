"""
Unit tests for exactmath
"""

import pytest
import sympy
from math import gcd
from fractions import Fraction

from app.exactmath import (
    bernoulli, format_mod_int, format_rational, is_square_free, numerator_divides, prime_factors,
    reduce_rational, require_prime, sigma, t1_conditions, to_rational, valuation,
)


class TestRationals:
    """Tests for rational formatting and reduction."""

    def test_format_integer(self):
        assert format_rational(Fraction(6, 3)) == "2"

    def test_format_fraction(self):
        assert format_rational(Fraction(-129, 2)) == "-129/2"

    def test_to_rational_from_string(self):
        assert to_rational("43/2") == Fraction(43, 2)

    def test_reduce_half_mod_7(self):
        assert reduce_rational(Fraction(1, 2), 7) == 4

    def test_reduce_negative(self):
        assert reduce_rational(-24, 7) == 4

    def test_reduce_denominator_divisible_raises(self):
        with pytest.raises(ValueError, match="denominator"):
            reduce_rational(Fraction(1, 7), 7)

    def test_format_mod_int(self):
        assert format_mod_int(-1, 11) == "10 mod 11"


class TestPrimes:
    """Tests for primality and factor helpers."""

    def test_require_prime_accepts(self):
        assert require_prime(691) == 691

    def test_require_prime_rejects_composite(self):
        with pytest.raises(ValueError, match="must be prime"):
            require_prime(4, "ell")

    def test_square_free(self):
        assert is_square_free(14)
        assert is_square_free(1)
        assert not is_square_free(12)

    def test_prime_factors(self):
        assert prime_factors(14) == [2, 7]
        assert prime_factors(1) == []

    def test_valuation(self):
        assert valuation(19 ** 3 + 1, 7) == 3

    def test_valuation_of_zero_raises(self):
        with pytest.raises(ValueError):
            valuation(0, 7)


class TestBernoulli:
    """Tests for exact Bernoulli numbers."""

    @pytest.mark.parametrize("k,expected", [
        (0, Fraction(1)),
        (1, Fraction(-1, 2)),
        (2, Fraction(1, 6)),
        (4, Fraction(-1, 30)),
        (6, Fraction(1, 42)),
        (12, Fraction(-691, 2730)),
        (3, Fraction(0)),
    ])
    def test_values(self, k, expected):
        assert bernoulli(k) == expected

    def test_negative_index_raises(self):
        with pytest.raises(ValueError):
            bernoulli(-2)

    def test_691_divides_b12_numerator(self):
        assert numerator_divides(691, bernoulli(12) / 12)

    @pytest.mark.parametrize("k", range(2, 62, 2))
    def test_matches_sympy(self, k):
        expected = sympy.bernoulli(k)
        assert bernoulli(k) == Fraction(int(expected.p), int(expected.q))

    @pytest.mark.parametrize("k", range(3, 61, 2))
    def test_odd_indices_vanish(self, k):
        assert bernoulli(k) == 0


class TestSigma:
    """Tests for divisor power sums."""

    def test_sigma_11_of_2(self):
        assert sigma(2, 11) == 2049

    def test_sigma_5_values(self):
        assert [sigma(n, 5) for n in (2, 3, 5)] == [33, 244, 3126]

    def test_sigma_rejects_zero(self):
        with pytest.raises(ValueError):
            sigma(0, 3)

    @pytest.mark.parametrize("a", [1, 3, 5])
    def test_multiplicative(self, a):
        for m in range(1, 51):
            for n in range(1, 51):
                if gcd(m, n) == 1:
                    assert sigma(m * n, a) == sigma(m, a) * sigma(n, a)

    @pytest.mark.parametrize("a", [1, 3, 11])
    def test_matches_sympy(self, a):
        assert [sigma(n, a) for n in range(1, 40)] == [int(sympy.divisor_sigma(n, a)) for n in range(1, 40)]


class TestT1Conditions:
    """Tests for the Eisenstein-congruence hypothesis check."""

    def test_level_19_weight_6_mod_7(self):
        """ℓ = k+1 is accepted because 7³ divides 19³+1."""
        result = t1_conditions(6, 19, 1, 7)
        assert result.ok
        assert result.divides_plus
        assert result.witnesses["ell_valuation"] == 3
        assert result.witnesses["k_plus_one_branch"] is True

    def test_small_ell_fails(self):
        result = t1_conditions(6, 19, 1, 3)
        assert not result.checks["ell_gt_3"]
        assert not result.ok

    def test_ell_5_divides_both(self):
        """5 divides 19³+1 = 6860 as well."""
        assert t1_conditions(6, 19, 1, 5).ok

    def test_non_dividing_ell_fails(self):
        result = t1_conditions(6, 19, 1, 11)
        assert not result.checks["ell_divides_product"]
        assert not result.ok

    def test_odd_weight_raises(self):
        with pytest.raises(ValueError, match="even"):
            t1_conditions(5, 19, 1, 7)

    def test_bad_sign_raises(self):
        with pytest.raises(ValueError, match="eps"):
            t1_conditions(6, 19, 2, 7)

    def test_case_label(self):
        assert t1_conditions(6, 19, 1, 7).case == "ell | p^(k/2)+eps"

    def test_weight_40_level_5_mod_71(self):
        """5 has order 5 modulo 71, so 71 divides 5^20 - 1."""
        result = t1_conditions(40, 5, -1, 71)
        assert result.ok
        assert result.divides_plus
        assert result.case == "ell | p^(k/2)+eps"
        assert all(result.checks.values())
