"""Tests for the accelerated series constants."""

from fractions import Fraction

import mpmath
import pytest

from catalan_functionals.errors import ArgumentError, DivergenceError
from catalan_functionals.series_constants import (c0_constant, catalan_weight_series, constant_by_name,
                                                  constants_for_toll, d0_constant, d1_constant, k_constant,
                                                  weighted_partial_sum, weighted_tail)
from catalan_functionals.tolls import parse_toll


class TestWeightSeries:
    def test_coefficients(self):
        """beta_n/4^n ~ n^(-3/2)/sqrt(pi) (1 - 9/(8n) + 145/(128n^2) - 1155/(1024n^3) + ...)."""
        assert catalan_weight_series(4) == (1, Fraction(-9, 8), Fraction(145, 128), Fraction(-1155, 1024))

    def test_against_weights(self):
        """Six terms reproduce w_1000 to well below 1e-15 relative."""
        c = catalan_weight_series(6)
        with mpmath.workprec(128):
            n = 1000
            w = mpmath.binomial(2 * n, n) / (n + 1) / mpmath.mpf(4) ** n
            series = mpmath.fsum(mpmath.mpf(cj.numerator) / cj.denominator / mpmath.mpf(n) ** j
                                 for j, cj in enumerate(c))
            approx = series / (mpmath.mpf(n) ** 1.5 * mpmath.sqrt(mpmath.pi))
            assert abs(approx / w - 1) < mpmath.mpf(10) ** -15

    def test_needs_a_term(self):
        with pytest.raises(ArgumentError):
            catalan_weight_series(0)


class TestC0:
    def test_bound_meets_tolerance(self):
        const = c0_constant(parse_toll("pow:1/4"))
        assert const.name == "C0"
        assert const.toll == "pow:1/4"
        assert const.bound <= 1e-10

    def test_two_cutoffs_agree(self):
        """Accelerated values at cutoffs 10^3 and 10^4 agree within their bounds."""
        toll = parse_toll("pow:1/4")
        a = c0_constant(toll, cutoff=1000, terms=6)
        b = c0_constant(toll, cutoff=10_000, terms=6)
        assert abs(a.value - b.value) <= a.bound + b.bound + mpmath.mpf(10) ** -20

    def test_scaled_toll(self):
        base = c0_constant(parse_toll("log")).value
        doubled = c0_constant(parse_toll("log*2")).value
        assert abs(doubled - 2 * base) < 1e-12

    def test_custom_toll_is_a_finite_sum(self):
        """1 w_1 + 2 w_2 + 3 w_3 = 1/4 + 1/4 + 15/64."""
        const = c0_constant(parse_toll("custom:1,2,3"))
        assert float(const.value) == pytest.approx(47 / 64, rel=1e-15)
        assert const.bound == 0

    @pytest.mark.parametrize("spec", ["pow:1/2", "pow:1", "path-length"])
    def test_divergent(self, spec):
        with pytest.raises(DivergenceError):
            c0_constant(parse_toll(spec))

    def test_fixed_cutoff_is_a_single_pass(self):
        """An explicit cutoff and term count report their bound instead of raising."""
        const = c0_constant(parse_toll("pow:1/4"), tol=1e-30, cutoff=10, terms=2)
        assert const.cutoff == 10 and const.terms == 2
        assert const.bound > 1e-30

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ArgumentError):
            c0_constant(parse_toll("pow:1/4"), tol=0)

    def test_terms_capped(self):
        with pytest.raises(ArgumentError):
            c0_constant(parse_toll("pow:1/4"), cutoff=1000, terms=13)

    @pytest.mark.slow
    def test_tail_model_against_brute_force(self):
        """The modelled tail over [10^3, 10^5) matches plain summation."""
        toll = parse_toll("pow:1/4")
        with mpmath.workprec(128):
            brute = weighted_partial_sum(toll, 100_000) - weighted_partial_sum(toll, 1000)
            tail_lo, bound_lo = weighted_tail(toll, 1000, 6)
            tail_hi, bound_hi = weighted_tail(toll, 100_000, 6)
            assert abs((tail_lo - tail_hi) - brute) <= bound_lo + bound_hi + mpmath.mpf(10) ** -25


class TestOtherConstants:
    def test_d1_from_d0(self):
        d0, d1 = d0_constant(), d1_constant()
        with mpmath.workprec(128):
            expected = (2 * mpmath.log(2) + mpmath.euler + mpmath.sqrt(mpmath.pi) * d0.value) / mpmath.sqrt(mpmath.pi)
            assert abs(d1.value - expected) < mpmath.mpf(10) ** -30
        assert d1.bound <= 1e-10

    def test_d1_tolerance(self):
        assert d1_constant(1e-8).bound <= 1e-8

    def test_k_constant(self):
        const = k_constant()
        assert const.name == "Kconst"
        assert const.value > 0
        assert const.bound <= 1e-10

    def test_by_name(self):
        assert constant_by_name("D0").name == "D0"
        assert constant_by_name("k").name == "Kconst"
        assert constant_by_name("c0", parse_toll("log")).toll == "log"
        with pytest.raises(ArgumentError):
            constant_by_name("c0")
        with pytest.raises(ArgumentError):
            constant_by_name("e")

    def test_constants_for_toll(self):
        assert set(constants_for_toll(parse_toll("pow:1/2"))) == {"D0", "D1"}
        assert set(constants_for_toll(parse_toll("log"))) == {"C0"}
        assert constants_for_toll(parse_toll("pow:2")) == {}
