"""Tests for limit-law moments, variance constants and mean expansions."""

import math
from fractions import Fraction

import mpmath
import pytest

from catalan_functionals.errors import ArgumentError, PoleError
from catalan_functionals.integrals import mk_sequence
from catalan_functionals.limit_law import (airy_omega, alpha_grid, central_limit_moments, ck_sequence, limit_law,
                                           limit_moments, maximize_sigma_sq, mean_asymptotics, mean_residuals,
                                           moment_growth, scaled_limit_checks, shape_limit_moments, sigma_sq,
                                           sigma_sq_half, third_moment_curve, variance_curve, wiener_a0)
from catalan_functionals.numeric import make_field
from catalan_functionals.tolls import parse_toll


class TestClassicalLaws:
    """Airy and Wiener-index specialisations, exact in rationals."""

    def test_airy(self):
        """C_k(alpha = 1) = 2 Omega_k for k <= 20."""
        omega = airy_omega(20)
        assert omega[:2] == [Fraction(1, 2), Fraction(5, 4)]
        assert ck_sequence(1, 20) == [2 * w for w in omega]

    def test_airy_second_moment(self):
        """E Y^2 = 10/3 at alpha = 1."""
        assert float(limit_moments(1, 2)[1]) == pytest.approx(10 / 3, abs=1e-12)

    def test_wiener(self):
        """2^(2l-1) C_l(alpha = 2) = a_{0,l} for l <= 15, starting 1, 49."""
        a0 = wiener_a0(15)
        assert a0[:2] == [1, 49]
        c = ck_sequence(2, 15)
        assert [2 ** (2 * l - 1) * c[l - 1] for l in range(1, 16)] == a0

    def test_exact_and_float_paths_agree(self):
        exact = ck_sequence(3, 6)
        approx = ck_sequence(3, 6, exact=False)
        for e, f in zip(exact, approx):
            assert float(f) == pytest.approx(float(e), rel=1e-12)


class TestMoments:
    def test_law_fields(self):
        law = limit_law(1, 4)
        assert law.K == 4
        assert float(law.sigma2) == pytest.approx(10 / 3 - math.pi, abs=1e-12)
        assert abs(law.central_moments[0]) < mpmath.mpf(10) ** -25
        assert abs(law.central_moments[1] - law.sigma2) < mpmath.mpf(10) ** -20

    def test_half_is_a_pole(self):
        with pytest.raises(PoleError):
            limit_moments("1/2", 3)
        with pytest.raises(PoleError):
            sigma_sq(Fraction(1, 2))

    def test_bad_arguments(self):
        with pytest.raises(ArgumentError):
            ck_sequence(0, 3)
        with pytest.raises(ArgumentError):
            ck_sequence(1, 0)
        with pytest.raises(ArgumentError):
            ck_sequence("1/3", 3, exact=True)

    def test_shape_limit(self):
        """Normal limit with sigma^2 = 8(1 - log 2); C_{2k,0} obey their quadratic recurrence."""
        shape = shape_limit_moments(6)
        s2 = 8 * (1 - math.log(2))
        assert float(shape.sigma2) == pytest.approx(2.454823, abs=1e-6)
        assert float(shape.moments[1]) == pytest.approx(s2)
        assert float(shape.moments[3]) == pytest.approx(3 * s2 ** 2)
        assert shape.moments[2] == 0
        assert float(shape.c2k0[0]) == pytest.approx(s2)
        assert shape.recurrence_deviation < mpmath.mpf(10) ** -30

    def test_moment_growth(self):
        growth = moment_growth(1, 6)
        raw = limit_moments(1, 6)
        assert len(growth) == 6
        assert float(growth[0]) == pytest.approx(float(raw[0]))
        assert all(g > 0 for g in growth)

    @pytest.mark.parametrize("alpha", ["1/4", "1", "2"])
    def test_moment_growth_stays_bounded(self, alpha):
        """|E Y^k / k!|^(1/k) does not grow over k <= 30."""
        growth = [float(g) for g in moment_growth(alpha, 30)]
        assert all(math.isfinite(g) and g > 0 for g in growth)
        assert max(growth) < 10
        assert max(growth[20:]) <= max(growth[:20])

    @pytest.mark.parametrize("alpha", ["1/4", "3/4", "1", "2"])
    def test_variance_from_moments(self, alpha):
        """E Y^2 - (E Y)^2 = sigma^2(alpha)."""
        raw = limit_moments(alpha, 2)
        s2 = sigma_sq(alpha)
        assert abs(raw[1] - raw[0] ** 2 - s2) <= 1e-12 * abs(s2)


class TestVariance:
    """sigma^2 landscape."""

    @pytest.mark.parametrize("alpha", ["1/4", "3/4", "1", "2"])
    def test_recurrences_agree(self, alpha):
        """m_2 from the J-integral recurrence equals the closed form."""
        m = mk_sequence(alpha, 2)
        assert float(m.m[2]) == pytest.approx(float(sigma_sq(alpha)), abs=1e-8)

    def test_half_limit(self):
        """Both sides of alpha = 1/2 approach 8 log 2/pi - pi/2."""
        limit = float(sigma_sq_half())
        assert limit == pytest.approx(8 * math.log(2) / math.pi - math.pi / 2)
        lo = float(sigma_sq(Fraction(1, 2) - Fraction(1, 10 ** 4)))
        hi = float(sigma_sq(Fraction(1, 2) + Fraction(1, 10 ** 4)))
        assert abs(lo - limit) <= 1e-4 and abs(hi - limit) <= 1e-4
        assert abs((lo + hi) / 2 - limit) <= 1e-6

    def test_maximum(self):
        alpha, value = maximize_sigma_sq()
        assert alpha == pytest.approx(0.682607, abs=1e-3)
        assert float(value) == pytest.approx(0.198946, abs=1e-3)

    def test_large_and_small_alpha(self):
        """alpha sigma^2 -> sqrt(2) - 1 as alpha grows; sigma^2/alpha -> 4(1 - log 2) as alpha shrinks."""
        assert float(100 * sigma_sq(100)) == pytest.approx(math.sqrt(2) - 1, rel=0.05)
        assert float(sigma_sq("1/1000") * 1000) == pytest.approx(4 * (1 - math.log(2)), rel=0.01)

    def test_scaled_checks(self):
        """Gaussian limits of the rescaled moments at both ends."""
        large = scaled_limit_checks(10 ** 4, 6)
        assert large.regime == "large"
        assert all(row.deviation <= 0.02 for row in large.rows)
        small = scaled_limit_checks("1/1000", 4)
        assert small.regime == "small"
        assert small.rows[1].deviation <= 0.01

    def test_small_alpha_mean_vanishes(self):
        """alpha^(-1/2) E Y -> 0, so centred and raw rescaled moments share their limits."""
        scaled = []
        for alpha in (Fraction(1, 10 ** 3), Fraction(1, 10 ** 5)):
            mean = limit_moments(alpha, 1)[0]
            a = mpmath.mpf(alpha.numerator) / alpha.denominator
            expected = mpmath.gamma(a - mpmath.mpf(1) / 2) / mpmath.gamma(a)
            assert float(mean) == pytest.approx(float(expected), rel=1e-12)
            scaled.append(abs(float(mean)) / math.sqrt(alpha))
        assert scaled[1] < scaled[0] / 5 and scaled[1] < 0.02
        small = scaled_limit_checks("1/100000", 2)
        assert abs(small.rows[0].value) < 1e-20
        assert small.rows[1].deviation <= 0.01

    def test_variance_curve(self):
        grid = alpha_grid()
        assert len(grid) == 30 and grid[0] == Fraction(1, 10) and grid[-1] == 3
        rows = variance_curve(grid)
        assert all(v > 0 for _, v in rows)
        peak = max(rows, key=lambda r: r[1])[0]
        assert peak in (Fraction(6, 10), Fraction(7, 10))

    def test_empty_grid(self):
        with pytest.raises(ArgumentError):
            alpha_grid(2, 1)
        with pytest.raises(ArgumentError):
            variance_curve([])

    @pytest.mark.slow
    def test_third_central_moment_positive(self):
        """E(Y - EY)^3 > 0 on 0.1, 0.2, ..., 3.0."""
        rows = third_moment_curve(alpha_grid())
        assert len(rows) == 30
        assert all(v > 0 for _, v in rows)

    def test_central_moments(self):
        central = central_limit_moments(2, 3)
        raw = limit_moments(2, 3)
        expected = raw[2] - 3 * raw[1] * raw[0] + 2 * raw[0] ** 3
        assert float(central[2]) == pytest.approx(float(expected), rel=1e-9)


class TestMeanAsymptotics:
    """Mean expansions transferred to a_n."""

    def test_path_length_exact(self):
        """For b_n = n, a_n = 1/w_n - 2n - 1 exactly, so the residual is -2n - 1."""
        for n, res in mean_residuals(parse_toll("pow:1"), 40):
            assert float(res) == pytest.approx(-2 * n - 1, abs=1e-15)

    def test_expansion_shapes(self):
        half = mean_asymptotics(parse_toll("pow:1/2"))
        assert half.expansion.symbols == ["D0"]
        assert half.expansion.remainder_exponent == Fraction(1, 2) - Fraction(1, 100)
        small = mean_asymptotics(parse_toll("pow:1/4"))
        assert small.expansion.symbols == ["C0"]
        assert [t.exponent for t in small.expansion.terms] == [Fraction(-1, 2), Fraction(-1, 4)]
        log = mean_asymptotics(parse_toll("log"))
        assert log.expansion.has_constant
        assert len(log.expansion.terms) == 3

    def test_unresolved_constant(self):
        with pytest.raises(ArgumentError):
            mean_asymptotics(parse_toll("log")).approx_mean(10)

    def test_other_tolls_refused(self):
        with pytest.raises(ArgumentError):
            mean_asymptotics(parse_toll("path-length"))

    @pytest.mark.parametrize("spec", ["log", "pow:1/2"])
    def test_residual_settles(self, spec):
        """The transferred expansion leaves an O(1) residual that stops moving."""
        residuals = dict(mean_residuals(parse_toll(spec), 2000, make_field("float", 53)))
        late = [float(residuals[n]) for n in range(1000, 2001)]
        assert max(abs(r) for r in late) < 10
        assert max(late) - min(late) < 1
