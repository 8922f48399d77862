"""Tests for L-function evaluation"""
import cmath
import math

import mpmath
import numpy as np
import pytest

from src.errors import DomainError, SeriesDivergenceError, TruncationCapError
from src.lfunction import (
    DomainSpec,
    EvalMode,
    L_eval,
    L_power_coefficients,
    SeriesValue,
    adaptive_sum,
    analytic_abscissa,
    circle_nodes,
    doubling_ratio,
    euler_product,
    ln_L,
    ln_L_derivative,
    ln_L_on_circle,
    make_context,
    phi_X,
)
from src.multiplicative import divisors
from src.spec_models import MultiplicativeSpec

ZETA_2 = math.pi**2 / 6
CATALAN = 0.915965594177219015


class TestZetaContext:
    """Test the all-ones spec, where L is the Riemann zeta function"""

    def setup_method(self):
        self.ctx = make_context(MultiplicativeSpec.all_ones(), 2.0, tol=1e-10)

    def test_gamma(self):
        assert self.ctx.gamma == pytest.approx(math.log(ZETA_2), abs=1e-12)

    def test_L_at_two_and_four(self):
        assert L_eval(self.ctx, 2).value == pytest.approx(ZETA_2, abs=1e-10)
        assert L_eval(self.ctx, 4).value == pytest.approx(math.pi**4 / 90, abs=1e-10)

    def test_L_off_real_axis(self):
        s = 2.5 + 3j
        expected = complex(mpmath.zeta(s))
        assert L_eval(self.ctx, s).value == pytest.approx(expected, abs=1e-10)

    def test_ln_L_matches_log(self):
        s = 3 - 1j
        assert ln_L(self.ctx, s).value == pytest.approx(cmath.log(complex(mpmath.zeta(s))), abs=1e-10)

    def test_log_derivative(self):
        expected = float(mpmath.zeta(2, 1, 1) / mpmath.zeta(2))
        assert ln_L_derivative(self.ctx, 2).value == pytest.approx(expected, abs=1e-9)

    def test_raw_mode_agrees_with_accelerated(self):
        raw = L_eval(self.ctx, 3, mode=EvalMode.RAW)
        accelerated = L_eval(self.ctx, 3)
        assert abs(raw.value - accelerated.value) <= raw.tail_estimate + 1e-9
        raw_log = ln_L(self.ctx, 3, mode=EvalMode.RAW)
        assert raw_log.value == pytest.approx(math.log(float(mpmath.zeta(3))), abs=1e-8)

    def test_left_of_abscissa(self):
        with pytest.raises(DomainError) as excinfo:
            L_eval(self.ctx, 1.5)
        assert excinfo.value.parameter == "s"

    def test_power_coefficients(self):
        coefficients = L_power_coefficients(self.ctx, 2, 12)
        assert np.allclose(coefficients, [len(divisors(n)) for n in range(1, 13)])

    def test_euler_product(self):
        assert euler_product(self.ctx, 2, 10**5) == pytest.approx(ZETA_2, rel=1e-5)

    def test_phi_x(self):
        assert phi_X(self.ctx, 0) == pytest.approx(0, abs=1e-14)
        expected = math.log(ZETA_2) - math.log(float(mpmath.zeta(3)))
        assert phi_X(self.ctx, 1).real == pytest.approx(expected, abs=1e-10)

    def test_phi_x_rejects_negative(self):
        with pytest.raises(DomainError):
            phi_X(self.ctx, -0.5)


def test_divergent_sigma_rejected():
    with pytest.raises(SeriesDivergenceError):
        make_context(MultiplicativeSpec.all_ones(), 1.0)


def test_explicit_divergent_factor_rejected():
    with pytest.raises(SeriesDivergenceError):
        make_context(MultiplicativeSpec.explicit_primes({2: 2.0}), 1.0)


def test_character_mod_four():
    ctx = make_context(MultiplicativeSpec.builtin("chi4"), 2.0, tol=1e-10)
    assert L_eval(ctx, 2).value == pytest.approx(CATALAN, abs=1e-10)
    assert ln_L(ctx, 2).value == pytest.approx(math.log(CATALAN), abs=1e-10)


def test_character_gamma_is_odd_zeta():
    ctx = make_context(MultiplicativeSpec.builtin("chi4"), 2.0)
    # sum over odd n of n^-2 = (1 - 1/4) zeta(2)
    assert ctx.gamma == pytest.approx(math.log(0.75 * ZETA_2), abs=1e-12)


def test_explicit_primes_closed_form():
    spec = MultiplicativeSpec.explicit_primes({2: 0.5, 3: 0.25})
    ctx = make_context(spec, 0.0)
    expected = 1 / ((1 - 0.25) * (1 - 0.25 / 3))
    assert L_eval(ctx, 1).value == pytest.approx(expected, abs=1e-12)
    assert ln_L(ctx, 1).value == pytest.approx(math.log(expected), abs=1e-12)
    assert ctx.gamma == pytest.approx(-math.log(0.5) - math.log(0.75), abs=1e-12)


def test_domain_spec():
    ctx = make_context(MultiplicativeSpec.all_ones(), 2.0)
    domain = DomainSpec.for_rho(ctx, 0.5)
    assert domain.sigma0 == pytest.approx(2 + 0.5 * ctx.gamma)
    assert domain.contains(3 + 1j, 0.5j)
    assert not domain.contains(2.1, 0.1)
    assert not domain.contains(3, 0.6)
    with pytest.raises(DomainError):
        DomainSpec(sigma0=2.0, rho=0.0)


class TestAdaptiveSum:
    def setup_method(self):
        self.terms = lambda lo, hi: 1.0 / np.arange(lo, hi, dtype=np.float64) ** 3

    def test_converges(self):
        result = adaptive_sum(self.terms, 1, 1e-9, ratio=doubling_ratio(3))
        assert result.value.real == pytest.approx(float(mpmath.zeta(3)), abs=1e-8)
        assert result.tail_estimate < 1e-9

    def test_cap_carries_partial(self):
        with pytest.raises(TruncationCapError) as excinfo:
            adaptive_sum(self.terms, 1, 1e-30, start=16, cap=256)
        partial = excinfo.value.partial
        assert isinstance(partial, SeriesValue)
        assert not partial.guaranteed
        assert partial.value.real == pytest.approx(float(mpmath.zeta(3)), abs=1e-3)


def test_series_value_validation():
    with pytest.raises(ValueError):
        SeriesValue(1 + 0j, 10, -1.0)
    assert SeriesValue(1 + 2j, 4, 0.5).to_dict() == {"value": [1.0, 2.0], "terms": 4, "tail": 0.5, "guaranteed": True}


def test_doubling_ratio():
    assert doubling_ratio(3) == pytest.approx(0.25)
    assert doubling_ratio(1) is None


class TestLogarithm:
    """exp(ln L) = L and |ln L| <= gamma on the closed half-plane Re(s) >= sigma"""

    @pytest.mark.parametrize("name, sigma", [("zeta", 1.4), ("chi4", 1.2)])
    def test_exp_of_log_is_L(self, name, sigma):
        ctx = make_context(MultiplicativeSpec.builtin(name), sigma)
        for re in (sigma, sigma + 0.5, sigma + 1.0):
            for im in (-1.0, 0.0, 1.0):
                s = complex(re, im)
                L = L_eval(ctx, s).value
                log_L = ln_L(ctx, s).value
                assert abs(cmath.exp(log_L) - L) < 1e-10 * abs(L)
                assert abs(log_L) <= ctx.gamma + 1e-12


class TestCircleContinuation:
    def setup_method(self):
        self.ctx = make_context(MultiplicativeSpec.all_ones(), 1.4, tol=1e-10)

    def test_abscissa_of_each_kind(self):
        assert analytic_abscissa(self.ctx) == 1.0
        assert analytic_abscissa(make_context(MultiplicativeSpec.builtin("chi4"), 1.2)) == 1.0
        halves = make_context(MultiplicativeSpec.explicit_primes({2: 0.5, 3: 0.25}), 0.0)
        assert analytic_abscissa(halves) == pytest.approx(max(math.log(0.5) / math.log(2), math.log(0.25) / math.log(3)))
        assert analytic_abscissa(make_context(MultiplicativeSpec.explicit_primes({2: 4.0}), 3.0)) == pytest.approx(2.0)
        assert analytic_abscissa(make_context(MultiplicativeSpec.explicit_primes({}), 0.0)) == -math.inf

    def test_log_zeta_left_of_sigma(self):
        center, radius = 1.6 + 0.5j, 0.45
        values = ln_L_on_circle(self.ctx, center, radius, count=16)
        nodes = circle_nodes(center, radius, 16)
        assert min(nodes.real) < self.ctx.sigma
        expected = [complex(mpmath.log(mpmath.zeta(x))) for x in nodes]
        assert np.allclose(values, expected, atol=1e-9)

    def test_explicit_product_on_circle(self):
        ctx = make_context(MultiplicativeSpec.explicit_primes({2: 0.5, 3: -0.25j}), 0.0)
        nodes = circle_nodes(1.0, 0.5, 8)
        values = ln_L_on_circle(ctx, 1.0, 0.5, count=8)
        assert np.allclose(values, [ln_L(ctx, x).value for x in nodes], atol=1e-12)

    def test_circle_must_clear_the_pole(self):
        with pytest.raises(DomainError) as excinfo:
            ln_L_on_circle(self.ctx, 1.5, 0.6)
        assert excinfo.value.parameter == "s"


def test_gamma_does_not_depend_on_tol():
    loose = make_context(MultiplicativeSpec.builtin("chi4"), 1.2, tol=1e-3)
    tight = make_context(MultiplicativeSpec.builtin("chi4"), 1.2, tol=1e-12)
    assert loose.gamma == tight.gamma
    assert (loose.tol, tight.tol) == (1e-3, 1e-12)
