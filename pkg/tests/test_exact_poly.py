"""Tests for exact polynomials and the semigroup identities"""
import math
from fractions import Fraction

import pytest

from src.exact_poly import (
    CONVENTIONS,
    RationalPolynomial,
    classical_convolution_check,
    d_polynomial,
    d_tilde_shifted,
    log_symbol,
    resolve_boundary_convention,
    semigroup_identity_check,
    semigroup_report,
    semigroup_sides,
    w_log,
    w_zero,
)
from src.multiplicative import d_exact, d_tilde


class TestRationalPolynomial:
    """Test sparse polynomial arithmetic"""

    def setup_method(self):
        self.t = RationalPolynomial.variable("t")
        self.s = RationalPolynomial.variable("s")

    def test_square_of_sum(self):
        lhs = (self.t + self.s) * (self.t + self.s)
        rhs = self.t * self.t + 2 * self.t * self.s + self.s * self.s
        assert lhs == rhs
        assert lhs.degree == 2
        assert lhs.num_terms == 3

    def test_cancellation_drops_terms(self):
        assert (self.t - self.t).num_terms == 0
        assert self.t - self.t == 0

    def test_scalar_arithmetic(self):
        p = Fraction(1, 2) * self.t + 3
        assert p.evaluate({"t": Fraction(4)}) == 5
        assert (1 - p).evaluate({"t": Fraction(2)}) == -3

    def test_specialise(self):
        p = self.t * self.s + self.s
        q = p.specialise({"t": 2})
        assert q == 3 * self.s
        assert q.variables == ["s"]

    def test_degree_in(self):
        p = self.t * self.t * self.s + self.s
        assert p.degree_in("t") == 2
        assert p.degree_in("s") == 1
        assert p.degree_in("w") == 0


class TestShiftedDivisorPolynomials:
    def test_prime_is_constant_one(self):
        assert d_tilde_shifted(7, "t") == 1

    def test_four(self):
        expected = (RationalPolynomial.variable("t") + 2 * RationalPolynomial.variable(log_symbol(2)) + 1) * Fraction(1, 2)
        assert d_tilde_shifted(4, "t") == expected

    def test_eight_at_origin(self):
        poly = d_tilde_shifted(8, "s")
        assert poly.evaluate({"s": Fraction(0), log_symbol(2): Fraction(0)}) == Fraction(1, 3)

    def test_w_log_uses_prime_basis(self):
        assert w_log(12) == 2 * RationalPolynomial.variable("wln2") + RationalPolynomial.variable("wln3")

    def test_specialisation_matches_float(self):
        t, w = Fraction(1, 3), Fraction(-2, 7)
        poly = d_tilde_shifted(360, "t")
        assignment = {"t": float(t)}
        for p in (2, 3, 5):
            assignment[log_symbol(p)] = float(w) * math.log(p)
        expected = d_tilde(float(t) + float(w) * math.log(360), 360)
        assert poly.evaluate(assignment) == pytest.approx(expected.real, rel=1e-10)

    def test_d_polynomial_matches_exact(self):
        for n in (1, 12, 36, 97):
            poly = d_polynomial(n, "v")
            assert poly.evaluate({"v": Fraction(5, 3)}) == d_exact(Fraction(5, 3), n)


class TestSemigroupIdentity:
    def test_reciprocal_convention_resolved(self):
        assert resolve_boundary_convention(12) == "reciprocal"
        assert "reciprocal" in CONVENTIONS

    def test_prime_case(self):
        lhs, rhs = semigroup_sides(13, "reciprocal")
        assert lhs == rhs
        assert lhs == RationalPolynomial.variable("t") + RationalPolynomial.variable("s")

    def test_other_conventions_fail_on_primes(self):
        for convention in ("unit", "zero"):
            lhs, rhs = semigroup_sides(5, convention)
            assert lhs != rhs

    @pytest.mark.parametrize("n", [4, 12, 36, 60, 64, 210])
    def test_identity_exact(self, n):
        assert semigroup_identity_check(n)

    def test_w_zero_gives_classical_identity(self):
        lhs, rhs = semigroup_sides(12, "reciprocal")
        assert w_zero(lhs) == w_zero(rhs)
        t, s = RationalPolynomial.variable("t"), RationalPolynomial.variable("s")
        assert w_zero(lhs) == d_polynomial(12, t + s)

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            semigroup_sides(6, "half")

    def test_rejects_n_below_two(self):
        with pytest.raises(ValueError):
            semigroup_sides(1, "reciprocal")


@pytest.mark.parametrize("n", [1, 2, 36, 360])
def test_classical_convolution(n):
    assert classical_convolution_check(n, trials=3, seed=11)


def test_semigroup_report_rows():
    rows = semigroup_report(30)
    assert [r["n"] for r in rows] == list(range(2, 31))
    assert all(r["ok"] and r["classical_ok"] for r in rows)
    assert all(r["convention"] == "reciprocal" for r in rows)
    by_n = {r["n"]: r for r in rows}
    assert by_n[16]["max_degree"] >= 3


def test_semigroup_report_up_to_five_hundred():
    rows = semigroup_report(500)
    assert len(rows) == 499
    assert all(r["ok"] for r in rows)
    assert all(r["classical_ok"] for r in rows)
