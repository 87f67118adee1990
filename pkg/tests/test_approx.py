"""Tests for the classical approximation machinery."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdoenc.approx import (
    CHEB_DEGREE_CAP,
    ExpSumApprox,
    RealPolynomial,
    arcsin_compose,
    arcsin_taylor_coefficients,
    cheb_fit,
    gaussian_poly,
    inv_elliptic_terms,
    inverse_exp_sum,
)
from pdoenc.simcore import ContractViolationError


class TestRealPolynomial:
    def test_from_monomial_square(self):
        p = RealPolynomial.from_monomial([0.0, 0.0, 1.0], "even")
        # x^2 = (T_0 + T_2)/2.
        assert np.allclose(p.coeffs, [0.5, 0.0, 0.5])
        assert p.degree == 2

    def test_parity_validation(self):
        with pytest.raises(ContractViolationError):
            RealPolynomial(np.array([0.0, 1.0]), "even")
        with pytest.raises(ContractViolationError):
            RealPolynomial(np.array([1.0, 0.0, 0.3]), "odd")
        with pytest.raises(ContractViolationError):
            RealPolynomial(np.array([1.0]), "bogus")

    def test_sup_norm_chebyshev(self):
        t3 = RealPolynomial(np.array([0.0, 0.0, 0.0, 1.0]), "odd")
        assert t3.sup_norm() == pytest.approx(1.0, abs=1e-6)

    def test_scaled(self):
        p = RealPolynomial(np.array([0.0, 2.0]), "odd").scaled(0.25)
        assert p(1.0) == pytest.approx(0.5)

    @given(
        st.lists(st.floats(-3, 3), min_size=1, max_size=6),
        st.floats(-1, 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_from_monomial_matches_polyval(self, mono, x):
        p = RealPolynomial.from_monomial(mono)
        assert p(x) == pytest.approx(np.polyval(mono[::-1], x), abs=1e-9)


class TestChebFit:
    def test_cosine(self):
        fit = cheb_fit(np.cos, (-np.pi, np.pi), 1e-8)
        assert fit.parity == "even"
        y = np.linspace(-np.pi, np.pi, 501)
        assert np.max(np.abs(fit(y / np.pi) - np.cos(y))) <= 1e-8

    def test_cubic_is_odd_and_exact_degree(self):
        fit = cheb_fit(lambda y: y**3, (-2.0, 2.0), 1e-10)
        assert fit.parity == "odd"
        assert fit.degree == 3
        assert fit(0.5) == pytest.approx(1.0)  # y = 1, y^3 = 1, scaled by 2^3/8

    def test_asymmetric_interval(self):
        fit = cheb_fit(lambda y: y * y, (0.0, 2.0), 1e-10)
        assert fit.parity == "none"
        assert fit(0.0) == pytest.approx(1.0)  # midpoint y = 1

    def test_error_budget_respected(self):
        delta = 1e-5
        fit = cheb_fit(lambda y: np.exp(-0.5 * y * y), (-4.0, 4.0), delta)
        y = np.linspace(-4, 4, 2001)
        assert np.max(np.abs(fit(y / 4) - np.exp(-0.5 * y * y))) <= delta

    def test_bad_arguments(self):
        with pytest.raises(ContractViolationError):
            cheb_fit(np.cos, (1.0, -1.0), 1e-3)
        with pytest.raises(ContractViolationError):
            cheb_fit(np.cos, (-1.0, 1.0), 0.0)


class TestArcsinTaylor:
    def test_leading_coefficients(self):
        c = arcsin_taylor_coefficients(7)
        assert c[1] == pytest.approx(1.0)
        assert c[3] == pytest.approx(1.0 / 6.0)
        assert c[5] == pytest.approx(3.0 / 40.0)
        assert c[7] == pytest.approx(5.0 / 112.0)
        assert np.all(c[0::2] == 0.0)

    def test_nonnegative_and_convergent(self):
        c = arcsin_taylor_coefficients(61)
        assert np.all(c >= 0.0)
        x = 0.5
        val = np.polyval(c[::-1], x)
        assert val == pytest.approx(np.arcsin(x), abs=1e-12)


class TestArcsinCompose:
    P = 8
    theta = np.pi / (3 * 8)

    def _defect(self, poly, g, C):
        # Accuracy is promised on the attainable spectrum |k| <= P - 1.
        k = np.arange(-(self.P - 1), self.P)
        return np.max(np.abs(C * poly(np.sin(self.theta * k)) - g(k)))

    @pytest.mark.parametrize(
        "g,C",
        [
            (lambda y: np.asarray(y, dtype=float), 8.0),
            (lambda y: np.asarray(y, dtype=float) ** 2, 64.0),
            (lambda y: np.exp(-0.5 * np.asarray(y, dtype=float) ** 2), 1.0),
        ],
    )
    def test_lattice_accuracy_and_bound(self, g, C):
        eps = 1e-3
        u = cheb_fit(g, (-self.P, self.P), eps / 3)
        poly = arcsin_compose(u, self.theta, self.P, C, None, eps)
        assert self._defect(poly, g, C) <= eps
        x = np.cos(np.linspace(0, np.pi, 200001))
        assert np.max(np.abs(poly(x))) <= 1.0
        assert poly.parity == u.parity
        assert poly.degree <= CHEB_DEGREE_CAP

    def test_tight_tolerance(self):
        eps = 1e-4
        g = lambda y: 2.0 * np.asarray(y, dtype=float) / self.P
        u = cheb_fit(g, (-self.P, self.P), eps / 3)
        poly = arcsin_compose(u, self.theta, self.P, 2.0, None, eps)
        assert self._defect(poly, g, 2.0) <= eps

    def test_constant(self):
        u = cheb_fit(lambda y: 0.6 + 0.0 * np.asarray(y), (-4.0, 4.0), 1e-5)
        poly = arcsin_compose(u, np.pi / 12, 4, 1.0, None, 1e-4)
        x = np.linspace(-1, 1, 101)
        assert np.max(np.abs(poly(x) - 0.6)) <= 1e-4

    def test_requires_parity(self):
        u = RealPolynomial(np.array([0.2, 0.3]), "none")
        with pytest.raises(ContractViolationError):
            arcsin_compose(u, 0.1, 4, 1.0, None, 1e-3)

    def test_theta_range(self):
        u = RealPolynomial(np.array([0.0, 0.3]), "odd")
        with pytest.raises(ContractViolationError):
            arcsin_compose(u, np.pi / 2, 4, 1.0, None, 1e-3)


class TestGaussianPoly:
    def test_accuracy_and_bound(self):
        a, b, delta = 0.5, 4.0, 1e-4
        poly = gaussian_poly(a, b, delta)
        assert poly.parity == "even"
        y = np.linspace(0, b, 1001)
        assert np.max(np.abs(np.exp(-a * y * y) - poly(y / b))) <= delta
        assert poly.sup_norm(8001) <= 1.0

    def test_degree_grows_slowly(self):
        # Degree scales like sqrt(a) b for fixed accuracy.
        d1 = gaussian_poly(1.0, 4.0, 1e-6).degree
        d4 = gaussian_poly(4.0, 4.0, 1e-6).degree
        assert d1 < d4 <= 3 * d1

    def test_bad_arguments(self):
        with pytest.raises(ContractViolationError):
            gaussian_poly(-1.0, 1.0, 1e-3)
        with pytest.raises(ContractViolationError):
            gaussian_poly(1.0, 1.0, 2.0)


class TestInverseExpSum:
    @pytest.mark.parametrize("delta,eps", [(1e-2, 1e-3), (1e-3, 1e-4)])
    def test_relative_error(self, delta, eps):
        s = inverse_exp_sum(delta, eps)
        r = np.geomspace(delta, 1.0, 5000)
        assert np.max(np.abs(s(r) - 1.0 / r) * r) <= eps
        assert np.all(s.weights > 0)
        assert np.all(s.exponents > 0)
        assert s.validity == (delta, 1.0)

    def test_term_count_scales_logarithmically(self):
        m1 = inverse_exp_sum(1e-2, 1e-3).M
        m2 = inverse_exp_sum(1e-4, 1e-3).M
        assert m1 < m2 < 4 * m1

    def test_bad_arguments(self):
        with pytest.raises(ContractViolationError):
            inverse_exp_sum(0.0, 1e-3)
        with pytest.raises(ContractViolationError):
            inverse_exp_sum(1e-2, 0.9)


class TestInvElliptic:
    def test_error_and_weight_sum(self):
        eps = 1e-3
        s = inv_elliptic_terms(1, 4, eps)
        assert s.form == "gaussian"
        y = np.linspace(-2.0, 2.0, 2001)
        assert np.max(np.abs(s(y) - 1.0 / (1.0 + y * y))) <= eps
        assert np.all(s.weights > 0)
        assert s.W <= 1.0 + eps

    def test_d2(self):
        eps = 1e-3
        s = inv_elliptic_terms(2, 8, eps)
        ymax = math.sqrt(2) * 4
        y = np.linspace(0, ymax, 2001)
        assert np.max(np.abs(s(y) - 1.0 / (1.0 + y * y))) <= eps


class TestExpSumText:
    def test_round_trip(self):
        s = inv_elliptic_terms(1, 4, 1e-3)
        t = ExpSumApprox.from_text(s.to_text())
        assert t.form == s.form
        assert t.epsilon == s.epsilon
        assert t.validity == s.validity
        assert np.array_equal(t.weights, s.weights)
        assert np.array_equal(t.exponents, s.exponents)
