import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from distcalc.errors import InvalidInterval, MissingCertificate, ModeMismatch, NonConvergence
from distcalc.integrate import (Integrand, integrate_bounded, integrate_family, integrate_line,
                                iterated_swap_check, line_family)


def test_bounded_polynomial_is_exact():
    r = integrate_bounded(Integrand(lambda x: x ** 5 - 3 * x ** 2 + 0j), -1.0, 2.0)
    assert r.value == pytest.approx(10.5 - 9.0, abs=1e-13)
    assert r.mode == "bounded"


def test_bounded_matches_independent_quadrature():
    f = lambda x: np.exp(np.sin(3 * x)) * np.cos(x)
    ref, _ = sp_integrate.quad(f, -2, 5, epsabs=1e-13, limit=200)
    r = integrate_bounded(Integrand(lambda x: f(x) + 0j), -2, 5, tol=1e-11)
    assert abs(r.value - ref) <= 1e-10
    assert r.abs_error_estimate <= 1e-11


def test_breakpoints_handle_jumps():
    f = Integrand(lambda x: np.where(x < 0.3, 1.0, -2.0) + 0j, breakpoints=(0.3,))
    assert integrate_bounded(f, 0.0, 1.0).value == pytest.approx(0.3 - 1.4, abs=1e-12)


def test_invalid_interval():
    with pytest.raises(InvalidInterval):
        integrate_bounded(Integrand(lambda x: x + 0j), 1.0, 1.0)


def test_family_integrates_each_component():
    vals, err = integrate_family(lambda x: np.stack([x, x ** 2], axis=-1) + 0j, 0.0, 1.0)
    assert np.allclose(vals, [0.5, 1 / 3], atol=1e-13)


def test_gaussian_over_line_with_certificate():
    f = Integrand(lambda x: np.exp(-x ** 2) + 0j, decay_certificate=(1.0, 4.0))
    r = integrate_line(f, "generalized", tol=1e-10)
    assert r.value == pytest.approx(math.sqrt(math.pi), abs=1e-10)
    assert integrate_line(f, "absolute", tol=1e-10).value == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_line_needs_certificate_or_radius():
    with pytest.raises(MissingCertificate):
        integrate_line(Integrand(lambda x: np.exp(-x ** 2) + 0j), "generalized")


def test_ladder_with_explicit_radius():
    r = integrate_line(Integrand(lambda x: 1 / (1 + x ** 2) + 0j), "generalized", tol=1e-6, radius=1.0)
    assert r.value == pytest.approx(math.pi, abs=1e-6)


def test_odd_function_principal_value_only():
    f = Integrand(lambda x: x / (1 + x ** 2) + 0j)
    assert abs(integrate_line(f, "principal_value", tol=1e-9).value) <= 1e-9
    with pytest.raises((ModeMismatch, NonConvergence)):
        integrate_line(f, "generalized", tol=1e-9, radius=1.0, max_doublings=20)


def test_unknown_mode():
    with pytest.raises(ValueError):
        integrate_line(Integrand(lambda x: x + 0j), "cauchy")


def test_line_family():
    vals, err = line_family(lambda x: np.stack([np.exp(-x ** 2), x ** 2 * np.exp(-x ** 2)], -1) + 0j,
                            tail=lambda R: 4 * math.exp(-R))
    assert np.allclose(vals, [math.sqrt(math.pi), math.sqrt(math.pi) / 2], atol=1e-9)


def test_iterated_swap():
    G = lambda x, y: np.exp(-x ** 2 - 2 * y ** 2) * (1 + x * y) + 0j
    rep = iterated_swap_check(G, N_max=6.0, tol=1e-9)
    assert rep.discrepancy <= 1e-9
    assert rep.lhs == pytest.approx(math.pi / math.sqrt(2), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.2, 3))
def test_additivity_over_split(a, width, s):
    f = Integrand(lambda x: np.cos(s * x) * np.exp(-x ** 2 / 4) + 0j)
    b, m = a + width, a + width / 3
    whole = integrate_bounded(f, a, b, tol=1e-12).value
    parts = integrate_bounded(f, a, m, tol=1e-12).value + integrate_bounded(f, m, b, tol=1e-12).value
    assert abs(whole - parts) <= 1e-11


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 4), st.floats(-3, 3))
def test_shifted_gaussian_mass(alpha, c):
    f = Integrand(lambda x: np.exp(-alpha * (x - c) ** 2) + 0j,
                  tail_bound=lambda R: 2 * math.exp(-alpha * max(R - abs(c), 0) ** 2) * (1 + 1 / alpha))
    r = integrate_line(f, "generalized", tol=1e-9)
    assert abs(r.value - math.sqrt(math.pi / alpha)) <= 1e-9
