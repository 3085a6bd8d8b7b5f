"""Acceptance criteria, one test each, with tolerances and runtime limits."""

import math
import random
import time

import numpy as np
import pytest

from distcalc import catalog as cat
from distcalc import dsl
from distcalc import schwartz as sw
from distcalc.distribution import checks, core
from distcalc.errors import ModeMismatch
from distcalc.integrate import Integrand, integrate_line

OMEGAS = (-2.0, -1.0, 0.0, 0.5, 3.0)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@pytest.mark.acceptance(1, "transform of delta_0 is the constant 1/(2 pi)")
def test_delta_transform_is_constant():
    with Timer() as t:
        F = core.fourier(core.delta(0))
        for w in OMEGAS:
            phi = sw.gauss(w)
            assert abs(core.pair(F, phi) - sw.integral(phi) / (2 * math.pi)) <= 1e-8
    assert t.elapsed < 1


@pytest.mark.acceptance(2, "derivative of the Heaviside distribution acts as delta_0")
def test_heaviside_derivative():
    probes = [sw.gauss(0), sw.gauss(1.5), sw.polygauss([1, 2, 0.5], -0.7, 2.0, 0.3),
              sw.gauss(0) + sw.polygauss([0, 1], 0, 1, 0), sw.bump(-0.5, 2.0)]
    with Timer() as t:
        DH = core.derivative(core.regular("H"))
        for phi in probes:
            assert abs(core.pair(DH, phi) - phi(0.0)) <= 1e-8
    assert t.elapsed < 1


@pytest.mark.acceptance(3, "transform of x^n is i^n D^n delta_0")
def test_monomial_transform():
    probes = [sw.gauss(0.5), sw.polygauss([1, -1], 0, 0.5, 0.25)]
    with Timer() as t:
        for n in range(5):
            L = core.regular("mono", n)
            F = core.fourier(L)
            assert F == core.delta(0, order=n, coeff=1j ** n)
            fallback = core.fourier(L, rewrite=False)
            assert fallback.wrap_depth() == 1
            for phi in probes:
                assert abs(core.pair(F, phi) - core.pair(fallback, phi)) <= 1e-6
    assert t.elapsed < 5


@pytest.mark.acceptance(4, "pairing identity int F[f] phi = int f F[phi]")
def test_generalized_pairing_identity():
    fs = [cat.lookup("expabs"), cat.lookup("chi", -1, 1), cat.lookup("gaussfn", 1)]
    phis = [sw.gauss(0), sw.gauss(1.0), sw.polygauss([1, 0, 1], 0, 1, 0),
            sw.polygauss([0.5, -1], -0.5, 2.0, 0.5), sw.polygauss([1j, 1], 2.0, 0.7, -1.0)]
    with Timer() as t:
        for f in fs:
            for phi in phis:
                assert checks.gpf_check(f, phi, 1e-8).residual <= 1e-7
    assert t.elapsed < 10


@pytest.mark.acceptance(5, "numeric transform of exp(-|x|) is 1/(pi (w^2 + 1))")
def test_expabs_transform():
    w = np.array([-4.0, -1.0, 0.0, 1.0, 4.0])
    with Timer() as t:
        got = cat.numeric_ft(cat.lookup("expabs"), w, 1e-8)
    assert np.max(np.abs(got - 1 / (math.pi * (w ** 2 + 1)))) <= 1e-6
    assert t.elapsed < 2


@pytest.mark.acceptance(6, "mollifier recovery of H at a jump converges to 1/2")
def test_recovery_at_jump():
    ks = (4, 16, 64, 256)
    with Timer() as t:
        rep = checks.recover_point(core.regular("H"), 0.0, checks.default_mollifier(), ks)
    errs = [abs(v - 0.5) for v in rep.estimates]
    assert errs[-1] <= 5e-3
    # the even mollifier gives 1/2 at every k, so the decrease is checked up to quadrature error
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    assert t.elapsed < 5


@pytest.mark.acceptance(7, "delta_0 is not regular: growth exponent 1 at 0, vanishing elsewhere")
def test_nonregularity_witness():
    ks = (4, 8, 16, 32, 64, 128, 256)
    with Timer() as t:
        at0 = checks.regularity_witness(core.delta(0), 0.0, None, ks)
        at1 = checks.regularity_witness(core.delta(0), 1.0, None, ks)
    assert 0.95 <= at0.growth_exponent <= 1.05
    assert all(abs(v) < 1e-3 for k, v in zip(at1.ks, at1.values) if k >= 16)
    assert t.elapsed < 5


@pytest.mark.acceptance(8, "transform seminorms shrink and sup|F[phi]| <= (C00 + C20)/(2 pi^2)")
def test_transform_seminorm_continuity():
    with Timer() as t:
        rep = checks.ft_continuity_check(sw.gauss(1), (1, 2, 4, 8, 16), 2,
                                         constant=1 / (2 * math.pi ** 2))
    assert rep.monotone
    assert t.elapsed < 10
    for k, sup, bound in zip(rep.ks, rep.sup_transform, rep.transform_bound):
        assert sup <= bound * 1.01, f"k={k}: sup {sup:.6g} > bound {bound:.6g}"


@pytest.mark.acceptance(9, "integration by parts on the line")
def test_integration_by_parts():
    cases = [(cat.lookup("abs"), sw.gauss(1.0)), (cat.lookup("mono", 3), sw.polygauss([1, 1], 0, 1, 0.5)),
             (cat.lookup("sinfn"), sw.bump(-1, 2))]
    with Timer() as t:
        for f, phi in cases:
            assert checks.ibp_check(f, phi, 1e-9).residual <= 1e-7
    assert t.elapsed < 5


@pytest.mark.acceptance(10, "bump building block is flat at 0; bump derivatives match differences")
def test_bump_construction():
    with Timer() as t:
        xs = np.geomspace(1e-2, 1e-1, 12)
        for n in range(7):
            right = np.abs(sw.v_deriv(n, xs))
            # magnitudes fall monotonically towards x -> 0+ and are already below 1e-12
            assert np.all(np.diff(right) >= 0)
            assert right[0] <= 1e-12
            assert np.all(sw.v_deriv(n, -xs) == 0)
        phi = sw.bump(-1, 1)
        x = np.linspace(-0.9, 0.9, 37)
        for n in range(4):
            exact = sw.eval_deriv(phi, n + 1, x).real
            f = lambda y: sw.eval_deriv(phi, n, y).real
            errs = [np.max(np.abs((f(x + h) - f(x - h)) / (2 * h) - exact)) for h in (1e-2, 5e-3)]
            assert math.log2(errs[0] / errs[1]) >= 1.8
    assert t.elapsed < 5


SEPARATING_PAIRS = [("regular(H)", "regular(sign)"), ("regular(abs)", "regular(one)"),
                    ("regular(chi(-1,1))", "regular(chi(0,1))"), ("regular(expabs)", "regular(gaussfn)"),
                    ("regular(cauchy)", "regular(expabs)"), ("regular(sinfn)", "regular(cosfn)"),
                    ("mono(1)", "mono(2)"), ("regular(H)", "regular(chi(0,1))"),
                    ("regular(boxft(-1,1))", "regular(gaussfn)"), ("regular(spiky)", "regular(H)")]


@pytest.mark.acceptance(11, "catalog pairs are separated by modulated Gaussian probes")
def test_separating_probes():
    params = list(np.linspace(-4, 4, 32))
    with Timer() as t:
        for a, b in SEPARATING_PAIRS:
            v = checks.probe_separation(dsl.elaborate(a), dsl.elaborate(b), "gauss_modulated", params)
            assert v.status == "separated", (a, b)
    assert t.elapsed < 30


@pytest.mark.acceptance(12, "f(x) = x: principal value 0, no generalized integral")
def test_principal_value_taxonomy():
    f = Integrand(lambda x: x + 0j)
    with Timer() as t:
        assert abs(integrate_line(f, "principal_value").value) <= 1e-9
        with pytest.raises(ModeMismatch):
            integrate_line(f, "generalized", radius=1.0)
    assert t.elapsed < 1


@pytest.mark.acceptance(13, "Fourier inversion of chi_[-1,1] at the jump gives 1/2")
def test_inversion_at_jump():
    with Timer() as t:
        v = checks.fourier_inversion(cat.lookup("chi", -1, 1), 1.0)
    assert abs(v - 0.5) <= 1e-3
    assert t.elapsed < 10


@pytest.mark.acceptance(14, "expression round trip over 100 random expressions")
def test_parser_round_trip():
    from test_dsl import random_expr

    rng = random.Random(20240531)
    with Timer() as t:
        failures = 0
        for _ in range(100):
            e = random_expr(rng, 5)
            failures += dsl.parse_expr(dsl.format_expr(e)) != dsl.canonical(e)
    assert failures == 0
    assert t.elapsed < 1
