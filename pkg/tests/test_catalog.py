import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from distcalc import catalog as cat
from distcalc.errors import CertificateViolated

PLAIN = ["one", "H", "sign", "abs", ("chi", -1, 2), ("boxft", -1, 1), "expabs", "gaussfn", "cauchy",
         "sinfn", "cosfn", "spiky"]


def make(entry):
    return cat.lookup(*entry) if isinstance(entry, tuple) else cat.lookup(entry)


def test_balanced_values_at_jumps():
    assert cat.lookup("H")(0.0) == 0.5
    assert cat.lookup("sign")(0.0) == 0
    chi = cat.lookup("chi", -1, 1)
    assert chi(-1.0) == 0.5 and chi(1.0) == 0.5 and chi(0.0) == 1 and chi(1.5) == 0


def test_spiky_fixture():
    f = cat.spiky_fixture(8)
    assert f(3.0) == pytest.approx(8.0)
    assert f(2.5) == 0
    area = sp_integrate.quad(lambda x: f(np.asarray(x)).real, 2.5, 3.5, points=[3.0], epsabs=1e-14)[0]
    assert area == pytest.approx(1 / 9, rel=1e-9)


def test_spiky_bounds():
    with pytest.raises(ValueError):
        cat.spiky_fixture(40)


@pytest.mark.parametrize("entry", PLAIN)
def test_growth_certificates_hold(entry):
    rep = cat.verify_growth(make(entry))
    assert rep.passed
    assert all(l <= r * (1 + 1e-9) for l, r in zip(rep.lhs, rep.rhs))


def test_growth_certificate_violation():
    assert cat.verify_growth(cat.mono(2), (1.0, 3)).passed
    with pytest.raises(CertificateViolated) as info:
        cat.verify_growth(cat.custom("exp", np.exp, (1.0, 3)))
    assert info.value.radius > 1


def test_warped_certificate_covers_function():
    f = cat.lookup("H")
    (_, g), = f.translate(3.5)
    (_, g), = g.times_x()[:1]
    assert cat.verify_growth(g).passed


@pytest.mark.parametrize("entry,closed", [
    ("expabs", lambda w: 1 / (math.pi * (w ** 2 + 1))),
    ("gaussfn", lambda w: np.exp(-w ** 2 / 4) / (2 * math.sqrt(math.pi))),
    (("chi", -1, 1), lambda w: np.where(w == 0, 1 / math.pi, np.sin(w) / (math.pi * np.where(w == 0, 1, w)))),
    ("cauchy", lambda w: 0.5 * np.exp(-np.abs(w))),
])
def test_numeric_transform_matches_closed_form(entry, closed):
    w = np.array([-4.0, -1.0, 0.0, 0.5, 3.0])
    assert np.max(np.abs(cat.numeric_ft(make(entry), w, 1e-9) - closed(w))) <= 1e-8


@pytest.mark.parametrize("entry", ["expabs", "gaussfn", ("chi", -1, 2), "cauchy"])
def test_closed_form_images_agree_with_numeric(entry):
    f = make(entry)
    (img,) = f.fourier_images()
    w = np.array([-2.5, 0.0, 1.0, 3.0])
    assert np.allclose(img.coeff * img.function(w), cat.numeric_ft(f, w, 1e-9), atol=1e-8)


@pytest.mark.parametrize("entry", ["expabs", "gaussfn", "cauchy", "spiky"])
def test_riemann_lebesgue(entry):
    vals = np.abs(cat.numeric_ft(make(entry), [1e2, 1e3], 1e-7))
    # both may be at quadrature noise; decay is checked up to tolerance
    assert vals[1] <= vals[0] + 1e-6
    assert vals[1] <= 0.05


def test_classical_derivatives():
    (c, d), = cat.lookup("abs").classical_derivative()
    assert d.base == "sign" and c == 1
    assert cat.lookup("H").classical_derivative() is None


def test_custom_function():
    g = cat.custom("sq", lambda x: x ** 2, (1.0, 3))
    assert g(2.0) == 4
    assert g.name == "sq"


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PLAIN), st.floats(-5, 5), st.floats(-4, 4))
def test_translate_moves_function(entry, c, x):
    f = make(entry)
    (coef, g), = f.translate(c)
    assert coef * g(x) == pytest.approx(f(x + c), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PLAIN), st.floats(-4, 4))
def test_reflect_and_modulate(entry, x):
    f = make(entry)
    out = sum(c * g(x) for c, g in f.reflect())
    assert out == pytest.approx(f(-x), abs=1e-12)
    mod = sum(c * g(x) for c, g in f.modulate(0.7))
    assert mod == pytest.approx(np.exp(-0.7j * x) * f(x), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PLAIN), st.floats(-4, 4))
def test_times_x(entry, x):
    f = make(entry)
    assert sum(c * g(x) for c, g in f.times_x()) == pytest.approx(x * f(x), abs=1e-9)


def test_names():
    assert cat.mono(0).name == "one"
    assert cat.mono(3).name == "mono(3)"
    assert cat.lookup("chi", -1, 2).name == "chi(-1,2)"
    assert cat.lookup("gaussfn").name == "gaussfn"
