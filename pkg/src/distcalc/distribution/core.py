"""Canonical atom representation of tempered distributions and their algebra.

A :class:`Distribution` is a finite sum of atoms

* ``PointAtom(c, n, a)``      -> ``c * D^n delta_a``
* ``RegularAtom(c, m, f)``    -> ``c * D^m L_f`` with ``L_f(phi) = int f phi``
* ``FourierWrapped(c, n, M)`` -> ``c * D^n F(M)``, paired as ``M(F[phi^(n)])``

with ``D^n L(phi) = (-1)^n L(phi^(n))`` and ``F(L)(phi) = L(F[phi])``.

The Fourier transform is computed by rewriting: point atoms map to regular
atoms, catalog functions with known transforms map to their images, and the
modulation / translation / reflection / ``x``-multiplication structure of a
transformed catalog function is pushed through the standard identities

    F(D^n L)        = (i x)^n F(L)
    F(x^k L)        = i^k D^k F(L)
    F(e^{-i nu x} L) = translate(F(L), nu)
    F(translate(L, c)) = e^{i c x} F(L)
    F(reflect L)    = reflect F(L)
    F(F(L))         = reflect(L) / (2 pi)

Whatever is left (a base catalog function with no closed-form transform) is
wrapped.  Because of the last identity a wrapped atom never contains another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

import numpy as np

from ..catalog import CatalogFunction, PointImage, RegularImage, lookup, polynomial
from ..errors import NonConvergence, OrderCap
from ..integrate import Integrand, integrate_bounded, integrate_line
from ..schwartz import DERIVATIVE_CAP, TestFunction, decay_constant, eval_deriv, fourier_testfn

ORDER_CAP = DERIVATIVE_CAP


def _exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("locations must be finite")
    return Fraction(v)


@dataclass(frozen=True)
class PointAtom:
    """``coeff * D^order delta_location``; the location is an exact binary fraction."""

    coeff: complex
    order: int
    location: Fraction

    def key(self):
        return (0, (self.location,), self.order)


@dataclass(frozen=True)
class RegularAtom:
    coeff: complex
    order: int
    f: CatalogFunction

    def key(self):
        f = self.f
        return (1, (f.base, f.params, f.xpow, f.freq, f.sigma, f.shift, f.offset), self.order)


@dataclass(frozen=True)
class FourierWrapped:
    coeff: complex
    order: int
    inner: Distribution

    def key(self):
        return (2, (), self.order)


Atom = Union[PointAtom, RegularAtom, FourierWrapped]


def _check_order(n: int):
    if n > ORDER_CAP:
        raise OrderCap(f"derivative order {n} exceeds cap {ORDER_CAP}")


def canonicalize(atoms) -> tuple:
    """Normalize functions, merge like atoms, drop exact zeros, sort."""
    acc: dict = {}
    wrapped: dict[int, list] = {}
    for at in atoms:
        if isinstance(at, FourierWrapped):
            wrapped.setdefault(at.order, []).extend(
                (at.coeff * a.coeff, a) for a in at.inner.atoms)
            continue
        if isinstance(at, RegularAtom):
            pieces = [RegularAtom(at.coeff * c, at.order, g) for c, g in at.f.normalize()]
        else:
            pieces = [PointAtom(complex(at.coeff), at.order, _exact(at.location))]
        for p in pieces:
            k = p.key()
            if k in acc:
                acc[k] = (acc[k][0] + complex(p.coeff), p)
            else:
                acc[k] = (complex(p.coeff), p)
    out = []
    for k, (c, p) in acc.items():
        if c != 0:
            out.append(type(p)(c, p.order, p.location if isinstance(p, PointAtom) else p.f))
    for n, terms in wrapped.items():
        inner = Distribution(tuple(_scaled(a, c / a.coeff) for c, a in terms))
        if inner.atoms:
            out.append(FourierWrapped(1.0 + 0j, n, inner))
    out.sort(key=lambda a: a.key())
    return tuple(out)


def _scaled(atom: Atom, s: complex) -> Atom:
    if isinstance(atom, PointAtom):
        return PointAtom(atom.coeff * s, atom.order, atom.location)
    if isinstance(atom, RegularAtom):
        return RegularAtom(atom.coeff * s, atom.order, atom.f)
    return FourierWrapped(atom.coeff * s, atom.order, atom.inner)


@dataclass(frozen=True)
class PairResult:
    value: complex
    error: float


class Distribution:
    """Immutable canonical sum of atoms; equality is structural."""

    __slots__ = ("atoms",)

    def __init__(self, atoms=()):
        object.__setattr__(self, "atoms", canonicalize(atoms))

    def __setattr__(self, name, value):
        raise AttributeError("Distribution is immutable")

    def __eq__(self, other):
        return isinstance(other, Distribution) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"Distribution({list(self.atoms)!r})"

    def __str__(self):
        from ..dsl import format_distribution
        return format_distribution(self)

    def __add__(self, other: Distribution) -> Distribution:
        return Distribution(self.atoms + other.atoms)

    def __sub__(self, other: Distribution) -> Distribution:
        return self + (-1) * other

    def __mul__(self, s) -> Distribution:
        s = complex(s)
        if s == 0:
            return Distribution()
        return Distribution(tuple(_scaled(a, s) for a in self.atoms))

    __rmul__ = __mul__

    def __neg__(self) -> Distribution:
        return self * -1

    def __truediv__(self, s) -> Distribution:
        return self * (1 / complex(s))

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def wrap_depth(self) -> int:
        return max((1 + a.inner.wrap_depth() for a in self.atoms if isinstance(a, FourierWrapped)),
                   default=0)


# --- constructors --------------------------------------------------------------

ZERO = Distribution()


def delta(a: float = 0.0, order: int = 0, coeff: complex = 1.0) -> Distribution:
    _check_order(order)
    return Distribution((PointAtom(complex(coeff), order, _exact(a)),))


def regular(f: CatalogFunction | str, *params, order: int = 0, coeff: complex = 1.0) -> Distribution:
    if isinstance(f, str):
        f = lookup(f, *params)
    _check_order(order)
    return Distribution((RegularAtom(complex(coeff), order, f),))


def poly_distribution(coeffs) -> Distribution:
    return Distribution(tuple(RegularAtom(c, 0, m) for c, m in polynomial(coeffs)))


def wrapped(inner: Distribution, order: int = 0) -> Distribution:
    """The unrewritten transform ``D^order F(inner)`` (the defining formula)."""
    if inner.wrap_depth():
        raise ValueError("wrapping a distribution that is already wrapped")
    return Distribution((FourierWrapped(1.0 + 0j, order, inner),))


# --- structural operations -----------------------------------------------------

def derivative(L: Distribution, n: int = 1) -> Distribution:
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n == 0:
        return L
    out = []
    for a in L.atoms:
        _check_order(a.order + n)
        if isinstance(a, PointAtom):
            out.append(PointAtom(a.coeff, a.order + n, a.location))
        elif isinstance(a, RegularAtom):
            out.append(RegularAtom(a.coeff, a.order + n, a.f))
        else:
            out.append(FourierWrapped(a.coeff, a.order + n, a.inner))
    return Distribution(tuple(out))


def translate(L: Distribution, c: float) -> Distribution:
    """``translate(L, c)(phi) = L(phi(. - c))``."""
    c = _exact(c)
    if c == 0:
        return L
    out = []
    for a in L.atoms:
        if isinstance(a, PointAtom):
            out.append(PointAtom(a.coeff, a.order, a.location - c))
        elif isinstance(a, RegularAtom):
            out.extend(RegularAtom(a.coeff * w, a.order, g) for w, g in a.f.translate(c))
        else:
            # translate(F M, c) = F(e^{-icx} M)
            out.append(FourierWrapped(a.coeff, a.order, modulate(a.inner, float(c))))
    return Distribution(tuple(out))


def reflect(L: Distribution) -> Distribution:
    """``reflect(L)(phi) = L(phi(-.))``."""
    out = []
    for a in L.atoms:
        sgn = (-1) ** a.order
        if isinstance(a, PointAtom):
            out.append(PointAtom(a.coeff * sgn, a.order, -a.location))
        elif isinstance(a, RegularAtom):
            out.extend(RegularAtom(a.coeff * sgn * w, a.order, g) for w, g in a.f.reflect())
        else:
            out.append(FourierWrapped(a.coeff * sgn, a.order, reflect(a.inner)))
    return Distribution(tuple(out))


def multiply_x(L: Distribution) -> Distribution:
    """``(x L)(phi) = L(x phi)``; uses ``x D^n = D^n x - n D^(n-1)``."""
    out = []
    for a in L.atoms:
        n = a.order
        if isinstance(a, PointAtom):
            if a.location != 0:
                out.append(PointAtom(a.coeff * float(a.location), n, a.location))
            if n:
                out.append(PointAtom(-n * a.coeff, n - 1, a.location))
        elif isinstance(a, RegularAtom):
            out.extend(RegularAtom(a.coeff * w, n, g) for w, g in a.f.times_x())
            if n:
                out.append(RegularAtom(-n * a.coeff, n - 1, a.f))
        else:
            # x F(M) = -i F(D M)
            out.append(FourierWrapped(-1j * a.coeff, n, derivative(a.inner, 1)))
            if n:
                out.append(FourierWrapped(-n * a.coeff, n - 1, a.inner))
    return Distribution(tuple(out))


def modulate(L: Distribution, nu: float) -> Distribution:
    """Multiply by ``exp(-i nu x)``.

    ``g D^n M = sum_j C(n,j) (-1)^(n-j) D^j (g^(n-j) M)`` with ``g^(r) = (-i nu)^r g``.
    """
    nu = float(nu)
    if nu == 0:
        return L
    out = []
    for a in L.atoms:
        n = a.order
        for j in range(n + 1):
            w = a.coeff * math.comb(n, j) * (-1) ** (n - j) * (-1j * nu) ** (n - j)
            if w == 0:
                continue
            if isinstance(a, PointAtom):
                out.append(PointAtom(w * np.exp(-1j * nu * float(a.location)), j, a.location))
            elif isinstance(a, RegularAtom):
                out.extend(RegularAtom(w * v, j, g) for v, g in a.f.modulate(nu))
            else:
                # e^{-i nu x} F(M) = F(translate(M, -nu))
                out.append(FourierWrapped(w, j, translate(a.inner, -nu)))
    return Distribution(tuple(out))


# --- Fourier transform ---------------------------------------------------------

def _images(images) -> Distribution:
    out = []
    for im in images:
        if isinstance(im, PointImage):
            out.append(PointAtom(complex(im.coeff), im.order, im.location))
        elif isinstance(im, RegularImage):
            out.append(RegularAtom(complex(im.coeff), 0, im.function))
    return Distribution(tuple(out))


def _fourier_function(f: CatalogFunction) -> Distribution:
    """Transform of ``L_f`` for ``f(x) = h(x + t)``, ``h(y) = y^k e^{-i nu y} base(sigma y + s')``."""
    base = replace(f, xpow=0, freq=0.0, sigma=1, shift=0, offset=0)
    shift = f.shift - f.sigma * f.offset
    images = base.fourier_images()
    if images is None:
        T = Distribution((FourierWrapped(1.0 + 0j, 0, regular(base)),))
    else:
        T = _images(images)
    if f.sigma == -1:
        T = reflect(T)
    if shift:
        # base(sigma y + s') = translate(base(sigma .), sigma s'); F(translate(L, c)) = e^{icx} F(L)
        T = modulate(T, -f.sigma * float(shift))
    if f.freq:
        T = translate(T, f.freq)
    if f.xpow:
        T = (1j ** f.xpow) * derivative(T, f.xpow)
    if f.offset:
        T = modulate(T, -float(f.offset))
    return T


def _times_ix(T: Distribution, n: int) -> Distribution:
    for _ in range(n):
        T = 1j * multiply_x(T)
    return T


def fourier(L: Distribution, rewrite: bool = True) -> Distribution:
    """Distributional Fourier transform ``F(L)(phi) = L(F[phi])``.

    With ``rewrite=False`` the result is the unreduced defining formula
    (wrapping the whole input), useful as an independent cross-check.
    """
    if not rewrite:
        if L.wrap_depth():
            raise ValueError("cannot wrap an already wrapped distribution")
        return wrapped(L) if L.atoms else L
    total = ZERO
    for a in L.atoms:
        if isinstance(a, PointAtom):
            # F(D^n delta_a) = (i^n / 2pi) L_{x^n e^{-iax}}
            f = lookup("expmono", a.order, float(a.location))
            T = Distribution((RegularAtom(a.coeff * 1j ** a.order / (2 * math.pi), 0, f),))
        elif isinstance(a, RegularAtom):
            T = a.coeff * _times_ix(_fourier_function(a.f), a.order)
        else:
            # F(D^n F M) = (ix)^n F(F M) = (ix)^n reflect(M) / 2pi
            T = a.coeff * _times_ix(reflect(a.inner) / (2 * math.pi), a.order)
        total = total + T
    return total


# --- pairing -------------------------------------------------------------------

def _regular_tail(f: CatalogFunction, phi: TestFunction, m: int):
    """Certified bound on ``int_{|x|>R} |f phi^(m)|``."""
    C, N = f.growth_certificate
    in_G = f.in_G

    def tail(R: float) -> float:
        best = math.inf
        if in_G:
            D = decay_constant(phi, 0, m)
            best = 0.0 if D == 0 else D * f.abs_tail(R)
        n0 = math.floor(R)
        if n0 >= 1:
            for p in (2, 4, 6, 8):
                try:
                    D = decay_constant(phi, N + p, m)
                except (OrderCap, NonConvergence):
                    break
                s = n0 ** (-p) + n0 ** (1 - p) / (p - 1)
                best = min(best, C * D * (1 + 2 / n0) ** N * s)
        return best

    return tail


def _pair_regular(f: CatalogFunction, phi: TestFunction, m: int, tol: float) -> PairResult:
    psi = phi.derivative(m)
    if not psi.terms:
        return PairResult(0j, 0.0)
    integrand = lambda x: f(x) * psi(x)
    support = psi.support()
    if support is not None:
        lo, hi = support
        bps = [b for b in (*f.breakpoints, *psi.features()) if lo < b < hi]
        res = integrate_bounded(Integrand(integrand, bps), lo, hi, tol)
        return PairResult(res.value, res.abs_error_estimate)
    bps = (*f.breakpoints, *psi.features())
    res = integrate_line(Integrand(integrand, bps, tail_bound=_regular_tail(f, phi, m)),
                         "generalized", tol=tol)
    return PairResult(res.value, res.abs_error_estimate)


def pair_detailed(L: Distribution, phi: TestFunction, tol: float = 1e-8) -> PairResult:
    """``L(phi)`` with an accumulated error estimate."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not L.atoms:
        return PairResult(0j, 0.0)
    share = tol / len(L.atoms)
    value, err = 0j, 0.0
    for a in L.atoms:
        sgn = (-1) ** a.order
        scale = abs(a.coeff)
        if isinstance(a, PointAtom):
            v = complex(eval_deriv(phi, a.order, float(a.location)))
            value += a.coeff * sgn * v
        elif isinstance(a, RegularAtom):
            r = _pair_regular(a.f, phi, a.order, share / scale)
            value += a.coeff * sgn * r.value
            err += scale * r.error
        else:
            r = pair_detailed(a.inner, fourier_testfn(phi.derivative(a.order)), share / scale)
            value += a.coeff * sgn * r.value
            err += scale * r.error
    return PairResult(complex(value), float(err))


def pair(L: Distribution, phi: TestFunction, tol: float = 1e-8) -> complex:
    return pair_detailed(L, phi, tol).value


__all__ = [
    "Distribution", "PointAtom", "RegularAtom", "FourierWrapped", "PairResult", "ZERO",
    "delta", "regular", "poly_distribution", "wrapped", "canonicalize", "derivative",
    "translate", "reflect", "multiply_x", "modulate", "fourier", "pair", "pair_detailed",
]
