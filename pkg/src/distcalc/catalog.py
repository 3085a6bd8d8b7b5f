"""Library of slow-growth functions with balanced jumps.

Every :class:`CatalogFunction` is a base function from a fixed list, optionally
transformed as ``g(x) = x**xpow * exp(-i*freq*x) * f(sigma*x + shift)`` with
``sigma = +-1``.  The transformed form is closed under the operations the
distribution algebra needs (multiplication by ``x``, modulation, translation,
reflection), and all certificates are derived from the base data.

At a jump every evaluator returns the average of the one-sided limits.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import gamma, gammaincc

from .errors import CertificateViolated
from .integrate import Integrand, integrate_bounded, integrate_line

INF = math.inf


@dataclass(frozen=True)
class PointImage:
    """``coeff * D^order delta_location``."""

    coeff: complex
    order: int
    location: float


@dataclass(frozen=True)
class RegularImage:
    coeff: complex
    function: CatalogFunction


# --- base functions ----------------------------------------------------------

class _Base:
    parity: str | None = None
    max_moment: float = -1.0  # x^j f is integrable for j <= max_moment
    pointwise: tuple[float, int] | None = None

    def evaluate(self, p, x):
        raise NotImplementedError

    def breakpoints(self, p) -> tuple[float, ...]:
        return ()

    def growth(self, p) -> tuple[float, int]:
        raise NotImplementedError

    def pointwise_bound(self, p):
        return self.pointwise

    def moment_tail(self, p, j: int, R: float) -> float:
        """Upper bound on ``int_{|y|>R} |y|^j |f(y)| dy``."""
        return INF

    def monotone_tail(self, p, R: float) -> float | None:
        """``max(|f(R)|, |f(-R)|)`` if ``f`` is real and monotone towards 0 on ``|y| >= R``."""
        return None

    def fourier(self, p):
        return None

    def derivative(self, p):
        return None

    def label(self, name: str, p) -> str:
        if not p:
            return name
        return f"{name}({','.join(_num(v) for v in p)})"


def _num(v: float) -> str:
    return format(float(v) + 0.0, ".17g")


class _One(_Base):
    parity = "one"
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.ones_like(x, dtype=complex)

    def growth(self, p):
        return (2.0, 1)

    def fourier(self, p):
        return [PointImage(1.0, 0, 0.0)]

    def derivative(self, p):
        return []


class _Heaviside(_Base):
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5)).astype(complex)

    def breakpoints(self, p):
        return (0.0,)

    def growth(self, p):
        return (1.0, 1)


class _Sign(_Base):
    parity = "odd"
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.sign(x).astype(complex)

    def breakpoints(self, p):
        return (0.0,)

    def growth(self, p):
        return (2.0, 1)


class _Abs(_Base):
    parity = "even"
    pointwise = (1.0, 1)

    def evaluate(self, p, x):
        return np.abs(x).astype(complex)

    def breakpoints(self, p):
        return (0.0,)

    def growth(self, p):
        return (1.0, 2)

    def derivative(self, p):
        return [(1.0, CatalogFunction("sign"))]


class _Chi(_Base):
    """Indicator of ``[a, b]`` with value 1/2 at both endpoints."""

    max_moment = INF
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        a, b = p
        inside = (x > a) & (x < b)
        edge = (x == a) | (x == b)
        return np.where(inside, 1.0, np.where(edge, 0.5, 0.0)).astype(complex)

    def breakpoints(self, p):
        return tuple(p)

    def growth(self, p):
        return (p[1] - p[0], 0)

    def moment_tail(self, p, j, R):
        a, b = p
        m = max(abs(a), abs(b))
        return 0.0 if R >= m else (b - a) * m**j

    def monotone_tail(self, p, R):
        return 0.0 if R > max(abs(p[0]), abs(p[1])) else None

    def fourier(self, p):
        return [RegularImage(1.0, CatalogFunction("boxft", p))]


class _BoxFT(_Base):
    """``(exp(-i w a) - exp(-i w b)) / (2 pi i w)``, the transform of ``chi(a, b)``."""

    def evaluate(self, p, x):
        a, b = p
        h = 0.5 * (b - a)
        return np.exp(-0.5j * x * (a + b)) * (h / math.pi) * np.sinc(x * h / math.pi)

    def growth(self, p):
        return ((p[1] - p[0]) / math.pi, 1)

    def pointwise_bound(self, p):
        return ((p[1] - p[0]) / (2 * math.pi), 0)

    def fourier(self, p):
        return [RegularImage(1 / (2 * math.pi), CatalogFunction("chi", (-p[1], -p[0])))]


class _ExpAbs(_Base):
    parity = "even"
    max_moment = INF
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.exp(-np.abs(x)).astype(complex)

    def breakpoints(self, p):
        return (0.0,)

    def growth(self, p):
        return (2.0, 0)

    def moment_tail(self, p, j, R):
        return 2.0 * float(gammaincc(j + 1, max(R, 0.0))) * math.factorial(j)

    def monotone_tail(self, p, R):
        return math.exp(-R) if R > 0 else None

    def fourier(self, p):
        return [RegularImage(1 / math.pi, CatalogFunction("cauchy"))]


class _Gauss(_Base):
    """``exp(-alpha x^2)``."""

    parity = "even"
    max_moment = INF
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.exp(-p[0] * x**2).astype(complex)

    def growth(self, p):
        return (math.sqrt(math.pi / p[0]), 0)

    def moment_tail(self, p, j, R):
        a = p[0]
        s = 0.5 * (j + 1)
        return float(gammaincc(s, a * max(R, 0.0) ** 2) * gamma(s)) / a**s

    def monotone_tail(self, p, R):
        return math.exp(-p[0] * R * R) if R > 0 else None

    def fourier(self, p):
        a = p[0]
        return [RegularImage(1 / (2 * math.sqrt(math.pi * a)), CatalogFunction("gaussfn", (1 / (4 * a),)))]

    def derivative(self, p):
        return [(-2 * p[0], CatalogFunction("gaussfn", p, xpow=1))]

    def label(self, name, p):
        return name if p[0] == 1.0 else super().label(name, p)


class _Cauchy(_Base):
    """``1 / (1 + x^2)``."""

    parity = "even"
    max_moment = 0.0
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return (1.0 / (1.0 + x**2)).astype(complex)

    def growth(self, p):
        return (math.pi, 0)

    def moment_tail(self, p, j, R):
        return math.pi - 2 * math.atan(max(R, 0.0)) if j == 0 else INF

    def monotone_tail(self, p, R):
        return 1.0 / (1.0 + R * R) if R > 0 else None

    def fourier(self, p):
        return [RegularImage(0.5, CatalogFunction("expabs"))]


class _Sin(_Base):
    parity = "odd"
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.sin(x).astype(complex)

    def growth(self, p):
        return (2.0, 1)

    def fourier(self, p):
        return [PointImage(-0.5j, 0, 1.0), PointImage(0.5j, 0, -1.0)]

    def derivative(self, p):
        return [(1.0, CatalogFunction("cosfn"))]


class _Cos(_Base):
    parity = "even"
    pointwise = (1.0, 0)

    def evaluate(self, p, x):
        return np.cos(x).astype(complex)

    def growth(self, p):
        return (2.0, 1)

    def fourier(self, p):
        return [PointImage(0.5, 0, 1.0), PointImage(0.5, 0, -1.0)]

    def derivative(self, p):
        return [(-1.0, CatalogFunction("sinfn"))]


SPIKY_MAX = 33


def _spikes(n_max: int):
    n = np.arange(1, n_max + 1, dtype=float)
    height = 2.0**n
    half = 1.0 / (n * n * height)  # triangle area 1/n^2
    return n, height, half


class _Spiky(_Base):
    """Triangles of height ``2^n`` and area ``1/n^2`` centred at ``n = 1..n_max``.

    Absolutely integrable, of slow growth, but not polynomially bounded.
    Quadrature nodes inside a spike are rounded to the double-precision grid
    near ``n``, which costs roughly ``n 2^n 1e-16`` absolute accuracy per
    spike; the default of 16 spikes keeps the total below 1e-9.
    """

    max_moment = INF

    def evaluate(self, p, x):
        n, height, half = _spikes(int(p[0]))
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        idx = np.rint(x)
        near = (idx >= 1) & (idx <= n[-1])
        if np.any(near):
            k = idx[near].astype(int) - 1
            d = np.abs(x[near] - n[k])
            out[near] = np.maximum(0.0, height[k] * (1.0 - d / half[k]))
        return out.astype(complex)

    def pointwise_bound(self, p):
        return None

    def breakpoints(self, p):
        n, _, half = _spikes(int(p[0]))
        return tuple(sorted(set(np.concatenate([n - half, n, n + half]).tolist())))

    def growth(self, p):
        return (math.pi**2 / 6 + 1e-9, 0)

    def moment_tail(self, p, j, R):
        n = np.arange(1, int(p[0]) + 1, dtype=float)
        sel = n + 1.0 > R
        return float(np.sum((n[sel] + 1.0) ** j / n[sel] ** 2))

    def label(self, name, p):
        return f"{name}({int(p[0])})"


BASES: dict[str, _Base] = {
    "one": _One(),
    "H": _Heaviside(),
    "sign": _Sign(),
    "abs": _Abs(),
    "chi": _Chi(),
    "boxft": _BoxFT(),
    "expabs": _ExpAbs(),
    "gaussfn": _Gauss(),
    "cauchy": _Cauchy(),
    "sinfn": _Sin(),
    "cosfn": _Cos(),
    "spiky": _Spiky(),
}

ARITY = {"one": 0, "H": 0, "sign": 0, "abs": 0, "chi": 2, "boxft": 2, "expabs": 0,
         "gaussfn": 1, "cauchy": 0, "sinfn": 0, "cosfn": 0, "spiky": 1}
DEFAULT_PARAMS = {"gaussfn": (1.0,), "spiky": (16.0,)}


# --- transformed functions -----------------------------------------------------

def _exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("positions must be finite")
    return Fraction(v)


@dataclass(frozen=True, order=True)
class CatalogFunction:
    """``(x + offset)**xpow * exp(-i*freq*(x + offset)) * base(sigma*x + shift)``.

    ``shift`` and ``offset`` are exact binary fractions, so translating by
    ``c`` and then by ``-c`` restores the original function exactly.
    """

    base: str
    params: tuple[float, ...] = ()
    xpow: int = 0
    freq: float = 0.0
    sigma: int = 1
    shift: Fraction = Fraction(0)
    offset: Fraction = Fraction(0)
    custom: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.custom is None:
            if self.base not in BASES:
                raise KeyError(self.base)
            p = tuple(float(v) for v in (self.params or DEFAULT_PARAMS.get(self.base, ())))
            if len(p) != ARITY[self.base]:
                raise ValueError(f"{self.base} takes {ARITY[self.base]} parameters")
            if self.base in ("chi", "boxft") and not p[0] < p[1]:
                raise ValueError(f"{self.base}(a,b) needs a < b")
            if self.base == "gaussfn" and not p[0] > 0:
                raise ValueError("gaussfn needs positive width")
            if self.base == "spiky" and not 1 <= p[0] <= SPIKY_MAX:
                raise ValueError(f"spiky needs 1 <= n_max <= {SPIKY_MAX} (narrower spikes "
                                 "fall below double-precision resolution)")
            object.__setattr__(self, "params", p)
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        if self.xpow < 0:
            raise ValueError("xpow must be nonnegative")
        object.__setattr__(self, "freq", float(self.freq) + 0.0)
        object.__setattr__(self, "shift", _exact(self.shift))
        object.__setattr__(self, "offset", _exact(self.offset))

    # -- identity --
    @property
    def kind(self) -> _Base:
        return self.custom if self.custom is not None else BASES[self.base]

    @property
    def is_plain(self) -> bool:
        return (self.xpow == 0 and self.freq == 0 and self.sigma == 1 and self.shift == 0
                and self.offset == 0)

    @property
    def name(self) -> str:
        base = self.kind.label(self.base, self.params)
        if self.base == "one" and self.sigma == 1 and self.shift == 0 and self.offset == 0:
            if self.freq == 0:
                return "one" if self.xpow == 0 else f"mono({self.xpow})"
            return f"expmono({self.xpow},{_num(self.freq)})"
        if self.is_plain:
            return base
        return (f"warp({self.xpow},{_num(self.freq)},{self.sigma},{_num(self.shift)},"
                f"{_num(self.offset)};{base})")

    def __str__(self) -> str:
        return self.name

    # -- evaluation --
    def __call__(self, x):
        return eval_balanced(self, x)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        s = float(self.shift)
        return tuple(sorted((b - s) * self.sigma for b in self.kind.breakpoints(self.params)))

    @property
    def pieces(self) -> list[tuple[float, float]]:
        """Open intervals on which the function is smooth."""
        edges = [-INF, *self.breakpoints, INF]
        return list(zip(edges[:-1], edges[1:]))

    # -- certificates --
    def _reach(self) -> float:
        return abs(float(self.shift)) + abs(float(self.offset))

    @property
    def growth_certificate(self) -> tuple[float, int]:
        C, N = self.kind.growth(self.params)
        s, t = abs(float(self.shift)), abs(float(self.offset))
        return (C * (1 + s) ** N * (1 + t) ** self.xpow, N + self.xpow)

    @property
    def pointwise_bound(self) -> tuple[float, int] | None:
        pb = self.kind.pointwise_bound(self.params)
        if pb is None:
            return None
        C, N = pb
        s, t = abs(float(self.shift)), abs(float(self.offset))
        return (C * (1 + s) ** N * (1 + t) ** self.xpow, N + self.xpow)

    @property
    def in_G(self) -> bool:
        return self.xpow <= self.kind.max_moment

    def oscillatory_tail(self, R: float, omega: float) -> float:
        """Bound on ``|int_{|x|>R} exp(-i omega x) g(x) dx|`` by the second mean value theorem.

        Applies when ``xpow = 0`` and the base is monotone towards 0 in the tails;
        each half-line contributes at most ``2 sqrt(2) g(R) / |omega + freq|``.
        """
        w = omega + self.freq
        s = abs(float(self.shift))
        if self.xpow or w == 0 or R <= s:
            return INF
        g = self.kind.monotone_tail(self.params, R - s)
        if g is None:
            return INF
        return 4 * math.sqrt(2) * g / abs(w)

    def abs_tail(self, R: float) -> float:
        """Upper bound on ``int_{|x|>R} |g(x)| dx``.

        Uses ``|x + offset| <= |y| + |shift| + |offset|`` with ``y = sigma x + shift``.
        """
        if not self.in_G:
            return INF
        s = abs(float(self.shift))
        if R <= s:
            return INF
        k, r = self.xpow, self._reach()
        return sum(math.comb(k, j) * r ** (k - j) * self.kind.moment_tail(self.params, j, R - s)
                   for j in range(k + 1))

    # -- algebra --
    def times_x(self) -> list[tuple[complex, CatalogFunction]]:
        """Terms of ``x g(x)``: ``x (x+t)^k = (x+t)^(k+1) - t (x+t)^k``."""
        out = [(1.0, replace(self, xpow=self.xpow + 1))]
        if self.offset:
            out.append((-float(self.offset), self))
        return out

    def modulate(self, nu: float) -> list[tuple[complex, CatalogFunction]]:
        """Terms of ``exp(-i nu x) g(x)``."""
        phase = complex(np.exp(1j * nu * float(self.offset))) if self.offset else 1.0
        return [(phase, replace(self, freq=self.freq + nu))]

    def reflect(self) -> list[tuple[complex, CatalogFunction]]:
        """Terms of ``g(-x)``."""
        return [((-1) ** self.xpow,
                 replace(self, freq=-self.freq, sigma=-self.sigma, offset=-self.offset))]

    def translate(self, c: float) -> list[tuple[complex, CatalogFunction]]:
        """Terms of ``g(x + c)``."""
        c = _exact(c)
        return [(1.0, replace(self, offset=self.offset + c, shift=self.shift + self.sigma * c))]

    def classical_derivative(self) -> list[tuple[complex, CatalogFunction]] | None:
        """Derivative off the breakpoints, or ``None`` if the catalog cannot express it."""
        base_d = self.kind.derivative(self.params)
        if base_d is None:
            return None
        out: list[tuple[complex, CatalogFunction]] = []
        if self.xpow:
            out.append((self.xpow, replace(self, xpow=self.xpow - 1)))
        if self.freq:
            out.append((-1j * self.freq, self))
        # base derivative terms carry powers of y = sigma x + shift = sigma (x+t) + (shift - sigma t)
        lin = float(self.shift - self.sigma * self.offset)
        for c, d in base_d:
            j = d.xpow
            for i in range(j + 1):
                w = self.sigma * c * math.comb(j, i) * self.sigma**i * lin ** (j - i)
                if w != 0:
                    out.append((w, replace(d, xpow=self.xpow + i, freq=self.freq, sigma=self.sigma,
                                           shift=self.shift, offset=self.offset)))
        return out

    def normalize(self) -> list[tuple[complex, CatalogFunction]]:
        """Rewrite to a canonical representative (used for structural equality)."""
        par = self.kind.parity
        f = self
        coef: complex = 1.0
        if f.xpow == 0 and f.freq == 0:
            f = replace(f, offset=Fraction(0))
        if par == "one":
            f = replace(f, sigma=1, shift=Fraction(0))
        elif f.sigma == -1 and par in ("even", "odd"):
            f = replace(f, sigma=1, shift=-f.shift)
            coef = -1.0 if par == "odd" else 1.0
        elif f.sigma == -1 and f.custom is None and f.base in ("chi", "boxft"):
            a, b = f.params
            f = replace(f, params=(-b, -a), sigma=1, shift=-f.shift)
        return [(coef, f)]

    def fourier_images(self) -> list | None:
        """Closed-form transform of a plain base function."""
        if not self.is_plain:
            return None
        return self.kind.fourier(self.params)


def custom(name: str, fn: Callable, growth: tuple[float, int], breakpoints=()) -> CatalogFunction:
    """A throwaway catalog entry with a claimed certificate (useful for testing certificates)."""

    class _Custom(_Base):
        def evaluate(self, p, x):
            return np.asarray(fn(x), dtype=complex)

        def breakpoints(self, p):
            return tuple(breakpoints)

        def growth(self, p):
            return growth

        def label(self, n, p):
            return name

    return CatalogFunction(name, (), custom=_Custom())


# --- constructors --------------------------------------------------------------

def lookup(name: str, *params: float) -> CatalogFunction:
    """Build a catalog function from its DSL name."""
    if name == "mono":
        return CatalogFunction("one", xpow=int(params[0]))
    if name == "expmono":
        return CatalogFunction("one", xpow=int(params[0]), freq=float(params[1]))
    if name == "const":
        return CatalogFunction("one")
    return CatalogFunction(name, tuple(params))


def heaviside() -> CatalogFunction:
    return CatalogFunction("H")


def mono(n: int) -> CatalogFunction:
    return CatalogFunction("one", xpow=n)


def polynomial(coeffs) -> list[tuple[complex, CatalogFunction]]:
    """``sum c_j x^j`` as weighted monomials."""
    return [(complex(c), mono(j)) for j, c in enumerate(coeffs) if c != 0]


def spiky_fixture(n_max: int = 16) -> CatalogFunction:
    return CatalogFunction("spiky", (float(n_max),))


def eval_balanced(f: CatalogFunction, x):
    arr = np.asarray(x, dtype=float)
    out = f.kind.evaluate(f.params, f.sigma * arr + float(f.shift))
    if f.freq or f.xpow:
        u = arr + float(f.offset) if f.offset else arr
        if f.freq:
            out = out * np.exp(-1j * f.freq * u)
        if f.xpow:
            out = out * u**f.xpow
    return out if out.ndim else complex(out)


# --- checks --------------------------------------------------------------------

@dataclass
class GrowthReport:
    R_values: list[float]
    lhs: list[float]
    rhs: list[float]
    passed: bool
    certificate: tuple[float, int]

    def as_dict(self) -> dict:
        return {"R_values": self.R_values, "lhs": self.lhs, "rhs": self.rhs,
                "pass": self.passed, "certificate": list(self.certificate)}


GROWTH_LADDER = tuple(float(2**j) for j in range(9))


def verify_growth(f: CatalogFunction, certificate: tuple[float, int] | None = None,
                  tol: float = 1e-9) -> GrowthReport:
    """Check ``int_{-R}^{R} |f| <= C (1+R)^N`` on the ladder ``R = 1, 2, ..., 256``."""
    C, N = certificate if certificate is not None else f.growth_certificate
    absf = Integrand(lambda x: np.abs(eval_balanced(f, x)), f.breakpoints)
    Rs, lhs, rhs = [], [], []
    for R in GROWTH_LADDER:
        val = integrate_bounded(absf, -R, R, tol=tol * (1 + R) ** N, budget=4_000_000).value.real
        bound = C * (1 + R) ** N
        Rs.append(R)
        lhs.append(val)
        rhs.append(bound)
        if val > bound * (1 + 1e-9):
            raise CertificateViolated(
                f"{f.name}: integral {val:.6g} over [-{R:g},{R:g}] exceeds {bound:.6g}", R)
    return GrowthReport(Rs, lhs, rhs, True, (C, N))


def numeric_ft(f: CatalogFunction, omegas, tol: float = 1e-9) -> np.ndarray:
    """``(1/2pi) int exp(-i w x) f(x) dx`` for absolutely integrable ``f``."""
    if not f.in_G:
        raise ValueError(f"{f.name} is not absolutely integrable")
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    out = np.empty(w.shape, dtype=complex)
    for i, om in enumerate(w):
        tail = lambda R, om=om: min(f.abs_tail(R), f.oscillatory_tail(R, om)) / (2 * math.pi)
        g = Integrand(lambda x, om=om: np.exp(-1j * om * x) * eval_balanced(f, x) / (2 * math.pi),
                      f.breakpoints, tail_bound=tail)
        out[i] = integrate_line(g, "generalized", tol=tol, budget=8_000_000).value
    return out
