"""Numerical experiments on distributions: probing, recovery, witnesses, bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..catalog import CatalogFunction, numeric_ft
from ..errors import BoundViolated, MollifierInvalid, NonConvergence, ProbeFamilyUnsupported, TypeMismatch
from ..integrate import Integrand, integrate_bounded, integrate_line, line_family
from ..schwartz import TestFunction, decay_constant, fourier_testfn, gauss, integral, scale_translate, seminorm
from .core import Distribution, PointAtom, RegularAtom, pair_detailed

FAMILIES = ("gauss_modulated", "fourier_exponential", "box_window")
TRANSFORM_BOUND_CONSTANT = 0.5  # sup|F[phi]| <= (1/2pi) int |phi| <= (1/2pi) * pi * (C00 + C20)


# --- probing -------------------------------------------------------------------

@dataclass
class Verdict:
    status: str  # "separated" | "indistinguishable"
    param: object = None
    gap: float = 0.0
    max_gap: float = 0.0
    per_probe: list = field(default_factory=list)

    @property
    def separated(self) -> bool:
        return self.status == "separated"


def _single_regular(L: Distribution, need_G: bool) -> RegularAtom:
    if len(L.atoms) != 1 or not isinstance(L.atoms[0], RegularAtom) or L.atoms[0].order != 0:
        raise ProbeFamilyUnsupported("probe family needs a single order-0 regular atom")
    at = L.atoms[0]
    if need_G and not at.f.in_G:
        raise ProbeFamilyUnsupported(f"{at.f.name} is not absolutely integrable")
    return at


def _window_integral(at: RegularAtom, a: float, b: float, tol: float):
    res = integrate_bounded(Integrand(at.f, at.f.breakpoints), a, b, tol / max(abs(at.coeff), 1e-300))
    return at.coeff * res.value, abs(at.coeff) * res.abs_error_estimate


def probe_separation(L: Distribution, M: Distribution, family: str = "gauss_modulated",
                     params=None, tol: float = 1e-8) -> Verdict:
    """Look for a probe on which ``L`` and ``M`` differ by more than ``tol`` plus quadrature error.

    ``gauss_modulated`` probes are ``exp(-i w x) exp(-x^2)`` (params: ``w``);
    ``fourier_exponential`` pairs against ``exp(i c x)`` (params: ``c``);
    ``box_window`` integrates over ``[a, b]`` (params: ``(a, b)``).
    Returning ``indistinguishable`` only means no listed probe separated them.
    """
    if family not in FAMILIES:
        raise ProbeFamilyUnsupported(f"unknown probe family {family!r}")
    if params is None:
        params = list(np.linspace(-4, 4, 32)) if family != "box_window" else \
            [(x, x + 0.5) for x in np.linspace(-4, 3.5, 32)]
    same = L == M
    per, best, max_gap = [], None, 0.0
    if family == "gauss_modulated":
        diff = L - M
        for w in params:
            r = pair_detailed(diff, gauss(float(w)), tol)
            per.append((float(w), abs(r.value), r.error))
    else:
        la = _single_regular(L, family == "fourier_exponential")
        ma = _single_regular(M, family == "fourier_exponential")
        for p in params:
            if same:
                per.append((p, 0.0, 0.0))
                continue
            if family == "fourier_exponential":
                c = float(p)
                # int f e^{icx} = 2 pi F[f](-c)
                vl = la.coeff * 2 * math.pi * numeric_ft(la.f, [-c], tol / (8 * math.pi))[0]
                vm = ma.coeff * 2 * math.pi * numeric_ft(ma.f, [-c], tol / (8 * math.pi))[0]
                per.append((c, abs(vl - vm), tol / 2))
            else:
                a, b = map(float, p)
                vl, el = _window_integral(la, a, b, tol / 4)
                vm, em = _window_integral(ma, a, b, tol / 4)
                per.append(((a, b), abs(vl - vm), el + em))
    for p, gap, err in per:
        max_gap = max(max_gap, gap)
        if gap > tol + err and best is None:
            best = (p, gap)
    if best is not None:
        return Verdict("separated", best[0], best[1], max_gap, per)
    return Verdict("indistinguishable", None, 0.0, max_gap, per)


# --- recovery ------------------------------------------------------------------

def check_mollifier(phi: TestFunction, tol: float = 1e-8) -> None:
    mass = integral(phi)
    if abs(mass - 1) > tol:
        raise MollifierInvalid(f"mollifier mass {mass.real:.12g} differs from 1")
    hints = np.asarray(phi.features() or [0.0])
    r = 2 * max(1.0, float(np.max(np.abs(hints))))
    x = np.linspace(0, r, 1001)
    odd = float(np.max(np.abs(phi(x) - phi(-x))))
    if odd > tol * max(1.0, float(np.max(np.abs(phi(x))))):
        raise MollifierInvalid(f"mollifier is not even (odd part up to {odd:.3e})")


def default_mollifier() -> TestFunction:
    """``exp(-x^2) / sqrt(pi)``."""
    return gauss(0) / math.sqrt(math.pi)


@dataclass
class RecoveryReport:
    c: float
    ks: list[float]
    estimates: list[complex]
    errors: list[float]
    extrapolated: complex | None
    variant: str = "mollifier"


def _aitken(x1: complex, x2: complex, x3: complex) -> complex:
    d1, d2 = x2 - x1, x3 - x2
    den = d2 - d1
    if den == 0:
        return x3
    return x3 - d2 * d2 / den


def recover_point(L: Distribution, c: float, mollifier: TestFunction | None = None,
                  ks=(4, 16, 64, 256), tol: float = 1e-9, variant: str = "mollifier") -> RecoveryReport:
    """``L(k phi(k(x - c)))`` along ``ks``; the limit is the balanced value for regular ``L``.

    The ``box`` variant uses window averages ``(k/2) int_{c-1/k}^{c+1/k} f``
    and needs ``L`` to be a sum of order-0 regular atoms.
    """
    ks = [float(k) for k in ks]
    if any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k schedule must be positive and increasing")
    est, errs = [], []
    if variant == "box":
        if not all(isinstance(a, RegularAtom) and a.order == 0 for a in L.atoms):
            raise ProbeFamilyUnsupported("box-window recovery needs order-0 regular atoms")
        for k in ks:
            v, e = 0j, 0.0
            for at in L.atoms:
                vi, ei = _window_integral(at, c - 1 / k, c + 1 / k, tol * 2 / k / max(1, len(L.atoms)))
                v, e = v + vi, e + ei
            est.append(v * k / 2)
            errs.append(e * k / 2)
    else:
        mollifier = mollifier if mollifier is not None else default_mollifier()
        check_mollifier(mollifier, max(tol, 1e-10))
        for k in ks:
            r = pair_detailed(L, scale_translate(mollifier, k, c), tol)
            est.append(r.value)
            errs.append(r.error)
    extra = _aitken(*est[-3:]) if len(est) >= 3 else None
    return RecoveryReport(float(c), ks, est, errs, extra, variant)


@dataclass
class WitnessReport:
    c: float
    ks: list[float]
    values: list[complex]
    growth_exponent: float | None


def regularity_witness(L: Distribution, c: float, mollifier: TestFunction | None = None,
                       ks=(4, 8, 16, 32, 64, 128, 256), tol: float = 1e-9) -> WitnessReport:
    """Fit ``log|L(phi_{k,c})|`` against ``log k``.

    Bounded values (exponent near 0) are what a regular distribution produces;
    an exponent near 1 at ``c`` is the signature of a point mass there.
    """
    rep = recover_point(L, c, mollifier, ks, tol)
    mags = np.abs(np.asarray(rep.estimates))
    ok = mags > 0
    slope = None
    if np.count_nonzero(ok) >= 2:
        slope = float(np.polyfit(np.log(np.asarray(rep.ks)[ok]), np.log(mags[ok]), 1)[0])
    return WitnessReport(float(c), rep.ks, rep.estimates, slope)


# --- continuity ----------------------------------------------------------------

@dataclass
class ContinuityReport:
    ks: list[float]
    seminorms: dict
    pairings: list[complex]
    bounds: list[float] | None
    seminorms_decrease: bool
    pairings_decrease: bool


def _atom_bound(at, phi: TestFunction) -> float:
    """Bound on ``|atom(phi)|`` in terms of seminorms of ``phi``."""
    if isinstance(at, PointAtom):
        return abs(at.coeff) * seminorm(phi, 0, at.order).value
    if isinstance(at, RegularAtom):
        C, N = at.f.growth_certificate
        m = at.order
        c00 = seminorm(phi, 0, m).value
        cn2 = seminorm(phi, N + 2, m).value
        return abs(at.coeff) * C * (2**N * c00 + cn2 * 3**N * math.pi**2 / 6)
    return math.inf


def continuity_check(L: Distribution, base: TestFunction | None = None, ks=(1, 2, 4, 8, 16, 32),
                     mn_cap: int = 2, tol: float = 1e-9) -> ContinuityReport:
    """Follow ``phi_k = base / k``: seminorms and pairings must shrink, within the growth bound."""
    base = base if base is not None else gauss(0)
    ks = [float(k) for k in ks]
    sem = {}
    pairs, bounds = [], []
    for k in ks:
        phi = base / k
        for m in range(mn_cap + 1):
            for n in range(mn_cap + 1):
                sem.setdefault(f"{m},{n}", []).append(seminorm(phi, m, n).value)
        r = pair_detailed(L, phi, tol)
        pairs.append(r.value)
        b = sum(_atom_bound(at, phi) for at in L.atoms)
        bounds.append(b)
        if abs(r.value) > b + r.error + tol:
            raise BoundViolated(f"|L(phi_k)| = {abs(r.value):.6g} exceeds bound {b:.6g} at k={k:g}", k)

    def decreasing(seq) -> bool:
        return all(b <= a for a, b in zip(seq, seq[1:]))

    sem_ok = all(decreasing(v) for v in sem.values())
    pair_ok = decreasing([abs(p) for p in pairs])
    finite = [b for b in bounds if math.isfinite(b)]
    return ContinuityReport(ks, sem, pairs, bounds if finite else None, sem_ok, pair_ok)


@dataclass
class FTContinuityReport:
    ks: list[float]
    transform_seminorms: dict
    monotone: bool
    sup_transform: list[float]
    transform_bound: list[float]
    constant: float


def ft_continuity_check(base: TestFunction | None = None, ks=(1, 2, 4, 8, 16), mn_cap: int = 2,
                        constant: float = TRANSFORM_BOUND_CONSTANT) -> FTContinuityReport:
    """Seminorms of ``F[base / k]`` and the bound ``sup|F[phi]| <= constant (C00 + C20)``.

    The valid constant is 1/2; other values may be passed to test a claimed bound.
    """
    base = base if base is not None else gauss(1)
    ks = [float(k) for k in ks]
    sem: dict[str, list[float]] = {}
    sup, bound = [], []
    for k in ks:
        phi = base / k
        F = fourier_testfn(phi)
        for m in range(mn_cap + 1):
            for n in range(mn_cap + 1):
                sem.setdefault(f"{m},{n}", []).append(seminorm(F, m, n).value)
        sup.append(sem["0,0"][-1])
        bound.append(constant * (seminorm(phi, 0, 0).value + seminorm(phi, 2, 0).value))
    mono = all(all(b < a for a, b in zip(v, v[1:])) for v in sem.values())
    return FTContinuityReport(ks, sem, mono, sup, bound, constant)


# --- identities ----------------------------------------------------------------

@dataclass
class ResidualReport:
    lhs: complex
    rhs: complex
    residual: float
    error_estimate: float


def _regular_pair(f: CatalogFunction, phi: TestFunction, tol: float):
    return pair_detailed(Distribution((RegularAtom(1.0, 0, f),)), phi, tol)


def ibp_check(f: CatalogFunction, phi: TestFunction, tol: float = 1e-9) -> ResidualReport:
    """``int f' phi + int f phi'`` by two independent quadratures."""
    df = f.classical_derivative()
    if df is None:
        raise TypeMismatch(f"{f.name} has no classical derivative in the catalog")
    lhs_terms = Distribution(tuple(RegularAtom(c, 0, g) for c, g in df))
    a = pair_detailed(lhs_terms, phi, tol / 2)
    b = _regular_pair(f, phi.derivative(1), tol / 2)
    return ResidualReport(a.value, -b.value, abs(a.value + b.value), a.error + b.error)


def gpf_check(f: CatalogFunction, phi: TestFunction, tol: float = 1e-8) -> ResidualReport:
    """``int F[f] phi`` (numeric transform) against ``int f F[phi]``."""
    if not f.in_G:
        raise TypeMismatch(f"{f.name} is not absolutely integrable")
    rhs = _regular_pair(f, fourier_testfn(phi), tol / 2)
    l1 = integrate_line(Integrand(f, f.breakpoints, tail_bound=f.abs_tail), "absolute", tol=1e-6)
    norm = l1.value.real + l1.abs_error_estimate
    sup_f_hat = norm / (2 * math.pi)
    phi_l1 = integrate_line(Integrand(phi, phi.features(), tail_bound=_l1_tail(phi)), "absolute",
                            tol=1e-6)
    inner_tol = tol / (4 * (phi_l1.value.real + phi_l1.abs_error_estimate + 1e-300))

    def fhat_phi(w):
        w = np.asarray(w, dtype=float)
        fam = lambda x: np.exp(-1j * np.outer(x, w)) * f(x)[:, None] / (2 * math.pi)
        vals, _ = line_family(fam, f.breakpoints, tol=inner_tol,
                              tail=lambda R: f.abs_tail(R) / (2 * math.pi))
        return vals * phi(w)

    tail = lambda R: sup_f_hat * _l1_tail(phi)(R)
    lhs = integrate_line(Integrand(fhat_phi, phi.features(), tail_bound=tail), "generalized",
                         tol=tol / 4)
    err = lhs.abs_error_estimate + rhs.error + tol / 4
    return ResidualReport(lhs.value, rhs.value, abs(lhs.value - rhs.value), err)


def _l1_tail(phi: TestFunction):
    """Bound on ``int_{|x|>R} |phi|`` from ``sup |x^M phi|``."""

    def tail(R: float) -> float:
        if R <= 0:
            return math.inf
        return min(2 * decay_constant(phi, M, 0) * R ** (1 - M) / (M - 1) for M in (2, 4, 6, 8, 10, 12))

    return tail


def _tapered(fn, r0: float, r1: float, tol: float) -> complex:
    """Mean of ``int_{-R}^{R} fn`` over ``R`` in ``[r0, r1]``: a triangular taper past ``r0``."""
    core_part = integrate_bounded(Integrand(fn), -r0, r0, tol / 2).value
    ramp = lambda w: fn(w) * (r1 - np.abs(w)) / (r1 - r0)
    edges = sum(integrate_bounded(Integrand(ramp), a, b, tol / 4).value
                for a, b in ((-r1, -r0), (r0, r1)))
    return core_part + edges


def fourier_inversion(f: CatalogFunction, x: float, tol: float = 1e-4) -> complex:
    """Principal value ``int F[f](w) exp(i w x) dw`` using the closed-form transform of ``f``.

    Symmetric truncations of slowly decaying transforms oscillate around the
    limit with amplitude ``O(1/R)``.  Their running mean over ``R`` in
    ``[R, 2R]`` has the same limit and settles like ``O(1/R^2)``; ``R`` is
    doubled until two successive means agree to ``tol / 2``.
    """
    images = f.fourier_images()
    if not images or any(not hasattr(im, "function") for im in images):
        raise TypeMismatch(f"{f.name} has no closed-form regular transform")
    fn = lambda w: sum(im.coeff * im.function(w) for im in images) * np.exp(1j * w * x)
    prev, r = None, 8.0
    while r <= 2.0 ** 16:
        val = _tapered(fn, r, 2 * r, tol / 8)
        if prev is not None and abs(val - prev) <= tol / 2:
            return val
        prev, r = val, 2 * r
    raise NonConvergence(f"tapered inversion integral did not settle by R = {r:g}")


__all__ = [
    "Verdict", "probe_separation", "FAMILIES", "check_mollifier", "default_mollifier",
    "RecoveryReport", "recover_point", "WitnessReport", "regularity_witness",
    "ContinuityReport", "continuity_check", "FTContinuityReport", "ft_continuity_check",
    "TRANSFORM_BOUND_CONSTANT", "ResidualReport", "ibp_check", "gpf_check", "fourier_inversion",
]
