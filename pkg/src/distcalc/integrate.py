"""Breakpoint-aware adaptive quadrature for complex integrands.

Every panel is integrated with the embedded Gauss-Kronrod (7, 15) pair and
``|K15 - G7|`` is used as the panel error.  Panels are refined in batches:
each round all panels are evaluated in one vectorised call, which keeps the
pure-Python overhead proportional to the number of rounds rather than the
number of panels.

Integrands are vectorised: ``evaluator(x)`` receives a 1-d float array and
returns an array of the same length (or shape ``(len(x), K)`` for a family
of ``K`` integrands sharing one panel set, see :func:`integrate_family`).

Unbounded integrals follow the three conventions for improper Riemann
integrals on the line:

* ``generalized``      both one-sided limits exist, computed separately;
* ``absolute``         the generalized integral of ``|f|``;
* ``principal_value``  the symmetric limit of ``int_{-R}^{R} f``.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInterval, MissingCertificate, ModeMismatch, NonConvergence

DEFAULT_BUDGET = 1_000_000
MODES = ("bounded", "generalized", "absolute", "principal_value")

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point node set on [-1, 1] and the matching weight vectors.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[13, 11, 9]] = _WG[:3]


@dataclass(frozen=True)
class Integrand:
    """A vectorised complex integrand with jump locations and decay data.

    ``decay_certificate = (C, p)`` asserts ``|f(x)| <= C / |x|**p`` for
    ``|x| >= 1``.  ``tail_bound(R)`` may be given instead; it must bound
    ``int_{|x| >= R} |f|`` for ``R >= 1``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple[float, ...] = ()
    decay_certificate: tuple[float, float] | None = None
    tail_bound: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        bps = tuple(sorted({float(b) for b in self.breakpoints}))
        if any(not math.isfinite(b) for b in bps):
            raise ValueError("breakpoints must be finite")
        object.__setattr__(self, "breakpoints", bps)
        if self.decay_certificate is not None:
            c, p = self.decay_certificate
            if not (c > 0 and p > 1):
                raise ValueError("decay certificate needs C > 0 and p > 1")

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def tail(self, radius: float) -> float | None:
        """Certified bound on the mass of ``|f|`` outside ``[-R, R]``."""
        if self.tail_bound is not None:
            return float(self.tail_bound(radius))
        if self.decay_certificate is not None:
            c, p = self.decay_certificate
            return 2.0 * c * radius ** (1.0 - p) / (p - 1.0)
        return None

    def absolute(self) -> Integrand:
        ev = self.evaluator
        return Integrand(lambda x: np.abs(ev(x)), self.breakpoints,
                         self.decay_certificate, self.tail_bound)


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    abs_error_estimate: float
    mode: str
    truncation_radius: float | None = None
    panels: int = 0


@dataclass(frozen=True)
class SwapReport:
    lhs: complex
    rhs: complex
    discrepancy: float


@dataclass
class _Panels:
    a: np.ndarray
    b: np.ndarray
    val: np.ndarray
    err: np.ndarray


def _eval_panels(fn, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fx = np.asarray(fn(x))
    vector = fx.ndim == 2
    fx = fx.reshape((len(a), 15) + fx.shape[1:])
    if vector:
        k = np.einsum("pn...,n->p...", fx, _KW) * half[:, None]
        g = np.einsum("pn...,n->p...", fx, _GW) * half[:, None]
        err = np.max(np.abs(k - g), axis=1)
    else:
        k = fx @ _KW * half
        g = fx @ _GW * half
        err = np.abs(k - g)
    if not np.all(np.isfinite(k)):
        raise NonConvergence("integrand produced a non-finite value")
    return k, err


def _adaptive(fn, cuts: Sequence[float], tol: float, budget: int):
    """Globally adaptive integration over consecutive ``cuts``.

    Returns ``(value, error, panels, evaluations)``.
    """
    cuts = np.asarray(cuts, dtype=float)
    a, b = cuts[:-1], cuts[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    if len(a) == 0:
        return 0.0, 0.0, 0, 0
    val, err = _eval_panels(fn, a, b)
    evals = 15 * len(a)
    while True:
        total = float(np.sum(err))
        if total <= tol:
            return np.sum(val, axis=0), total, len(a), evals
        # panels too narrow to split in floating point are frozen
        splittable = (b - a) > 64 * np.finfo(float).eps * np.maximum(np.abs(a), np.abs(b)) + 1e-300
        frozen = float(np.sum(err[~splittable]))
        if frozen > tol / 2:
            raise NonConvergence(
                f"error estimate {total:.3e} stuck above tol {tol:.3e} on unsplittable panels")
        order = np.argsort(-np.where(splittable, err, -1.0), kind="stable")
        remaining = total - np.cumsum(err[order])
        n_split = int(np.searchsorted(-remaining, -tol / 2)) + 1
        n_split = min(n_split, int(np.sum(splittable)))
        chosen = np.sort(order[:n_split])
        if evals + 30 * n_split > budget:
            raise NonConvergence(
                f"panel budget of {budget} evaluations exhausted (error {total:.3e}, tol {tol:.3e})")
        ca, cb = a[chosen], b[chosen]
        cm = 0.5 * (ca + cb)
        na = np.concatenate([ca, cm])
        nb = np.concatenate([cm, cb])
        nval, nerr = _eval_panels(fn, na, nb)
        evals += 30 * n_split
        mask = np.ones(len(a), dtype=bool)
        mask[chosen] = False
        a = np.concatenate([a[mask], na])
        b = np.concatenate([b[mask], nb])
        val = np.concatenate([val[mask], nval])
        err = np.concatenate([err[mask], nerr])
        # positional order keeps summation deterministic
        pos = np.argsort(a, kind="stable")
        a, b, val, err = a[pos], b[pos], val[pos], err[pos]


def _cuts(a: float, b: float, breakpoints: Sequence[float]) -> list[float]:
    inner = [x for x in breakpoints if a < x < b]
    return [a, *inner, b]


def integrate_bounded(f: Integrand, a: float, b: float, tol: float = 1e-10,
                      budget: int = DEFAULT_BUDGET) -> IntegralResult:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if not (a < b):
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    value, err, panels, _ = _adaptive(f.evaluator, _cuts(a, b, f.breakpoints), tol, budget)
    return IntegralResult(complex(value), err, "bounded", None, panels)


def integrate_family(evaluator, a: float, b: float, breakpoints=(), tol: float = 1e-10,
                     budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, float]:
    """Integrate a vector-valued integrand; ``tol`` applies to every component."""
    if not (a < b):
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    value, err, _, _ = _adaptive(evaluator, _cuts(a, b, breakpoints), tol, budget)
    return np.asarray(value), err


def _geometric(start: float, stop: float) -> list[float]:
    pts = [start]
    r = max(1.0, start)
    while r < stop:
        if r > start:
            pts.append(r)
        r *= 2.0
    pts.append(stop)
    return pts


def _side_cuts(radius: float, breakpoints: Sequence[float], sign: int) -> list[float]:
    """Cuts covering ``[0, R]`` (sign=+1) or ``[-R, 0]`` (sign=-1) in increasing order."""
    pts = set(_geometric(0.0, radius))
    pts.update(sign * x for x in breakpoints if 0 < sign * x < radius)
    # geometric refinement away from every feature point
    for x in list(pts):
        for h in (0.25, 0.5, 1.0):
            for y in (x - h, x + h):
                if 0 < y < radius:
                    pts.add(y)
    ordered = sorted(pts)
    return ordered if sign > 0 else sorted(-x for x in ordered)


class _Ladder:
    """Doubling radius ladder for one side (or both sides, symmetrically)."""

    def __init__(self, fn, breakpoints, sides: tuple[int, ...], tol: float, budget: int):
        self.fn = fn
        self.breakpoints = breakpoints
        self.sides = sides
        self.tol = tol
        self.budget = budget
        self.value = 0.0
        self.quad_err = 0.0
        self.panels = 0
        self.evals = 0

    def _piece(self, lo: float, hi: float, sign: int):
        if sign > 0:
            cuts = _cuts(lo, hi, self.breakpoints)
        else:
            cuts = _cuts(-hi, -lo, self.breakpoints)
        v, e, p, n = _adaptive(self.fn, cuts, self.tol, self.budget - self.evals)
        self.panels += p
        self.evals += n
        self.quad_err += e
        return v

    def start(self, radius: float):
        total = 0.0
        for s in self.sides:
            cuts = _side_cuts(radius, self.breakpoints, s)
            v, e, p, n = _adaptive(self.fn, cuts, self.tol, self.budget - self.evals)
            self.panels += p
            self.evals += n
            self.quad_err += e
            total = total + v
        self.value = total
        return total

    def extend(self, lo: float, hi: float):
        inc = 0.0
        for s in self.sides:
            inc = inc + self._piece(lo, hi, s)
        self.value = self.value + inc
        return inc


def _run_ladder(fn, breakpoints, sides, r0, tol, tail, budget, max_doublings):
    """Returns (value, error, radius, panels) or None if the ladder never settles."""
    ladder = _Ladder(fn, breakpoints, sides, tol / 64, budget)
    ladder.start(r0)
    radius = r0
    small = 0
    for _ in range(max_doublings):
        if tail is not None:
            t = tail(radius)
            if t is not None and t <= tol / 2:
                return ladder.value, ladder.quad_err + t, radius, ladder.panels
        inc = ladder.extend(radius, 2 * radius)
        radius *= 2
        mag = float(np.max(np.abs(inc)))
        small = small + 1 if mag <= tol / 8 else 0
        if small >= 2:
            return ladder.value, ladder.quad_err + mag, radius, ladder.panels
    return None


def _line(fn, breakpoints, mode, tol, radius, tail, budget, max_doublings):
    r0 = max(1.0, radius or 1.0, 2.0 * max((abs(x) for x in breakpoints), default=0.0))
    if tail is not None:
        # certified truncation when it is affordable
        r = r0
        for _ in range(20):
            if tail(r) <= tol / 2:
                break
            r *= 2.0
        if tail(r) <= tol / 2:
            sides = (-1, 1)
            total, err, panels = 0.0, tail(r), 0
            for s in sides:
                v, e, p, _ = _adaptive(fn, _side_cuts(r, breakpoints, s), tol / 4, budget)
                total = total + v
                err += e
                panels += p
            return total, err, r, panels
    if mode == "principal_value":
        out = _run_ladder(fn, breakpoints, (-1, 1), r0, tol, tail, budget, max_doublings)
        if out is None:
            raise NonConvergence("principal value ladder did not settle")
        return out
    results = []
    for s in (-1, 1):
        out = _run_ladder(fn, breakpoints, (s,), r0, tol / 2, tail, budget // 2, max_doublings)
        if out is None:
            side = "left" if s < 0 else "right"
            if mode == "generalized":
                raise ModeMismatch(f"{side} one-sided limit does not exist within the ladder")
            raise NonConvergence(f"{side} ladder of |f| did not settle")
        results.append(out)
    value = results[0][0] + results[1][0]
    err = results[0][1] + results[1][1]
    return value, err, max(results[0][2], results[1][2]), results[0][3] + results[1][3]


def integrate_line(f: Integrand, mode: str = "generalized", tol: float = 1e-10,
                   radius: float | None = None, budget: int = DEFAULT_BUDGET,
                   max_doublings: int = 48) -> IntegralResult:
    """Integrate ``f`` over the whole line in one of the three improper modes.

    With a certificate the truncation radius is chosen so the certified tail
    is at most ``tol / 2``.  Without one (or when the certified radius is
    impractically large) the integral is extended along a doubling ladder
    until two successive increments fall below ``tol / 8``.
    """
    if mode not in ("generalized", "absolute", "principal_value"):
        raise ValueError(f"unknown mode {mode!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = f.absolute() if mode == "absolute" else f
    tail = g.tail if (g.tail_bound is not None or g.decay_certificate is not None) else None
    if mode != "principal_value" and tail is None and radius is None:
        raise MissingCertificate(f"{mode} mode needs a decay certificate or an explicit radius")
    value, err, r, panels = _line(g.evaluator, g.breakpoints, mode, tol, radius, tail,
                                  budget, max_doublings)
    value = complex(value)
    if mode == "absolute":
        value = complex(max(value.real, 0.0), 0.0)
    if err > tol:
        raise NonConvergence(f"error estimate {err:.3e} exceeds tol {tol:.3e}")
    return IntegralResult(value, float(err), mode, float(r), panels)


def line_family(evaluator, breakpoints=(), tol: float = 1e-10, tail=None,
                radius: float | None = None, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, float]:
    """Generalized-mode line integral of a vector-valued integrand."""
    value, err, _, _ = _line(evaluator, tuple(sorted(set(breakpoints))), "generalized", tol,
                             radius, tail, budget, 48)
    return np.asarray(value), err


def iterated_swap_check(G: Callable[[np.ndarray, np.ndarray], np.ndarray],
                        breakpoints_x=(), breakpoints_y=(), N_max: float = 10.0,
                        tol: float = 1e-8, budget: int = 4 * DEFAULT_BUDGET) -> SwapReport:
    """Compare both iterated integrals of ``G`` over ``[-N, N]^2``.

    ``G(x, y)`` must broadcast over numpy arrays.  This is a desk-scale
    consistency harness for order-of-integration swaps, not a proof.
    """
    n = float(N_max)
    inner_tol = tol / (8.0 * n)

    def inner(outer_pts, over_y: bool):
        outer_pts = np.asarray(outer_pts, dtype=float)
        if over_y:
            fam = lambda t: G(outer_pts[None, :], t[:, None])
            bps = breakpoints_y
        else:
            fam = lambda t: G(t[:, None], outer_pts[None, :])
            bps = breakpoints_x
        vals, _ = integrate_family(fam, -n, n, bps, inner_tol, budget)
        return vals

    rhs = integrate_bounded(Integrand(lambda x: inner(x, True), breakpoints_x), -n, n, tol / 2, budget)
    lhs = integrate_bounded(Integrand(lambda y: inner(y, False), breakpoints_y), -n, n, tol / 2, budget)
    return SwapReport(lhs.value, rhs.value, abs(lhs.value - rhs.value))
