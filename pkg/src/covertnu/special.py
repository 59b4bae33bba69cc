"""Scalar numerics shared by every other module.

dB/linear conversion, the error function family, the Gaussian tail
function, and three 1-D solvers (quadrature, bounded minimisation,
bisection).  Everything here accepts an explicit :class:`Tolerance`; there
is no module-level state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _sp

#: ln(10)/10, the factor that turns a dB quantity into a natural-log one.
K_DB = math.log(10.0) / 10.0


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(RuntimeError):
    """An iterative routine stopped before meeting its tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 60

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise DomainError("tolerances must be nonnegative")
        if self.abs_tol + self.rel_tol <= 0:
            raise DomainError("abs_tol + rel_tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be a positive integer")


DEFAULT_TOL = Tolerance()


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def db_to_linear(x_db):
    """Power ratio in dB -> linear, ``10**(x/10)``."""
    arr = np.asarray(x_db, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite dB value: {x_db!r}")
    return _scalar_or_array(x_db, np.power(10.0, arr / 10.0))


def linear_to_db(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"linear power must be positive and finite: {x!r}")
    return _scalar_or_array(x, 10.0 * np.log10(arr))


def erf(x):
    return _scalar_or_array(x, _sp.erf(np.asarray(x, dtype=float)))


def erfc(x):
    return _scalar_or_array(x, _sp.erfc(np.asarray(x, dtype=float)))


def erfinv(y):
    """Inverse error function on the open interval (-1, 1)."""
    arr = np.asarray(y, dtype=float)
    if np.any(~(np.abs(arr) < 1.0)):
        raise DomainError(f"erfinv is defined on (-1, 1), got {y!r}")
    return _scalar_or_array(y, _sp.erfinv(arr))


def q_function(x):
    """Standard normal tail probability, ``Q(x) = erfc(x/sqrt 2)/2``."""
    return _scalar_or_array(x, _sp.ndtr(-np.asarray(x, dtype=float)))


def norm_cdf(x):
    return _scalar_or_array(x, _sp.ndtr(np.asarray(x, dtype=float)))


def integrate(f: Callable[[float], float], lo: float, hi: float,
              tol: Tolerance = DEFAULT_TOL, breakpoints=()) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    ``breakpoints`` lists interior points where ``f`` jumps or kinks; the
    interval is split there so the rule never straddles a discontinuity.
    ``tol.max_iter`` caps the number of subintervals per piece.

    Raises :class:`ConvergenceError` (carrying the best estimate) when the
    requested accuracy is not reached.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    cuts = sorted({float(b) for b in breakpoints if lo < b < hi})
    edges = [lo, *cuts, hi]
    total = 0.0
    failures = []
    for a, b in zip(edges[:-1], edges[1:]):
        # quad appends a message to its output only when ier != 0
        out = _integrate.quad(f, a, b, epsabs=tol.abs_tol, epsrel=tol.rel_tol,
                              limit=tol.max_iter, full_output=True)
        total += out[0]
        if len(out) > 3:
            failures.append(f"[{a:.6g}, {b:.6g}]: {out[3].splitlines()[0]}")
    if failures:
        raise ConvergenceError(
            "quadrature did not converge on " + "; ".join(failures),
            estimate=total)
    return total


def minimize_scalar(f: Callable, lo: float, hi: float,
                    tol: Tolerance = DEFAULT_TOL, grid_points: int = 4097,
                    vectorized: bool = False) -> tuple[float, float]:
    """Global-ish minimum of ``f`` on ``[lo, hi]``.

    A uniform grid scan is refined by bounded Brent search inside the two
    cells around the best grid point.  Grid ties go to the smallest x, and
    the refined point only replaces the grid point when strictly better.
    Set ``vectorized`` when ``f`` maps arrays elementwise.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    if grid_points < 4096:
        raise DomainError("grid scan needs at least 4096 points")
    xs = np.linspace(lo, hi, grid_points)
    if vectorized:
        fs = np.asarray(f(xs), dtype=float)
    else:
        fs = np.fromiter((f(x) for x in xs), dtype=float, count=xs.size)
    if not np.all(np.isfinite(fs)):
        bad = xs[~np.isfinite(fs)][0]
        raise FloatingPointError(f"objective is not finite at x={bad!r}")
    i = int(np.argmin(fs))
    best_x, best_f = float(xs[i]), float(fs[i])

    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, xs.size - 1)]
    xatol = max(tol.abs_tol, tol.rel_tol * (hi - lo))
    scalar_f = (lambda x: float(f(np.asarray([x]))[0])) if vectorized else f
    res = _optimize.minimize_scalar(
        scalar_f, bounds=(a, b), method="bounded",
        options={"xatol": xatol, "maxiter": max(500, tol.max_iter)})
    if np.isfinite(res.fun) and res.fun < best_f:
        best_x, best_f = float(res.x), float(res.fun)
    return best_x, best_f


def bisect(f: Callable[[float], float], lo: float, hi: float, target: float,
           tol: Tolerance = DEFAULT_TOL) -> float:
    """Solve ``f(x) = target`` for monotone ``f`` bracketed by ``[lo, hi]``.

    Works for either direction of monotonicity.  For step functions the
    result converges to the leftmost x at which ``f`` reaches or crosses
    ``target``.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    sign = 1.0 if fhi >= flo else -1.0
    g_lo, g_hi, t = sign * flo, sign * fhi, sign * target
    if not g_lo <= t <= g_hi:
        raise DomainError(
            f"target {target!r} not bracketed: f({lo!r})={flo!r}, f({hi!r})={fhi!r}")
    if g_lo >= t:
        return float(lo)
    # invariant: g(lo) < t <= g(hi)
    for _ in range(tol.max_iter):
        if hi - lo <= tol.abs_tol + tol.rel_tol * max(abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sign * f(mid) >= t:
            hi = mid
        else:
            lo = mid
    return float(hi)
