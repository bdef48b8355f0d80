"""Safeguarded Newton iteration for monotone scalar root problems."""

from __future__ import annotations

import math

from .errors import NumericalError


def newton_bracketed(f, fprime, lo: float, hi: float, x0: float | None = None,
                     f_tol: float = 0.0, max_iter: int = 200) -> float:
    """Root of an increasing f on (lo, hi) with a sign change across it.

    Newton steps are taken while they stay inside the current bracket;
    otherwise the step falls back to bisection.  Stops when |f| <= f_tol or
    the bracket/step collapses to machine precision.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa > 0.0 or fb < 0.0:
        raise NumericalError(
            f"no sign change across the bracket: f({a:g})={fa:g}, f({b:g})={fb:g}"
        )
    x = x0 if x0 is not None and a < x0 < b else 0.5 * (a + b)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0.0 or abs(fx) <= f_tol:
            return x
        if fx > 0.0:
            b = x
        else:
            a = x
        d = fprime(x)
        step_ok = False
        if d > 0.0 and math.isfinite(d):
            x_new = x - fx / d
            if a < x_new < b:
                step_ok = True
        if not step_ok:
            x_new = 0.5 * (a + b)
        if abs(x_new - x) <= 1e-16 * (abs(x) + 1e-300) or a >= b:
            return x_new
        x = x_new
    return x
