"""CGF of X_r, saddlepoint solving, Lugannani-Rice CDF and the density of R.

X_r = e'(A - rB)e is the signed quadratic form whose sign probabilities give
the CDF of R.  Its CGF is a sum of noncentral chi-square cumulant terms over
the pencil spectrum; the saddlepoint is the unique root of K' inside the
convergence strip, found by safeguarded Newton bracketed by the strip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .core import DEFAULT_TOL, QuadFormRatio, SpectrumAtR, Tolerances, spectrum_at
from .errors import InvalidInputError, NumericalError, UnsupportedInstanceError
from .rootfind import newton_bracketed

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Strip:
    """Open convergence strip (lo, hi) of the MGF of X_r, containing 0."""

    lo: float
    hi: float


@dataclass(frozen=True)
class CgfEval:
    s: float
    K: float
    K1: float
    K2: float
    K3: float


@dataclass(frozen=True)
class SaddlepointSolution:
    s_hat: float
    w_hat: float
    u_hat: float
    cgf_at_shat: CgfEval


@dataclass(frozen=True)
class CdfApprox:
    value: float
    branch: str  # "regular", "mean" or "boundary"
    s_hat: float
    w_hat: float
    u_hat: float


@dataclass(frozen=True)
class DensityApprox:
    value: float
    branch: str
    J: float
    s_hat: float
    w_hat: float
    u_hat: float


def strip(spectrum: SpectrumAtR, tol: Tolerances = DEFAULT_TOL) -> Strip:
    """Convergence strip: 1/(2*lambda_min) < s < 1/(2*lambda_max).

    One-signed spectra give a half-infinite strip on the unconstrained side.
    """
    lam = spectrum.lambdas
    scale = np.max(np.abs(lam))
    if scale == 0.0:
        raise InvalidInputError("all-zero spectrum: degenerate instance")
    lam_min, lam_max = float(lam[0]), float(lam[-1])
    lo = 1.0 / (2.0 * lam_min) if lam_min < 0 else -np.inf
    hi = 1.0 / (2.0 * lam_max) if lam_max > 0 else np.inf
    return Strip(lo=lo, hi=hi)


def cgf(spectrum: SpectrumAtR, s: float, tol: Tolerances = DEFAULT_TOL) -> CgfEval:
    """K and its first three derivatives at a strip-interior tilt s."""
    lam = np.asarray(spectrum.lambdas)
    nu2 = np.asarray(spectrum.nu) ** 2
    d = 1.0 - 2.0 * s * lam
    if np.any(d <= 0.0):
        raise InvalidInputError(f"tilt s={s} is outside the convergence strip")
    K = float(np.sum(-0.5 * np.log1p(-2.0 * s * lam) + s * lam * nu2 / d))
    K1 = float(np.sum(lam / d + lam * nu2 / d**2))
    K2 = float(np.sum(2.0 * lam**2 / d**2 + 4.0 * lam**2 * nu2 / d**3))
    K3 = float(np.sum(8.0 * lam**3 / d**3 + 24.0 * lam**3 * nu2 / d**4))
    return CgfEval(s=float(s), K=K, K1=K1, K2=K2, K3=K3)


def solve_saddlepoint(
    spectrum: SpectrumAtR, tol: Tolerances = DEFAULT_TOL
) -> SaddlepointSolution:
    """Unique root of K' in the strip, with the w-hat/u-hat pair."""
    st = strip(spectrum, tol)
    if not (np.isfinite(st.lo) and np.isfinite(st.hi)):
        # one-signed spectrum: K' never changes sign, r is outside the open support
        raise UnsupportedInstanceError(
            "no saddlepoint: the spectrum is one-signed (r outside the open support)"
        )
    lam = np.asarray(spectrum.lambdas)
    nu2 = np.asarray(spectrum.nu) ** 2
    a = st.lo + 1e-12 * abs(st.lo)
    b = st.hi - 1e-12 * abs(st.hi)
    k1_scale = float(np.sum(np.abs(lam) * (1.0 + nu2)))

    def f(s):
        d = 1.0 - 2.0 * s * lam
        return float(np.sum(lam / d + lam * nu2 / d**2))

    def fprime(s):
        d = 1.0 - 2.0 * s * lam
        return float(np.sum(2.0 * lam**2 / d**2 + 4.0 * lam**2 * nu2 / d**3))

    s_hat = newton_bracketed(f, fprime, a, b, x0=0.0, f_tol=0.0)
    ce = cgf(spectrum, s_hat, tol)
    if abs(ce.K1) > tol.tol_root * k1_scale:
        raise NumericalError(
            f"saddlepoint solve left |K'|={abs(ce.K1):.3e} above tolerance"
        )
    w_hat = math.copysign(math.sqrt(max(-2.0 * ce.K, 0.0)), s_hat)
    u_hat = s_hat * math.sqrt(ce.K2)
    return SaddlepointSolution(s_hat=s_hat, w_hat=w_hat, u_hat=u_hat, cgf_at_shat=ce)


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


# eigenvalues are zero "within floating point" at this relative scale; the
# structural tol_zero_eig is far too coarse here (interior spectra can have
# genuine eigenvalue ratios below 1e-9 deep in a tail)
_BOUNDARY_RTOL = 1e-13


def _boundary_side(spectrum: SpectrumAtR, tol: Tolerances):
    """0.0/1.0 when r sits at or beyond the support (one-signed spectrum), else None."""
    lam = np.asarray(spectrum.lambdas)
    scale = np.max(np.abs(lam))
    if scale == 0.0:
        raise InvalidInputError("all-zero spectrum: degenerate instance")
    if lam[-1] <= _BOUNDARY_RTOL * scale:
        return 1.0  # A - rB <= 0: X_r <= 0 almost surely
    if lam[0] >= -_BOUNDARY_RTOL * scale:
        return 0.0
    return None


def _lr_value(sol: SaddlepointSolution, spectrum: SpectrumAtR, tol: Tolerances):
    """Lugannani-Rice value plus branch tag, blending across the mean switch."""
    th = tol.mean_branch_threshold
    w, u = sol.w_hat, sol.u_hat
    need_mean = abs(w) < 3.0 * th
    mean_val = regular_val = None
    if need_mean:
        c0 = cgf(spectrum, 0.0, tol)
        mean_val = 0.5 + c0.K3 / (6.0 * _SQRT_2PI * c0.K2**1.5)
    if abs(w) >= th:
        regular_val = _norm_cdf(w) + _norm_pdf(w) * (1.0 / w - 1.0 / u)
    if abs(w) < th:
        return mean_val, "mean"
    if abs(w) < 3.0 * th:
        t = (abs(w) - th) / (2.0 * th)
        return (1.0 - t) * mean_val + t * regular_val, "regular"
    return regular_val, "regular"


def cdf(ratio: QuadFormRatio, r: float, tol: Tolerances = DEFAULT_TOL) -> CdfApprox:
    """First-order Lugannani-Rice approximation of Pr(R <= r)."""
    spectrum = spectrum_at(ratio, r, tol)
    side = _boundary_side(spectrum, tol)
    if side is not None:
        return CdfApprox(value=side, branch="boundary",
                         s_hat=math.nan, w_hat=math.nan, u_hat=math.nan)
    sol = solve_saddlepoint(spectrum, tol)
    value, branch = _lr_value(sol, spectrum, tol)
    return CdfApprox(
        value=min(max(value, 0.0), 1.0),
        branch=branch,
        s_hat=sol.s_hat,
        w_hat=sol.w_hat,
        u_hat=sol.u_hat,
    )


def _jacobian_weight(spectrum: SpectrumAtR, s: float) -> float:
    d = 1.0 - 2.0 * s * np.asarray(spectrum.lambdas)
    H = np.asarray(spectrum.H)
    x = np.asarray(spectrum.nu) / d
    return float(np.sum(np.diag(H) / d) + x @ H @ x)


def pdf(ratio: QuadFormRatio, r: float, tol: Tolerances = DEFAULT_TOL) -> DensityApprox:
    """Saddlepoint density of R at r, assembled in log space."""
    spectrum = spectrum_at(ratio, r, tol)
    side = _boundary_side(spectrum, tol)
    if side is not None:
        return DensityApprox(value=0.0, branch="boundary", J=math.nan,
                             s_hat=math.nan, w_hat=math.nan, u_hat=math.nan)
    sol = solve_saddlepoint(spectrum, tol)
    ce = sol.cgf_at_shat
    J = _jacobian_weight(spectrum, sol.s_hat)
    if J <= 0.0:
        raise NumericalError(f"nonpositive Jacobian weight J={J:g} at r={r}")
    ln_f = math.log(J) + ce.K - 0.5 * math.log(2.0 * math.pi * ce.K2)
    return DensityApprox(
        value=math.exp(ln_f),
        branch="regular",
        J=J,
        s_hat=sol.s_hat,
        w_hat=sol.w_hat,
        u_hat=sol.u_hat,
    )


def normalized_pdf(
    ratio: QuadFormRatio,
    grid,
    tol: Tolerances = DEFAULT_TOL,
    support_bounds: tuple | None = None,
) -> np.ndarray:
    """Saddlepoint density renormalized to unit mass over the support."""
    from .support import support as _support  # local import avoids a cycle

    grid = np.asarray(grid, dtype=float)
    if support_bounds is None:
        info = _support(ratio, tol)
        lo, hi = info.l, info.r_bar
    else:
        lo, hi = support_bounds

    def f(r):
        return pdf(ratio, r, tol).value

    mass, err = scipy.integrate.quad(f, lo, hi, epsabs=tol.tol_quad * 10,
                                     epsrel=1e-10, limit=400)
    if not np.isfinite(mass) or mass <= 0.0 or err > 1e-6 * mass:
        raise NumericalError(
            f"normalization quadrature failed: mass={mass:g}, err={err:g}"
        )
    return np.array([f(r) / mass for r in grid])
