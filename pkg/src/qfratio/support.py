"""Support of R, tail-class membership and edge eigen-structure.

The support endpoints and their case classification follow the block
decomposition of A in the eigenbasis of B.  The edge structure collects
everything the tail-limit formulas need: the multiplicity m of the
vanishing pencil eigenvalue, the limiting noncentralities nu0, the
relative vanishing rates omega and the limiting B-block H_edge.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    QuadFormRatio,
    Tolerances,
    _frozen,
    fix_eigenvector_signs,
    is_degenerate,
    negate,
)
from .errors import InvalidInputError, NumericalError, UnsupportedInstanceError

CASE_1 = "Case1"
CASE_2A = "Case2a"
CASE_2B = "Case2b"
CASE_2C_FINITE = "Case2c-finite"
CASE_2C_INFINITE = "Case2c-infinite"
DEGENERATE = "Degenerate"

_RIGHT_TAIL_CASES = frozenset({CASE_1, CASE_2B, CASE_2C_FINITE, CASE_2C_INFINITE})


@dataclass(frozen=True)
class BlockDecomp:
    """Blocks of A in the eigenbasis of B, null directions of B last."""

    p: int
    O_B: np.ndarray  # rows are eigenvectors of B; last p rows span null(B)
    Lambda_B: np.ndarray  # the n-p positive eigenvalues of B
    C11: np.ndarray
    C12: np.ndarray
    C21: np.ndarray
    C22: np.ndarray


@dataclass(frozen=True)
class SupportInfo:
    l: float
    r_bar: float
    case_tag: str
    in_CR: bool
    in_CL: bool


@dataclass(frozen=True)
class EdgeStructure:
    """Limiting data at one edge of support.

    For side="left" all quantities refer to the right edge of -R.
    omega is ascending with omega[-1] == 1; H_edge is PSD and, when the
    edge is at infinity, normalized to unit spectral norm (the density
    limit is invariant to the scale of H_edge).
    """

    side: str
    r_edge: float
    m: int
    nu0: np.ndarray
    omega: np.ndarray
    H_edge: np.ndarray


def decompose_B(ratio: QuadFormRatio, tol: Tolerances = DEFAULT_TOL) -> BlockDecomp:
    """Split A along the positive/null eigenspaces of B."""
    w, V = np.linalg.eigh(ratio.B)
    scale = np.max(np.abs(w))
    zero = np.abs(w) <= tol.tol_zero_eig * scale
    p = int(np.count_nonzero(zero))
    # positive eigenvalues first, null directions last
    order = np.concatenate([np.nonzero(~zero)[0], np.nonzero(zero)[0]])
    V = fix_eigenvector_signs(V[:, order])
    O_B = V.T
    C = O_B @ ratio.A @ O_B.T
    k = ratio.n - p
    return BlockDecomp(
        p=p,
        O_B=_frozen(O_B),
        Lambda_B=_frozen(w[order][:k]),
        C11=_frozen(C[:k, :k]),
        C12=_frozen(C[:k, k:]),
        C21=_frozen(C[k:, :k]),
        C22=_frozen(C[k:, k:]),
    )


def _pencil_extremes(M: np.ndarray, diag_w: np.ndarray):
    """Extreme eigenvalues of the symmetric-definite pencil (M, diag(diag_w))."""
    vals = scipy.linalg.eigh(M, np.diag(diag_w), eigvals_only=True)
    return float(vals[0]), float(vals[-1])


def _right_edge(ratio: QuadFormRatio, tol: Tolerances):
    """Right support endpoint and its Lemma-3 case tag for B singular (p >= 1)."""
    bd = decompose_B(ratio, tol)
    scale_a = max(np.max(np.abs(np.linalg.eigvalsh(ratio.A))), 1e-300)
    zero_tol = tol.tol_zero_eig * scale_a
    eig_c22, O_C = np.linalg.eigh(bd.C22)
    if np.any(eig_c22 > zero_tol):
        return np.inf, CASE_2A, bd
    negative = eig_c22 < -zero_tol
    if np.all(negative):
        # case 2(b): invert C22 through a Cholesky factor of -C22
        try:
            cf = scipy.linalg.cho_factor(-bd.C22)
            M = bd.C11 + bd.C12 @ scipy.linalg.cho_solve(cf, bd.C21)
        except scipy.linalg.LinAlgError:
            # borderline negative-definite; fall through to the 2(c) route
            negative = eig_c22 < -zero_tol
        else:
            return _pencil_extremes(M, bd.Lambda_B)[1], CASE_2B, bd
    # case 2(c): C22 <= 0 with a zero eigenvalue
    null_idx = np.nonzero(~negative)[0]
    null_basis = O_C[:, null_idx]
    c12_norm = np.linalg.norm(bd.C12)
    # a numerically-zero C12 block trivially satisfies the inclusion
    if c12_norm > tol.tol_zero_eig * scale_a and np.any(
        np.linalg.norm(bd.C12 @ null_basis, axis=0) > tol.tol_zero_eig * c12_norm
    ):
        return np.inf, CASE_2C_INFINITE, bd
    neg_idx = np.nonzero(negative)[0]
    if neg_idx.size:
        O_C1 = O_C[:, neg_idx]
        Lam_C = eig_c22[neg_idx]
        M = bd.C11 - (bd.C12 @ O_C1) @ np.diag(1.0 / Lam_C) @ (O_C1.T @ bd.C21)
    else:
        M = bd.C11
    return _pencil_extremes(M, bd.Lambda_B)[1], CASE_2C_FINITE, bd


def support(ratio: QuadFormRatio, tol: Tolerances = DEFAULT_TOL) -> SupportInfo:
    """Support endpoints (l, r_bar), Lemma-3 case tag and tail-class flags."""
    if is_degenerate(ratio, tol) is not None:
        raise UnsupportedInstanceError("degenerate ratio: A = c*B, support is a point")
    eig_b = np.linalg.eigvalsh(ratio.B)
    if eig_b[0] > tol.tol_zero_eig * eig_b[-1]:
        # full-rank B: endpoints are the extreme eigenvalues of the pencil (A, B)
        vals = scipy.linalg.eigh(np.asarray(ratio.A), np.asarray(ratio.B), eigvals_only=True)
        l, r_bar = float(vals[0]), float(vals[-1])
        return SupportInfo(l=l, r_bar=r_bar, case_tag=CASE_1, in_CR=True, in_CL=True)
    r_bar, case_right, _ = _right_edge(ratio, tol)
    neg_r_bar, case_left, _ = _right_edge(negate(ratio), tol)
    return SupportInfo(
        l=-neg_r_bar,
        r_bar=r_bar,
        case_tag=case_right,
        in_CR=case_right in _RIGHT_TAIL_CASES,
        in_CL=case_left in _RIGHT_TAIL_CASES,
    )


def classify_tails(ratio: QuadFormRatio, info: SupportInfo):
    """(in_CR, in_CL) per the Lemma-4 case test."""
    return info.in_CR, info.in_CL


def _edge_finite(ratio: QuadFormRatio, r_bar: float, side: str, tol: Tolerances) -> EdgeStructure:
    M0 = ratio.A - r_bar * ratio.B
    lam, V = np.linalg.eigh(M0)
    scale = max(np.max(np.abs(lam)), 1e-300)
    cluster = np.abs(lam) <= max(tol.tol_zero_eig, 1e-12) * scale
    m = int(np.count_nonzero(cluster))
    n = ratio.n
    if m == 0:
        raise UnsupportedInstanceError(
            "no vanishing pencil eigenvalue at the support edge (not in the tail class)"
        )
    if m == n:
        raise UnsupportedInstanceError("all pencil eigenvalues vanish: degenerate limit")
    U0 = V[:, cluster]
    T = 0.5 * ((U0.T @ ratio.B @ U0) + (U0.T @ ratio.B @ U0).T)
    tau, W = np.linalg.eigh(T)
    tau = np.clip(tau, 0.0, None)
    if tau[-1] <= tol.tol_zero_eig * max(np.max(np.linalg.eigvalsh(ratio.B)), 1e-300):
        raise UnsupportedInstanceError("B vanishes on the edge null space (tau_n = 0)")
    omega = np.clip(tau / tau[-1], 0.0, 1.0)
    omega[-1] = 1.0
    P2 = fix_eigenvector_signs(U0 @ W)
    nu0 = P2.T @ ratio.mu
    H_edge = 0.5 * ((P2.T @ ratio.B @ P2) + (P2.T @ ratio.B @ P2).T)
    return EdgeStructure(
        side=side,
        r_edge=float(r_bar),
        m=m,
        nu0=_frozen(nu0),
        omega=_frozen(omega),
        H_edge=_frozen(H_edge),
    )


def _trailing_eigendata(M: np.ndarray, m: int):
    lam, V = np.linalg.eigh(M)
    return lam[-m:], fix_eigenvector_signs(V[:, -m:])


def _align_columns(V: np.ndarray, ref: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        if float(V[:, j] @ ref[:, j]) < 0:
            V[:, j] = -V[:, j]
    return V


def _edge_infinite(ratio: QuadFormRatio, side: str, tol: Tolerances) -> EdgeStructure:
    bd = decompose_B(ratio, tol)
    scale_a = max(np.max(np.abs(np.linalg.eigvalsh(ratio.A))), 1e-300)
    eig_c22 = np.linalg.eigvalsh(bd.C22) if bd.p else np.empty(0)
    m = int(np.count_nonzero(np.abs(eig_c22) <= tol.tol_zero_eig * scale_a))
    if m == 0:
        raise UnsupportedInstanceError("r_bar = infinity outside case 2(c)")
    if m == ratio.n:
        raise UnsupportedInstanceError("all pencil eigenvalues vanish: degenerate limit")
    A, B = np.asarray(ratio.A), np.asarray(ratio.B)

    # relative rates omega from second differences of the eigenvalues of
    # eps*A - B; their leading term is quadratic in eps, so a two-point
    # Richardson step in eps^2 removes the next-order error.
    def curvatures(eps):
        psi_p, _ = _trailing_eigendata(eps * A - B, m)
        psi_m, _ = _trailing_eigendata(-eps * A - B, m)
        return (psi_p + psi_m) / eps**2

    c_coarse, c_fine = curvatures(1e-3), curvatures(1e-4)
    curv = (100.0 * c_fine - c_coarse) / 99.0
    if curv[-1] <= 0:
        raise UnsupportedInstanceError("top pencil eigenvalue does not vanish quadratically")
    omega = np.clip(curv / curv[-1], 0.0, 1.0)
    omega[-1] = 1.0

    # limiting eigenvectors at a small-eps ladder, Richardson-extrapolated
    # (eigenvector error is first order in eps)
    ladder = (1e-4, 1e-5, 1e-6)
    vecs = []
    prev = None
    for eps in ladder:
        _, P2 = _trailing_eigendata(eps * A - B, m)
        if prev is not None:
            P2 = _align_columns(P2, prev)
        vecs.append(P2)
        prev = P2
    extrap = [(10.0 * vecs[i + 1] - vecs[i]) / 9.0 for i in range(len(vecs) - 1)]
    if np.max(np.abs(extrap[-1] - extrap[-2])) > 1e-5:
        raise NumericalError("limiting eigenvectors at r = infinity did not converge")
    P20 = extrap[-1]
    nu0 = P20.T @ ratio.mu

    # the raw block vanishes like eps^2 at an infinite edge; only its shape
    # matters (the density limit is scale invariant), so normalize each rung
    # to unit spectral norm before extrapolating
    hs = []
    for V in vecs:
        h = V.T @ B @ V
        h = 0.5 * (h + h.T)
        norm = np.linalg.norm(h, 2)
        if norm <= 0:
            raise NumericalError("H_edge vanished identically at the infinite edge")
        hs.append(h / norm)
    H_edge = (10.0 * hs[2] - hs[1]) / 9.0
    w = np.linalg.eigvalsh(H_edge)
    if w[0] < -1e-8:
        raise NumericalError("H_edge lost positive semidefiniteness")
    return EdgeStructure(
        side=side,
        r_edge=np.inf,
        m=m,
        nu0=_frozen(nu0),
        omega=_frozen(omega),
        H_edge=_frozen(H_edge),
    )


def edge_structure(
    ratio: QuadFormRatio,
    info: SupportInfo,
    side: str = "right",
    tol: Tolerances = DEFAULT_TOL,
) -> EdgeStructure:
    """Edge eigen-structure (m, nu0, omega, H_edge) on the requested side."""
    if side not in ("right", "left"):
        raise InvalidInputError(f"side must be 'right' or 'left', got {side!r}")
    if side == "left":
        if not info.in_CL:
            raise UnsupportedInstanceError("ratio is not in the left tail class")
        neg = negate(ratio)
        es = edge_structure(neg, support(neg, tol), side="right", tol=tol)
        return replace(es, side="left")
    if not info.in_CR:
        raise UnsupportedInstanceError("ratio is not in the right tail class")
    if np.isfinite(info.r_bar):
        return _edge_finite(ratio, info.r_bar, "right", tol)
    return _edge_infinite(ratio, "right", tol)
