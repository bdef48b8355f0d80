"""Constructors for the (A, B, mu) instances of the classical statistics.

Covers least-squares serial correlation of arbitrary lag, the Durbin-Watson
statistic, the noncentral beta family and the two-dimensional ratio
R = e2/e1.
"""

from __future__ import annotations

import numpy as np

from .core import DEFAULT_TOL, QuadFormRatio, Tolerances, new_ratio
from .errors import InvalidInputError


def _residual_projector(X: np.ndarray, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != n:
        raise InvalidInputError(f"design matrix must have {n} rows, got {X.shape[0]}")
    if X.shape[1] >= n:
        raise InvalidInputError("design matrix must have fewer columns than rows")
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise InvalidInputError("design matrix is rank deficient")
    Q, _ = np.linalg.qr(X)
    return np.eye(n) - Q @ Q.T


def ls_serial_corr(n: int, lag: int, X=None, mu=None,
                   tol: Tolerances = DEFAULT_TOL) -> QuadFormRatio:
    """Least-squares lag-l serial correlation sum(e_t e_{t+l}) / sum_{t<=n-l}(e_t^2).

    With a design matrix X, both forms are sandwiched by the residual
    projector M = I - X(X'X)^{-1}X'.
    """
    if not (1 <= lag <= n - 1):
        raise InvalidInputError(f"lag must be in [1, {n - 1}], got {lag}")
    A = np.zeros((n, n))
    for t in range(n - lag):
        A[t, t + lag] = A[t + lag, t] = 0.5
    B = np.zeros((n, n))
    B[np.arange(n - lag), np.arange(n - lag)] = 1.0
    if X is not None:
        M = _residual_projector(X, n)
        A = M @ A @ M
        B = M @ B @ M
    if mu is None:
        mu = np.zeros(n)
    return new_ratio(A, B, mu, tol=tol)


def durbin_watson(n: int, X, mu=None, tol: Tolerances = DEFAULT_TOL) -> QuadFormRatio:
    """Durbin-Watson d = sum (e_t - e_{t-1})^2 / sum e_t^2 on residuals of X."""
    M = _residual_projector(X, n)
    D = np.zeros((n - 1, n))
    D[np.arange(n - 1), np.arange(n - 1)] = -1.0
    D[np.arange(n - 1), np.arange(1, n)] = 1.0
    A = M @ (D.T @ D) @ M
    if mu is None:
        mu = np.zeros(n)
    return new_ratio(A, M, mu, tol=tol)


def beta_matrices(n: int, m: int, mu=None, tol: Tolerances = DEFAULT_TOL) -> QuadFormRatio:
    """Noncentral Beta(m/2, (n-m)/2): A = diag(I_m, 0), B = I_n.

    mu is the m-vector of means of the numerator coordinates; the remaining
    coordinates are central.  theta = sum(mu_i^2).
    """
    if not (1 <= m <= n - 1):
        raise InvalidInputError(f"m must be in [1, {n - 1}], got {m}")
    A = np.zeros((n, n))
    A[np.arange(m), np.arange(m)] = 1.0
    full_mu = np.zeros(n)
    if mu is not None:
        mu = np.asarray(mu, dtype=float).reshape(-1)
        if mu.shape != (m,):
            raise InvalidInputError(f"mu must have length m={m}, got {mu.shape}")
        full_mu[:m] = mu
    return new_ratio(A, np.eye(n), full_mu, tol=tol)


def ratio_n2(mu1: float, mu2: float, tol: Tolerances = DEFAULT_TOL) -> QuadFormRatio:
    """R = e2/e1 with e_i ~ N(mu_i, 1): Cauchy when mu = 0."""
    A = np.array([[0.0, 0.5], [0.5, 0.0]])
    B = np.diag([1.0, 0.0])
    return new_ratio(A, B, [float(mu1), float(mu2)], tol=tol)
