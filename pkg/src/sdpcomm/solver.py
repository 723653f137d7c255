"""First-order solver for SDP(M): maximize <M, X> over the clustering set.

The feasible set is F = {X PSD, X >= 0 entrywise, X 1 = 1, trace X = r},
optionally intersected with the elementwise cap X <= upper_bound.  The solver
is a three-block consensus splitting: each constraint family has a
closed-form Frobenius projection, and an augmented-Lagrangian consensus step
with fixed penalty ``rho`` ties the blocks together.  Per iteration the
dominant cost is one symmetric eigendecomposition.

The input matrix is normalized internally by its Frobenius norm, which makes
the iterate trajectory (and therefore the returned solution) exactly
invariant under positive rescaling of M.  Reported residuals refer to the
normalized problem; reported objectives are on the original scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the consensus-splitting solver.

    ``rho`` is the fixed consensus penalty (never adapted, to keep runs
    deterministic).  ``over_relax`` in (1, 2) accelerates consensus; 1.0
    disables it.  Convergence requires the measured feasibility violations of
    the averaged iterate and the consensus residuals to all fall below
    ``tol``.  The elementwise cap X <= upper_bound is off by default; when
    enforced with ``upper_bound=None`` the cap defaults to r/n, i.e. 1/m_min
    under balanced cluster sizes.
    """

    rho: float = 1.0
    max_iter: int = 2000
    tol: float = 1e-4
    over_relax: float = 1.7
    enforce_upper_bound: bool = False
    upper_bound: float | None = None
    check_every: int = 10

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise ParameterError("rho must be positive")
        if self.tol <= 0:
            raise ParameterError("tol must be positive")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be at least 1")
        if not (1.0 <= self.over_relax < 2.0):
            raise ParameterError("over_relax must lie in [1, 2)")


@dataclass(frozen=True)
class SdpSolution:
    """Solver output: the averaged consensus iterate and diagnostics."""

    X: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    iterations: int
    converged: bool

    def feasibility_violations(self, r: int) -> dict[str, float]:
        """Measured violations of the four constraint families."""
        X = self.X
        w = np.linalg.eigvalsh(X)
        return {
            "min_eigenvalue": float(w.min()),
            "min_entry": float(X.min()),
            "max_row_sum_error": float(np.abs(X.sum(axis=1) - 1.0).max()),
            "trace_error": float(abs(np.trace(X) - r)),
        }


def combine(A: np.ndarray, K: np.ndarray, lambda_n: float) -> np.ndarray:
    """Objective matrix A + lambda_n * K of the combined problem."""
    A = np.asarray(A, dtype=float)
    K = np.asarray(K, dtype=float)
    if A.shape != K.shape:
        raise ParameterError(f"shape mismatch: {A.shape} vs {K.shape}")
    if lambda_n < 0:
        raise ParameterError("lambda_n must be nonnegative")
    return A + lambda_n * K


def project_affine(S: np.ndarray, r: int) -> np.ndarray:
    """Frobenius projection of symmetric S onto {X symmetric : X1=1, tr X=r}.

    Closed form from the KKT system: X = S + (y 1^T + 1 y^T)/2 + mu I with y
    and mu solving the two constraint equations.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if n == 1:
        return np.array([[float(r)]])
    s = S.sum(axis=1)
    ssum = float(s.sum())
    t = float(np.trace(S))
    mu = (r - t - 1.0 + ssum / n) / (n - 1.0)
    sigma = 1.0 - ssum / n - mu
    y = (2.0 / n) * (1.0 - s - (sigma / 2.0 + mu))
    X = S + 0.5 * (y[:, None] + y[None, :])
    X[np.diag_indices(n)] += mu
    return X


def project_psd(S: np.ndarray) -> np.ndarray:
    """Nearest positive semidefinite matrix: clip eigenvalues at zero."""
    S = np.asarray(S, dtype=float)
    w, V = np.linalg.eigh(S)
    if w[0] >= 0.0:
        return S
    wp = np.clip(w, 0.0, None)
    return (V * wp) @ V.T


def barycenter_start(n: int, r: int) -> np.ndarray:
    """The symmetric feasible point with constant diagonal and off-diagonal."""
    a = r / n
    b = (1.0 - a) / (n - 1.0) if n > 1 else 0.0
    Z = np.full((n, n), b)
    np.fill_diagonal(Z, a)
    return Z


def solve_sdp(
    M: np.ndarray,
    r: int,
    config: SolverConfig | None = None,
    x0: np.ndarray | None = None,
    log_path: str | Path | IO[str] | None = None,
) -> SdpSolution:
    """Maximize <M, X> over the clustering feasible set.

    ``x0`` warm-starts the consensus variable (duals restart at zero); grid
    sweeps pass the previous solution here.  When ``log_path`` is given,
    iteration diagnostics are appended as CSV rows
    (iteration, objective, primal_residual, dual_residual).
    """
    cfg = config or SolverConfig()
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ParameterError("M must be a square matrix")
    if not np.isfinite(M).all():
        raise ParameterError("M must be finite")
    if not np.allclose(M, M.T, atol=1e-8 * max(1.0, float(np.abs(M).max()))):
        raise ParameterError("M must be symmetric")
    if not 1 <= r <= n:
        raise ParameterError(f"r must lie in [1, {n}]")

    scale = float(np.linalg.norm(M))
    Mt = M / scale if scale > 0 else np.zeros_like(M)
    step = Mt / (3.0 * cfg.rho)
    alpha = cfg.over_relax
    ub = None
    if cfg.enforce_upper_bound:
        ub = cfg.upper_bound if cfg.upper_bound is not None else r / n

    Z = barycenter_start(n, r) if x0 is None else 0.5 * (np.asarray(x0, dtype=float) + np.asarray(x0, dtype=float).T)
    U1 = np.zeros((n, n))
    U2 = np.zeros((n, n))
    U3 = np.zeros((n, n))
    X2 = Z

    log_file, opened = _open_log(log_path)
    primal = dual = np.inf
    converged = False
    it = 0
    try:
        for it in range(1, cfg.max_iter + 1):
            X1 = project_affine(Z - U1, r)
            X2 = project_psd(Z - U2)
            X3 = np.clip(Z - U3, 0.0, ub)
            if alpha != 1.0:
                H1 = alpha * X1 + (1.0 - alpha) * Z
                H2 = alpha * X2 + (1.0 - alpha) * Z
                H3 = alpha * X3 + (1.0 - alpha) * Z
            else:
                H1, H2, H3 = X1, X2, X3
            Zold = Z
            Z = (H1 + U1 + H2 + U2 + H3 + U3) / 3.0 + step
            U1 += H1 - Z
            U2 += H2 - Z
            U3 += H3 - Z

            if it % cfg.check_every == 0 or it == cfg.max_iter:
                Xbar = (X1 + X2 + X3) / 3.0
                primal = max(
                    float(np.linalg.norm(X1 - Z)),
                    float(np.linalg.norm(X2 - Z)),
                    float(np.linalg.norm(X3 - Z)),
                )
                dual = cfg.rho * np.sqrt(3.0) * float(np.linalg.norm(Z - Zold))
                feas = _feasibility_gap(Xbar, X2, r, ub)
                if log_file is not None:
                    obj = float((M * Xbar).sum())
                    log_file.write(f"{it},{obj!r},{primal!r},{dual!r}\n")
                if max(feas, primal, dual) <= cfg.tol:
                    converged = True
                    break
    finally:
        if opened and log_file is not None:
            log_file.close()

    X = (X1 + X2 + X3) / 3.0
    X = 0.5 * (X + X.T)
    return SdpSolution(
        X=X,
        objective=float((M * X).sum()),
        primal_residual=primal,
        dual_residual=dual,
        iterations=it,
        converged=converged,
    )


def _feasibility_gap(Xbar: np.ndarray, X_psd: np.ndarray, r: int, ub: float | None) -> float:
    """Worst constraint violation of the averaged iterate.

    The PSD violation is bounded by the Frobenius distance to the PSD block,
    which avoids an extra eigendecomposition per check.
    """
    aff = max(float(np.abs(Xbar.sum(axis=1) - 1.0).max()), abs(float(np.trace(Xbar)) - r))
    neg = max(0.0, -float(Xbar.min()))
    if ub is not None:
        neg = max(neg, float(Xbar.max()) - ub)
    psd = float(np.linalg.norm(Xbar - X_psd))
    return max(aff, neg, psd)


def _open_log(log_path) -> tuple[IO[str] | None, bool]:
    if log_path is None:
        return None, False
    if hasattr(log_path, "write"):
        return log_path, False
    f = open(log_path, "w", encoding="utf-8", newline="\n")
    f.write("iteration,objective,primal_residual,dual_residual\n")
    return f, True


def project_to_feasible(
    S: np.ndarray,
    r: int,
    tol: float = 1e-9,
    max_iter: int = 30000,
    upper_bound: float | None = None,
) -> np.ndarray:
    """Dykstra projection of symmetric S onto the clustering feasible set.

    Iterates the three constraint-set projections with Dykstra corrections
    until the worst violation of the current iterate falls below ``tol``.
    Used to manufacture feasible matrices for property tests; not part of the
    solve path.
    """
    X = 0.5 * (np.asarray(S, dtype=float) + np.asarray(S, dtype=float).T)
    P1 = np.zeros_like(X)
    P2 = np.zeros_like(X)
    P3 = np.zeros_like(X)
    for _ in range(max_iter):
        Y = project_affine(X + P1, r)
        P1 = X + P1 - Y
        W = project_psd(Y + P2)
        P2 = Y + P2 - W
        X = np.clip(W + P3, 0.0, upper_bound)
        P3 = W + P3 - X
        aff = max(float(np.abs(X.sum(axis=1) - 1.0).max()), abs(float(np.trace(X)) - r))
        psd = float(np.linalg.norm(X - W))
        if max(aff, psd) <= tol:
            break
    return 0.5 * (X + X.T)
