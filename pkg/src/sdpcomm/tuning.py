"""Eigen-gap statistic and model selection over lambda (and over r)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, TuningError
from .model import Labels
from .rounding import RoundingConfig, nmi, spectral_round
from .solver import SdpSolution, SolverConfig, solve_sdp

EIGEN_GAP_FLOOR = 1e-10
TIE_TOLERANCE = 1e-5


@dataclass(frozen=True)
class TuningGrid:
    """Candidate lambda_0 values (ascending) and optional cluster counts."""

    lambdas: tuple[float, ...]
    rs: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        lams = tuple(float(v) for v in self.lambdas)
        if not lams:
            raise ParameterError("lambda grid must be non-empty")
        if any(v <= 0 for v in lams):
            raise ParameterError("lambda grid values must be positive")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ParameterError("lambda grid must be strictly increasing")
        object.__setattr__(self, "lambdas", lams)
        if self.rs is not None:
            rs = tuple(int(v) for v in self.rs)
            if not rs:
                raise ParameterError("r grid must be non-empty when given")
            if any(b <= a for a, b in zip(rs, rs[1:])):
                raise ParameterError("r grid must be strictly increasing")
            object.__setattr__(self, "rs", rs)


def default_lambda_grid(count: int = 15, low: float = 0.01, high: float = 100.0) -> TuningGrid:
    """Log-spaced lambda_0 grid covering graph- through covariate-dominant runs."""
    return TuningGrid(lambdas=tuple(np.geomspace(low, high, count)))


def eigen_gap(X: np.ndarray, r: int) -> float:
    """Relative gap (theta_r - theta_{r+1}) / theta_r of the sorted spectrum.

    Equals 1 on an exact clustering matrix.  Defined as 0 when theta_r is not
    positive (no r-block structure; the candidate cannot win a sweep).
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= r < n:
        raise ParameterError(f"r must lie in [1, {n - 1}]")
    w = np.sort(np.linalg.eigvalsh(0.5 * (X + X.T)))[::-1]
    if w[r - 1] <= EIGEN_GAP_FLOOR:
        return 0.0
    return float((w[r - 1] - w[r]) / w[r - 1])


@dataclass(frozen=True)
class GridPoint:
    """One solved grid point of a tuning sweep."""

    lambda0: float
    r: int
    eigen_gap: float
    objective: float
    nmi_vs_truth: float | None
    degenerate: bool
    converged: bool
    failed: bool


@dataclass(frozen=True)
class TuningReport:
    """Sweep results in canonical grid order plus the selected point."""

    points: tuple[GridPoint, ...]
    lambda_star: float
    r_star: int

    def best_point(self) -> GridPoint:
        for p in self.points:
            if p.lambda0 == self.lambda_star and p.r == self.r_star:
                return p
        raise RuntimeError("selected grid point missing from report")

    def csv_rows(self) -> list[list]:
        rows = [["lambda_0", "r", "eigen_gap", "objective", "nmi_vs_truth"]]
        for p in self.points:
            rows.append(
                [
                    repr(p.lambda0),
                    p.r,
                    repr(p.eigen_gap),
                    repr(p.objective),
                    "" if p.nmi_vs_truth is None else repr(p.nmi_vs_truth),
                ]
            )
        return rows


def select_lambda(
    A: np.ndarray,
    K: np.ndarray,
    r: int,
    grid: TuningGrid,
    solver: SolverConfig | None = None,
    truth: Labels | None = None,
    rounding: RoundingConfig | None = None,
    warm_start: bool = True,
) -> TuningReport:
    """Pick the lambda_0 maximizing the eigen gap of the solved combination.

    Solves SDP(A + (lambda_0/n) K) over the grid in ascending order, reusing
    the previous solution as a warm start.  Gaps within TIE_TOLERANCE of the
    running maximum count as ties and keep the earlier (smallest) lambda_0.
    When ``truth`` is given, each point also records the NMI of the rounded
    labels.  Grid points whose solve raises are flagged and excluded;
    if every point fails a TuningError is raised.
    """
    return _sweep(A, K, (r,), grid, solver, truth, rounding, warm_start)


def select_lambda_and_r(
    A: np.ndarray,
    K: np.ndarray,
    grid: TuningGrid,
    solver: SolverConfig | None = None,
    truth: Labels | None = None,
    rounding: RoundingConfig | None = None,
    warm_start: bool = True,
) -> TuningReport:
    """Joint sweep over (lambda_0, r); ties prefer smaller r, then smaller lambda."""
    if grid.rs is None:
        raise ParameterError("grid.rs must be set for joint selection")
    return _sweep(A, K, grid.rs, grid, solver, truth, rounding, warm_start)


def _sweep(
    A: np.ndarray,
    K: np.ndarray,
    rs: Sequence[int],
    grid: TuningGrid,
    solver: SolverConfig | None,
    truth: Labels | None,
    rounding: RoundingConfig | None,
    warm_start: bool,
) -> TuningReport:
    A = np.asarray(A, dtype=float)
    K = np.asarray(K, dtype=float)
    n = A.shape[0]
    cfg = solver or SolverConfig()
    rcfg = rounding or RoundingConfig()

    points: list[GridPoint] = []
    best: tuple[float, int, float] | None = None  # (gap, r, lambda0) of winner
    for r in rs:
        warm: np.ndarray | None = None
        for lam0 in grid.lambdas:
            M = A + (lam0 / n) * K
            try:
                sol: SdpSolution = solve_sdp(M, r, cfg, x0=warm if warm_start else None)
            except Exception:
                points.append(GridPoint(lam0, r, 0.0, float("nan"), None, True, False, True))
                continue
            warm = sol.X
            gap = eigen_gap(sol.X, r) if r < n else 0.0
            score = None
            if truth is not None:
                score = nmi(spectral_round(sol.X, r, rcfg), truth)
            points.append(
                GridPoint(lam0, r, gap, sol.objective, score, gap == 0.0, sol.converged, False)
            )
            if best is None or gap > best[0] + TIE_TOLERANCE:
                best = (gap, r, lam0)
    if best is None:
        raise TuningError("every grid solve failed")
    return TuningReport(points=tuple(points), lambda_star=best[2], r_star=best[1])
