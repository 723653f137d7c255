"""File loaders, savers and real-data preprocessing.

Formats:
  * edge lists: whitespace-separated ``src dst`` 0-based integer pairs, one
    per line, ``#`` starts a comment; duplicates collapse to a single edge.
  * covariates: CSV with a header row and one numeric row per node.
  * labels: one token per line (arbitrary strings), remapped to dense ints.
Output files use '.' decimals, '\\n' line endings and UTF-8.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import DataFormatError, DegenerateDataError, ParameterError
from .model import Labels


def load_edge_list(path, n: int | None = None, directed: bool = False) -> np.ndarray:
    """Dense adjacency (or directed link) matrix from an edge-list file.

    Undirected mode symmetrizes and zeroes the diagonal; directed mode keeps
    the orientation for later preprocessing.  ``n`` fixes the node count
    (indices must stay below it); omitted, it is one past the largest index.
    """
    path = Path(path)
    edges: list[tuple[int, int]] = []
    with path.open("r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataFormatError(f"{path}:{lineno}: expected 'src dst', got {raw.strip()!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-integer node index") from None
            if i < 0 or j < 0:
                raise DataFormatError(f"{path}:{lineno}: negative node index")
            edges.append((i, j))
    top = max((max(i, j) for i, j in edges), default=-1)
    if n is None:
        n = top + 1
    elif top >= n:
        raise DataFormatError(f"{path}: node index {top} out of range for n={n}")
    A = np.zeros((n, n))
    for i, j in edges:
        A[i, j] = 1.0
        if not directed:
            A[j, i] = 1.0
    if not directed:
        np.fill_diagonal(A, 0.0)
    return A


def save_edge_list(A: np.ndarray, path, directed: bool = False) -> None:
    """Write the nonzero entries of a 0/1 matrix as an edge list."""
    A = np.asarray(A)
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        f.write(f"# n={A.shape[0]}\n")
        ii, jj = np.nonzero(A if directed else np.triu(A))
        for i, j in zip(ii.tolist(), jj.tolist()):
            f.write(f"{i} {j}\n")


def load_covariates_csv(path, standardize: bool = False) -> np.ndarray:
    """n x d covariate matrix from a headed CSV; row i belongs to node i.

    Any non-numeric or missing cell is an error (no imputation); ragged rows
    are rejected.  With ``standardize`` each column is centered and scaled to
    unit (population) standard deviation.
    """
    path = Path(path)
    rows: list[list[float]] = []
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, expected a header row") from None
        width = len(header)
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != width:
                raise DataFormatError(
                    f"{path}:{lineno}: expected {width} columns, got {len(rec)}"
                )
            parsed = []
            for col, cell in enumerate(rec):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {header[col]!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    Y = np.asarray(rows, dtype=float)
    if standardize:
        sd = Y.std(axis=0)
        if (sd == 0).any():
            bad = header[int(np.flatnonzero(sd == 0)[0])]
            raise DegenerateDataError(f"column {bad!r} is constant; cannot standardize")
        Y = (Y - Y.mean(axis=0)) / sd
    return Y


def save_covariates_csv(Y: np.ndarray, path, header: list[str] | None = None) -> None:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    names = header or [f"x{j}" for j in range(Y.shape[1])]
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(names) + "\n")
        for row in Y:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def load_labels(path) -> Labels:
    """Ground-truth labels, one token per line; strings map to dense ints."""
    path = Path(path)
    raw: list[str] = []
    with path.open("r", encoding="utf-8") as f:
        for line in f:
            tok = line.split("#", 1)[0].strip()
            if tok:
                raw.append(tok)
    if not raw:
        raise DataFormatError(f"{path}: no labels found")
    return Labels.from_raw(raw)


def threshold_symmetrize(G: np.ndarray, tau: int = 5) -> np.ndarray:
    """Common-prey thresholding of a directed 0/1 graph: A = 1(G G^T >= tau).

    Entry (i, j) of G G^T counts the targets that i and j both link to; the
    threshold is inclusive and the diagonal is forced to zero afterwards.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ParameterError("G must be square")
    if not np.isin(G, (0.0, 1.0)).all():
        raise ParameterError("G must be a 0/1 matrix")
    if tau < 1:
        raise ParameterError("tau must be a positive integer")
    A = (G @ G.T >= tau).astype(float)
    np.fill_diagonal(A, 0.0)
    return A


def log_mass_normalize(masses) -> np.ndarray:
    """Standardized natural log of positive masses, as an n x 1 covariate.

    Standardization is to mean 0 and population standard deviation 1; equal
    masses yield the all-zero column.
    """
    m = np.asarray(masses, dtype=float).ravel()
    if m.size == 0:
        raise ParameterError("empty mass vector")
    if (m <= 0).any() or not np.isfinite(m).all():
        raise ParameterError("all masses must be positive and finite")
    x = np.log(m)
    sd = float(x.std())
    x = x - x.mean()
    if sd > 0:
        x = x / sd
    return x[:, None]
