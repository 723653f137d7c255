"""Closed-form error bounds and the exact small-scale oracles that test them.

Every calculator returns a :class:`Bound` carrying the numeric value, an
``order_only`` flag (set when the statement involves an unspecified absolute
constant, in which case the constant defaults to 1 and no inequality should
be asserted against the value), and per-precondition booleans.

Kernel-argument convention: the kernel function f(x) = exp(-eta x) is defined
on squared distances, but the sparse-regime separation and reference-matrix
formulas feed it unsquared expressions such as 2*Delta_k and
d_kl - Delta_k - Delta_l, while the dense-regime separation feeds it squared
ones.  Each formula here follows the literal text of its source equation;
``square_args=True`` switches the sparse-regime formulas to squared
arguments.  The discrepancy is documented, not resolved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfRegimeError, ParameterError, SizeLimitError
from .model import Labels, MixtureParams

GROTHENDIECK_UPPER = 1.783
LINF_L1_MAX_N = 22


@dataclass(frozen=True)
class Bound:
    """A named bound value with its qualification flags."""

    name: str
    value: float
    order_only: bool = False
    preconditions: dict = field(default_factory=dict)

    @property
    def preconditions_ok(self) -> bool:
        return all(self.preconditions.values())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "order_only": self.order_only,
            "preconditions": dict(self.preconditions),
        }


@dataclass(frozen=True)
class ReferenceMatrix:
    """Blockwise reference matrix Q with per-cluster separation constants.

    Q equals beta_in[k] on the diagonal block of cluster k and lies in
    [0, beta_out[k]] on its off-diagonal blocks.
    """

    Q: np.ndarray
    beta_in: np.ndarray
    beta_out: np.ndarray

    @property
    def separation(self) -> float:
        return float((self.beta_in - self.beta_out).min())


def _kernel_f(x: np.ndarray | float, eta: float, square_args: bool) -> np.ndarray | float:
    arg = np.square(x) if square_args else x
    return np.exp(-eta * arg)


@dataclass(frozen=True)
class SeparationResult:
    """Per-cluster kernel separations nu_k and the radii validity check."""

    nu: np.ndarray
    r_k: np.ndarray
    s_k: np.ndarray
    radii_valid: bool


def separation_nu(
    params: MixtureParams,
    delta: np.ndarray,
    eta: float,
    square_args: bool = False,
) -> SeparationResult:
    """Kernel-level separation nu_k = f(2 Delta_k) - max_l f(d_kl - D_k - D_l).

    Also reports whether 3 Delta_k + Delta_l <= d_kl holds for every pair,
    the condition under which the radii define a valid reference matrix.
    """
    delta = np.asarray(delta, dtype=float).ravel()
    r = params.r
    if delta.size != r:
        raise ParameterError("delta must have one radius per cluster")
    if (delta < 0).any():
        raise ParameterError("radii must be nonnegative")
    D = params.center_distances()
    r_k = np.asarray(_kernel_f(2.0 * delta, eta, square_args))
    s_k = np.zeros(r)
    valid = True
    for k in range(r):
        others = [l for l in range(r) if l != k]
        if not others:
            s_k[k] = 0.0
            continue
        vals = [_kernel_f(D[k, l] - delta[k] - delta[l], eta, square_args) for l in others]
        s_k[k] = max(vals)
        for l in others:
            if 3.0 * delta[k] + delta[l] > D[k, l] + 1e-12:
                valid = False
    return SeparationResult(nu=r_k - s_k, r_k=r_k, s_k=s_k, radii_valid=valid)


def separation_nu_dense(params: MixtureParams, eta: float) -> np.ndarray:
    """Dense-regime separation nu_k = f(2 sigma_k^2) - max_l f(d_kl^2 + s_k^2 + s_l^2)."""
    r = params.r
    D = params.center_distances()
    sig2 = params.sigmas**2
    nu = np.zeros(r)
    for k in range(r):
        others = [l for l in range(r) if l != k]
        cross = max(math.exp(-eta * (D[k, l] ** 2 + sig2[k] + sig2[l])) for l in others) if others else 0.0
        nu[k] = math.exp(-eta * 2.0 * sig2[k]) - cross
    return nu


def reference_graph(B: np.ndarray, labels: Labels) -> ReferenceMatrix:
    """Blockwise-constant reference Q = Z B Z^T for the adjacency matrix."""
    B = np.asarray(B, dtype=float)
    z = labels.assignments
    off = B.copy()
    np.fill_diagonal(off, -np.inf)
    beta_out = off.max(axis=1) if labels.r > 1 else np.zeros(1)
    return ReferenceMatrix(
        Q=B[np.ix_(z, z)].copy(),
        beta_in=np.diag(B).copy(),
        beta_out=np.asarray(beta_out),
    )


def reference_kernel(
    K: np.ndarray,
    labels: Labels,
    params: MixtureParams,
    delta: np.ndarray,
    eta: float,
    square_args: bool = False,
) -> ReferenceMatrix:
    """Kernel reference matrix: f(2 Delta_k) on diagonal blocks and
    min{f(d_kl - Delta_k - Delta_l), K_ij} off the blocks."""
    K = np.asarray(K, dtype=float)
    if K.shape[0] != labels.n:
        raise ParameterError("K and labels disagree on n")
    delta = np.asarray(delta, dtype=float).ravel()
    sep = separation_nu(params, delta, eta, square_args)
    D = params.center_distances()
    z = labels.assignments
    caps = np.asarray(_kernel_f(D - delta[:, None] - delta[None, :], eta, square_args))
    Q = np.minimum(caps[np.ix_(z, z)], K)
    same = z[:, None] == z[None, :]
    Q[same] = sep.r_k[z[np.nonzero(same)[0]]]
    return ReferenceMatrix(Q=Q, beta_in=sep.r_k, beta_out=sep.s_k)


def lemma1_bound(
    M: np.ndarray,
    Q: ReferenceMatrix,
    X_hat: np.ndarray,
    X0: np.ndarray,
    m_min: int,
) -> float:
    """Right-hand side of the Frobenius-to-inner-product inequality.

    Returns 2 <M - Q, X_hat - X0> / (m_min * min_k(beta_in - beta_out)); the
    caller asserts ||X_hat - X0||_F^2 against it.  Infinite when the
    reference matrix has no separation.
    """
    sep = Q.separation
    if sep <= 0.0:
        return math.inf
    inner = float(((np.asarray(M, float) - Q.Q) * (np.asarray(X_hat, float) - np.asarray(X0, float))).sum())
    return 2.0 * inner / (m_min * sep)


def linf_l1_norm(M: np.ndarray) -> float:
    """Exact l_infinity -> l_1 operator norm by sign-vector enumeration.

    max_{s in {+-1}^n} ||M s||_1, using the +-s symmetry and a head/tail
    split so the inner work is vectorized; capped at n = 22.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if n > LINF_L1_MAX_N:
        raise SizeLimitError(f"exact enumeration capped at n={LINF_L1_MAX_N}, got {n}")
    if n == 0:
        raise ParameterError("M must be non-empty")
    k = min(11, n - 1)
    tail_signs = np.array(list(itertools.product((-1.0, 1.0), repeat=k))).T if k else np.zeros((0, 1))
    T = M[:, n - k :] @ tail_signs if k else np.zeros((M.shape[0], 1))
    head_len = n - k
    best = 0.0
    # first coordinate fixed at +1 by symmetry
    for bits in itertools.product((-1.0, 1.0), repeat=head_len - 1):
        s_head = np.array((1.0,) + bits)
        h = M[:, :head_len] @ s_head
        best = max(best, float(np.abs(h[:, None] + T).sum(axis=0).max()))
    return best


@dataclass(frozen=True)
class GrothendieckReport:
    """Both sides of the Grothendieck comparison on a solved instance."""

    lhs: float
    rhs: float
    norm: float
    kg: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-12


def grothendieck_check(
    A: np.ndarray,
    P_expected: np.ndarray,
    X_hat: np.ndarray,
    m_min: int,
    kg: float = GROTHENDIECK_UPPER,
) -> GrothendieckReport:
    """Compare |<A - P, m_min X_hat>| against K_G ||A - P||_{inf->1}.

    m_min * X_hat lies in {X PSD, diag <= I} whenever the solve enforced the
    elementwise cap 1/m_min, so the inequality is exact up to solver
    tolerance.  Uses the exact enumeration oracle, hence the n <= 22 cap.
    """
    R = np.asarray(A, dtype=float) - np.asarray(P_expected, dtype=float)
    lhs = abs(float((R * (m_min * np.asarray(X_hat, dtype=float))).sum()))
    norm = linf_l1_norm(R)
    return GrothendieckReport(lhs=lhs, rhs=kg * norm, norm=norm, kg=kg)


def sparse_graph_bound(
    a: np.ndarray,
    b: np.ndarray,
    g: float,
    alpha: float,
    r: int,
) -> Bound:
    """Squared relative error bound 23 alpha^2 r sqrt(g) / min_k(a_k - b_k)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    gap = float((a - b).min())
    pre = {"positive_separation": gap > 0.0, "g_at_least_9": g >= 9.0}
    value = math.inf if gap <= 0.0 else 23.0 * alpha**2 * r * math.sqrt(max(g, 0.0)) / gap
    return Bound(name="sparse_graph", value=value, order_only=False, preconditions=pre)


def combined_bound(
    a: np.ndarray,
    b: np.ndarray,
    lambda0: float,
    nu: np.ndarray,
    m: np.ndarray,
    g: float,
    delta: np.ndarray,
    eta: float,
    psis: np.ndarray,
    constant: float = 4.0,
    kg: float = GROTHENDIECK_UPPER,
    square_args: bool = False,
) -> Bound:
    """Frobenius-squared error bound for the combined objective.

    c K_G (6 sqrt(g) + lambda0 (2 pi0 + sum_k pi_k^2 (1 - f(2 Delta_k))))
    over pi_min^2 min_k(a_k - b_k + lambda0 nu_k), with
    pi0 = sum_k (m_k exp(-Delta_k^2 / (5 psi_k^2)) + sqrt(m_k log m_k / 2))/n.
    The derivation's constant is 4; the main statement uses 2; ``constant``
    selects between them.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    nu = np.asarray(nu, dtype=float)
    m = np.asarray(m, dtype=float)
    delta = np.asarray(delta, dtype=float)
    psis = np.asarray(psis, dtype=float)
    if (psis <= 0).any():
        raise ParameterError("combined_bound needs strictly positive psis")
    n = float(m.sum())
    pi = m / n
    pi_min = float(pi.min())
    gap = float((a - b + lambda0 * nu).min())
    pre = {"positive_separation": gap > 0.0, "g_at_least_9": g >= 9.0}
    if gap <= 0.0:
        return Bound("combined", math.inf, False, pre)
    pi0 = float(
        (m * np.exp(-(delta**2) / (5.0 * psis**2)) + np.sqrt(m * np.log(np.maximum(m, 1.0)) / 2.0)).sum() / n
    )
    f2d = np.asarray(_kernel_f(2.0 * delta, eta, square_args))
    numer = 6.0 * math.sqrt(max(g, 0.0)) + lambda0 * (2.0 * pi0 + float((pi**2 * (1.0 - f2d)).sum()))
    value = constant * kg * numer / (pi_min**2 * gap)
    return Bound("combined", value, False, pre)


def covariate_bound(params: MixtureParams, alpha: float, r: int, constant: float = 1.0) -> Bound:
    """Order-only kernel-clustering bound
    C alpha^2 d (psi_max^2 / d_min^2) max{log(d_min / (psi_max sqrt(d))), r}."""
    d = params.d
    d_min = params.d_min
    psi = params.psi_max
    if psi <= 0:
        raise ParameterError("covariate_bound needs a positive psi_max")
    pre = {"separation": d_min / psi > max(math.sqrt(d), 180.0 / math.sqrt(d))}
    if d_min <= 0:
        return Bound("covariate", math.inf, True, pre)
    value = constant * alpha**2 * d * (psi**2 / d_min**2) * max(
        math.log(d_min / (psi * math.sqrt(d))), float(r)
    )
    return Bound("covariate", value, True, pre)


@dataclass(frozen=True)
class EtaDerivation:
    """The scale parameter from the covariate analysis, with intermediates."""

    eta: float
    c0: float
    xi: float
    phi: float


def theoretical_eta(params: MixtureParams) -> EtaDerivation:
    """Scale parameter eta = phi / (20 c0^2 psi_max^2 d) from the analysis.

    c0 = sqrt(log(d_min^2 / (psi_max^2 d)) / d),
    xi = d_min / (2 sqrt(5) c0 psi_max sqrt(d)) - 1, phi = log(xi) / xi^2.
    Raises when the log argument is not > 1 or xi <= 1.
    """
    d = params.d
    psi = params.psi_max
    d_min = params.d_min
    if psi <= 0:
        raise ParameterError("theoretical_eta needs a positive psi_max")
    ratio = d_min**2 / (psi**2 * d)
    if ratio <= 1.0:
        raise OutOfRegimeError(f"d_min^2/(psi_max^2 d) = {ratio:.6g} must exceed 1")
    c0 = math.sqrt(math.log(ratio) / d)
    xi = d_min / (2.0 * math.sqrt(5.0) * c0 * psi * math.sqrt(d)) - 1.0
    if xi <= 1.0:
        raise OutOfRegimeError(f"xi = {xi:.6g} must exceed 1")
    phi = math.log(xi) / xi**2
    eta = phi / (20.0 * c0**2 * psi**2 * d)
    return EtaDerivation(eta=eta, c0=c0, xi=xi, phi=phi)


def default_radii(params: MixtureParams, c0: float) -> np.ndarray:
    """Per-cluster radii Delta_k = sqrt(5) c0 psi_k sqrt(d) (shared c0)."""
    if c0 < 0:
        raise ParameterError("c0 must be nonnegative")
    return math.sqrt(5.0) * c0 * params.psis * math.sqrt(params.d)


def dense_bounds(
    p: np.ndarray,
    q: np.ndarray,
    nu_dense: np.ndarray,
    lam: float,
    alpha: float,
    r: int,
    n: int,
    d: int,
    c_g: float = 1.0,
    c_k: float = 1.0,
) -> tuple[Bound, Bound, Bound]:
    """Order-only dense-regime bounds: graph-only, kernel-only, combined.

    The combined separation is gamma' = min_k((p_k - q_k)/(1 + lam)
    + lam/(1 + lam) nu_k); all three bound the relative Frobenius error.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    nu_dense = np.asarray(nu_dense, dtype=float)
    p_max = float(p.max())
    gap_g = float((p - q).min())
    gap_k = float(nu_dense.min())
    gamma = float(((p - q) / (1.0 + lam) + lam / (1.0 + lam) * nu_dense).min())

    graph = Bound(
        "dense_graph",
        math.inf if gap_g <= 0 else r * alpha / gap_g * c_g * math.sqrt(p_max / n),
        order_only=True,
        preconditions={"positive_separation": gap_g > 0},
    )
    kernel = Bound(
        "dense_kernel",
        math.inf if gap_k <= 0 else c_k / gap_k * math.sqrt(r * alpha**2 * math.log(n) / min(d, n)),
        order_only=True,
        preconditions={"positive_separation": gap_k > 0},
    )
    if gamma <= 0:
        comb_val = math.inf
    else:
        sl = math.sqrt(lam)
        comb_val = (
            math.sqrt(2.0 * alpha**2 * r)
            / gamma
            * (
                c_g * math.sqrt(r * p_max / n) / (1.0 + sl)
                + c_k * sl / (1.0 + sl) * math.sqrt(math.log(n) / min(d, n))
            )
        )
    combined = Bound(
        "dense_combined",
        comb_val,
        order_only=True,
        preconditions={"positive_separation": gamma > 0},
    )
    return graph, kernel, combined
