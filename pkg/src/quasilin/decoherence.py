"""Decoherence time of the mean CCR matrix and Lyapunov-type upper bounds.

The mean commutator matrix decays along e^{tau A}; its 1/e time tau* is
located numerically, and certified upper bounds come from quadratic
Lyapunov functions G solving a shifted Lyapunov equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .qsde import spectral_abscissa

__all__ = [
    "TauBoundSearch",
    "contraction_norm",
    "lyapunov_G",
    "optimize_tau_bound",
    "tau_star",
    "tau_upper_bound",
]

GRID_POINTS = 400


def _hurwitz_abscissa(a) -> float:
    sa = spectral_abscissa(a)
    if sa >= -1e-10:
        raise ValueError("drift is not Hurwitz (spectral abscissa %.6e)" % sa)
    return sa


def tau_star(a, ccr_matrix, horizon_factor: float = 10.0) -> float:
    """First time the CCR matrix norm drops to 1/e of its initial value.

    Scans a 400-point grid on [0, horizon_factor / |sigma(A)|] for the first
    sign change of ||e^{tau A} Z0||_F - ||Z0||_F / e, then bisects to a
    relative width of 1e-10.  Dips narrower than the grid step can be
    missed; the result is the first crossing the grid resolves.
    """
    a = np.asarray(a)
    sa = _hurwitz_abscissa(a)
    z0 = np.asarray(ccr_matrix)
    base = float(np.linalg.norm(z0))
    if base == 0.0:
        return 0.0
    target = base / np.e

    def excess(tau):
        return float(np.linalg.norm(expm(tau * a) @ z0)) - target

    horizon = horizon_factor / abs(sa)
    grid = np.linspace(0.0, horizon, GRID_POINTS)
    hit = None
    for i in range(1, GRID_POINTS):
        if excess(grid[i]) <= 0.0:
            hit = i
            break
    if hit is None:
        raise ValueError(
            "no decay to 1/e on [0, %.6g]; tau* exceeds this horizon" % horizon
        )
    lo, hi = grid[hit - 1], grid[hit]
    while (hi - lo) > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if excess(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return float(hi)


def lyapunov_G(a, lam: float, k_matrix) -> np.ndarray:
    """Solve (A + lam I) G + G (A + lam I)^T + K = 0 for G > 0.

    Requires 0 < lam < -sigma(A) and K symmetric positive definite.  The
    equation is solved through its Kronecker linear system on column-major
    vec(G).  The result certifies A G + G A^T < -2 lam G.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    sa = _hurwitz_abscissa(a)
    if not 0.0 < lam < -sa:
        raise ValueError("lam must lie in (0, %.6g), got %r" % (-sa, lam))
    k = np.asarray(k_matrix, dtype=float)
    if k.shape != (n, n) or np.max(np.abs(k - k.T)) > 1e-12 * max(1.0, float(np.max(np.abs(k)))):
        raise ValueError("K must be symmetric of matching size")
    if np.min(np.linalg.eigvalsh(k)) <= 0.0:
        raise ValueError("K must be positive definite")
    eye = np.eye(n)
    shifted = a + lam * eye
    kron_op = np.kron(eye, shifted) + np.kron(shifted, eye)
    g = np.linalg.solve(kron_op, -k.flatten(order="F")).reshape((n, n), order="F")
    g = (g + g.T) / 2.0
    if np.min(np.linalg.eigvalsh(g)) <= 0.0:
        raise ValueError("Lyapunov solution is not positive definite")
    strict = a @ g + g @ a.T + 2.0 * lam * g
    if np.max(np.linalg.eigvalsh((strict + strict.T) / 2.0)) > 1e-9:
        raise ValueError("strict decay inequality failed")
    return g


def _g_isqrt(g):
    w, q = np.linalg.eigh(g)
    w = np.maximum(w, 1e-14)
    return q @ np.diag(1.0 / np.sqrt(w)) @ q.T, float(w[-1])


def tau_upper_bound(a, ccr_matrix, lam: float, k_matrix) -> float:
    """Certified upper bound on tau* from the Lyapunov function of (lam, K).

    (1/lam) * (1 + log(sqrt(||G||) ||G^{-1/2} Z0||_F / ||Z0||_F)); invariant
    under rescaling of K.
    """
    z0 = np.asarray(ccr_matrix)
    base = float(np.linalg.norm(z0))
    if base == 0.0:
        raise ValueError("zero CCR matrix: tau* = 0 and the bound is void")
    g = lyapunov_G(a, lam, k_matrix)
    isqrt, gnorm = _g_isqrt(g)
    weighted = float(np.linalg.norm(isqrt @ z0))
    return float((1.0 + np.log(np.sqrt(gnorm) * weighted / base)) / lam)


def contraction_norm(a, g, tau: float) -> float:
    """Spectral norm of G^{-1/2} e^{tau A} G^{1/2}.

    At most e^{-lam tau} when G comes from lyapunov_G(a, lam, .); used to
    certify the decay that underlies tau_upper_bound.
    """
    w, q = np.linalg.eigh(np.asarray(g))
    w = np.maximum(w, 1e-14)
    isqrt = q @ np.diag(1.0 / np.sqrt(w)) @ q.T
    root = q @ np.diag(np.sqrt(w)) @ q.T
    return float(np.linalg.norm(isqrt @ expm(tau * np.asarray(a)) @ root, ord=2))


@dataclass(frozen=True)
class TauBoundSearch:
    """Best Lyapunov bound found, with the certificate that produced it."""

    bound: float
    lam: float
    k_matrix: np.ndarray
    k_label: str
    seed: int
    evaluations: int


def optimize_tau_bound(a, ccr_matrix, budget: int = 64, seed: int = 0) -> TauBoundSearch:
    """Grid search over (lam, K) for the smallest certified bound on tau*.

    lam runs over 32 geometrically spaced points in (0.01, 0.99) * |sigma(A)|;
    K runs over the identity followed by seeded random positive definite
    samples S^T S + 1e-6 I normalized to unit trace.  K is the outer loop,
    lam the inner (ascending); ties keep the smaller lam.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    sa = _hurwitz_abscissa(a)
    lams = np.geomspace(0.01 * -sa, 0.99 * -sa, 32)
    rng = np.random.default_rng(seed)

    def candidates():
        yield "identity", np.eye(n)
        i = 0
        while True:
            s = rng.standard_normal((n, n))
            w = s.T @ s + 1e-6 * np.eye(n)
            yield "sample-%d" % i, w / np.trace(w)
            i += 1

    best = None
    evals = 0
    for label, k in candidates():
        for lam in lams:
            if evals >= budget:
                break
            bound = tau_upper_bound(a, ccr_matrix, float(lam), k)
            evals += 1
            if best is None or bound < best[0] or (bound == best[0] and lam < best[1]):
                best = (bound, float(lam), k, label)
        if evals >= budget:
            break
    return TauBoundSearch(
        bound=best[0],
        lam=best[1],
        k_matrix=best[2],
        k_label=best[3],
        seed=seed,
        evaluations=evals,
    )
