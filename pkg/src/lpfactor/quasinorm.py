"""Quasi-norms on l_p^n (0 < p <= 1) and the two operator norms of a factorization.

Operators are plain numpy arrays. ``T`` maps l_p^n into l_inf^K and has shape
(K, n) with column i equal to T e_i; ``P`` maps l_inf^K back and has shape (n, K).

For p < 1 the supremum of ||Px||_p over the cube need not sit at a vertex:
P = [[1, 1], [1, -1]] / 2 maps every vertex to a signed unit vector (value 1)
but maps (1, 0) to (1/2, 1/2), whose 1/2-quasi-norm is 2. Vertex enumeration is
kept as its own routine; the exact norm adds a sign-cell refinement.
"""

from __future__ import annotations

import logging
import warnings

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)

# sign vectors evaluated per matrix product
_CHUNK = 1 << 14


def check_p(p: float) -> float:
    """Return ``p`` as a float, rejecting values outside (0, 1]."""
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return p


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a nonempty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def _colwise_quasinorm(V: np.ndarray, p: float) -> np.ndarray:
    # (sum |v|^p)^(1/p) down each column
    return np.sum(np.abs(V) ** p, axis=0) ** (1.0 / p)


def p_quasinorm(x, p: float) -> float:
    """(sum_i |x_i|^p)^(1/p)."""
    p = check_p(p)
    x = _as_vector(x)
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def sup_norm(x) -> float:
    x = _as_vector(x)
    return float(np.max(np.abs(x)))


def norm_T_lp_to_linf(T, p: float) -> float:
    """Norm of T: l_p^n -> l_inf^K.

    For p <= 1 the extreme points of the unit ball are the signed unit vectors,
    so the norm is the largest entry magnitude of T.
    """
    p = check_p(p)
    T = np.asarray(T, dtype=float)
    if T.ndim != 2:
        raise ValueError("T must be a 2-d array")
    return float(np.max(np.abs(T))) if T.size else 0.0


def _sign_block(K: int, start: int, stop: int) -> np.ndarray:
    """Sign vectors for indices [start, stop) as columns; last coordinate fixed to +1."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[None, :] >> np.arange(K - 1, dtype=np.int64)[:, None]) & 1
    signs = np.ones((K, stop - start))
    signs[: K - 1] = 1.0 - 2.0 * bits
    return signs


def _check_K(P: np.ndarray, max_K: int) -> None:
    if P.shape[1] > max_K:
        raise ValueError(f"K={P.shape[1]} exceeds max_K={max_K}; use norm_P_linf_to_lp_search")


def _vertex_max(P: np.ndarray, p: float) -> tuple[float, np.ndarray]:
    K = P.shape[1]
    total = 1 << (K - 1)
    best, arg = -1.0, None
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        signs = _sign_block(K, start, stop)
        vals = _colwise_quasinorm(P @ signs, p)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, arg = float(vals[j]), signs[:, j].copy()
    return best, arg


def norm_P_linf_to_lp_vertex(P, p: float, max_K: int = 20) -> float:
    """max ||P sigma||_p over the hypercube vertices sigma in {-1, +1}^K.

    The quasi-norm is even, so sigma and -sigma give the same value and only the
    2^(K-1) vertices with last coordinate +1 are visited. For p = 1 this is the
    operator norm; for p < 1 it is only a lower estimate, since the p-quasi-norm
    is not convex and the supremum over the cube can sit off the vertices.
    """
    p = check_p(p)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    _check_K(P, max_K)
    return _vertex_max(P, p)[0]


def _cell_signs(n: int, start: int, stop: int) -> np.ndarray:
    return _sign_block(n, start, stop).T


def _holder_bound(P: np.ndarray, S: np.ndarray, w: np.ndarray, q: float) -> np.ndarray:
    """Upper bound on ||Px||_p over the cells with sign rows S, for weights w > 0.

    On a cell, ||y||_p <= (sum w_i s_i y_i) * ||1/w||_q with q = p/(1-p), and the
    linear term is at most ||P^T (w s)||_1 over the whole cube.
    """
    return np.sum(np.abs((S * w) @ P), axis=1) * np.sum(w ** -q) ** (1.0 / q)


def _solve_cell(P: np.ndarray, s: np.ndarray, p: float, x0: np.ndarray) -> np.ndarray:
    # maximize sum (s_i (Px)_i)^p over the cube inside the sign cell; concave there
    C = s[:, None] * P

    def obj(x):
        y = np.maximum(C @ x, 0.0)
        return -np.sum(y**p)

    def grad(x):
        y = np.maximum(C @ x, 1e-14)
        return -(p * y ** (p - 1.0)) @ C

    res = minimize(obj, x0, jac=grad, method="SLSQP",
                   bounds=[(-1.0, 1.0)] * P.shape[1],
                   constraints=[{"type": "ineq", "fun": lambda x: C @ x, "jac": lambda x: C}],
                   options={"ftol": 1e-15, "maxiter": 500})
    return np.clip(res.x, -1.0, 1.0)


def _certify_cell(P: np.ndarray, s: np.ndarray, sy: np.ndarray, p: float, q: float) -> float:
    """Smallest Hoelder bound over weights (sy + eta)^(p-1) for a ladder of eta.

    eta = 0 is the exact dual weight when every coordinate of the cell optimum is
    positive; coordinates pinned at zero need finite but large weights instead.
    """
    sy = np.maximum(sy, 0.0)
    scale = float(np.max(sy)) or 1.0
    etas = scale * np.logspace(-14, 0, 57)
    W = (sy[None, :] + etas[:, None]) ** (p - 1.0)
    if np.all(sy > 0):
        W = np.vstack((sy ** (p - 1.0), W))
    if W.size == 0:
        return np.inf
    vals = np.sum(np.abs((W * s) @ P), axis=1) * np.sum(W ** -q, axis=1) ** (1.0 / q)
    return float(np.min(vals))


class _CellPrograms:
    """Convex programs for one matrix, parametrized by the cell sign vector.

    Built lazily and reused across cells, so cvxpy canonicalizes each only once.
    """

    def __init__(self, P: np.ndarray, p: float, q: float):
        self.P, self.p, self.q = P, p, q
        self._dual = self._primal = None

    def _build(self):
        import cvxpy as cp

        n, K = self.P.shape
        self.s = cp.Parameter(n)
        self.w = cp.Variable(n, pos=True)
        self._dual = cp.Problem(cp.Minimize(cp.norm1(self.P.T @ cp.multiply(self.s, self.w))),
                                [cp.sum(cp.power(self.w, -self.q)) <= 1])
        self.x = cp.Variable(K)
        y = cp.multiply(self.s, self.P @ self.x)
        self._primal = cp.Problem(cp.Maximize(cp.sum(cp.power(y, self.p))),
                                  [self.x <= 1, self.x >= -1, y >= 0])

    def _solve(self, prob, s, **opts) -> bool:
        import cvxpy as cp

        if self._dual is None:
            self._build()
        self.s.value = s
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prob.solve(solver=cp.CLARABEL, max_iter=500, **opts)
        except cp.SolverError:
            return False
        return True

    def dual_bound(self, s: np.ndarray) -> float:
        """Hoelder bound at the weights minimizing ||P^T (w s)||_1 subject to sum w^-q <= 1.

        By convex duality the minimum equals the cell maximum. The bound is
        re-evaluated at the solver's weights, so solver inaccuracy can only
        loosen it, never invalidate it.
        """
        if self._dual is None:
            self._build()
        if not self._solve(self._dual, s, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12):
            return np.inf
        w = self.w.value
        if w is None or not np.all(np.isfinite(w)) or np.any(w <= 0):
            return np.inf
        return float(_holder_bound(self.P, s[None, :], w, self.q)[0])

    def primal_point(self, s: np.ndarray, fallback: np.ndarray) -> np.ndarray:
        if self._primal is None:
            self._build()
        if not self._solve(self._primal, s) or self.x.value is None:
            return fallback
        return np.clip(self.x.value, -1.0, 1.0)


def norm_P_linf_to_lp_bounds(P, p: float, max_K: int = 20,
                             rtol: float = 1e-12) -> tuple[float, float]:
    """Certified (lower, upper) bracket for ||P: l_inf^K -> l_p^n||.

    The lower value is always attained at an explicit point of the cube. For
    p = 1 the bracket collapses to the vertex maximum. For p < 1 the cube is cut
    into the 2^(n-1) sign cells of Px (up to global sign); the quasi-norm to the
    p-th power is concave on each cell, so each surviving cell is maximized
    locally and its value certified by the Hoelder weights taken from the cell
    optimum. Cells whose closed-form bound cannot beat the incumbent are skipped.
    """
    p = check_p(p)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    _check_K(P, max_K)
    lower, sigma = _vertex_max(P, p)
    if p == 1.0:
        return lower, lower
    n = P.shape[0]
    if not np.any(P):
        return 0.0, 0.0
    q = p / (1.0 - p)
    y_best = np.abs(P @ sigma)
    upper = lower
    programs = _CellPrograms(P, p, q)
    total = 1 << (n - 1)
    for start in range(0, total, _CHUNK):
        S = _cell_signs(n, start, min(start + _CHUNK, total))
        bound = _holder_bound(P, S, np.ones(n), q)
        if np.all(y_best > 0):
            bound = np.minimum(bound, _holder_bound(P, S, y_best ** (p - 1.0), q))
        for k in np.argsort(-bound, kind="stable"):
            if bound[k] <= lower * (1.0 + rtol):
                break
            s = S[k]
            x0 = np.sign(P.T @ s)
            x0[x0 == 0] = 1.0
            x = _solve_cell(P, s, p, 0.5 * x0)
            y = P @ x
            lower = max(lower, float(_colwise_quasinorm(y[:, None], p)[0]))
            cell_value = _colwise_quasinorm(y[:, None], p)[0]
            cell_upper = min(bound[k], _certify_cell(P, s, s * y, p, q))
            if cell_upper > lower * (1.0 + rtol):
                cell_upper = min(cell_upper, programs.dual_bound(s))
            if cell_upper > cell_value * (1.0 + rtol):
                # local solve stalled; restart from an interior-point solution
                x = _solve_cell(P, s, p, programs.primal_point(s, x))
                lower = max(lower, float(_colwise_quasinorm((P @ x)[:, None], p)[0]))
            upper = max(upper, cell_upper)
    return lower, max(lower, upper)


def norm_P_linf_to_lp_exact(P, p: float, max_K: int = 20) -> float:
    """||P: l_inf^K -> l_p^n||, exact for p = 1 and certified to ~1e-9 relative for p < 1.

    Refuses K > max_K since the vertex stage is exponential in K.
    """
    lower, upper = norm_P_linf_to_lp_bounds(P, p, max_K)
    if upper - lower > 1e-9 * max(1.0, upper):
        log.warning("norm bracket not closed: [%.12g, %.12g]", lower, upper)
    return lower


def norm_P_linf_to_lp_search(P, p: float, restarts: int = 32, seed: int = 0) -> float:
    """Lower estimate of ||P||_{inf->p} by greedy coordinate-flip ascent.

    Each restart begins at a uniformly random vertex and flips the single
    coordinate with the largest gain until no flip improves the value.
    """
    p = check_p(p)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    P = np.atleast_2d(np.asarray(P, dtype=float))
    K = P.shape[1]
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        sigma = rng.choice([-1.0, 1.0], size=K)
        v = P @ sigma
        value = _colwise_quasinorm(v[:, None], p)[0]
        while True:
            # column j holds P(sigma with coordinate j flipped)
            cand = v[:, None] - 2.0 * P * sigma[None, :]
            vals = _colwise_quasinorm(cand, p)
            j = int(np.argmax(vals))
            if vals[j] <= value * (1.0 + 1e-12):
                break
            sigma[j] = -sigma[j]
            v = cand[:, j]
            value = vals[j]
        best = max(best, float(value))
    return best


def identity_embedding_norm(n: int, p: float) -> float:
    """||Id: l_1^n -> l_p^n|| = n^(1/p - 1)."""
    p = check_p(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(n) ** (1.0 / p - 1.0)
