"""Witness construction: from PT = Id build w with Pw = sum eps_i e_i and small sup-norm.

The pipeline: kernel representation W of P, the functional t -> R_t =
sum_i eps_i (T e_i)_t, a minimal sup-norm extension h of that functional
restricted to the span Y of the distinguished rows of W, the kernel
correction alpha = W (R - h), and finally w = R - alpha.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import AllDrawsFailed, Infeasible, LabError
from .factorization import Factorization, KernelRepresentation, kernel_representation
from .quasinorm import check_p, p_quasinorm
from .signs import clamped_log
from .simplex import maximize_homogeneous

CERT_TOL = 1e-8


@dataclass
class ExtensionProblem:
    """Find h with (1/K) M h = b; b = (1/K) M R is the functional on Y."""

    M: np.ndarray  # (n, K), row i is t -> y_t(s_i)
    b: np.ndarray  # (n,)
    K: int

    @property
    def measure(self) -> float:
        return 1.0 / self.K

    @property
    def A(self) -> np.ndarray:
        return self.M / self.K

    @classmethod
    def from_functional(cls, M, R) -> "ExtensionProblem":
        M = np.atleast_2d(np.asarray(M, dtype=float))
        R = np.asarray(R, dtype=float)
        K = M.shape[1]
        return cls(M=M, b=M @ R / K, K=K)


@dataclass
class DualCertificate:
    """y with ||A^T y||_1 = 1 and b.y = optimum; weak duality then pins the optimum."""

    y: np.ndarray
    l1_aggregate: float
    value: float


def validate_certificate(prob: ExtensionProblem, h, optimum: float,
                         cert: DualCertificate, tol: float = CERT_TOL) -> bool:
    h = np.asarray(h, dtype=float)
    A = prob.A
    if A.size and np.max(np.abs(A @ h - prob.b), initial=0.0) > tol:
        return False
    if abs(np.max(np.abs(h), initial=0.0) - optimum) > tol:
        return False
    agg = float(np.sum(np.abs(A.T @ cert.y)))
    if agg > 1.0 + tol:
        return False
    return abs(float(prob.b @ cert.y) - optimum) <= tol


def min_sup_norm_extension(prob: ExtensionProblem):
    """Minimize ||h||_inf subject to (1/K) M h = b.

    Solved in homogeneous form: maximize c subject to A g = c b, |g_t| <= 1;
    then h = g / c and the optimum is 1 / c. Returns ``(h, optimum, certificate)``.
    """
    A = prob.A
    n, K = A.shape
    b = np.asarray(prob.b, dtype=float)
    if not np.any(np.abs(b) > 0):
        return np.zeros(K), 0.0, DualCertificate(np.zeros(n), 0.0, 0.0)

    cols = np.hstack((A, -b[:, None]))
    obj = np.zeros(K + 1)
    obj[K] = 1.0
    lo = np.concatenate((-np.ones(K), [0.0]))
    hi = np.concatenate((np.ones(K), [np.inf]))
    res = maximize_homogeneous(obj, cols, lo, hi)
    scale = res.x[K]
    if scale <= 1e-12:
        raise Infeasible("right-hand side is not in the range of M")
    h = res.x[:K] / scale
    optimum = 1.0 / scale

    y = -res.duals
    agg = float(np.sum(np.abs(A.T @ y)))
    if agg > 0:
        y = y / agg
    cert = DualCertificate(y=y, l1_aggregate=float(np.sum(np.abs(A.T @ y))),
                           value=float(b @ y))
    return h, optimum, cert


def restricted_functional_norm(prob: ExtensionProblem) -> float:
    """Norm of psi(y) = (1/K) sum_t R_t y_t on Y = rowspan(M), with ||y|| = (1/K) sum |y_t|.

    On y = M^T a the functional equals b.a, so this maximizes b.a subject to
    (1/K) ||M^T a||_1 <= 1. Independent of the extension solver: the absolute
    values are split into z_t >= |(M^T a)_t| / K and the LP goes to HiGHS.
    """
    M = np.atleast_2d(np.asarray(prob.M, dtype=float))
    b = np.asarray(prob.b, dtype=float)
    n, Kc = M.shape
    K = prob.K
    if not np.any(np.abs(b) > 0):
        return 0.0
    G = M.T / K  # (K, n)
    # variables [a (free), z >= 0]; maximize b.a
    c = np.concatenate((-b, np.zeros(Kc)))
    A_ub = np.block([
        [G, -np.eye(Kc)],
        [-G, -np.eye(Kc)],
        [np.zeros((1, n)), np.ones((1, Kc))],
    ])
    b_ub = np.concatenate((np.zeros(2 * Kc), [1.0]))
    bounds = [(None, None)] * n + [(0, None)] * Kc
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise LabError(f"functional-norm LP failed: {res.message}")
    return float(-res.fun)


def build_R(epsilon, T) -> np.ndarray:
    """R_t = sum_i eps_i T[t, i]."""
    return np.asarray(T, dtype=float) @ np.asarray(epsilon, dtype=float)


@dataclass
class WitnessResult:
    epsilon: np.ndarray
    h: np.ndarray
    alpha_corr: np.ndarray
    w: np.ndarray
    sup_w: float
    ratio: float
    implied_lower_bound: float
    distinguished: list[int]
    extension_optimum: float

    def to_dict(self) -> dict:
        return {
            "epsilon": [int(e) for e in self.epsilon],
            "h": self.h.tolist(),
            "alpha": self.alpha_corr.tolist(),
            "w": self.w.tolist(),
            "sup_w": self.sup_w,
            "ratio": self.ratio,
            "implied_lower_bound": self.implied_lower_bound,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def lower_bound_from_witness(F: Factorization, wres: WitnessResult) -> float:
    """||sum eps_i e_i||_p / ||w||_inf, a lower bound for ||P: l_inf -> l_p||."""
    return p_quasinorm(wres.epsilon, F.p) / wres.sup_w


def construct_witness(F: Factorization, epsilon,
                      rep: KernelRepresentation | None = None) -> WitnessResult:
    eps = np.asarray(epsilon, dtype=float)
    if eps.shape != (F.n,) or not np.all(np.abs(eps) == 1):
        raise ValueError(f"epsilon must be a length-{F.n} sign vector")
    if rep is None:
        rep = kernel_representation(F.P)
    R = build_R(eps, F.T)
    prob = ExtensionProblem.from_functional(rep.W[rep.distinguished], R)
    h, optimum, _ = min_sup_norm_extension(prob)
    # (1/m) * integral with m = 1/K collapses to a plain sum over t
    alpha = rep.W @ (R - h)
    w = R - alpha
    sup_w = float(np.max(np.abs(w)))
    ratio = sup_w / math.sqrt(F.n * clamped_log(F.n))
    lb = p_quasinorm(eps, F.p) / sup_w if sup_w > 0 else math.inf
    return WitnessResult(epsilon=eps.astype(int), h=h, alpha_corr=alpha, w=w,
                         sup_w=sup_w, ratio=ratio, implied_lower_bound=lb,
                         distinguished=list(rep.distinguished),
                         extension_optimum=optimum)


def _sample_signs(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n) * 2 - 1


def search_witness(F: Factorization, tries: int = 64, seed: int = 0,
                   return_all: bool = False):
    """Best witness over ``tries`` uniformly sampled sign vectors.

    Ties in sup_w are broken by the lexicographically smallest epsilon. With
    ``return_all`` the list of every successful draw is returned as well.
    """
    if tries < 1:
        raise ValueError("tries must be >= 1")
    rng = np.random.default_rng(seed)
    draws = [_sample_signs(rng, F.n) for _ in range(tries)]
    try:
        rep = kernel_representation(F.P)
    except LabError as exc:
        raise AllDrawsFailed(f"kernel representation failed: {exc}") from exc
    results = []
    for eps in draws:
        try:
            results.append(construct_witness(F, eps, rep=rep))
        except LabError:
            continue
    if not results:
        raise AllDrawsFailed(f"all {tries} draws failed")
    best = min(results, key=lambda r: (r.sup_w, tuple(int(e) for e in r.epsilon)))
    return (best, results) if return_all else best


def witness_scaling_bound(n: int, p: float) -> tuple[float, float]:
    """(n^(1/p), 1/p - 1/2): the signed unit-vector sum norm and the predicted exponent.

    For the unit basis of l_p^n every choice of signs gives ||sum +-e_i||_p = n^(1/p).
    """
    p = check_p(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(n) ** (1.0 / p), 1.0 / p - 0.5
