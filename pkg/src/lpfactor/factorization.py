"""Factorizations Id = PT through l_inf^K and the kernel representation of P.

L_inf over K equal-measure atoms is identified with l_inf^K (atom measure 1/K),
so integrals over (0, 1) become averages over atoms. Atom indices are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInstance, PivotInstability, RankDeficient
from .quasinorm import check_p
from .signs import sylvester_hadamard

RESIDUAL_TOL = 1e-10
PIVOT_TOL = 1e-8
ZERO_TOL = 1e-12
KERNEL_TOL = 1e-9


def validate_factorization(F: "Factorization") -> float:
    """max |PT - I| entrywise."""
    PT = np.asarray(F.P) @ np.asarray(F.T)
    if PT.size == 0:
        return 0.0
    return float(np.max(np.abs(PT - np.eye(PT.shape[0]))))


@dataclass
class Factorization:
    n: int
    K: int
    p: float
    T: np.ndarray  # (K, n)
    P: np.ndarray  # (n, K)

    def __post_init__(self):
        self.p = check_p(self.p)
        self.T = np.asarray(self.T, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.n < 1 or self.K < 1:
            raise ValueError("n and K must be >= 1")
        if self.T.shape != (self.K, self.n) or self.P.shape != (self.n, self.K):
            raise ValueError(
                f"expected T {(self.K, self.n)} and P {(self.n, self.K)}, "
                f"got {self.T.shape} and {self.P.shape}")
        if not (np.all(np.isfinite(self.T)) and np.all(np.isfinite(self.P))):
            raise ValueError("non-finite operator entries")
        resid = validate_factorization(self)
        if resid > RESIDUAL_TOL:
            raise ValueError(f"PT differs from the identity by {resid:.3e}")

    def to_dict(self) -> dict:
        return {"n": self.n, "K": self.K, "p": self.p,
                "T": self.T.tolist(), "P": self.P.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Factorization":
        n, K = int(d["n"]), int(d["K"])
        T = np.array(d["T"], dtype=float).reshape(K, n)
        P = np.array(d["P"], dtype=float).reshape(n, K)
        return cls(n=n, K=K, p=d["p"], T=T, P=P)

    @classmethod
    def from_json(cls, text: str) -> "Factorization":
        return cls.from_dict(json.loads(text))


def build_explicit_factorization(n: int, p: float) -> Factorization:
    """T e_i = i-th Hadamard row, P = (1/K) times the same rows.

    K is the smallest power of two >= n. Hadamard rows are orthogonal with
    squared length K, so PT = I holds exactly in floating point.
    """
    if not 1 <= n <= 4096:
        raise ValueError(f"n must lie in [1, 4096], got {n}")
    K = 1 << (n - 1).bit_length()
    rows = sylvester_hadamard(K.bit_length() - 1)[:n].astype(float)
    return Factorization(n=n, K=K, p=p, T=rows.T.copy(), P=rows / K)


def random_factorization(n: int, K: int, p: float, seed: int) -> Factorization:
    """Random T with columns scaled to sup-norm 1, P its least-squares left inverse."""
    if not 1 <= n <= K:
        raise ValueError("need 1 <= n <= K")
    rng = np.random.default_rng(seed)
    for _ in range(16):
        T = rng.uniform(-1.0, 1.0, size=(K, n))
        T /= np.max(np.abs(T), axis=0)
        if np.linalg.matrix_rank(T) < n:
            continue
        P = np.linalg.solve(T.T @ T, T.T)
        if np.max(np.abs(P @ T - np.eye(n))) > RESIDUAL_TOL:
            continue
        return Factorization(n=n, K=K, p=p, T=T, P=P)
    raise DegenerateInstance(f"no usable draw for n={n}, K={K} after 16 attempts")


def pad_factorization(F: Factorization, target_K: int) -> Factorization:
    """Extend T by zero coordinates and let P ignore them."""
    if target_K < F.K:
        raise ValueError("target_K must be >= K")
    extra = target_K - F.K
    T = np.vstack((F.T, np.zeros((extra, F.n))))
    P = np.hstack((F.P, np.zeros((F.n, extra))))
    return Factorization(n=F.n, K=target_K, p=F.p, T=T, P=P)


def rref(A, pivot_tol: float = PIVOT_TOL, zero_tol: float = ZERO_TOL):
    """Reduced row echelon form with partial pivoting.

    Returns ``(R, pivots)``. Candidate pivots below ``zero_tol`` are treated as
    zero; candidates between ``zero_tol`` and ``pivot_tol`` raise
    PivotInstability because the pivot pattern would be ambiguous.
    """
    R = np.array(A, dtype=float)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        i = r + int(np.argmax(np.abs(R[r:, c])))
        big = abs(R[i, c])
        if big < zero_tol:
            R[r:, c] = 0.0
            continue
        if big < pivot_tol:
            raise PivotInstability(f"pivot {big:.3e} in column {c}")
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] /= R[r, c]
        others = np.arange(rows) != r
        R[others] -= np.outer(R[others, c], R[r])
        R[np.abs(R) < zero_tol] = 0.0
        pivots.append(c)
        r += 1
    return R, pivots


def _check_full_row_rank(P: np.ndarray) -> None:
    if np.linalg.matrix_rank(P) < P.shape[0]:
        raise RankDeficient(f"P of shape {P.shape} does not have full row rank")


def kernel_basis(P) -> np.ndarray:
    """Rows form a basis of ker P, read off the reduced echelon form of P."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, K = P.shape
    _check_full_row_rank(P)
    R, pivots = rref(P)
    if len(pivots) != n:
        raise RankDeficient(f"row reduction found {len(pivots)} pivots, expected {n}")
    free = [c for c in range(K) if c not in set(pivots)]
    Z = np.zeros((len(free), K))
    for k, f in enumerate(free):
        Z[k, f] = 1.0
        Z[k, pivots] = -R[:n, f]
    if Z.size and np.max(np.abs(P @ Z.T)) > KERNEL_TOL:
        raise PivotInstability("kernel basis fails P z = 0 at tolerance")
    return Z


@dataclass
class KernelRepresentation:
    """W[s, t] = y(s, t); column t is a kernel vector, zero at distinguished t."""

    W: np.ndarray
    distinguished: list[int]
    pivot_map: dict[int, int] = field(default_factory=dict)

    @property
    def K(self) -> int:
        return self.W.shape[0]

    @property
    def n(self) -> int:
        return len(self.distinguished)


def kernel_representation(P) -> KernelRepresentation:
    """Row-reduce a kernel basis of P and spread it into the K x K matrix W.

    Pivot columns of the reduced basis are the ordinary atoms; the remaining n
    columns are the distinguished atoms. Column c_i of W is the i-th reduced
    kernel vector, so W restricted to ordinary atoms is the identity and every
    column lies in ker P.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n, K = P.shape
    Z = kernel_basis(P)
    W = np.zeros((K, K))
    if Z.shape[0] == 0:
        return KernelRepresentation(W=W, distinguished=list(range(K)))
    Zr, pivots = rref(Z)
    if len(pivots) != K - n:
        raise PivotInstability(f"kernel basis reduced to rank {len(pivots)}, expected {K - n}")
    for i, c in enumerate(pivots):
        W[:, c] = Zr[i]
    pivot_set = set(pivots)
    distinguished = [t for t in range(K) if t not in pivot_set]
    return KernelRepresentation(W=W, distinguished=distinguished,
                                pivot_map={c: i for i, c in enumerate(pivots)})
