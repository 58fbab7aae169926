"""Rademacher and Hadamard sign systems, and Rademacher-sum tail estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotFound

# c0 in the recorded n^(-c0 alpha^2) bound: exp(-lambda^2 / (e C^2)) with C = sqrt(2)
POWER_FORM_C0 = 1.0 / (2.0 * math.e)

_MC_CHUNK = 1 << 15


def clamped_log(n: float) -> float:
    """Natural log clamped below at 1, so small n never divide by zero."""
    return max(math.log(n), 1.0)


@dataclass(frozen=True)
class TailEstimate:
    threshold: float
    empirical_probability: float
    bound_hoeffding: float
    bound_power_form: float
    method: str  # "exact" or "mc:<trials>"
    c0: float = POWER_FORM_C0


def sylvester_hadamard(k: int) -> np.ndarray:
    """The 2^k x 2^k Sylvester-Hadamard matrix as int8 entries."""
    if not 0 <= k <= 16:
        raise ValueError(f"k must lie in [0, 16], got {k}")
    H = np.ones((1, 1), dtype=np.int8)
    for _ in range(k):
        H = np.block([[H, H], [H, -H]])
    return H


def rademacher_matrix(n: int) -> np.ndarray:
    """Row i is r_{i+1} on the 2^n dyadic atoms of (0, 1).

    r_i is +1 on the left half of every dyadic interval of length 2^(1-i), so on
    atom j it is +1 exactly when bit (n - i) of j, counted from the least
    significant, is zero.
    """
    if not 1 <= n <= 20:
        raise ValueError(f"n must lie in [1, 20], got {n}")
    j = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (j[None, :] >> shifts[:, None]) & 1
    return (1 - 2 * bits).astype(np.int8)


def random_sign_matrix(n: int, K: int, seed: int) -> np.ndarray:
    if n < 1 or K < 1:
        raise ValueError("n and K must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=(n, K))


def _all_signed_sums(coeffs: np.ndarray) -> np.ndarray:
    # every sum eps . coeffs, built by doubling
    sums = np.zeros(1)
    for a in coeffs:
        sums = np.concatenate((sums + a, sums - a))
    return sums


def _bounds(coeffs: np.ndarray, threshold: float) -> tuple[float, float]:
    n = coeffs.size
    s2 = float(np.sum(coeffs**2))
    if s2 == 0.0:
        hoeff = 0.0 if threshold >= 0 else 1.0
        power = hoeff
        return hoeff, power
    hoeff = 2.0 * math.exp(-threshold**2 / (2.0 * s2))
    alpha2 = threshold**2 / (clamped_log(n) * s2)
    power = float(n) ** (-POWER_FORM_C0 * alpha2) if n > 1 else 1.0
    return hoeff, min(1.0, power)


def _coeff_vector(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise ValueError("coeffs must be a nonempty finite vector")
    return c


def khintchine_tail_exact(coeffs, threshold: float) -> TailEstimate:
    """P(|sum eps_i a_i| > threshold) by enumerating all 2^n sign patterns."""
    c = _coeff_vector(coeffs)
    if c.size > 20:
        raise ValueError("exact enumeration limited to n <= 20")
    sums = _all_signed_sums(c)
    prob = float(np.count_nonzero(np.abs(sums) > threshold)) / sums.size
    hoeff, power = _bounds(c, threshold)
    return TailEstimate(float(threshold), prob, hoeff, power, "exact")


def khintchine_tail_mc(coeffs, threshold: float, trials: int = 100_000,
                       seed: int = 0) -> TailEstimate:
    """Monte Carlo estimate of the same tail probability."""
    c = _coeff_vector(coeffs)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < trials:
        m = min(_MC_CHUNK, trials - done)
        eps = rng.integers(0, 2, size=(m, c.size)) * 2.0 - 1.0
        hits += int(np.count_nonzero(np.abs(eps @ c) > threshold))
        done += m
    hoeff, power = _bounds(c, threshold)
    return TailEstimate(float(threshold), hits / trials, hoeff, power, f"mc:{trials}")


def khintchine_moment_check(coeffs, q: float, trials: int = 100_000,
                            seed: int = 0) -> tuple[float, float]:
    """Estimate ||sum eps_i a_i||_q for normalized a and return (moment, moment/sqrt(q)).

    When 2^n does not exceed ``trials`` the expectation is computed exactly by
    enumeration instead of sampling.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    c = _coeff_vector(coeffs)
    norm = math.sqrt(float(np.sum(c**2)))
    if norm == 0.0:
        raise ValueError("coeffs must not all vanish")
    c = c / norm
    if c.size <= 20 and (1 << c.size) <= trials:
        mean = float(np.mean(np.abs(_all_signed_sums(c)) ** q))
    else:
        rng = np.random.default_rng(seed)
        acc = 0.0
        done = 0
        while done < trials:
            m = min(_MC_CHUNK, trials - done)
            eps = rng.integers(0, 2, size=(m, c.size)) * 2.0 - 1.0
            acc += float(np.sum(np.abs(eps @ c) ** q))
            done += m
        mean = acc / trials
    moment = mean ** (1.0 / q)
    return moment, moment / math.sqrt(q)


def balanced_sign_bound(n: int, alpha: float) -> float:
    return 1.25 * alpha * math.sqrt(n * clamped_log(n))


def balanced_sign_search(F, alpha: float, samples: int = 200,
                       seed: int = 0) -> tuple[np.ndarray, float]:
    """Sample sign vectors until one keeps every column sum of F small.

    A sign vector eps qualifies when max_j |sum_i eps_i F[i, j]| is at most
    (5/4) alpha sqrt(n log n). Returns the first qualifying eps and the
    fraction of all ``samples`` draws that qualified.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    n = F.shape[0]
    if samples < 1:
        raise ValueError("samples must be >= 1")
    bound = balanced_sign_bound(n, alpha)
    rng = np.random.default_rng(seed)
    eps = rng.integers(0, 2, size=(samples, n)) * 2.0 - 1.0
    worst = np.max(np.abs(eps @ F), axis=1) if F.shape[1] else np.zeros(samples)
    good = worst <= bound
    if not good.any():
        raise NotFound(f"no sign vector within {bound:.6g} after {samples} draws")
    first = int(np.argmax(good))
    return eps[first].astype(int), float(np.mean(good))
