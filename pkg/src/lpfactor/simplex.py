"""Dense bounded-variable primal simplex with Bland's rule.

Solves ``maximize c.x  s.t.  A x = 0,  lo <= x <= hi`` where ``lo <= 0 <= hi``.
The start point is x = 0 with one fixed artificial per row in the basis, so no
phase one is needed. Nonbasic variables may rest strictly between their bounds
(initially at 0); a variable whose reduced cost never becomes nonzero keeps
the value 0, which makes the optimum canonical for the extension problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LabError

COST_TOL = 1e-11
PIVOT_TOL = 1e-11


class Unbounded(LabError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray  # simplex multipliers of the equality rows
    iterations: int


def maximize_homogeneous(c, A, lo, hi, max_iter: int | None = None) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, nv = A.shape
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > 0) or np.any(hi < 0):
        raise ValueError("x = 0 must be feasible")
    if max_iter is None:
        max_iter = 50 * (m + nv) + 1000

    # artificials occupy indices nv..nv+m-1 with bounds [0, 0]
    full = np.hstack((A, np.eye(m)))
    cost = np.concatenate((c, np.zeros(m)))
    lo_f = np.concatenate((lo, np.zeros(m)))
    hi_f = np.concatenate((hi, np.zeros(m)))
    x = np.zeros(nv + m)
    basis = list(range(nv, nv + m))
    is_basic = np.zeros(nv + m, dtype=bool)
    is_basic[basis] = True

    for it in range(max_iter):
        B = full[:, basis]
        pi = np.linalg.solve(B.T, cost[basis])
        d = cost - full.T @ pi
        up = (d > COST_TOL) & (x < hi_f - COST_TOL)
        down = (d < -COST_TOL) & (x > lo_f + COST_TOL)
        eligible = np.flatnonzero((up | down) & ~is_basic)
        if eligible.size == 0:
            return LPResult(x=x[:nv].copy(), objective=float(c @ x[:nv]),
                            duals=pi, iterations=it)
        j = int(eligible[0])
        direction = 1.0 if up[j] else -1.0
        col = np.linalg.solve(B, full[:, j])
        delta = -direction * col  # change of x_B per unit step

        step = hi_f[j] - x[j] if direction > 0 else x[j] - lo_f[j]
        leave = -1
        for k in range(m):
            if delta[k] > PIVOT_TOL:
                room = (hi_f[basis[k]] - x[basis[k]]) / delta[k]
            elif delta[k] < -PIVOT_TOL:
                room = (x[basis[k]] - lo_f[basis[k]]) / -delta[k]
            else:
                continue
            room = max(room, 0.0)
            if room < step - 1e-14 or (
                    leave >= 0 and abs(room - step) <= 1e-14 and basis[k] < basis[leave]):
                step, leave = room, k
        if not np.isfinite(step):
            raise Unbounded(f"objective unbounded along variable {j}")

        x[j] += direction * step
        x[basis] += step * delta
        if leave >= 0:
            out = basis[leave]
            x[out] = hi_f[out] if delta[leave] > 0 else lo_f[out]
            is_basic[out] = False
            basis[leave] = j
            is_basic[j] = True
        else:
            x[j] = hi_f[j] if direction > 0 else lo_f[j]
        # re-solve basic values against drift: A_B x_B = -A_N x_N
        nonbasic = ~is_basic
        x[basis] = np.linalg.solve(full[:, basis], -full[:, nonbasic] @ x[nonbasic])
    raise LabError(f"simplex did not terminate in {max_iter} iterations")
