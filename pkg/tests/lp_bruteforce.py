"""Independent LP oracle: exhaustive enumeration of basic solutions.

For ``min c@x, A@x = b, lo <= x <= hi`` with all bounds finite, every vertex
of the feasible polytope corresponds to a choice of m independent basic
columns plus a lower/upper assignment for each nonbasic variable. A feasible
bounded LP attains its optimum at such a point, so minimizing over all of
them gives the true optimum. Exponential on purpose; only for tiny test LPs.
"""

import itertools

import numpy as np


def enumerate_lp_min(A, b, c, lo, hi, feas_tol=1e-8):
    """Return (best objective, best x) over all basic solutions, or None."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    m, n = A.shape
    assert np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))

    best_obj, best_x = None, None
    for cols in itertools.combinations(range(n), m):
        B = A[:, list(cols)]
        if np.linalg.matrix_rank(B, tol=1e-9) < m:
            continue
        free = [j for j in range(n) if j not in cols]
        for pattern in itertools.product((0, 1), repeat=len(free)):
            x = np.zeros(n)
            for j, side in zip(free, pattern):
                x[j] = hi[j] if side else lo[j]
            rhs = b - A[:, free] @ x[free] if free else b
            x[list(cols)] = np.linalg.solve(B, rhs)
            if np.any(x < lo - feas_tol) or np.any(x > hi + feas_tol):
                continue
            obj = float(c @ x)
            if best_obj is None or obj < best_obj:
                best_obj, best_x = obj, x.copy()
    return (best_obj, best_x) if best_obj is not None else None
