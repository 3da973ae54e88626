"""Projected-gradient reference solver for the one-class dual.

Deliberately slow and simple; it shares nothing with the SMO trainer and
exists so the trainer can be checked against it on small problems.
"""

import numpy as np

from .errors import InfeasibleBox


def project_capped_simplex(v, upper: float, total: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {0 <= x <= upper, sum(x) = total}.

    The projection is ``clip(v - t, 0, upper)`` for the shift t where the
    clipped sum equals ``total``. That sum is piecewise linear and
    non-increasing in t with kinks at ``v`` and ``v - upper``, so t is found
    by binary search over the sorted kinks and then linear interpolation.
    """
    v = np.asarray(v, dtype=np.float64)
    if upper * len(v) < total * (1 - 1e-12):
        raise InfeasibleBox("box too small to hold the required total")
    kinks = np.unique(np.concatenate([v - upper, v]))
    sums = np.clip(v[None, :] - kinks[:, None], 0.0, upper).sum(axis=1)
    # sums is non-increasing; first kink whose sum drops to <= total
    k = int(np.searchsorted(-sums, -total, side="left"))
    if k == 0:
        t = kinks[0]
    else:
        s0, s1 = sums[k - 1], sums[k]
        t0, t1 = kinks[k - 1], kinks[k]
        t = t0 + (s0 - total) * (t1 - t0) / (s0 - s1) if s0 > s1 else t1
    return np.clip(v - t, 0.0, upper)


def solve_dual_reference(gram, nu: float, max_iter: int = 200_000, tol: float = 1e-10) -> np.ndarray:
    """Minimize 1/2 a^T Q a over the capped simplex by projected gradient.

    Step size is 0.5 / ||Q||_inf. Stops when the gradient-mapping norm drops
    below ``tol`` and returns the best iterate seen.
    """
    Q = np.asarray(gram, dtype=np.float64)
    l = Q.shape[0]
    if l > 64:
        raise ValueError("reference solver is meant for l <= 64")
    if not 0 < nu <= 1 or nu * l < 1 - 1e-12:
        raise InfeasibleBox(f"nu * l = {nu * l:.4g} < 1")
    C = 1.0 / (nu * l)
    norm = float(np.abs(Q).sum(axis=1).max())
    step = 0.5 / norm if norm > 0 else 1.0

    a = project_capped_simplex(np.full(l, 1.0 / l), C)
    best, best_obj = a.copy(), 0.5 * a @ Q @ a
    for _ in range(max_iter):
        nxt = project_capped_simplex(a - step * (Q @ a), C)
        mapping = np.linalg.norm(a - nxt) / step
        a = nxt
        obj = 0.5 * a @ Q @ a
        if obj < best_obj:
            best, best_obj = a.copy(), obj
        if mapping < tol:
            break
    return best
