"""Shared generators for the solver tests."""

import numpy as np

from junolog.ocsvm import KernelSpec, gram_matrix

KINDS = ("rbf", "linear", "polynomial", "sigmoid")


def random_spec(rng, kind):
    if kind == "rbf":
        return KernelSpec("rbf", gamma=float(rng.uniform(0.1, 2.0)))
    if kind == "linear":
        return KernelSpec("linear", coef0=float(rng.uniform(0, 1)))
    if kind == "polynomial":
        return KernelSpec("polynomial", gamma=float(rng.uniform(0.2, 1.0)),
                          coef0=float(rng.uniform(0, 1)), degree=int(rng.integers(1, 4)))
    # a negative offset keeps tanh convex enough on the simplex for small l
    return KernelSpec("sigmoid", gamma=float(rng.uniform(0.05, 0.5)),
                      coef0=float(rng.uniform(-1.5, -0.7)))


def convex_on_simplex(Q, tol=1e-10):
    """True if 1/2 a^T Q a is convex along {sum(a) = 1}, i.e. Q is PSD on sum-zero vectors."""
    l = len(Q)
    P = np.eye(l) - 1.0 / l
    return float(np.linalg.eigvalsh(P @ Q @ P).min()) >= -tol


def random_instance(rng, kind, l, convex=True, tries=1000):
    """Random 3-d points and kernel; redrawn until the dual is convex if asked."""
    for _ in range(tries):
        X = rng.normal(size=(l, 3))
        spec = random_spec(rng, kind)
        Q = gram_matrix(spec, X)
        if not convex or convex_on_simplex(Q):
            return X, spec, Q
    raise RuntimeError(f"no convex {kind} instance with l={l} in {tries} draws")


def objective(Q, a):
    return 0.5 * float(a @ Q @ a)

