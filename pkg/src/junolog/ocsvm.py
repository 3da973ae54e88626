"""nu-One-Class SVM trained from scratch with SMO.

The trainer solves the dual

    min_a  1/2 a^T Q a   s.t.  0 <= a_i <= 1/(nu*l),  sum(a) = 1,

with Q_ij = k(x_i, x_j), picking the maximal violating pair at every step.
The decision function is ``f(x) = sum_i a_i k(x_i, x) - rho``; a point is
normal iff ``f(x) >= 0``.

All kernel values go through :func:`kernel_matrix`, which evaluates the same
elementwise expression regardless of array shapes, and every weighted sum
over support vectors is accumulated in index order. Together these keep
training, rho recovery and scoring bit-consistent and independent of BLAS
threading.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import DidNotConverge, InvalidNu
from .features import Dictionary, FeatureScaler, IdfTable, extract_features
from .ingest import Label, LogRecord, normalize_message

logger = logging.getLogger(__name__)

KERNELS = ("rbf", "linear", "polynomial", "sigmoid")
KERNEL_ALIASES = {"poly": "polynomial", "gaussian": "rbf"}

# Full l x l Gram matrices are only built up to this size; above it rows are
# computed on demand and kept in an LRU cache.
FULL_GRAM_LIMIT = 10_000
ROW_CACHE_BYTES = 512 * 2**20

# Curvature floor for the two-variable subproblem (non-PSD kernels).
_TAU = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float = 1.0
    coef0: float = 0.0
    degree: int = 3

    def __post_init__(self):
        kind = KERNEL_ALIASES.get(self.kind, self.kind)
        if kind not in KERNELS:
            raise ValueError(f"unknown kernel {self.kind!r}; expected one of {KERNELS}")
        object.__setattr__(self, "kind", kind)
        if not self.gamma > 0:
            raise ValueError("kernel gamma must be positive")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError("polynomial degree must be a positive integer")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "coef0", float(self.coef0))
        object.__setattr__(self, "degree", int(self.degree))

    @classmethod
    def rbf_sigma(cls, sigma: float) -> "KernelSpec":
        """RBF kernel written as exp(-|x-y|^2 / (2 sigma^2))."""
        return cls("rbf", gamma=1.0 / (2.0 * sigma * sigma))


@dataclass
class TrainConfig:
    nu: float = 0.02
    kernel: KernelSpec = field(default_factory=KernelSpec)
    tolerance: float = 1e-3
    max_iterations: Optional[int] = None  # default 10 * l * max(l, 1000)

    def __post_init__(self):
        if not 0 < self.nu <= 1:
            raise InvalidNu(f"nu must lie in (0, 1], got {self.nu}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class OcsvmModel:
    kernel: KernelSpec
    support_vectors: np.ndarray
    alphas: np.ndarray
    rho: float
    nu: float
    training_size: int
    scaler: Optional[FeatureScaler] = None
    dictionary: Optional[Dictionary] = None
    idf: Optional[IdfTable] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def upper_bound(self) -> float:
        return 1.0 / (self.nu * self.training_size)


# ---------------------------------------------------------------------------
# kernels


def _pairwise_dot(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = A[:, 0:1] * B[:, 0]
    for k in range(1, A.shape[1]):
        out += A[:, k:k + 1] * B[:, k]
    return out


def _pairwise_sqdist(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = (A[:, 0:1] - B[:, 0]) ** 2
    for k in range(1, A.shape[1]):
        out += (A[:, k:k + 1] - B[:, k]) ** 2
    return out


def kernel_matrix(spec: KernelSpec, A, B) -> np.ndarray:
    """Kernel values between every row of ``A`` and every row of ``B``."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if spec.kind == "rbf":
        return np.exp(-spec.gamma * _pairwise_sqdist(A, B))
    dot = _pairwise_dot(A, B)
    if spec.kind == "linear":
        return dot + spec.coef0
    if spec.kind == "polynomial":
        return (spec.gamma * dot + spec.coef0) ** spec.degree
    return np.tanh(spec.gamma * dot + spec.coef0)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    return float(kernel_matrix(spec, x, y)[0, 0])


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    """Symmetric l x l Gram matrix (upper triangle mirrored, so exactly symmetric)."""
    K = kernel_matrix(spec, X, X)
    return np.triu(K) + np.triu(K, 1).T


def _kernel_diag(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    return np.array([kernel_matrix(spec, x[None], x[None])[0, 0] for x in X])


class _RowCache:
    """On-demand Gram rows with a byte-bounded LRU cache."""

    def __init__(self, spec: KernelSpec, X: np.ndarray, max_bytes: int = ROW_CACHE_BYTES):
        self.spec = spec
        self.X = X
        self.capacity = max(2, max_bytes // (8 * len(X)))
        self._rows: "OrderedDict[int, np.ndarray]" = OrderedDict()
        self.diag = _kernel_diag(spec, X)

    def __getitem__(self, i: int) -> np.ndarray:
        row = self._rows.get(i)
        if row is not None:
            self._rows.move_to_end(i)
            return row
        row = kernel_matrix(self.spec, self.X[i:i + 1], self.X)[0]
        self._rows[i] = row
        if len(self._rows) > self.capacity:
            self._rows.popitem(last=False)
        return row


class _FullGram:
    def __init__(self, spec: KernelSpec, X: np.ndarray):
        self.K = gram_matrix(spec, X)
        self.diag = self.K.diagonal().copy()

    def __getitem__(self, i: int) -> np.ndarray:
        return self.K[i]


def weighted_row_sum(rows, weights: np.ndarray, indices) -> np.ndarray:
    """sum_j weights[j] * rows[j] over ``indices``, accumulated in order."""
    out = None
    for j in indices:
        term = weights[j] * rows[j]
        out = term.copy() if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# training


def initial_alphas(nu: float, l: int) -> np.ndarray:
    """Feasible start: the first floor(nu*l) points sit at the upper bound."""
    nl = nu * l
    C = 1.0 / nl
    n_full = min(int(math.floor(nl)), l)
    alpha = np.zeros(l)
    alpha[:n_full] = C
    if n_full < l:
        alpha[n_full] = (nl - n_full) / nl
    return alpha


def compute_rho(gram, alphas, nu: float, l: int) -> float:
    """Offset of the separating hyperplane from a dual solution.

    See :func:`_rho_from_gradient` for the rule.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    nz = np.flatnonzero(alphas > 0)
    G = weighted_row_sum(gram, alphas, nz)
    return _rho_from_gradient(G, alphas, 1.0 / (nu * l))


def _rho_from_gradient(G: np.ndarray, alphas: np.ndarray, C: float) -> float:
    """Smallest G over points below the upper bound (largest G if none).

    At a KKT point free SVs share one G value and points at zero have
    G >= rho, so this is the usual rho. At a tolerance-stopped solution the
    free G values still spread over up to ``tolerance``; taking the low end
    keeps every free SV, and so every duplicate of one, at f >= 0 instead of
    splitting identical points across the margin.
    """
    tau = 1e-9 * C
    below = alphas < C - tau
    if below.any():
        return float(G[below].min())
    return float(G.max())


def dual_objective(gram: np.ndarray, alphas) -> float:
    a = np.asarray(alphas, dtype=np.float64)
    return 0.5 * float(a @ gram @ a)


def solve_smo(Q, nu: float, l: int, tolerance: float, max_iterations: int) -> Tuple[np.ndarray, Dict[str, Any]]:
    """Run SMO on the one-class dual; returns (alphas, diagnostics).

    ``Q`` is anything indexable by row that exposes a ``diag`` array.
    """
    C = 1.0 / (nu * l)
    alpha = initial_alphas(nu, l)
    G = weighted_row_sum(Q, alpha, np.flatnonzero(alpha > 0))
    diag = Q.diag

    n_iter = 0
    gap = math.inf
    while True:
        up = alpha < C
        low = alpha > 0
        if not up.any():
            gap = 0.0
            break
        # argmin/argmax return the first index on ties
        i = int(np.argmin(np.where(up, G, np.inf)))
        j = int(np.argmax(np.where(low, G, -np.inf)))
        gap = float(G[j] - G[i])
        if gap < tolerance:
            break
        if n_iter >= max_iterations:
            raise DidNotConverge(
                f"SMO stopped after {n_iter} iterations with KKT gap {gap:.3g}",
                {"iterations": n_iter, "kkt_gap": gap, "alphas": alpha.copy()},
            )
        Qi, Qj = Q[i], Q[j]
        quad = diag[i] + diag[j] - 2.0 * Qi[j]
        if quad <= 0:
            quad = _TAU
        room_i = C - alpha[i]
        room_j = alpha[j]
        delta = gap / quad
        if delta >= room_i and room_i <= room_j:
            delta = room_i
            alpha[j] -= delta
            alpha[i] = C
            if room_i == room_j:
                alpha[j] = 0.0
        elif delta >= room_j:
            delta = room_j
            alpha[i] += delta
            alpha[j] = 0.0
        else:
            alpha[i] += delta
            alpha[j] -= delta
        G += delta * (Qi - Qj)
        n_iter += 1

    return alpha, {"iterations": n_iter, "kkt_gap": gap}


def _gram_source(spec: KernelSpec, X: np.ndarray):
    if len(X) <= FULL_GRAM_LIMIT:
        return _FullGram(spec, X)
    return _RowCache(spec, X)


def train(X, cfg: TrainConfig, *, scaler=None, dictionary=None, idf=None) -> OcsvmModel:
    """Fit a one-class SVM on (already scaled) feature rows ``X``.

    Raises:
        InvalidNu: nu outside (0, 1] or nu * l < 1.
        DidNotConverge: the iteration cap was reached first.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    l = len(X)
    if l < 1:
        raise ValueError("cannot train on an empty set")
    nu = cfg.nu
    if not 0 < nu <= 1:
        raise InvalidNu(f"nu must lie in (0, 1], got {nu}")
    if nu * l < 1 - 1e-12:
        raise InvalidNu(f"nu * l = {nu * l:.4g} < 1; the box constraints cannot sum to 1")

    max_iter = cfg.max_iterations or 10 * l * max(l, 1000)
    Q = _gram_source(cfg.kernel, X)
    alpha, diag = solve_smo(Q, nu, l, cfg.tolerance, max_iter)

    C = 1.0 / (nu * l)
    sv = np.flatnonzero(alpha > 1e-12 * C)
    G = weighted_row_sum(Q, alpha, sv)
    rho = _rho_from_gradient(G, alpha, C)
    diag["n_support"] = int(len(sv))
    logger.debug("SMO: %d iterations, gap %.3g, %d SVs", diag["iterations"], diag["kkt_gap"], len(sv))

    return OcsvmModel(
        kernel=cfg.kernel,
        support_vectors=X[sv].copy(),
        alphas=alpha[sv].copy(),
        rho=rho,
        nu=nu,
        training_size=l,
        scaler=scaler,
        dictionary=dictionary,
        idf=idf,
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# scoring


def decision_function(model: OcsvmModel, Z) -> np.ndarray:
    """Decision values for rows of ``Z`` (scaled feature space)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    K = kernel_matrix(model.kernel, model.support_vectors, Z)
    return weighted_row_sum(K, model.alphas, range(len(model.alphas))) - model.rho


def decision_value(model: OcsvmModel, x) -> float:
    return float(decision_function(model, x)[0])


def verdict(value: float) -> Label:
    # the margin itself counts as normal
    return Label.NORMAL if value >= 0 else Label.ANOMALY


def featurize(model: OcsvmModel, messages: Sequence[Sequence[str]]) -> np.ndarray:
    """Scaled feature rows for normalized messages, using the model's pipeline state."""
    if model.dictionary is None or model.idf is None:
        raise ValueError("model carries no feature pipeline; train it through fit_detector")
    raw = np.array([extract_features(m, model.dictionary, model.idf) for m in messages],
                   dtype=np.float64).reshape(-1, 3)
    scaler = model.scaler or FeatureScaler.identity()
    return scaler.transform(raw)


def score_messages(model: OcsvmModel, messages: Sequence[Sequence[str]]) -> np.ndarray:
    if len(messages) == 0:
        return np.zeros(0)
    return decision_function(model, featurize(model, messages))


def predict(model: OcsvmModel, record: LogRecord) -> Tuple[Label, float]:
    """Classify one parsed log record end to end."""
    value = float(score_messages(model, [normalize_message(record.message)])[0])
    return verdict(value), value
