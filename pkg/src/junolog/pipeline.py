"""End-to-end fitting: corpus -> dictionary/IDF/scaler -> one-class SVM."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .features import (
    FeatureScaler,
    build_dictionary,
    feature_matrix,
    fit_feature_scaler,
    fit_idf,
)
from .ingest import Label, LabeledCorpus
from .ocsvm import KernelSpec, OcsvmModel, TrainConfig, train

N_FEATURES = 3


@dataclass
class DetectorConfig:
    kernel: str = "rbf"
    nu: float = 0.02
    gamma: Optional[float] = None  # None -> per-kernel default
    coef0: float = 0.0
    degree: int = 3
    scale: bool = True
    min_df: int = 1
    log_base: Optional[float] = None
    tolerance: float = 1e-3
    max_iterations: Optional[int] = None
    extra: dict = field(default_factory=dict)


def auto_gamma(Z: np.ndarray) -> float:
    """1 / (d * mean per-component sample variance), falling back to 1/d."""
    d = Z.shape[1]
    v = float(np.var(Z, axis=0, ddof=1).mean()) if len(Z) > 1 else 0.0
    return 1.0 / (d * v) if v > 0 else 1.0 / d


def kernel_for(cfg: DetectorConfig, Z: np.ndarray) -> KernelSpec:
    kind = cfg.kernel
    gamma = cfg.gamma
    if gamma is None:
        gamma = auto_gamma(Z) if KernelSpec(kind).kind == "rbf" else 1.0 / N_FEATURES
    return KernelSpec(kind, gamma=gamma, coef0=cfg.coef0, degree=cfg.degree)


def fit_detector(train_corpus: LabeledCorpus, cfg: DetectorConfig = None) -> OcsvmModel:
    """Fit every pipeline stage on a training partition.

    The dictionary sees only logs labeled normal (all logs if the corpus is
    unlabeled); IDF and the scaler see the whole partition; the SVM itself
    never sees labels.
    """
    cfg = cfg or DetectorConfig()
    messages = [e.tokens for e in train_corpus]
    normals = [e.tokens for e in train_corpus if e.label != Label.ANOMALY]
    dictionary = build_dictionary(normals, cfg.min_df)
    idf = fit_idf(messages, cfg.log_base)
    X = feature_matrix(messages, dictionary, idf)
    if len(X) >= 2:
        scaler = fit_feature_scaler(X, enabled=cfg.scale)
    else:
        scaler = FeatureScaler.identity()
    Z = scaler.transform(X)
    spec = kernel_for(cfg, Z)
    tcfg = TrainConfig(nu=cfg.nu, kernel=spec, tolerance=cfg.tolerance,
                       max_iterations=cfg.max_iterations)
    return train(Z, tcfg, scaler=scaler, dictionary=dictionary, idf=idf)
