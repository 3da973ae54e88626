"""Per-log feature vector: token length, out-of-dictionary count, TF-IDF sum.

The dictionary comes from normal training logs only; document frequencies
come from the whole training partition. A word never seen in training gets
its document frequency clamped to ``df_floor`` so that its IDF is the
largest finite value, ``log(N)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyCorpus, InsufficientData

Tokens = Sequence[str]


@dataclass(frozen=True)
class Dictionary:
    """Vocabulary with stable indices, in first-appearance order."""

    words: Tuple[str, ...]
    min_df: int = 1
    index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})
        if len(self.index) != len(self.words):
            raise ValueError("dictionary words must be unique")

    @property
    def m(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self.index

    def __len__(self):
        return len(self.words)


@dataclass(frozen=True)
class IdfTable:
    df: Mapping[str, int]
    N: int
    df_floor: int = 1
    log_base: Optional[float] = None  # None means natural log

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("IdfTable needs N >= 1")
        if self.log_base is not None and self.log_base <= 1:
            raise ValueError("log base must exceed 1")

    def idf(self, word: str) -> float:
        df = max(self.df.get(word, 0), self.df_floor)
        if self.log_base is None:
            return math.log(self.N / df)
        return math.log(self.N / df, self.log_base)


class FeatureVector(NamedTuple):
    S: int
    L: int
    G: float


@dataclass(frozen=True)
class FeatureScaler:
    mean: Tuple[float, float, float]
    std: Tuple[float, float, float]
    enabled: bool = True

    @classmethod
    def identity(cls) -> "FeatureScaler":
        return cls((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), enabled=False)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if not self.enabled:
            return X.copy()
        return (X - np.asarray(self.mean)) / np.asarray(self.std)

    def inverse_transform(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        if not self.enabled:
            return Z.copy()
        return Z * np.asarray(self.std) + np.asarray(self.mean)


def build_dictionary(normals: Sequence[Tokens], min_df: int = 1) -> Dictionary:
    """Keep every token that occurs in at least ``min_df`` of the normal logs."""
    if min_df < 1:
        raise ValueError("min_df must be positive")
    if len(normals) == 0:
        raise EmptyCorpus("cannot build a dictionary from zero messages")
    df: Counter = Counter()
    order: List[str] = []
    for msg in normals:
        for w in dict.fromkeys(msg):
            if w not in df:
                order.append(w)
            df[w] += 1
    return Dictionary(tuple(w for w in order if df[w] >= min_df), min_df)


def bow_count_row(msg: Tokens, dictionary: Dictionary) -> np.ndarray:
    """One row of the bag-of-words count matrix (raw counts, length m)."""
    row = np.zeros(dictionary.m, dtype=np.int64)
    for w in msg:
        j = dictionary.index.get(w)
        if j is not None:
            row[j] += 1
    return row


def token_length(msg: Tokens) -> int:
    return len(msg)


def oov_count(msg: Tokens, dictionary: Dictionary) -> int:
    return token_length(msg) - int(bow_count_row(msg, dictionary).sum())


def fit_idf(training: Sequence[Tokens], log_base: Optional[float] = None) -> IdfTable:
    if len(training) == 0:
        raise EmptyCorpus("cannot fit IDF on zero messages")
    df: Counter = Counter()
    for msg in training:
        df.update(set(msg))
    return IdfTable(dict(sorted(df.items())), len(training), 1, log_base)


def tfidf_sum(msg: Tokens, idf: IdfTable) -> float:
    """Sum of tf * idf over the distinct words of ``msg``."""
    total = 0.0
    for word, tf in Counter(msg).items():
        total += tf * idf.idf(word)
    return total


def extract_features(msg: Tokens, dictionary: Dictionary, idf: IdfTable) -> FeatureVector:
    return FeatureVector(token_length(msg), oov_count(msg, dictionary), tfidf_sum(msg, idf))


def feature_matrix(messages: Iterable[Tokens], dictionary: Dictionary, idf: IdfTable) -> np.ndarray:
    rows = [extract_features(m, dictionary, idf) for m in messages]
    if not rows:
        return np.zeros((0, 3))
    return np.array(rows, dtype=np.float64)


def fit_feature_scaler(vectors, enabled: bool = True) -> FeatureScaler:
    """Standardize with the sample mean and sample std (ddof=1).

    Components whose sample variance is zero keep std 1.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InsufficientData("feature scaling needs at least 2 vectors")
    mean = X.mean(axis=0)
    std = X.std(axis=0, ddof=1)
    std = np.where(std > 0, std, 1.0)
    return FeatureScaler(tuple(float(v) for v in mean), tuple(float(v) for v in std), enabled)


def scale(v, scaler: FeatureScaler) -> np.ndarray:
    return scaler.transform(v)
