"""Train/test splitting, confusion counts and precision/recall/F-measure.

Anomaly is the positive class throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import FrozenSet, List, Sequence, Tuple

import numpy as np

from .errors import LengthMismatch, UnlabeledCorpus
from .ingest import Label, LabeledCorpus
from .ocsvm import OcsvmModel, score_messages, verdict


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f_measure: float
    zero_denominator_flags: FrozenSet[str] = frozenset()


@dataclass
class EvalReport:
    confusion: Confusion
    metrics: Metrics
    # (file line index, decision value, label), most anomalous first
    scores: List[Tuple[int, float, Label]] = field(default_factory=list)

    def to_dict(self) -> dict:
        m = self.metrics
        return {
            "confusion": vars(self.confusion).copy(),
            "metrics": {
                "precision": m.precision,
                "recall": m.recall,
                "f_measure": m.f_measure,
                "zero_denominator_flags": sorted(m.zero_denominator_flags),
            },
            "scores": [
                {"line": i, "decision_value": v, "label": lab.value} for i, v, lab in self.scores
            ],
        }


def _cut(n: int, ratio: float) -> int:
    # round away float noise such as 0.29 * 100 = 28.999999999999996
    return int(math.floor(round(ratio * n, 9)))


def split_train_test(corpus: LabeledCorpus, ratio: float = 0.6, seed: int = 42,
                     mode: str = "seeded") -> Tuple[LabeledCorpus, LabeledCorpus]:
    """Partition a corpus into train and test.

    ``seeded`` shuffles with ``seed`` and takes the first floor(ratio*n)
    records as train; ``chrono`` cuts in file order. Within each partition
    records keep file order.
    """
    if not 0 < ratio < 1:
        raise ValueError("split ratio must lie in (0, 1)")
    n = len(corpus)
    if n == 0:
        raise ValueError("cannot split an empty corpus")
    k = _cut(n, ratio)
    if mode == "chrono":
        order = np.arange(n)
    elif mode == "seeded":
        order = np.random.default_rng(seed).permutation(n)
    else:
        raise ValueError(f"unknown split mode {mode!r}")
    return corpus.subset(sorted(order[:k])), corpus.subset(sorted(order[k:]))


def confusion(labels: Sequence[Label], predictions: Sequence[Label]) -> Confusion:
    if len(labels) != len(predictions):
        raise LengthMismatch(f"{len(labels)} labels vs {len(predictions)} predictions")
    tp = fp = fn = tn = 0
    for y, p in zip(labels, predictions):
        if p == Label.ANOMALY:
            if y == Label.ANOMALY:
                tp += 1
            else:
                fp += 1
        elif y == Label.ANOMALY:
            fn += 1
        else:
            tn += 1
    return Confusion(tp, fp, fn, tn)


def compute_metrics(c: Confusion) -> Metrics:
    """Precision, recall and their harmonic mean.

    A zero denominator yields 0 for that metric and records a flag. The
    F-measure is evaluated as 2tp / (2tp + fp + fn), which equals 2PR/(P+R)
    and, being a single rounded division, can never leave [min(P,R), max(P,R)].
    """
    flags = set()
    if c.tp + c.fp:
        precision = c.tp / (c.tp + c.fp)
    else:
        precision = 0.0
        flags.add("precision")
    if c.tp + c.fn:
        recall = c.tp / (c.tp + c.fn)
    else:
        recall = 0.0
        flags.add("recall")
    if precision + recall > 0:
        f = 2 * c.tp / (2 * c.tp + c.fp + c.fn)
    else:
        f = 0.0
        flags.add("f_measure")
    return Metrics(precision, recall, f, frozenset(flags))


def evaluate(model: OcsvmModel, test: LabeledCorpus) -> EvalReport:
    if not test.labeled:
        raise UnlabeledCorpus("evaluation needs a labeled corpus")
    values = score_messages(model, [e.tokens for e in test])
    labels = [e.label for e in test]
    preds = [verdict(v) for v in values]
    c = confusion(labels, preds)
    scores = sorted(
        ((e.index, float(v), e.label) for e, v in zip(test, values)),
        key=lambda t: (t[1], t[0]),
    )
    return EvalReport(c, compute_metrics(c), scores)
