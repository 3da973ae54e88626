"""Anomaly detection for Juniper-style router syslogs with a one-class SVM.

Pipeline: parse and normalize lines, map each message to (S, L, G) =
(token count, out-of-dictionary count, TF-IDF sum), standardize, and score
with a nu-one-class SVM trained by SMO.
"""

__version__ = "0.1.0"

from .errors import JunologError  # noqa: E402
from .evaluation import compute_metrics, confusion, evaluate, split_train_test  # noqa: E402
from .features import extract_features  # noqa: E402
from .ingest import Label, load_corpus, normalize_message, parse_syslog_line  # noqa: E402
from .ocsvm import KernelSpec, OcsvmModel, TrainConfig, decision_value, predict, train  # noqa: E402
from .persistence import load_model, save_model  # noqa: E402
from .pipeline import DetectorConfig, fit_detector  # noqa: E402
from .synth import SynthConfig, generate_corpus  # noqa: E402

__all__ = [
    "DetectorConfig", "JunologError", "KernelSpec", "Label", "OcsvmModel", "SynthConfig",
    "TrainConfig", "compute_metrics", "confusion", "decision_value", "evaluate",
    "extract_features", "fit_detector", "generate_corpus", "load_corpus", "load_model",
    "normalize_message", "parse_syslog_line", "predict", "save_model", "split_train_test", "train",
]
