"""Command-line entry point: ``junolog {synth,train,detect,evaluate,features}``.

Exit codes: 0 success, 1 user error (bad flags, unreadable or invalid
input), 2 internal error. Diagnostics go to stderr; data goes to files or
stdout.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone
from typing import List, Optional, Sequence

from . import __version__
from .errors import DidNotConverge, JunologError
from .evaluation import EvalReport, evaluate, split_train_test
from .features import build_dictionary, extract_features, fit_idf
from .ingest import Label, LabeledCorpus, load_corpus
from .ocsvm import KERNELS, decision_function, featurize, verdict
from .persistence import config_hash, load_model, save_model
from .pipeline import DetectorConfig, fit_detector
from .synth import SynthConfig, write_corpus

logger = logging.getLogger("junolog")

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2
KERNEL_CHOICES = ("rbf", "linear", "poly", "polynomial", "sigmoid")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; we reserve 2 for internal errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER, f"{self.prog}: error: {message}\n")


def _gamma(text: str):
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a positive number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError("gamma must be positive")
    return value


def _ratio(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("ratio must lie strictly between 0 and 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="junolog", description="One-class SVM anomaly detection for router syslogs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    s.add_argument("--out", required=True, help="log file to write")
    s.add_argument("--labels", required=True, help="labels file to write")
    s.add_argument("--n", type=int, default=2040, help="number of lines (default 2040)")
    s.add_argument("--anomaly-rate", type=float, default=0.02)
    s.add_argument("--seed", type=int, default=42)

    t = sub.add_parser("train", help="fit a detector on the training split")
    t.add_argument("--input", required=True)
    t.add_argument("--labels", required=True)
    _add_model_flags(t)
    t.add_argument("--model", required=True, help="model file to write")

    d = sub.add_parser("detect", help="score every line of a log file")
    d.add_argument("--model", required=True)
    d.add_argument("--input", required=True)
    d.add_argument("--out", required=True, help="CSV report, most anomalous first")

    e = sub.add_parser("evaluate", help="precision/recall/F-measure on a labeled corpus")
    e.add_argument("--model", help="trained model (its split settings are reused)")
    e.add_argument("--input", required=True)
    e.add_argument("--labels", required=True)
    e.add_argument("--on", choices=("test", "train", "all"), default="test")
    e.add_argument("--kernel", choices=("model", "all") + KERNEL_CHOICES, default="model",
                   help="'model' scores the given model; a kernel name or 'all' retrains "
                        "on the same split and compares")
    e.add_argument("--nu", type=float, default=None)
    e.add_argument("--no-scale", action="store_true", default=None)
    e.add_argument("--ratio", type=_ratio, default=None)
    e.add_argument("--split", choices=("seeded", "chrono"), default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--report", help="also write the full report(s) as JSON")

    f = sub.add_parser("features", help="export S, L, G per line as CSV")
    f.add_argument("--input", required=True)
    f.add_argument("--labels")
    f.add_argument("--model", help="use this model's dictionary and IDF table")
    f.add_argument("--out", required=True)
    return p


def _add_model_flags(p):
    p.add_argument("--kernel", choices=KERNEL_CHOICES, default="rbf")
    p.add_argument("--nu", type=float, default=0.02)
    p.add_argument("--gamma", type=_gamma, default=None, metavar="auto|REAL")
    p.add_argument("--coef0", type=float, default=0.0)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--no-scale", action="store_true")
    p.add_argument("--ratio", type=_ratio, default=0.6)
    p.add_argument("--split", choices=("seeded", "chrono"), default="seeded")
    p.add_argument("--seed", type=int, default=42)


# ---------------------------------------------------------------------------


def _file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def creation_timestamp(corpus: LabeledCorpus) -> str:
    """SOURCE_DATE_EPOCH if set, else the newest record timestamp.

    Either way the value depends only on the inputs, so reruns write
    identical model files.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        try:
            return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        except ValueError:
            raise UsageError(f"SOURCE_DATE_EPOCH must be an integer, got {epoch!r}")
    return max(e.record.timestamp for e in corpus).isoformat()


def _detector_config(kernel, nu, gamma, coef0, degree, scale) -> DetectorConfig:
    return DetectorConfig(kernel=kernel, nu=nu, gamma=gamma, coef0=coef0, degree=degree, scale=scale)


def _load_labeled(input_path, labels_path) -> LabeledCorpus:
    corpus = load_corpus(input_path, labels_path)
    if len(corpus) == 0:
        raise UsageError(f"{input_path}: no parseable log lines")
    for s in corpus.skipped:
        logger.warning("%s: line %d skipped (%s)", input_path, s.index + 1, s.reason)
    return corpus


def cmd_synth(args) -> int:
    cfg = SynthConfig(n_messages=args.n, anomaly_rate=args.anomaly_rate, seed=args.seed)
    anomalies = write_corpus(cfg, args.out, args.labels)
    logger.info("wrote %d lines (%d anomalies) to %s", cfg.n_messages, len(anomalies), args.out)
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = _load_labeled(args.input, args.labels)
    train_part, test_part = split_train_test(corpus, args.ratio, args.seed, args.split)
    cfg = _detector_config(args.kernel, args.nu, args.gamma, args.coef0, args.degree,
                           not args.no_scale)
    model = fit_detector(train_part, cfg)
    settings = {
        "kernel": model.kernel.kind,
        "gamma": args.gamma,
        "coef0": args.coef0,
        "degree": args.degree,
        "nu": args.nu,
        "scale": not args.no_scale,
        "ratio": args.ratio,
        "split": args.split,
        "seed": args.seed,
        "tolerance": cfg.tolerance,
    }
    model.provenance = {
        "seed": args.seed,
        "ratio": args.ratio,
        "split": args.split,
        "config_hash": config_hash(settings),
        "config": settings,
        "input_sha256": _file_sha256(args.input),
        "labels_sha256": _file_sha256(args.labels),
        "created": creation_timestamp(train_part),
    }
    save_model(model, args.model)
    logger.info("trained %s on %d logs: %d support vectors, rho=%r", model.kernel.kind,
                len(train_part), len(model.alphas), model.rho)
    return EXIT_OK


def cmd_detect(args) -> int:
    model = load_model(args.model)
    corpus = load_corpus(args.input)
    for s in corpus.skipped:
        logger.warning("%s: line %d skipped (%s)", args.input, s.index + 1, s.reason)
    rows = []
    if len(corpus):
        values = decision_function(model, featurize(model, [e.tokens for e in corpus]))
        rows = sorted(((float(v), e.index, e.record.raw) for e, v in zip(corpus, values)),
                      key=lambda r: (r[0], r[1]))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["line", "decision_value", "verdict", "raw"])
        for value, index, raw in rows:
            w.writerow([index, repr(value), _verdict_word(value), raw])
    n_anom = sum(1 for v, _, _ in rows if verdict(v) == Label.ANOMALY)
    logger.info("%d of %d lines flagged anomalous", n_anom, len(rows))
    return EXIT_OK


def _verdict_word(value: float) -> str:
    return "Anomaly" if verdict(value) == Label.ANOMALY else "Normal"


def _pick_partition(corpus, on, ratio, seed, split):
    if on == "all":
        return corpus, corpus
    train_part, test_part = split_train_test(corpus, ratio, seed, split)
    return train_part, (train_part if on == "train" else test_part)


def format_table(rows: Sequence[tuple]) -> str:
    lines = [f"{'kernel':<12}{'precision':>10}{'recall':>10}{'f_measure':>11}"
             f"{'tp':>6}{'fp':>6}{'fn':>6}{'tn':>7}"]
    for name, rep in rows:
        m, c = rep.metrics, rep.confusion
        lines.append(f"{name:<12}{m.precision:>10.4f}{m.recall:>10.4f}{m.f_measure:>11.4f}"
                     f"{c.tp:>6}{c.fp:>6}{c.fn:>6}{c.tn:>7}")
    return "\n".join(lines)


def cmd_evaluate(args) -> int:
    model = load_model(args.model) if args.model else None
    if model is None and args.kernel == "model":
        raise UsageError("evaluate needs --model, or --kernel NAME|all to train on the fly")
    prov = model.provenance if model is not None else {}
    settings = prov.get("config", {})
    ratio = args.ratio if args.ratio is not None else prov.get("ratio", 0.6)
    seed = args.seed if args.seed is not None else prov.get("seed", 42)
    split = args.split or prov.get("split", "seeded")

    corpus = _load_labeled(args.input, args.labels)
    if model is not None and "input_sha256" in prov and prov["input_sha256"] != _file_sha256(args.input):
        logger.warning("input differs from the file the model was trained on; "
                       "the re-derived split will not match training")
    train_part, target = _pick_partition(corpus, args.on, ratio, seed, split)

    reports: List[tuple] = []
    if args.kernel == "model":
        reports.append((model.kernel.kind, evaluate(model, target)))
    else:
        kinds = KERNELS if args.kernel == "all" else (args.kernel,)
        nu = args.nu if args.nu is not None else (model.nu if model else 0.02)
        scale = (not args.no_scale) if args.no_scale is not None else settings.get("scale", True)
        for kind in kinds:
            cfg = _detector_config(kind, nu, None, 0.0, 3, scale)
            fitted = fit_detector(train_part, cfg)
            reports.append((fitted.kernel.kind, evaluate(fitted, target)))

    print(format_table(reports))
    if args.report:
        doc = {
            "on": args.on,
            "split": {"ratio": ratio, "seed": seed, "mode": split},
            "reports": {name: rep.to_dict() for name, rep in reports},
        }
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=1, allow_nan=False)
            fh.write("\n")
    return EXIT_OK


def cmd_features(args) -> int:
    corpus = load_corpus(args.input, args.labels)
    if args.model:
        model = load_model(args.model)
        dictionary, idf = model.dictionary, model.idf
        if dictionary is None or idf is None:
            raise UsageError(f"{args.model}: model carries no dictionary/IDF table")
    else:
        if len(corpus) == 0:
            raise UsageError(f"{args.input}: no parseable log lines")
        normals = [e.tokens for e in corpus if e.label != Label.ANOMALY]
        dictionary = build_dictionary(normals)
        idf = fit_idf([e.tokens for e in corpus])
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["line", "S", "L", "G", "label"])
        for e in corpus:
            fv = extract_features(e.tokens, dictionary, idf)
            w.writerow([e.index, fv.S, fv.L, repr(float(fv.G)), e.label.value if e.label else ""])
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "features": cmd_features,
}


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except DidNotConverge as exc:
        print(f"junolog: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, JunologError, OSError, ValueError) as exc:
        print(f"junolog: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error: %s", exc)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_command())
