"""Model files: a single JSON document carrying the whole scoring pipeline.

Reals are written with ``repr`` semantics (shortest string that parses back
to the same double), so a load reproduces every number bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any, Dict

import numpy as np

from .errors import CorruptModel, UnsupportedVersion
from .features import Dictionary, FeatureScaler, IdfTable
from .ocsvm import KernelSpec, OcsvmModel

FORMAT_VERSION = 1
SUM_TOLERANCE = 1e-6
BOUND_SLACK = 1e-12


def config_hash(config: Dict[str, Any]) -> str:
    """sha256 of the canonical (sorted, compact) JSON form of ``config``."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _floats(values) -> list:
    return [float(v) for v in np.asarray(values, dtype=np.float64).ravel()]


def model_to_dict(model: OcsvmModel) -> Dict[str, Any]:
    k = model.kernel
    doc: Dict[str, Any] = {"format_version": FORMAT_VERSION}
    doc["kernel"] = {"kind": k.kind, "gamma": k.gamma, "coef0": k.coef0, "degree": k.degree}
    doc["nu"] = float(model.nu)
    doc["training_size"] = int(model.training_size)
    doc["rho"] = float(model.rho)
    doc["support_vectors"] = [_floats(row) for row in np.atleast_2d(model.support_vectors)]
    doc["alphas"] = _floats(model.alphas)
    if model.scaler is not None:
        s = model.scaler
        doc["scaler"] = {"enabled": bool(s.enabled), "mean": _floats(s.mean), "std": _floats(s.std)}
    if model.dictionary is not None:
        doc["dictionary"] = {"min_df": model.dictionary.min_df, "words": list(model.dictionary.words)}
    if model.idf is not None:
        t = model.idf
        doc["idf"] = {
            "N": int(t.N),
            "df_floor": int(t.df_floor),
            "log_base": None if t.log_base is None else float(t.log_base),
            "df": {w: int(c) for w, c in sorted(t.df.items())},
        }
    doc["diagnostics"] = {k: v for k, v in sorted(model.diagnostics.items())
                          if isinstance(v, (int, float, str))}
    doc["provenance"] = dict(model.provenance)
    return doc


def dumps_model(model: OcsvmModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, allow_nan=False) + "\n"


def save_model(model: OcsvmModel, path) -> None:
    """Write ``model`` to ``path``. OSError propagates for unwritable paths."""
    text = dumps_model(model)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _require(cond: bool, msg: str):
    if not cond:
        raise CorruptModel(msg)


def model_from_dict(doc: Dict[str, Any]) -> OcsvmModel:
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise CorruptModel("not a model document (no format_version)")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"model format_version {version!r} is not supported "
                                 f"(expected {FORMAT_VERSION})")
    try:
        kd = doc["kernel"]
        kernel = KernelSpec(kd["kind"], gamma=kd["gamma"], coef0=kd["coef0"], degree=kd["degree"])
        nu = float(doc["nu"])
        l = int(doc["training_size"])
        rho = float(doc["rho"])
        sv = np.array(doc["support_vectors"], dtype=np.float64)
        alphas = np.array(doc["alphas"], dtype=np.float64)
        scaler = dictionary = idf = None
        if "scaler" in doc:
            s = doc["scaler"]
            scaler = FeatureScaler(tuple(s["mean"]), tuple(s["std"]), bool(s["enabled"]))
        if "dictionary" in doc:
            dictionary = Dictionary(tuple(doc["dictionary"]["words"]), int(doc["dictionary"]["min_df"]))
        if "idf" in doc:
            t = doc["idf"]
            idf = IdfTable(dict(t["df"]), int(t["N"]), int(t["df_floor"]), t["log_base"])
    except CorruptModel:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed model document: {exc}") from exc

    _require(0 < nu <= 1, f"nu {nu} outside (0, 1]")
    _require(l >= 1, "training_size must be positive")
    _require(math.isfinite(rho), "rho is not finite")
    _require(alphas.ndim == 1 and len(alphas) >= 1, "model has no support vectors")
    _require(sv.ndim == 2 and sv.shape == (len(alphas), 3),
             "support_vectors must be one 3-vector per alpha")
    _require(bool(np.all(np.isfinite(sv))), "support vectors are not finite")
    upper = 1.0 / (nu * l)
    _require(bool(np.all(alphas > 0)), "alphas must be positive")
    _require(bool(np.all(alphas <= upper + BOUND_SLACK)), "alpha above the box bound 1/(nu*l)")
    total = math.fsum(alphas)
    _require(abs(total - 1.0) <= SUM_TOLERANCE, f"alphas sum to {total!r}, expected 1")
    if scaler is not None:
        _require(len(scaler.mean) == 3 and len(scaler.std) == 3, "scaler must have 3 components")
        _require(all(s > 0 for s in scaler.std), "scaler std must be positive")

    return OcsvmModel(
        kernel=kernel,
        support_vectors=sv,
        alphas=alphas,
        rho=rho,
        nu=nu,
        training_size=l,
        scaler=scaler,
        dictionary=dictionary,
        idf=idf,
        diagnostics=dict(doc.get("diagnostics", {})),
        provenance=dict(doc.get("provenance", {})),
    )


def loads_model(text: str) -> OcsvmModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(doc)


def load_model(path) -> OcsvmModel:
    """Read and validate a model file. OSError propagates for missing files."""
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
