"""
Model file format.

A UTF-8 text file: ``key=value`` header lines, then a CSV block with one
support vector per line (``alpha_y,f1,...,fd``). Floats are written with
Python's shortest round-trip repr, so loading reproduces the model exactly.

    # storm-forecast gsvm model
    format_version=1
    kernel=rbf
    gamma=...
    bias=...
    c=...
    converged=true
    n_features=5
    n_support=...
    scaler_mins=...;...       (optional)
    scaler_maxs=...;...       (optional)
    meta.<key>=...            (sorted by key)
    alpha_y,f1,f2,f3,f4,f5
    ...
"""

import hashlib
import logging
from typing import Dict, List, Sequence

import numpy as np

from ..errors import LearningError
from ..features.records import LabeledExample
from ..features.scaling import Scaler
from ..features.store import atomic_write_text, dataset_csv_text
from .svm import SvmModel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = "# storm-forecast gsvm model"


def _fmt(value: float) -> str:
    return repr(float(value))


def dataset_fingerprint(examples: Sequence[LabeledExample]) -> str:
    """sha256 of the dataset CSV the examples serialize to."""
    return hashlib.sha256(dataset_csv_text(examples).encode("utf-8")).hexdigest()


def model_to_text(model: SvmModel) -> str:
    lines = [
        MAGIC,
        f"format_version={FORMAT_VERSION}",
        "kernel=rbf",
        f"gamma={_fmt(model.gamma)}",
        f"bias={_fmt(model.bias)}",
        f"c={_fmt(model.c)}",
        f"converged={'true' if model.converged else 'false'}",
        f"n_features={model.n_features}",
        f"n_support={model.n_support}",
    ]
    if model.scaler is not None:
        lines.append("scaler_mins=" + ";".join(_fmt(v) for v in model.scaler.mins))
        lines.append("scaler_maxs=" + ";".join(_fmt(v) for v in model.scaler.maxs))
    for key in sorted(model.train_meta):
        value = str(model.train_meta[key])
        if "\n" in value:
            raise LearningError(f"model metadata '{key}' must be a single line")
        lines.append(f"meta.{key}={value}")

    lines.append(",".join(["alpha_y"] + [f"f{k + 1}" for k in range(model.n_features)]))
    for coef, sv in zip(model.dual_coefs, model.support_vectors):
        lines.append(",".join([_fmt(coef)] + [_fmt(v) for v in sv]))
    return "\n".join(lines) + "\n"


def save_model(model: SvmModel, path: str) -> None:
    atomic_write_text(path, model_to_text(model))
    logger.info(f"Saved model with {model.n_support} support vectors to {path}")


def _parse_floats(text: str, sep: str) -> List[float]:
    return [float(v) for v in text.split(sep)]


def model_from_text(text: str, source: str = "<model>") -> SvmModel:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise LearningError(f"{source}: not a storm-forecast model file")

    header: Dict[str, str] = {}
    row = 1
    while row < len(lines) and not lines[row].startswith("alpha_y"):
        key, sep, value = lines[row].partition("=")
        if not sep:
            raise LearningError(f"{source}: malformed header line {row + 1}: {lines[row]!r}")
        header[key.strip()] = value.strip()
        row += 1
    if row == len(lines):
        raise LearningError(f"{source}: missing support vector block")

    try:
        version = int(header["format_version"])
        if version != FORMAT_VERSION:
            raise LearningError(f"{source}: unsupported model format version {version}")
        n_features = int(header["n_features"])
        n_support = int(header["n_support"])
        rows = [_parse_floats(line, ",") for line in lines[row + 1:] if line.strip()]
        scaler = None
        if "scaler_mins" in header:
            scaler = Scaler(mins=tuple(_parse_floats(header["scaler_mins"], ";")),
                            maxs=tuple(_parse_floats(header["scaler_maxs"], ";")))
        gamma, bias, c = float(header["gamma"]), float(header["bias"]), float(header["c"])
    except (KeyError, ValueError) as e:
        raise LearningError(f"{source}: invalid model file ({e})", e)

    if len(rows) != n_support or any(len(r) != n_features + 1 for r in rows):
        raise LearningError(f"{source}: expected {n_support} support vectors with {n_features} features")
    block = np.array(rows, dtype=np.float64).reshape(n_support, n_features + 1)
    meta = {key[len("meta."):]: value for key, value in header.items() if key.startswith("meta.")}
    return SvmModel(support_vectors=block[:, 1:].copy(), dual_coefs=block[:, 0].copy(), bias=bias,
                    gamma=gamma, c=c, scaler=scaler, train_meta=meta,
                    converged=header.get("converged", "true") == "true")


def load_model(path: str) -> SvmModel:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise LearningError(f"could not read model file {path}: {e}", e)
    model = model_from_text(text, path)
    logger.debug(f"Loaded model from {path}: {model.n_support} support vectors, gamma={model.gamma}")
    return model
