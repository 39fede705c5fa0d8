from .app import build_parser, main, run
from .commands import (
    cmd_correlate,
    cmd_dataset,
    cmd_evaluate,
    cmd_extract,
    cmd_fetch,
    cmd_predict,
    cmd_train,
)
from .synthetic import generate_corpus

__all__ = [
    "build_parser",
    "main",
    "run",
    "cmd_correlate",
    "cmd_dataset",
    "cmd_evaluate",
    "cmd_extract",
    "cmd_fetch",
    "cmd_predict",
    "cmd_train",
    "generate_corpus",
]
