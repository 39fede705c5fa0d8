import argparse
import datetime
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from ..config import CONFIG_FILE, RunConfig
from ..errors import PipelineError
from ..evaluation import render_table
from . import commands
from .synthetic import generate_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

# argparse destination -> (config section or None, key)
OVERRIDE_FLAGS = {
    "seed": (None, "seed"),
    "offline": (None, "offline"),
    "working_size": (None, "working_size"),
    "debug_dir": ("paths", "debug_dir"),
    "cache_dir": ("paths", "cache_dir"),
    "features": ("paths", "features_csv"),
    "dataset": ("paths", "dataset_csv"),
    "model": ("paths", "model_path"),
    "reports_dir": ("paths", "reports_dir"),
    "workers": ("extract", "workers"),
    "c": ("svm", "c"),
    "gamma": ("svm", "gamma"),
    "grid_search": ("svm", "grid_search"),
}


def setup_logging(verbose: bool = False) -> None:
    logging.basicConfig(format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                        level=logging.DEBUG if verbose else logging.INFO, force=True)
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("PIL").setLevel(logging.WARNING)


def iso_date(text: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a YYYY-MM-DD date: {text!r}")


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    """Config overrides for the flags that were given on the command line."""
    overrides: Dict[str, Any] = {}
    for dest, (section, key) in OVERRIDE_FLAGS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if section is None:
            overrides[key] = value
        else:
            overrides.setdefault(section, {})[key] = value
    return overrides


def run_fetch(args, config: RunConfig) -> int:
    if args.end < args.start:
        raise argparse.ArgumentTypeError(f"--end {args.end} is before --start {args.start}")
    manifest = commands.cmd_fetch(args.start, args.end, config)
    print(f"{len(manifest)} days cached in {config.paths.cache_dir}, {len(manifest.gaps)} gaps")
    for day in manifest.gaps:
        print(f"  gap: {day}")
    return EXIT_OK


def run_extract(args, config: RunConfig) -> int:
    source = args.images
    if source is None:
        cached = os.path.join(config.paths.cache_dir, commands.MANIFEST_FILE)
        source = cached if os.path.isfile(cached) else config.paths.cache_dir
    outcome = commands.cmd_extract(source, config)
    print(f"{len(outcome.extracted)} days extracted, {outcome.resumed} already present, "
          f"{len(outcome.failed)} failed; {len(outcome.records)} days in {config.paths.features_csv}")
    return EXIT_OK


def run_dataset(args, config: RunConfig) -> int:
    examples = commands.cmd_dataset(config.paths.features_csv, args.kp, config)
    storm = sum(1 for e in examples if e.label.is_storm)
    print(f"{len(examples)} examples ({storm} storm, {len(examples) - storm} no_storm) "
          f"written to {config.paths.dataset_csv}")
    return EXIT_OK


def run_train(args, config: RunConfig) -> int:
    outcome = commands.cmd_train(config.paths.dataset_csv, config)
    print(f"Training split: {outcome.n_train} train, {outcome.n_test} test")
    print(f"Before SMOTE: {outcome.before.describe()}")
    print(f"After SMOTE:  {outcome.after.describe()}")
    model = outcome.model
    print(f"Model: C={model.c}, gamma={model.gamma:.6g}, {model.n_support} support vectors"
          f"{'' if model.converged else ' (NOT converged)'} -> {config.paths.model_path}")
    return EXIT_OK


def run_evaluate(args, config: RunConfig) -> int:
    outcome = commands.cmd_evaluate(config.paths.model_path, config.paths.dataset_csv, config,
                                    swpc_path=args.swpc)
    print(render_table(outcome.report, outcome.comparison), end="")
    print(f"Reports: {', '.join(outcome.paths)}")
    return EXIT_OK


def run_correlate(args, config: RunConfig) -> int:
    corr = commands.cmd_correlate(config.paths.features_csv, args.silso, config)
    print(f"PCC={corr.pcc:.4f}  mean signed difference={corr.mean_diff:.2f}  matched days={corr.n_matched}")
    return EXIT_OK


def run_predict(args, config: RunConfig) -> int:
    forecast = commands.cmd_predict(config.paths.model_path, args.today, args.yesterday,
                                    bool(args.prev_storm), config)
    print(forecast.label.value)
    print(forecast.describe())
    return EXIT_OK


def run_synth(args, config: RunConfig) -> int:
    corpus = generate_corpus(args.out, days=args.days, size=config.working_size, seed=config.seed,
                             start=args.start, with_silso=not args.no_silso)
    print(f"Images: {corpus.image_dir}")
    print(f"Kp: {corpus.kp_path}")
    if corpus.silso_path:
        print(f"SILSO: {corpus.silso_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storm-forecast",
                                     description="Next-day geomagnetic storm forecasts from SDO solar images.")
    parser.add_argument("--config", default=CONFIG_FILE, help=f"JSON configuration file (default: {CONFIG_FILE})")
    parser.add_argument("--seed", type=int, default=None, help="Global seed; stage seeds derive from it")
    parser.add_argument("--offline", action="store_true", default=None, help="Never touch the network")
    parser.add_argument("--working-size", type=int, default=None, help="Working image resolution in pixels")
    parser.add_argument("--debug-dir", default=None, help="Dump per-stage intermediate images here")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    fetch = sub.add_parser("fetch", help="Download daily HMI intensitygrams into the cache")
    fetch.add_argument("--start", type=iso_date, required=True, help="First day (YYYY-MM-DD)")
    fetch.add_argument("--end", type=iso_date, required=True, help="Last day, inclusive (YYYY-MM-DD)")
    fetch.add_argument("--cache-dir", default=None, help="Image cache root")
    fetch.set_defaults(handler=run_fetch)

    extract = sub.add_parser("extract", help="Count sunspots and regions per day (resumable)")
    extract.add_argument("--images", default=None, help="Image directory or manifest JSON (default: the cache)")
    extract.add_argument("--cache-dir", default=None, help="Image cache root")
    extract.add_argument("--features", default=None, help="Features CSV to create or extend")
    extract.add_argument("--workers", type=int, default=None, help="Worker processes")
    extract.set_defaults(handler=run_extract)

    dataset = sub.add_parser("dataset", help="Assemble labeled examples from features and Kp")
    dataset.add_argument("--kp", required=True, help="GFZ Kp file")
    dataset.add_argument("--features", default=None, help="Features CSV")
    dataset.add_argument("--dataset", default=None, help="Dataset CSV to write")
    dataset.set_defaults(handler=run_dataset)

    train = sub.add_parser("train", help="Split, oversample, scale and train the G-SVM")
    train.add_argument("--dataset", default=None, help="Dataset CSV")
    train.add_argument("--model", default=None, help="Model file to write")
    train.add_argument("--reports-dir", default=None, help="Where train.json goes")
    train.add_argument("--c", type=float, default=None, help="Soft-margin C")
    train.add_argument("--gamma", default=None, help="RBF gamma or 'auto'")
    train.add_argument("--grid-search", action="store_true", default=None, help="Pick C and gamma by validation AUC")
    train.set_defaults(handler=run_train)

    evaluate = sub.add_parser("evaluate", help="ROC, AUC and the metrics grid on the held-out dates")
    evaluate.add_argument("--model", default=None, help="Model file")
    evaluate.add_argument("--dataset", default=None, help="Dataset CSV the model was trained from")
    evaluate.add_argument("--swpc", default=None, help="SWPC forecast archive for the baseline rows")
    evaluate.add_argument("--reports-dir", default=None, help="Report directory")
    evaluate.set_defaults(handler=run_evaluate)

    correlate = sub.add_parser("correlate", help="Pearson correlation of 10R+S with SILSO")
    correlate.add_argument("--silso", required=True, help="SILSO daily sunspot file")
    correlate.add_argument("--features", default=None, help="Features CSV")
    correlate.add_argument("--reports-dir", default=None, help="Report directory")
    correlate.set_defaults(handler=run_correlate)

    predict = sub.add_parser("predict", help="Forecast the next 24 hours from two images")
    predict.add_argument("--model", default=None, help="Model file")
    predict.add_argument("--today", required=True, help="Today's solar image")
    predict.add_argument("--yesterday", required=True, help="Yesterday's solar image")
    predict.add_argument("--prev-storm", action="store_true", help="Yesterday was a storm day")
    predict.set_defaults(handler=run_predict)

    synth = sub.add_parser("synth", help="Write the synthetic desk-scale corpus")
    synth.add_argument("--out", required=True, help="Output directory")
    synth.add_argument("--days", type=int, default=60, help="Number of day images (default: 60)")
    synth.add_argument("--start", type=iso_date, default=datetime.date(2015, 1, 1), help="First day")
    synth.add_argument("--no-silso", action="store_true", help="Skip the SILSO file")
    synth.set_defaults(handler=run_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(args.verbose)
    try:
        config = RunConfig.load(args.config, overrides_from(args))
        return args.handler(args, config)
    except argparse.ArgumentTypeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Internal error in '{args.command}'")
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
