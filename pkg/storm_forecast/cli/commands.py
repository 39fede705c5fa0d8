"""
Pipeline stages as callable commands.

Every command takes explicit inputs plus the resolved RunConfig, writes its
outputs atomically and returns a result object; printing is left to the
argument parser layer.
"""

import datetime
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import httpx

from ..clustering import DbscanParams
from ..config import RunConfig
from ..errors import EvaluationError, FeatureError, ImagingError, IngestError
from ..evaluation import (
    BaselineComparison,
    CorrelationReport,
    EvaluationReport,
    compare_with_baseline,
    correlate_with_silso,
    evaluate_predictions,
    write_correlation,
    write_reports,
)
from ..features import (
    DailySunspotRecord,
    DatasetStore,
    FeatureStore,
    FeatureVector,
    LabeledExample,
    assemble_examples,
    atomic_write_text,
    extract_features,
    fit_scaler,
    transform,
    transform_examples,
)
from ..imaging import CannyParams
from ..ingest import (
    ImageManifest,
    build_manifest,
    fetch_sdo,
    load_image,
    parse_kp_file,
    parse_silso,
    parse_swpc,
)
from ..learning import (
    ClassBalance,
    GridSearchResult,
    SplitConfig,
    SvmModel,
    classify,
    dataset_fingerprint,
    decision_value,
    grid_search,
    load_model,
    oversample,
    save_model,
    stratified_split,
    train_gsvm,
)
from ..models.storm import StormClass

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
METHOD_NAME = "G-SVM"
BASELINE_NAME = "SWPC"
# extraction results are flushed to the features CSV after every batch
EXTRACT_BATCH = 16


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _dump_json(path: str, payload: Dict[str, Any]) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_fetch(start: datetime.date, end: datetime.date, config: RunConfig,
              transport: Optional[httpx.BaseTransport] = None) -> ImageManifest:
    """Fill the image cache for ``start..end`` and store its manifest next to it."""
    manifest = fetch_sdo((start, end), config.paths.cache_dir,
                         base_url=config.ingest.sdo_base_url, offline=config.offline,
                         window_hours=config.ingest.window_hours, concurrency=config.ingest.concurrency,
                         transport=transport, timeout=config.ingest.timeout)
    manifest.resolution = config.working_size
    manifest.save(os.path.join(config.paths.cache_dir, MANIFEST_FILE))
    return manifest


def resolve_manifest(source: str) -> ImageManifest:
    """A manifest JSON file, or a directory of day images."""
    if os.path.isfile(source):
        return ImageManifest.load(source)
    return build_manifest(source)


def _extract_one(task: Tuple[datetime.date, str, CannyParams, DbscanParams, int, int, Optional[str]]):
    """(day, record or None, failure reason or None); top-level so worker processes can pickle it."""
    day, path, canny_params, db_params, working_size, min_perimeter, debug_dir = task
    try:
        img = load_image(path, working_size)
        record = extract_features(img, canny_params, db_params, day=day, debug_dir=debug_dir,
                                  min_perimeter=min_perimeter)
        return day, record, None
    except (IngestError, ImagingError) as e:
        return day, None, str(e)


@dataclass
class ExtractOutcome:
    records: List[DailySunspotRecord]
    extracted: List[datetime.date] = field(default_factory=list)
    resumed: int = 0
    failed: Dict[datetime.date, str] = field(default_factory=dict)


def cmd_extract(source: str, config: RunConfig, limit: Optional[int] = None) -> ExtractOutcome:
    """
    Extract the sunspot/region counts of every manifest day missing from the
    features CSV. Results are merged into the CSV after each batch, so an
    interrupted run resumes where it stopped.

    Args:
        source: Manifest JSON or image directory
        config: Resolved run configuration
        limit: Stop after this many new days (resumption tests use it)
    """
    manifest = resolve_manifest(source)
    store = FeatureStore(config.paths.features_csv)
    done = store.dates()
    todo = [d for d in manifest.dates() if d not in done]
    if limit is not None:
        todo = todo[:limit]
    logger.info(f"Extracting {len(todo)} days ({len(done)} already in {store.path})")

    tasks = [(d, manifest.entries[d], config.canny, config.dbscan, config.working_size,
              config.extract.min_perimeter, config.paths.debug_dir) for d in todo]
    outcome = ExtractOutcome(records=[], resumed=len(done))
    workers = config.extract.workers
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 and len(tasks) > 1 else None
    try:
        for start in range(0, len(tasks), EXTRACT_BATCH):
            batch = tasks[start:start + EXTRACT_BATCH]
            results = list(pool.map(_extract_one, batch)) if pool else [_extract_one(t) for t in batch]
            new_records = []
            for day, record, reason in results:
                if record is None:
                    outcome.failed[day] = reason
                    logger.warning(f"{day}: extraction failed: {reason}")
                    continue
                new_records.append(record)
                outcome.extracted.append(day)
            if new_records:
                store.merge(new_records)
    finally:
        if pool is not None:
            pool.shutdown()

    outcome.records = store.load()
    if not store.exists():
        store.save([])
    logger.info(f"Extraction done: {len(outcome.extracted)} new, {len(outcome.failed)} failed, "
                f"{len(outcome.records)} days stored")
    return outcome


def cmd_dataset(features_csv: str, kp_path: str, config: RunConfig) -> List[LabeledExample]:
    records = FeatureStore(features_csv).load()
    kp = parse_kp_file(kp_path)
    examples = assemble_examples(records, kp)
    if not examples:
        raise FeatureError(f"no example could be assembled from {len(records)} records and {len(kp)} Kp days")
    DatasetStore(config.paths.dataset_csv).save(examples)
    return examples


@dataclass
class TrainOutcome:
    model: SvmModel
    before: ClassBalance
    after: ClassBalance
    n_train: int
    n_test: int
    grid: Optional[GridSearchResult] = None
    report_path: Optional[str] = None


def split_from_meta(meta: Dict[str, str]) -> SplitConfig:
    try:
        return SplitConfig(test_fraction=float(meta["split_test_fraction"]), seed=int(meta["split_seed"]),
                           scaler_fit=meta.get("scaler_fit", "train"))
    except (KeyError, ValueError) as e:
        raise EvaluationError(f"model file does not record its train/test split ({e})", e)


def cmd_train(dataset_csv: str, config: RunConfig) -> TrainOutcome:
    """
    Split, oversample, scale and train; the model file records the split and
    the dataset fingerprint so ``evaluate`` can rebuild the test set.
    """
    examples = DatasetStore(dataset_csv).load()
    train, test = stratified_split(examples, config.split)
    scaler = fit_scaler(train if config.split.scaler_fit == "train" else examples)

    svm_cfg = config.svm
    grid = None
    if svm_cfg.grid_search:
        grid = grid_search(train, svm_cfg, config.smote, config.stage_seed("grid"))
        svm_cfg = grid.best

    balanced, before, after = oversample(train, config.smote)
    scaled = transform_examples(scaler, balanced)
    meta = {
        "dataset_sha256": dataset_fingerprint(examples),
        "split_seed": str(config.split.seed),
        "split_test_fraction": repr(config.split.test_fraction),
        "scaler_fit": config.split.scaler_fit,
        "smote_k": str(config.smote.k_neighbors),
        "smote_ratio": repr(config.smote.target_ratio),
        "smote_seed": str(config.smote.seed),
        "seed": str(config.seed),
        "n_train": str(len(train)),
        "n_test": str(len(test)),
    }
    model = train_gsvm(scaled, svm_cfg, scaler=scaler, train_meta=meta)
    save_model(model, config.paths.model_path)

    report = {
        "config": config.to_dict(),
        "balance_before_smote": before.to_dict(),
        "balance_after_smote": after.to_dict(),
        "n_train": len(train),
        "n_test": len(test),
        "model": {"gamma": model.gamma, "c": model.c, "bias": model.bias, "n_support": model.n_support,
                  "converged": model.converged,
                  "iterations": model.trace.iterations if model.trace else None},
        "inputs": {"dataset_sha256": meta["dataset_sha256"]},
    }
    if grid is not None:
        report["grid_search"] = [{"c": p.c, "gamma": p.gamma, "gamma_multiplier": p.gamma_multiplier,
                                  "auc": p.auc} for p in grid.points]
    report_path = os.path.join(config.paths.reports_dir, "train.json")
    _dump_json(report_path, report)
    return TrainOutcome(model=model, before=before, after=after, n_train=len(train), n_test=len(test),
                        grid=grid, report_path=report_path)


def _scaled(model: SvmModel, v: FeatureVector) -> FeatureVector:
    return transform(model.scaler, v) if model.scaler is not None else v


def swpc_baseline(swpc_path: str) -> Dict[datetime.date, StormClass]:
    """SWPC call for example date d: the forecast issued on d for d + 1."""
    return {r.issue_date: r.predicted_class() for r in parse_swpc(swpc_path)}


@dataclass
class EvaluateOutcome:
    report: EvaluationReport
    comparison: Optional[BaselineComparison]
    paths: List[str]


def cmd_evaluate(model_path: str, dataset_csv: str, config: RunConfig,
                 swpc_path: Optional[str] = None) -> EvaluateOutcome:
    """
    Score the model on the test dates it was held out from.

    Raises:
        EvaluationError: the dataset is not the one the model was trained on
    """
    model = load_model(model_path)
    examples = DatasetStore(dataset_csv).load()
    fingerprint = dataset_fingerprint(examples)
    expected = model.train_meta.get("dataset_sha256")
    if expected is not None and expected != fingerprint:
        raise EvaluationError(f"{dataset_csv} differs from the dataset the model was trained on")
    _, test = stratified_split(examples, split_from_meta(model.train_meta))

    scores = {e.date: decision_value(model, _scaled(model, e.features)) for e in test}
    truth = {e.date: e.label for e in test}
    provenance = {
        "config": config.to_dict(),
        "model_meta": dict(model.train_meta),
        "inputs": {"dataset_sha256": fingerprint, "model_sha256": file_sha256(model_path)},
    }
    comparison = None
    if swpc_path:
        provenance["inputs"]["swpc_sha256"] = file_sha256(swpc_path)
    report = evaluate_predictions(METHOD_NAME, truth, scores, provenance)
    if swpc_path:
        comparison = compare_with_baseline(report, swpc_baseline(swpc_path), truth, BASELINE_NAME)
    paths = write_reports(config.paths.reports_dir, report, comparison)
    return EvaluateOutcome(report=report, comparison=comparison, paths=paths)


def cmd_correlate(features_csv: str, silso_path: str, config: RunConfig) -> CorrelationReport:
    records = FeatureStore(features_csv).load()
    corr = correlate_with_silso(records, parse_silso(silso_path))
    provenance = {
        "config": config.to_dict(),
        "inputs": {"features_sha256": file_sha256(features_csv), "silso_sha256": file_sha256(silso_path)},
    }
    write_correlation(config.paths.reports_dir, corr, provenance)
    return corr


@dataclass
class Forecast:
    label: StormClass
    decision_value: float
    today: DailySunspotRecord
    yesterday: DailySunspotRecord

    def describe(self) -> str:
        return (f"{self.label.value} (decision value {self.decision_value:+.4f}; "
                f"yesterday {self.yesterday.sunspots} spots / {self.yesterday.regions} regions, "
                f"today {self.today.sunspots} spots / {self.today.regions} regions)")


def cmd_predict(model_path: str, image_today: str, image_yesterday: str, prev_storm: bool,
                config: RunConfig) -> Forecast:
    """Storm forecast for the next 24 hours from today's and yesterday's images."""
    model = load_model(model_path)
    debug_dir = config.paths.debug_dir
    records = []
    for name, path in (("yesterday", image_yesterday), ("today", image_today)):
        img = load_image(path, config.working_size)
        records.append(extract_features(img, config.canny, config.dbscan,
                                        debug_dir=os.path.join(debug_dir, name) if debug_dir else None,
                                        min_perimeter=config.extract.min_perimeter))
    yesterday, today = records
    value = decision_value(model, _scaled(model, FeatureVector.from_records(yesterday, prev_storm, today)))
    forecast = Forecast(label=classify(value), decision_value=value, today=today, yesterday=yesterday)
    logger.info(f"Forecast: {forecast.describe()}")
    return forecast

