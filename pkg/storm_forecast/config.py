import os
import json
import hashlib
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from .clustering import DbscanParams
from .errors import ConfigError, PipelineError
from .imaging import CannyParams
from .ingest.fetch import DEFAULT_BASE_URL, DEFAULT_CONCURRENCY, DEFAULT_TIMEOUT, DEFAULT_WINDOW_HOURS
from .ingest.records import WORKING_SIZE
from .learning import SmoteConfig, SplitConfig, SvmConfig

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.json"
ENV_PREFIX = "STORM_"
STAGES = ("split", "smote", "svm", "grid")

# environment variable (without prefix) -> (section or None, key, type)
ENV_VARS = {
    "SEED": (None, "seed", int),
    "OFFLINE": (None, "offline", "bool"),
    "CACHE_DIR": ("paths", "cache_dir", str),
    "SDO_BASE_URL": ("ingest", "sdo_base_url", str),
    "REPORTS_DIR": ("paths", "reports_dir", str),
    "MODEL_PATH": ("paths", "model_path", str),
    "EXTRACT_WORKERS": ("extract", "workers", int),
}


def parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def stage_seed(seed: int, stage: str) -> int:
    """First 8 bytes of sha256("{seed}:{stage}") as an unsigned integer."""
    digest = hashlib.sha256(f"{seed}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class PathsConfig:
    cache_dir: str = os.path.join("cache", "images")
    features_csv: str = os.path.join("data", "features.csv")
    dataset_csv: str = os.path.join("data", "dataset.csv")
    model_path: str = os.path.join("models", "gsvm.model")
    reports_dir: str = "reports"
    debug_dir: Optional[str] = None


@dataclass
class IngestConfig:
    sdo_base_url: str = DEFAULT_BASE_URL
    window_hours: float = DEFAULT_WINDOW_HOURS
    concurrency: int = DEFAULT_CONCURRENCY
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if not self.window_hours > 0:
            raise ConfigError(f"ingest.window_hours must be > 0, got {self.window_hours}")
        if self.concurrency < 1:
            raise ConfigError(f"ingest.concurrency must be >= 1, got {self.concurrency}")


@dataclass
class ExtractConfig:
    workers: int = 1
    min_perimeter: int = 4

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError(f"extract.workers must be >= 1, got {self.workers}")
        if self.min_perimeter < 0:
            raise ConfigError(f"extract.min_perimeter must be >= 0, got {self.min_perimeter}")


# section name -> dataclass it is built into
SECTIONS = {
    "paths": PathsConfig,
    "canny": CannyParams,
    "dbscan": DbscanParams,
    "split": SplitConfig,
    "smote": SmoteConfig,
    "svm": SvmConfig,
    "ingest": IngestConfig,
    "extract": ExtractConfig,
}
TOP_LEVEL = {"seed": int, "offline": "bool", "working_size": int}


def _coerce(value: Any, kind) -> Any:
    if kind == "bool":
        return parse_bool(value)
    try:
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"cannot convert {value!r} to {kind.__name__}", e)


@dataclass
class RunConfig:
    """Fully resolved settings of one pipeline run.

    Stage seeds are derived from the single ``seed``; the ``seed`` fields of
    the split and SMOTE sections are overwritten by ``load``.
    """
    paths: PathsConfig = field(default_factory=PathsConfig)
    canny: CannyParams = field(default_factory=CannyParams)
    dbscan: DbscanParams = field(default_factory=DbscanParams)
    split: SplitConfig = field(default_factory=SplitConfig)
    smote: SmoteConfig = field(default_factory=SmoteConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    ingest: IngestConfig = field(default_factory=IngestConfig)
    extract: ExtractConfig = field(default_factory=ExtractConfig)
    seed: int = 0
    offline: bool = False
    working_size: int = WORKING_SIZE

    def stage_seed(self, stage: str) -> int:
        if stage not in STAGES:
            raise ConfigError(f"unknown stage {stage!r}; expected one of {STAGES}")
        return stage_seed(self.seed, stage)

    def with_stage_seeds(self) -> "RunConfig":
        return replace(self,
                       split=replace(self.split, seed=self.stage_seed("split")),
                       smote=replace(self.smote, seed=self.stage_seed("smote")))

    def to_dict(self) -> Dict[str, Any]:
        data = {"seed": self.seed, "offline": self.offline, "working_size": self.working_size}
        for name in SECTIONS:
            section = getattr(self, name)
            data[name] = section.to_dict() if hasattr(section, "to_dict") else asdict(section)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build from a sectioned mapping. Raises ConfigError on unknown keys or invalid values."""
        kwargs: Dict[str, Any] = {}
        for name, value in data.items():
            if name in TOP_LEVEL:
                kwargs[name] = _coerce(value, TOP_LEVEL[name])
            elif name in SECTIONS:
                if not isinstance(value, dict):
                    raise ConfigError(f"section '{name}' must be a mapping, got {type(value).__name__}")
                try:
                    kwargs[name] = SECTIONS[name](**value)
                except TypeError as e:
                    raise ConfigError(f"section '{name}': {e}", e)
                except ConfigError:
                    raise
                except PipelineError as e:
                    raise ConfigError(f"section '{name}': {e.message}", e)
            else:
                logger.warning(f"Ignoring unknown configuration key '{name}'")
        if kwargs.get("working_size", WORKING_SIZE) < 64:
            raise ConfigError(f"working_size must be >= 64, got {kwargs['working_size']}")
        return cls(**kwargs)

    @classmethod
    def load(cls, path: Optional[str] = CONFIG_FILE,
             overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Resolve the configuration: JSON file, then ``STORM_*`` environment
        variables (after reading ``.env``), then ``overrides`` (command-line flags).

        Args:
            path: JSON file; a missing file means defaults
            overrides: ``{"seed": 3, "paths": {"cache_dir": ...}}``; None values are ignored

        Raises:
            ConfigError: undecodable JSON or invalid values
        """
        data: Dict[str, Any] = {}
        if path:
            try:
                with open(path, "r") as f:
                    data = json.load(f)
                logger.info(f"Configuration loaded from {path}")
            except FileNotFoundError:
                logger.warning(f"Configuration file '{path}' not found. Using defaults.")
            except json.JSONDecodeError as e:
                raise ConfigError(f"could not decode JSON from '{path}': {e}", e)
            if not isinstance(data, dict):
                raise ConfigError(f"'{path}' must hold a JSON object")

        load_dotenv()
        for env_name, (section, key, kind) in ENV_VARS.items():
            env_value = os.getenv(f"{ENV_PREFIX}{env_name}")
            if env_value is None:
                continue
            target = data if section is None else data.setdefault(section, {})
            target[key] = _coerce(env_value, kind)
            logger.info(f"Using {ENV_PREFIX}{env_name} from environment: {env_value}")

        for name, value in (overrides or {}).items():
            if isinstance(value, dict):
                section = data.setdefault(name, {})
                section.update({k: v for k, v in value.items() if v is not None})
            elif value is not None:
                data[name] = value

        return cls.from_dict(data).with_stage_seeds()
