from .records import (
    HMI_CHANNEL,
    KP_MAX,
    KP_READINGS_PER_DAY,
    WORKING_SIZE,
    ImageManifest,
    KpDay,
    ParseIssue,
    ParseResult,
    SilsoRecord,
    SwpcForecastRecord,
    label_day,
    snap_kp,
)
from .kp import format_kp_day, kp_to_ap, parse_kp_file, parse_kp_line, parse_kp_text
from .silso import format_silso_record, parse_silso, parse_silso_line, parse_silso_text
from .swpc import format_swpc_record, parse_swpc, parse_swpc_text
from .images import load_image, resample_area
from .manifest import build_manifest, cache_path
from .fetch import ArchiveImage, SdoArchive, date_range_days, fetch_sdo

__all__ = [
    "HMI_CHANNEL",
    "KP_MAX",
    "KP_READINGS_PER_DAY",
    "WORKING_SIZE",
    "ImageManifest",
    "KpDay",
    "ParseIssue",
    "ParseResult",
    "SilsoRecord",
    "SwpcForecastRecord",
    "label_day",
    "snap_kp",
    "format_kp_day",
    "kp_to_ap",
    "parse_kp_file",
    "parse_kp_line",
    "parse_kp_text",
    "format_silso_record",
    "parse_silso",
    "parse_silso_line",
    "parse_silso_text",
    "format_swpc_record",
    "parse_swpc",
    "parse_swpc_text",
    "load_image",
    "resample_area",
    "build_manifest",
    "cache_path",
    "ArchiveImage",
    "SdoArchive",
    "date_range_days",
    "fetch_sdo",
]
