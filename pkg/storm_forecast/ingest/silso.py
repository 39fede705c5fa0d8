"""
SILSO daily total sunspot number (``SN_d_tot_V2.0.csv``), semicolon separated:

    year;month;day;decimal-year;number;std;observations;definitive

A negative number (``-1``) marks a day without data. The last column is 1
for definitive values and 0 for provisional ones.
"""

import calendar
import datetime
import logging
import math
from typing import List, Optional

from ..errors import IngestError, IngestFormatError
from .kp import MAX_MALFORMED_FRACTION
from .records import ParseIssue, ParseResult, SilsoRecord
from .text import read_text

logger = logging.getLogger(__name__)

SILSO_COLUMNS = 8


def parse_silso_line(line: str) -> SilsoRecord:
    tokens = [t.strip() for t in line.split(";")]
    if len(tokens) != SILSO_COLUMNS:
        raise ValueError(f"expected {SILSO_COLUMNS} ';'-separated columns, got {len(tokens)}")
    day = datetime.date(int(tokens[0]), int(tokens[1]), int(tokens[2]))
    number = float(tokens[4])
    if not math.isfinite(number):
        raise ValueError(f"sunspot number must be finite, got {tokens[4]!r}")
    flag = tokens[7]
    if flag not in ("0", "1"):
        raise ValueError(f"definitive flag must be 0 or 1, got {flag!r}")
    return SilsoRecord(date=day, sesc_number=number if number >= 0 else None, provisional=flag == "0")


def parse_silso_text(text: str) -> ParseResult:
    """Parse SILSO text; never raises. Bad lines become issues."""
    result = ParseResult()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        result.candidate_lines += 1
        try:
            result.records.append(parse_silso_line(line))
        except (ValueError, OverflowError, IngestError) as e:
            result.issues.append(ParseIssue(number, raw, str(e)))
    return result


def parse_silso(path: str, issues: Optional[List[ParseIssue]] = None) -> List[SilsoRecord]:
    """
    Read a SILSO daily file. Missing days are kept as records with
    ``sesc_number=None``.

    Raises:
        IngestError: if the file cannot be read
        IngestFormatError: if more than 10% of the data lines are malformed
    """
    result = parse_silso_text(read_text(path))
    if issues is not None:
        issues.extend(result.issues)
    if result.candidate_lines == 0:
        logger.warning(f"SILSO file {path} has no data lines")
        return []
    if result.issues:
        logger.warning(f"SILSO file {path}: {len(result.issues)} of {result.candidate_lines} lines rejected")
    if result.malformed_fraction > MAX_MALFORMED_FRACTION:
        raise IngestFormatError(f"{path}: {len(result.issues)} of {result.candidate_lines} lines malformed; "
                                f"not a SILSO daily file?")
    missing = sum(1 for r in result.records if r.is_missing)
    logger.info(f"Read {len(result.records)} SILSO days from {path} ({missing} missing)")
    return result.records


def format_silso_record(r: SilsoRecord) -> str:
    """The record as a SILSO line; std and observation count are unknown (-1.0, 0)."""
    year_days = 366 if calendar.isleap(r.date.year) else 365
    fraction = r.date.year + (r.date.timetuple().tm_yday - 0.5) / year_days
    number = -1 if r.sesc_number is None else r.sesc_number
    number_text = f"{int(number):4d}" if float(number).is_integer() else f"{number:6.1f}"
    return (f"{r.date.year:4d};{r.date.month:02d};{r.date.day:02d};{fraction:8.3f};{number_text};"
            f"{-1.0:5.1f};{0:4d};{0 if r.provisional else 1}")
