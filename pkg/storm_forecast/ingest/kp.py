"""
GFZ Potsdam Kp index files.

Two line layouts are accepted; ``#`` starts a comment.

Numeric layout of the GFZ ``Kp_ap`` distribution, whitespace separated:

    YYYY MM DD days days_m Bsr dB Kp1 .. Kp8 ap1 .. ap8 Ap SN D

``days`` counts days since 1932-01-01, ``days_m`` is the day's midpoint,
``Bsr``/``dB`` are the Bartels rotation and its day, Kp values are decimals
in thirds (4.667, 5.000, 5.333), ``-1`` marks a missing value, ``D`` is the
definitive flag (0 preliminary, 1 Kp definitive, 2 Kp and SN definitive).

Thirds layout, as the index is traditionally published:

    YYYY MM DD 5- 5o 5+ 4o 3+ 3- 2o 2o
"""

import datetime
import logging
import re
from typing import List, Optional

from ..errors import IngestError, IngestFormatError
from .records import KP_READINGS_PER_DAY, KpDay, ParseIssue, ParseResult, snap_kp
from .text import read_text

logger = logging.getLogger(__name__)

MAX_MALFORMED_FRACTION = 0.10

_THIRDS_TOKEN = re.compile(r"^(\d)([-o+])$")
_THIRDS_OFFSET = {"-": -1.0 / 3.0, "o": 0.0, "+": 1.0 / 3.0}
_KP_COLUMNS = slice(7, 15)
_MIN_NUMERIC_COLUMNS = 15

_EPOCH = datetime.date(1932, 1, 1)
_BARTELS_EPOCH = datetime.date(1832, 2, 8)

# Kp (in thirds) -> ap equivalent amplitude
_AP_TABLE = [0, 2, 3, 4, 5, 6, 7, 9, 12, 15, 18, 22, 27, 32, 39, 48, 56, 67, 80, 94,
             111, 132, 154, 179, 207, 236, 300, 400]


def _parse_thirds(token: str) -> float:
    match = _THIRDS_TOKEN.match(token)
    if not match:
        raise ValueError(f"bad Kp token {token!r}")
    value = int(match.group(1)) + _THIRDS_OFFSET[match.group(2)]
    if value < 0 or value > 9:
        raise ValueError(f"Kp token {token!r} outside 0o..9o")
    return snap_kp(value)


def _parse_numeric(token: str) -> float:
    value = float(token)
    if value < 0:
        raise ValueError("missing Kp value (-1)")
    return snap_kp(value)


def parse_kp_line(line: str) -> KpDay:
    """One KpDay from a data line in either layout. Raises ValueError or IngestError."""
    tokens = line.split()
    if len(tokens) < 3 + KP_READINGS_PER_DAY:
        raise ValueError(f"expected at least {3 + KP_READINGS_PER_DAY} columns, got {len(tokens)}")
    day = datetime.date(int(tokens[0]), int(tokens[1]), int(tokens[2]))

    if _THIRDS_TOKEN.match(tokens[3]):
        values = [_parse_thirds(t) for t in tokens[3:3 + KP_READINGS_PER_DAY]]
    else:
        if len(tokens) < _MIN_NUMERIC_COLUMNS:
            raise ValueError(f"numeric layout needs {_MIN_NUMERIC_COLUMNS} columns, got {len(tokens)}")
        values = [_parse_numeric(t) for t in tokens[_KP_COLUMNS]]
    return KpDay(day, tuple(values))


def parse_kp_text(text: str) -> ParseResult:
    """Parse Kp text; never raises. Bad lines become issues."""
    result = ParseResult()
    seen = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        result.candidate_lines += 1
        try:
            day = parse_kp_line(line)
        except (ValueError, OverflowError, IngestError) as e:
            result.issues.append(ParseIssue(number, raw, str(e)))
            continue
        if day.date in seen:
            result.issues.append(ParseIssue(number, raw, f"duplicate date {day.date}"))
            continue
        seen.add(day.date)
        result.records.append(day)
    return result


def parse_kp_file(path: str, issues: Optional[List[ParseIssue]] = None) -> List[KpDay]:
    """
    Read a GFZ Kp file.

    Args:
        path: File to read
        issues: If given, receives the rejected lines

    Returns:
        List[KpDay]: one per well-formed line, in file order

    Raises:
        IngestError: if the file cannot be read
        IngestFormatError: if more than 10% of the data lines are malformed
    """
    result = parse_kp_text(read_text(path))
    if issues is not None:
        issues.extend(result.issues)
    if result.candidate_lines == 0:
        logger.warning(f"Kp file {path} has no data lines")
        return []
    if result.issues:
        logger.warning(f"Kp file {path}: {len(result.issues)} of {result.candidate_lines} lines rejected "
                       f"(first: line {result.issues[0].line_number}, {result.issues[0].reason})")
    if result.malformed_fraction > MAX_MALFORMED_FRACTION:
        raise IngestFormatError(f"{path}: {len(result.issues)} of {result.candidate_lines} lines malformed; "
                                f"not a GFZ Kp file?")
    return result.records


def kp_to_ap(kp: float) -> int:
    return _AP_TABLE[int(round(kp * 3.0))]


def format_kp_day(k: KpDay) -> str:
    """The day as a line of the numeric GFZ layout (SN unknown: -1, D = 0)."""
    days = (k.date - _EPOCH).days
    bartels_days = (k.date - _BARTELS_EPOCH).days
    aps = [kp_to_ap(v) for v in k.values]
    ap_mean = int(round(sum(aps) / len(aps)))
    fields = [f"{k.date.year:4d}", f"{k.date.month:02d}", f"{k.date.day:02d}",
              f"{days:5d}", f"{days + 0.5:7.1f}", f"{bartels_days // 27 + 1:4d}", f"{bartels_days % 27 + 1:2d}"]
    fields += [f"{round(v * 3.0) / 3.0:6.3f}" for v in k.values]
    fields += [f"{a:4d}" for a in aps]
    fields += [f"{ap_mean:4d}", f"{-1:4d}", "0"]
    return " ".join(fields)
