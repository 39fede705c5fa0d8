"""
NOAA SWPC "3-Day Forecast" text products, concatenated into one archive file.

Only the ``:Issued:`` header and the ``NOAA Kp index breakdown`` table are
read. The table has one column per day, starting with the issue day itself,
and eight 3-hour rows:

    :Issued: 2015 Mar 16 0030 UTC
    ...
    NOAA Kp index breakdown Mar 16-Mar 18 2015

                 Mar 16       Mar 17       Mar 18
    00-03UT        3            2            3
    ...
    21-24UT        4            3            5 (G1)

The 1-day forecast of a product is the maximum of the column dated the day
after issue. Several products issued on the same day keep the earliest one.
"""

import datetime
import logging
import re
from typing import List, Optional

from ..errors import IngestError, IngestFormatError
from .kp import MAX_MALFORMED_FRACTION
from .records import KP_READINGS_PER_DAY, ParseIssue, ParseResult, SwpcForecastRecord
from .text import read_text

logger = logging.getLogger(__name__)

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")

_ISSUED = re.compile(r"^:Issued:\s+(\d{4})\s+([A-Za-z]{3})\s+(\d{1,2})\s+(\d{2})(\d{2})\s+UTC")
_BREAKDOWN = re.compile(r"NOAA Kp index breakdown", re.IGNORECASE)
_HEADER_DATE = re.compile(r"\b([A-Z][a-z]{2})\s+(\d{1,2})\b")
_ROW = re.compile(r"^\s*\d{2}-\d{2}UT\s+(.*)$")
# numbers that are not part of a "(G1)" style annotation
_VALUE = re.compile(r"(?<![\w.])(\d+(?:\.\d+)?)(?![\w.])")


def _month(abbr: str) -> int:
    try:
        return MONTHS.index(abbr.title()) + 1
    except ValueError:
        raise ValueError(f"unknown month {abbr!r}")


def _column_date(issued: datetime.date, month: int, day: int) -> datetime.date:
    year = issued.year
    if month == 1 and issued.month == 12:
        year += 1
    elif month == 12 and issued.month == 1:
        year -= 1
    return datetime.date(year, month, day)


def _parse_product(issued_match: re.Match, lines: List[str]):
    """(issue datetime, record) for one product. Raises ValueError."""
    year, mon, day, hour, minute = issued_match.groups()
    issued = datetime.datetime(int(year), _month(mon), int(day), int(hour), int(minute))

    start = next((k for k, line in enumerate(lines) if _BREAKDOWN.search(line)), None)
    if start is None:
        raise ValueError("no Kp index breakdown table")
    header_at = next((k for k in range(start + 1, len(lines)) if lines[k].strip()), None)
    if header_at is None:
        raise ValueError("breakdown table has no header")
    dates = [_column_date(issued.date(), _month(m), int(d)) for m, d in _HEADER_DATE.findall(lines[header_at])]
    if len(dates) < 2:
        raise ValueError(f"breakdown header lists {len(dates)} day(s)")

    columns = [[] for _ in dates]
    for line in lines[header_at + 1:]:
        match = _ROW.match(line)
        if not match:
            if any(columns) and line.strip():
                break
            continue
        values = [float(v) for v in _VALUE.findall(match.group(1))]
        if len(values) != len(dates):
            raise ValueError(f"row {line.strip()!r} has {len(values)} values for {len(dates)} days")
        for column, value in zip(columns, values):
            column.append(value)
        if len(columns[0]) == KP_READINGS_PER_DAY:
            break
    if len(columns[0]) != KP_READINGS_PER_DAY:
        raise ValueError(f"breakdown table has {len(columns[0])} rows, expected {KP_READINGS_PER_DAY}")

    target = issued.date() + datetime.timedelta(days=1)
    if target not in dates:
        raise ValueError(f"breakdown table has no column for {target}")
    predicted = max(columns[dates.index(target)])
    return issued, SwpcForecastRecord(issue_date=issued.date(), predicted_max_kp=predicted)


def parse_swpc_text(text: str) -> ParseResult:
    """Parse an archive of forecast products; never raises. Bad products become issues."""
    lines = text.splitlines()
    starts = [(k, _ISSUED.match(line.strip())) for k, line in enumerate(lines)]
    starts = [(k, m) for k, m in starts if m]

    result = ParseResult()
    kept = {}
    for n, (k, match) in enumerate(starts):
        end = starts[n + 1][0] if n + 1 < len(starts) else len(lines)
        result.candidate_lines += 1
        try:
            issued, record = _parse_product(match, lines[k + 1:end])
        except (ValueError, OverflowError, IngestError) as e:
            result.issues.append(ParseIssue(k + 1, lines[k], str(e)))
            continue
        previous = kept.get(record.issue_date)
        if previous is None or issued < previous[0]:
            kept[record.issue_date] = (issued, record)

    result.records = [kept[d][1] for d in sorted(kept)]
    return result


def parse_swpc(path: str, issues: Optional[List[ParseIssue]] = None) -> List[SwpcForecastRecord]:
    """
    Read an SWPC forecast archive.

    Raises:
        IngestError: if the file cannot be read
        IngestFormatError: if more than 10% of the products are malformed
    """
    result = parse_swpc_text(read_text(path))
    if issues is not None:
        issues.extend(result.issues)
    if result.candidate_lines == 0:
        logger.warning(f"SWPC archive {path} has no forecast products")
        return []
    if result.issues:
        logger.warning(f"SWPC archive {path}: {len(result.issues)} of {result.candidate_lines} products rejected")
    if result.malformed_fraction > MAX_MALFORMED_FRACTION:
        raise IngestFormatError(f"{path}: {len(result.issues)} of {result.candidate_lines} products malformed; "
                                f"not an SWPC 3-day forecast archive?")
    return result.records


def _md(d: datetime.date) -> str:
    return f"{MONTHS[d.month - 1]} {d.day:02d}"


def format_swpc_record(r: SwpcForecastRecord, issue_time: str = "0030") -> str:
    """A minimal product whose 1-day forecast column peaks at the record's value."""
    days = [r.issue_date + datetime.timedelta(days=k) for k in range(3)]
    lines = [
        ":Product: 3-Day Forecast",
        f":Issued: {r.issue_date.year} {MONTHS[r.issue_date.month - 1]} {r.issue_date.day:02d} {issue_time} UTC",
        "# Prepared by the U.S. Dept. of Commerce, NOAA, Space Weather Prediction Center",
        "#",
        "A. NOAA Geomagnetic Activity Observation and Forecast",
        "",
        f"NOAA Kp index breakdown {_md(days[0])}-{_md(days[-1])} {days[-1].year}",
        "",
        "             " + "       ".join(_md(d) for d in days),
    ]
    for row in range(KP_READINGS_PER_DAY):
        values = [r.predicted_max_kp if (col == 1 and row == 0) else 0.0 for col in range(3)]
        label = f"{3 * row:02d}-{3 * row + 3:02d}UT"
        lines.append(label + "".join(f"{v:13.2f}" for v in values))
    lines.append("")
    return "\n".join(lines)
