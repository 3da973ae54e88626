"""Parsing and normalization of Juniper-style syslog files.

A line looks like::

    30-06-2018 07:00:07 AM HCM-Q12-MX5 last message repeated 19 times

i.e. a ``DD-MM-YYYY HH:MM:SS AM|PM`` timestamp, the reporting device, then
free text. Normalization strips everything but letters, lowercases and
splits on whitespace.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from datetime import datetime
from os import PathLike
from typing import Iterable, List, Optional, Tuple, Union

from .errors import LabelIndexOutOfRange, MalformedTimestamp, MissingDevice

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%d-%m-%Y %I:%M:%S %p"

_TIMESTAMP_RE = re.compile(
    r"(?P<ts>\d{2}-\d{2}-\d{4} \d{2}:\d{2}:\d{2} (?:AM|PM))(?=\s|$)"
)
_DEVICE_RE = re.compile(r"\s+(?P<device>\S+)")
_NON_LETTER_RE = re.compile(r"[^A-Za-z]+")

Tokens = List[str]


class Label(str, enum.Enum):
    """Ground-truth label of a log, also used as the detector verdict."""

    NORMAL = "normal"
    ANOMALY = "anomaly"


@dataclass(frozen=True)
class RawLogLine:
    text: str
    line_number: int

    def __post_init__(self):
        if "\n" in self.text or "\r" in self.text:
            raise ValueError("raw log line must not contain line breaks")


@dataclass(frozen=True)
class LogRecord:
    timestamp: datetime
    device_name: str
    message: str
    raw: str


@dataclass(frozen=True)
class CorpusEntry:
    """One parsed line of a corpus. ``index`` is the zero-based file line."""

    index: int
    record: LogRecord
    tokens: Tokens
    label: Optional[Label] = None


@dataclass(frozen=True)
class SkippedLine:
    index: int
    text: str
    reason: str


@dataclass
class LabeledCorpus:
    entries: List[CorpusEntry]
    skipped: List[SkippedLine] = field(default_factory=list)
    n_lines: int = 0

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def labeled(self) -> bool:
        return bool(self.entries) and all(e.label is not None for e in self.entries)

    def subset(self, positions: Iterable[int]) -> "LabeledCorpus":
        """Corpus made of the entries at the given positions (not file indices)."""
        return LabeledCorpus([self.entries[p] for p in positions], [], self.n_lines)


def parse_syslog_line(line: Union[RawLogLine, str]) -> LogRecord:
    """Split a raw line into timestamp, device name and message.

    Raises:
        MalformedTimestamp: the line does not start with a valid
            ``DD-MM-YYYY HH:MM:SS AM|PM`` field.
        MissingDevice: nothing follows the AM/PM marker.
    """
    if isinstance(line, RawLogLine):
        text, line_number = line.text, line.line_number
    else:
        text, line_number = line, None

    m = _TIMESTAMP_RE.match(text)
    if m is None:
        raise MalformedTimestamp(f"no leading timestamp in {text[:40]!r}", line_number)
    try:
        timestamp = datetime.strptime(m.group("ts"), TIMESTAMP_FORMAT)
    except ValueError as exc:
        raise MalformedTimestamp(str(exc), line_number) from exc

    d = _DEVICE_RE.match(text, m.end())
    if d is None:
        raise MissingDevice("no device name after timestamp", line_number)
    message = text[d.end():].strip()
    return LogRecord(timestamp, d.group("device"), message, text)


def normalize_message(message: str) -> Tokens:
    """Reduce a message body to lowercase letter-only tokens.

    Digits and every other non-letter are replaced by a space (not deleted),
    so ``/usr/sbin/sshd`` gives three tokens. Only ASCII letters survive.
    """
    return _NON_LETTER_RE.sub(" ", message).lower().split()


def read_lines(path: Union[str, PathLike]) -> List[str]:
    # newline="" keeps \r inside a line from shifting line numbers; we strip
    # the terminator ourselves.
    with open(path, encoding="utf-8", newline="") as fh:
        return [ln.rstrip("\r\n") for ln in fh]


def read_label_indices(path: Union[str, PathLike]) -> List[int]:
    """Read a labels file: one zero-based line index per line, ``#`` comments."""
    indices = []
    with open(path, encoding="utf-8") as fh:
        for n, ln in enumerate(fh, start=1):
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            try:
                idx = int(ln)
            except ValueError as exc:
                raise ValueError(f"{path}:{n}: not a line index: {ln!r}") from exc
            if idx < 0:
                raise LabelIndexOutOfRange(f"{path}:{n}: negative line index {idx}")
            indices.append(idx)
    return indices


def parse_lines(lines: Iterable[str]) -> Tuple[List[Tuple[int, LogRecord]], List[SkippedLine]]:
    parsed, skipped = [], []
    for idx, text in enumerate(lines):
        try:
            parsed.append((idx, parse_syslog_line(RawLogLine(text, idx + 1))))
        except (MalformedTimestamp, MissingDevice) as exc:
            logger.warning("line %d skipped: %s", idx + 1, exc)
            skipped.append(SkippedLine(idx, text, f"{type(exc).__name__}: {exc}"))
    return parsed, skipped


def load_corpus(log_path, labels_path=None) -> LabeledCorpus:
    """Load and normalize a syslog file, optionally attaching labels.

    With a labels file every listed line index is an anomaly and every other
    parsed line is normal. Without one, labels stay ``None``.
    """
    lines = read_lines(log_path)
    parsed, skipped = parse_lines(lines)

    anomalies = None
    if labels_path is not None:
        anomalies = set(read_label_indices(labels_path))
        bad = [i for i in anomalies if i >= len(lines)]
        if bad:
            raise LabelIndexOutOfRange(
                f"labels reference line index {max(bad)} but {log_path} has {len(lines)} lines"
            )

    entries = []
    for idx, record in parsed:
        label = None
        if anomalies is not None:
            label = Label.ANOMALY if idx in anomalies else Label.NORMAL
        entries.append(CorpusEntry(idx, record, normalize_message(record.message), label))
    return LabeledCorpus(entries, skipped, len(lines))
