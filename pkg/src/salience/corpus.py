"""Load, validate, and time-bin a corpus of time-stamped documents.

The time axis defined here (contiguous, uniform bins covering the full date
span, empty bins retained) is shared by every downstream trend computation.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import ConsistencyError, InputError

GRANULARITIES = ("month", "week", "day")


@dataclass(frozen=True)
class Document:
    id: str
    date: dt.date
    text: str
    title: str | None = None


@dataclass(frozen=True)
class CorpusSchema:
    """Field names and date format for one-record-per-line JSONL corpora."""

    id_field: str = "id"
    date_field: str = "date"
    title_field: str = "title"
    text_field: str = "text"
    date_format: str = "%Y-%m-%d"


def analysis_text(doc: Document, include_title: bool = True) -> str:
    """Text a document contributes to analysis; the title, when present and
    requested, is prepended with a sentence break."""
    if include_title and doc.title and doc.title.strip():
        return doc.title.strip() + "\n\n" + doc.text
    return doc.text


def load_corpus(path: str | Path, schema: CorpusSchema | None = None) -> list[Document]:
    """Read a JSONL corpus file into validated Documents, preserving file order.

    Raises InputError on malformed lines (with line number), duplicate ids,
    unparseable dates, empty text, or a file with no records at all.
    """
    schema = schema or CorpusSchema()
    path = Path(path)
    if not path.is_file():
        raise InputError(f"corpus file not found: {path}")

    docs: list[Document] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: malformed JSON record: {exc}") from exc
            if not isinstance(record, dict):
                raise InputError(f"{path}:{lineno}: record is not a JSON object")
            docs.append(_parse_record(record, schema, path, lineno, seen))

    if not docs:
        raise InputError(f"{path}: corpus is empty (no valid records)")
    return docs


def _parse_record(
    record: dict, schema: CorpusSchema, path: Path, lineno: int, seen: set[str]
) -> Document:
    doc_id = record.get(schema.id_field)
    if not isinstance(doc_id, str) or not doc_id.strip():
        raise InputError(f"{path}:{lineno}: missing or empty '{schema.id_field}'")
    if doc_id in seen:
        raise InputError(f"{path}:{lineno}: duplicate document id {doc_id!r}")

    raw_date = record.get(schema.date_field)
    if not isinstance(raw_date, str):
        raise InputError(f"record {doc_id!r}: missing '{schema.date_field}'")
    try:
        date = dt.datetime.strptime(raw_date, schema.date_format).date()
    except ValueError as exc:
        raise InputError(f"record {doc_id!r}: unparseable date {raw_date!r}: {exc}") from exc

    text = record.get(schema.text_field)
    if not isinstance(text, str) or not text.strip():
        raise InputError(f"record {doc_id!r}: missing or empty '{schema.text_field}'")

    title = record.get(schema.title_field)
    if title is not None and not isinstance(title, str):
        raise InputError(f"record {doc_id!r}: '{schema.title_field}' must be a string")

    seen.add(doc_id)
    return Document(id=doc_id, date=date, text=text, title=title)


def _add_months(day: dt.date, k: int) -> dt.date:
    year, month0 = divmod(day.year * 12 + (day.month - 1) + k, 12)
    return dt.date(year, month0 + 1, 1)


@dataclass(frozen=True)
class TimeBinning:
    """Contiguous, ordered, non-overlapping time bins covering a date span."""

    granularity: str
    origin: dt.date
    bin_count: int

    def __post_init__(self) -> None:
        if self.granularity not in GRANULARITIES:
            raise InputError(f"unknown granularity {self.granularity!r}")
        if self.bin_count < 1:
            raise InputError("bin_count must be >= 1")

    def index_of(self, day: dt.date) -> int:
        """Bin index for a date; raises InputError when the date is out of span."""
        if self.granularity == "month":
            idx = (day.year * 12 + day.month) - (self.origin.year * 12 + self.origin.month)
        elif self.granularity == "week":
            idx = (day - self.origin).days // 7
        else:
            idx = (day - self.origin).days
        if not 0 <= idx < self.bin_count:
            raise InputError(f"date {day.isoformat()} is outside the binning span")
        return idx

    def bin_start(self, index: int) -> dt.date:
        if not 0 <= index < self.bin_count:
            raise InputError(f"bin index {index} out of range [0, {self.bin_count})")
        if self.granularity == "month":
            return _add_months(self.origin, index)
        if self.granularity == "week":
            return self.origin + dt.timedelta(days=7 * index)
        return self.origin + dt.timedelta(days=index)

    def label(self, index: int) -> str:
        start = self.bin_start(index)
        if self.granularity == "month":
            return f"{start.year:04d}-{start.month:02d}"
        return start.isoformat()

    def labels(self) -> list[str]:
        return [self.label(t) for t in range(self.bin_count)]


def build_binning(docs: list[Document], granularity: str = "month") -> TimeBinning:
    """Derive the binning that spans the corpus: from the bin holding the
    earliest date through the bin holding the latest, empty bins included."""
    if not docs:
        raise InputError("cannot build a binning from an empty document list")
    if granularity not in GRANULARITIES:
        raise InputError(f"unknown granularity {granularity!r}")

    lo = min(d.date for d in docs)
    hi = max(d.date for d in docs)
    if granularity == "month":
        origin = dt.date(lo.year, lo.month, 1)
        count = (hi.year * 12 + hi.month) - (lo.year * 12 + lo.month) + 1
    elif granularity == "week":
        origin = lo - dt.timedelta(days=lo.weekday())  # Monday of the first week
        count = (hi - origin).days // 7 + 1
    else:
        origin = lo
        count = (hi - lo).days + 1
    return TimeBinning(granularity=granularity, origin=origin, bin_count=count)


@dataclass(frozen=True)
class TimeBinnedCorpus:
    """Documents partitioned into the binning's ordered bins.

    docs_by_bin keeps one (possibly empty) id list per bin, in input order;
    documents maps ids back to their Document. Immutable once built.
    """

    binning: TimeBinning
    docs_by_bin: tuple[tuple[str, ...], ...]
    documents: dict[str, Document]

    @property
    def doc_count(self) -> int:
        return len(self.documents)

    def iter_documents(self) -> Iterator[tuple[int, Document]]:
        """Yield (bin index, document) in bin order, input order within bins."""
        for t, ids in enumerate(self.docs_by_bin):
            for doc_id in ids:
                yield t, self.documents[doc_id]


def bin_documents(docs: list[Document], binning: TimeBinning) -> TimeBinnedCorpus:
    """Assign each document to exactly one bin, preserving input order per bin."""
    by_bin: list[list[str]] = [[] for _ in range(binning.bin_count)]
    documents: dict[str, Document] = {}
    for doc in docs:
        if doc.id in documents:
            raise ConsistencyError(f"duplicate document id {doc.id!r} during binning")
        try:
            idx = binning.index_of(doc.date)
        except InputError as exc:
            raise InputError(f"document {doc.id!r}: {exc}") from exc
        by_bin[idx].append(doc.id)
        documents[doc.id] = doc
    return TimeBinnedCorpus(
        binning=binning,
        docs_by_bin=tuple(tuple(ids) for ids in by_bin),
        documents=documents,
    )
