"""Tokenization, n-gram extraction, and per-bin relative usage trends.

Tokens are maximal runs of Unicode letters/digits; every punctuation mark
(apostrophes and hyphens included) separates tokens and is discarded, so
"council's" yields ["council", "s"]. Case is preserved: n-gram identity is
case-sensitive. Sentences split after '.', '!' or '?' followed by
whitespace, and at blank lines; n-gram windows never cross sentences.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import TimeBinnedCorpus, analysis_text
from .errors import ConsistencyError, InputError

# A token key: n surfaces in order, case preserved.
NgramKey = tuple[str, ...]

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)
_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+|\n\s*\n")


@dataclass(frozen=True)
class Token:
    surface: str
    sentence_index: int
    position: int


def sentences_with_tokens(text: str) -> list[tuple[str, list[str]]]:
    """Split text into sentences and their token surfaces.

    Returns (raw sentence, tokens) pairs; chunks that yield no tokens are
    dropped so every returned sentence can host n-gram instances.
    """
    out: list[tuple[str, list[str]]] = []
    for chunk in _BOUNDARY_RE.split(text):
        if not chunk:
            continue
        tokens = _WORD_RE.findall(chunk)
        if tokens:
            out.append((chunk.strip(), tokens))
    return out


def tokenize(text: str) -> list[list[Token]]:
    """Tokenize text into sentences of Tokens (empty text gives an empty list)."""
    return [
        [Token(surface, s, i) for i, surface in enumerate(tokens)]
        for s, (_, tokens) in enumerate(sentences_with_tokens(text))
    ]


def extract_ngrams(sentences: Sequence[Sequence[Token]], n: int) -> list[tuple[NgramKey, int]]:
    """All contiguous n-token windows per sentence, as (key, sentence index)."""
    if n < 1:
        raise InputError("n must be >= 1")
    out: list[tuple[NgramKey, int]] = []
    for s, sentence in enumerate(sentences):
        surfaces = [tok.surface for tok in sentence]
        for i in range(len(surfaces) - n + 1):
            out.append((tuple(surfaces[i : i + n]), s))
    return out


@dataclass
class NgramRecord:
    """One unique n-gram: per-bin instance counts and per-instance contexts."""

    key: NgramKey
    counts: list[int]
    total: int
    contexts: list[tuple[int, str]]  # (bin index, enclosing sentence)


@dataclass
class NgramTable:
    """Table of n-grams over a binned corpus.

    bin_totals counts every n-gram instance per bin, including instances of
    n-grams later dropped by the min_total filter, so relative usage stays a
    proportion of all observed instances.
    """

    n: int
    min_total: int
    bin_totals: list[int]
    records: dict[NgramKey, NgramRecord]

    def sorted_keys(self) -> list[NgramKey]:
        return sorted(self.records)


def render_ngram(key: NgramKey) -> str:
    return " ".join(key)


def parse_ngram(text: str) -> NgramKey:
    return tuple(text.split(" "))


def _scan_document(doc, n: int, include_titles: bool) -> list[tuple[NgramKey, str]]:
    out: list[tuple[NgramKey, str]] = []
    for raw, tokens in sentences_with_tokens(analysis_text(doc, include_titles)):
        for i in range(len(tokens) - n + 1):
            out.append((tuple(tokens[i : i + n]), raw))
    return out


def build_ngram_table(
    corpus: TimeBinnedCorpus,
    n: int = 2,
    min_total: int = 1,
    *,
    include_titles: bool = True,
    threads: int = 1,
) -> NgramTable:
    """Build the n-gram table for a binned corpus.

    Per-document scans may run on a thread pool; partial results are merged
    in document order, so the table is identical for any thread count.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if min_total < 1:
        raise InputError("min_total must be >= 1")

    m = corpus.binning.bin_count
    tasks = list(corpus.iter_documents())

    def scan(task):
        t, doc = task
        return t, _scan_document(doc, n, include_titles)

    scanned: Iterable[tuple[int, list[tuple[NgramKey, str]]]]
    if threads > 1 and len(tasks) > 1:
        pool = ThreadPoolExecutor(max_workers=threads)
        chunk = max(1, len(tasks) // (threads * 8))
        scanned = pool.map(scan, tasks, chunksize=chunk)
    else:
        pool = None
        scanned = (scan(task) for task in tasks)

    bin_totals = [0] * m
    acc: dict[NgramKey, tuple[dict[int, int], list[tuple[int, str]]]] = {}
    try:
        for t, instances in scanned:
            bin_totals[t] += len(instances)
            for key, raw in instances:
                entry = acc.get(key)
                if entry is None:
                    entry = acc[key] = ({}, [])
                by_bin, contexts = entry
                by_bin[t] = by_bin.get(t, 0) + 1
                contexts.append((t, raw))
    finally:
        if pool is not None:
            pool.shutdown()

    records: dict[NgramKey, NgramRecord] = {}
    for key, (by_bin, contexts) in acc.items():
        total = sum(by_bin.values())
        if total < min_total:
            continue
        counts = [0] * m
        for t, c in by_bin.items():
            counts[t] = c
        records[key] = NgramRecord(key=key, counts=counts, total=total, contexts=contexts)
    return NgramTable(n=n, min_total=min_total, bin_totals=bin_totals, records=records)


def relative_usage_trend(record: NgramRecord, bin_totals: Sequence[int]) -> list[float]:
    """Per-bin fraction of all n-gram instances that belong to this n-gram.

    Empty bins (zero total) contribute 0 so the trend stays total and safe
    to differentiate.
    """
    if len(record.counts) != len(bin_totals):
        raise ConsistencyError(
            f"{render_ngram(record.key)!r}: counts length {len(record.counts)} "
            f"!= bin_totals length {len(bin_totals)}"
        )
    values: list[float] = []
    for count, total in zip(record.counts, bin_totals):
        if count > total:
            raise ConsistencyError(
                f"{render_ngram(record.key)!r}: count {count} exceeds bin total {total}"
            )
        values.append(count / total if total else 0.0)
    return values


def contexts_of(record: NgramRecord) -> list[str]:
    """The enclosing sentence of each instance, one entry per instance."""
    return [sentence for _, sentence in record.contexts]
