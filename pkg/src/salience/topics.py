"""Predefined topic frameworks, TF-IDF vector space, and cosine similarity.

Each topic contributes one expanded document (definition + keywords + ground
truth + lexicon synonyms). The TF-IDF space is built over those topic
documents only, so idf discounts vocabulary common across topics. Vector
terms are lowercased unigrams even though n-gram identity preserves case.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ConsistencyError, InputError
from .ngrams import NgramKey, sentences_with_tokens


@dataclass(frozen=True)
class Topic:
    id: str
    definition: str = ""
    keywords: tuple[str, ...] = ()
    ground_truth: tuple[str, ...] = ()
    row: str | None = None
    column: str | None = None


@dataclass(frozen=True)
class TopicFramework:
    """An ordered set of topics, optionally arranged as a labeled grid."""

    name: str
    topics: tuple[Topic, ...]
    rows: tuple[str, ...] | None = None
    columns: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.topics:
            raise InputError(f"framework {self.name!r} declares no topics")
        seen: set[str] = set()
        for topic in self.topics:
            if not topic.id:
                raise InputError(f"framework {self.name!r}: topic with empty id")
            if topic.id in seen:
                raise InputError(f"framework {self.name!r}: duplicate topic id {topic.id!r}")
            seen.add(topic.id)
            if not (topic.definition.strip() or topic.keywords or topic.ground_truth):
                raise InputError(
                    f"topic {topic.id!r} has no definition, keywords, or ground truth"
                )
        if (self.rows is None) != (self.columns is None):
            raise InputError(
                f"framework {self.name!r}: declare both rows and columns, or neither"
            )
        if self.rows is not None and self.columns is not None:
            cells: set[tuple[str, str]] = set()
            for topic in self.topics:
                if topic.row not in self.rows or topic.column not in self.columns:
                    raise InputError(
                        f"topic {topic.id!r} has row/column outside the declared grid"
                    )
                cell = (topic.row, topic.column)
                if cell in cells:
                    raise InputError(f"grid cell {cell} assigned to more than one topic")
                cells.add(cell)
            if len(self.topics) != len(self.rows) * len(self.columns):
                raise InputError(
                    f"framework {self.name!r}: incomplete grid "
                    f"({len(self.topics)} topics for a "
                    f"{len(self.rows)}x{len(self.columns)} layout)"
                )

    @property
    def has_grid(self) -> bool:
        return self.rows is not None and self.columns is not None

    def topic_ids(self) -> list[str]:
        return [t.id for t in self.topics]

    def grid_values(self, per_topic: Mapping[str, float]) -> list[list[float]]:
        """Arrange per-topic values row-major over the declared grid."""
        if not self.has_grid:
            raise InputError(
                f"framework {self.name!r} declares no grid; render values as a list instead"
            )
        by_cell = {(t.row, t.column): per_topic[t.id] for t in self.topics}
        assert self.rows is not None and self.columns is not None
        return [[by_cell[(r, c)] for c in self.columns] for r in self.rows]


def framework_from_dict(data: dict) -> TopicFramework:
    if not isinstance(data, dict):
        raise InputError("framework file must hold a JSON object")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise InputError("framework needs a non-empty 'name'")
    raw_topics = data.get("topics")
    if not isinstance(raw_topics, list):
        raise InputError(f"framework {name!r}: 'topics' must be a list")

    topics = []
    for i, raw in enumerate(raw_topics):
        if not isinstance(raw, dict):
            raise InputError(f"framework {name!r}: topic #{i} is not an object")
        topics.append(
            Topic(
                id=_as_str(raw.get("id"), f"topic #{i} id"),
                definition=str(raw.get("definition") or ""),
                keywords=tuple(_as_str_list(raw.get("keywords"), "keywords")),
                ground_truth=tuple(_as_str_list(raw.get("ground_truth"), "ground_truth")),
                row=raw.get("row"),
                column=raw.get("column"),
            )
        )
    rows = data.get("rows")
    columns = data.get("columns")
    return TopicFramework(
        name=name,
        topics=tuple(topics),
        rows=tuple(_as_str_list(rows, "rows")) if rows is not None else None,
        columns=tuple(_as_str_list(columns, "columns")) if columns is not None else None,
    )


def _as_str(value, what: str) -> str:
    if not isinstance(value, str) or not value:
        raise InputError(f"framework: {what} must be a non-empty string")
    return value


def _as_str_list(value, what: str) -> list[str]:
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise InputError(f"framework: {what} must be a list of strings")
    return value


def load_framework(path: str | Path) -> TopicFramework:
    """Load and validate a topic framework from its JSON file."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"framework file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    return framework_from_dict(data)


def load_pmesii_ascope() -> TopicFramework:
    """The bundled 6x6 PMESII-ASCOPE example framework."""
    text = resources.files("salience").joinpath("data/pmesii_ascope.json").read_text("utf-8")
    return framework_from_dict(json.loads(text))


def load_lexicon(path: str | Path) -> dict[str, list[str]]:
    """Load a synonym lexicon: lowercased term -> list of synonyms."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"lexicon file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: lexicon must be a JSON object")
    out: dict[str, list[str]] = {}
    for term, synonyms in data.items():
        if not isinstance(synonyms, list) or not all(isinstance(s, str) for s in synonyms):
            raise InputError(f"{path}: synonyms of {term!r} must be a list of strings")
        key = term.lower()
        if key in out:
            raise InputError(f"{path}: duplicate lexicon term {key!r}")
        out[key] = list(synonyms)
    return out


def _lower_segments(parts: Sequence[str]) -> list[list[str]]:
    segments: list[list[str]] = []
    for part in parts:
        for _, tokens in sentences_with_tokens(part):
            segments.append([tok.lower() for tok in tokens])
    return segments


def _contains_contiguous(segments: list[list[str]], needle: list[str]) -> bool:
    k = len(needle)
    for seg in segments:
        for i in range(len(seg) - k + 1):
            if seg[i : i + k] == needle:
                return True
    return False


def expand_topic_document(topic: Topic, lexicon: Mapping[str, list[str]] | None = None) -> str:
    """Concatenate a topic's text and append lexicon synonyms of its terms.

    Each synonym is appended at most once and only if its token sequence is
    not already present, iterating until no synonym is missing, so expanding
    an already-expanded document changes nothing.
    """
    parts = [p.strip() for p in (topic.definition, *topic.keywords, *topic.ground_truth)]
    parts = [p for p in parts if p]
    if not lexicon:
        return "\n\n".join(parts)

    segments = _lower_segments(parts)
    present = {tok for seg in segments for tok in seg}
    appended: list[str] = []
    changed = True
    while changed:
        changed = False
        for term in sorted(present & lexicon.keys()):
            for synonym in lexicon[term]:
                syn_tokens = [t.lower() for seg in _lower_segments([synonym]) for t in seg]
                if not syn_tokens or _contains_contiguous(segments, syn_tokens):
                    continue
                appended.append(synonym.strip())
                segments.append(syn_tokens)
                present.update(syn_tokens)
                changed = True
    return "\n\n".join(parts + appended)


@dataclass(frozen=True)
class SparseVector:
    """Non-negative sparse vector with strictly increasing term indices."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]

    @classmethod
    def from_mapping(cls, weights: Mapping[int, float]) -> "SparseVector":
        items = sorted((i, w) for i, w in weights.items() if w != 0.0)
        for _, w in items:
            if w < 0:
                raise ConsistencyError("sparse vector weights must be non-negative")
        return cls(
            indices=tuple(i for i, _ in items),
            weights=tuple(w for _, w in items),
        )

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def dot(self, other: "SparseVector") -> float:
        total = 0.0
        i = j = 0
        a_idx, a_w = self.indices, self.weights
        b_idx, b_w = other.indices, other.weights
        while i < len(a_idx) and j < len(b_idx):
            ai, bj = a_idx[i], b_idx[j]
            if ai == bj:
                total += a_w[i] * b_w[j]
                i += 1
                j += 1
            elif ai < bj:
                i += 1
            else:
                j += 1
        return total

    def scale(self, factor: float) -> "SparseVector":
        return SparseVector.from_mapping(
            {i: w * factor for i, w in zip(self.indices, self.weights)}
        )

    def to_mapping(self) -> dict[int, float]:
        return dict(zip(self.indices, self.weights))

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class VectorSpace:
    """TF-IDF space over the topic documents: vocabulary, idf, topic count."""

    vocabulary: tuple[str, ...]
    idf: dict[str, float]
    doc_count: int
    term_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "term_index", {term: i for i, term in enumerate(self.vocabulary)}
        )


def _lower_tokens(text: str) -> list[str]:
    return [tok.lower() for _, tokens in sentences_with_tokens(text) for tok in tokens]


def _tfidf_vector(space: VectorSpace, tokens: Sequence[str]) -> SparseVector:
    weights: dict[int, float] = {}
    for term, count in Counter(tokens).items():
        idx = space.term_index.get(term)
        if idx is None:
            continue
        w = count * space.idf[term]
        if w != 0.0:
            weights[idx] = w
    return SparseVector.from_mapping(weights)


def build_vector_space(
    framework: TopicFramework, lexicon: Mapping[str, list[str]] | None = None
) -> tuple[VectorSpace, dict[str, SparseVector]]:
    """One expanded TF-IDF document per topic; returns the space and each
    topic's vector (weight = raw term frequency x idf)."""
    if len(framework.topics) < 2:
        raise InputError(
            "vector space needs at least 2 topics: with a single topic document "
            "every idf is 0 and similarity is meaningless"
        )
    topic_tokens = {
        t.id: _lower_tokens(expand_topic_document(t, lexicon)) for t in framework.topics
    }
    doc_count = len(framework.topics)
    df: Counter[str] = Counter()
    for tokens in topic_tokens.values():
        df.update(set(tokens))
    vocabulary = tuple(sorted(df))
    idf = {term: math.log(doc_count / df[term]) for term in vocabulary}
    space = VectorSpace(vocabulary=vocabulary, idf=idf, doc_count=doc_count)
    vectors = {tid: _tfidf_vector(space, tokens) for tid, tokens in topic_tokens.items()}
    return space, vectors


def context_vector(space: VectorSpace, context: str) -> SparseVector:
    """TF-IDF vector of a context string; out-of-vocabulary terms drop out."""
    return _tfidf_vector(space, _lower_tokens(context))


def ngram_vector(space: VectorSpace, contexts: Sequence[str]) -> SparseVector:
    """Component-wise mean of the raw (unnormalized) context vectors."""
    if not contexts:
        raise ConsistencyError("n-gram with no contexts: every tabled n-gram has instances")
    sums: dict[int, float] = {}
    for context in contexts:
        vec = context_vector(space, context)
        for idx, w in zip(vec.indices, vec.weights):
            sums[idx] = sums.get(idx, 0.0) + w
    k = len(contexts)
    return SparseVector.from_mapping({i: w / k for i, w in sums.items()})


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity; 0 when either vector has zero norm. Weights are
    non-negative so the result lies in [0, 1]."""
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    value = u.dot(v) / (nu * nv)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Cosine similarity of one n-gram against every framework topic."""

    ngram: NgramKey
    framework: TopicFramework
    values: tuple[float, ...]  # framework topic order

    def value_for(self, topic_id: str) -> float:
        for topic, value in zip(self.framework.topics, self.values):
            if topic.id == topic_id:
                return value
        raise InputError(f"unknown topic id {topic_id!r}")

    def grid(self) -> list[list[float]]:
        per_topic = {t.id: v for t, v in zip(self.framework.topics, self.values)}
        return self.framework.grid_values(per_topic)


def similarity_matrix(
    ngram: NgramKey,
    contexts: Sequence[str],
    framework: TopicFramework,
    space: VectorSpace,
    topic_vectors: Mapping[str, SparseVector],
) -> SimilarityMatrix:
    """Score one n-gram against every topic via its averaged context vector."""
    vec = ngram_vector(space, contexts)
    values = tuple(cosine(vec, topic_vectors[t.id]) for t in framework.topics)
    return SimilarityMatrix(ngram=ngram, framework=framework, values=values)
