"""Bivariate n-gram-to-topic association.

An n-gram is associated with a topic when it strictly exceeds the 75th
percentile (configurable) of both usage variability and similarity to that
topic: the upper-right quadrant of the (variability, similarity) scatter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConsistencyError, InputError
from .ngrams import NgramKey, render_ngram


def relative_std_dev(trend: Sequence[float]) -> float:
    """Population standard deviation of the trend divided by its mean."""
    values = np.asarray(trend, dtype=float)
    if values.size == 0:
        raise InputError("cannot compute relative standard deviation of an empty trend")
    mean = float(values.mean())
    if mean <= 0.0:
        raise ConsistencyError(
            "trend mean is not positive; every tabled n-gram occurs at least once"
        )
    return float(values.std() / mean)


def percentile(values: Sequence[float], p: float) -> float:
    """Percentile with linear interpolation between closest ranks:
    rank = (p/100) * (N - 1) on the sorted values."""
    if len(values) == 0:
        raise InputError("cannot take a percentile of an empty list")
    if not 0.0 <= p <= 100.0:
        raise InputError(f"percentile must lie in [0, 100], got {p}")
    return float(np.percentile(np.asarray(values, dtype=float), p, method="linear"))


@dataclass(frozen=True)
class Member:
    ngram: NgramKey
    similarity: float
    rsd: float


@dataclass(frozen=True)
class TopicAssociation:
    """N-grams associated with one topic, plus the thresholds that admitted
    them. Members are sorted by descending similarity."""

    topic_id: str
    members: tuple[Member, ...]
    sim_threshold: float
    rsd_threshold: float

    def member_keys(self) -> list[NgramKey]:
        return [m.ngram for m in self.members]


def associate(
    topic_id: str,
    similarities: Mapping[NgramKey, float],
    variabilities: Mapping[NgramKey, float],
    p: float = 75.0,
    *,
    sim_threshold: float | None = None,
    rsd_threshold: float | None = None,
) -> TopicAssociation:
    """Select the n-grams strictly above the p-th percentile on both axes.

    By default the similarity threshold comes from this topic's own
    similarity distribution and the variability threshold from the full
    variability distribution; pass precomputed thresholds to override
    (e.g. a global similarity percentile).
    """
    if set(similarities) != set(variabilities):
        only_sim = set(similarities) - set(variabilities)
        only_var = set(variabilities) - set(similarities)
        sample = next(iter(only_sim or only_var))
        raise ConsistencyError(
            f"topic {topic_id!r}: similarity and variability maps cover different "
            f"n-gram sets (e.g. {render_ngram(sample)!r})"
        )
    if sim_threshold is None:
        sim_threshold = percentile(list(similarities.values()), p)
    if rsd_threshold is None:
        rsd_threshold = percentile(list(variabilities.values()), p)

    members = [
        Member(ngram=g, similarity=s, rsd=variabilities[g])
        for g, s in similarities.items()
        if s > sim_threshold and variabilities[g] > rsd_threshold
    ]
    members.sort(key=lambda m: (-m.similarity, m.ngram))
    return TopicAssociation(
        topic_id=topic_id,
        members=tuple(members),
        sim_threshold=sim_threshold,
        rsd_threshold=rsd_threshold,
    )
