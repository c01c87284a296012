"""Quantify how predefined topics rise and fall in salience over time.

Pipeline: time-bin a corpus, track per-bin n-gram usage trends, score each
n-gram against a predefined topic framework via TF-IDF context vectors and
cosine similarity, associate n-grams to topics by a bivariate percentile
rule, and derive per-topic salience trends and matrices.
"""

__version__ = "0.1.0"

from .association import Member, TopicAssociation, associate, percentile, relative_std_dev
from .corpus import (
    CorpusSchema,
    Document,
    TimeBinnedCorpus,
    TimeBinning,
    analysis_text,
    bin_documents,
    build_binning,
    load_corpus,
)
from .errors import ConsistencyError, InputError, SalienceError
from .ngrams import (
    NgramKey,
    NgramRecord,
    NgramTable,
    Token,
    build_ngram_table,
    contexts_of,
    extract_ngrams,
    relative_usage_trend,
    render_ngram,
    tokenize,
)
from .pipeline import RunConfig, run_analyze
from .render import render_grid_svg, render_matrix_svg, render_trend_svg
from .salience import (
    SalienceMatrix,
    SalienceTrend,
    TopicUsageTrend,
    normalize_salience,
    salience_matrix,
    time_derivative,
    topic_salience_trend,
    topic_usage_trend,
)
from .synth import (
    PlantedEvent,
    SynthSpec,
    corpus_to_jsonl,
    generate_corpus,
    oracle_count,
    oracle_count_many,
    news_scale_spec,
)
from .topics import (
    SimilarityMatrix,
    SparseVector,
    Topic,
    TopicFramework,
    VectorSpace,
    build_vector_space,
    context_vector,
    cosine,
    expand_topic_document,
    load_framework,
    load_lexicon,
    load_pmesii_ascope,
    ngram_vector,
    similarity_matrix,
)

__all__ = [
    "__version__",
    "SalienceError",
    "InputError",
    "ConsistencyError",
    "Document",
    "CorpusSchema",
    "TimeBinning",
    "TimeBinnedCorpus",
    "load_corpus",
    "build_binning",
    "bin_documents",
    "analysis_text",
    "Token",
    "NgramKey",
    "NgramRecord",
    "NgramTable",
    "tokenize",
    "extract_ngrams",
    "build_ngram_table",
    "relative_usage_trend",
    "contexts_of",
    "render_ngram",
    "Topic",
    "TopicFramework",
    "VectorSpace",
    "SparseVector",
    "SimilarityMatrix",
    "load_framework",
    "load_pmesii_ascope",
    "load_lexicon",
    "expand_topic_document",
    "build_vector_space",
    "context_vector",
    "ngram_vector",
    "cosine",
    "similarity_matrix",
    "Member",
    "TopicAssociation",
    "relative_std_dev",
    "percentile",
    "associate",
    "TopicUsageTrend",
    "SalienceTrend",
    "SalienceMatrix",
    "time_derivative",
    "topic_usage_trend",
    "topic_salience_trend",
    "salience_matrix",
    "normalize_salience",
    "SynthSpec",
    "PlantedEvent",
    "generate_corpus",
    "corpus_to_jsonl",
    "oracle_count",
    "oracle_count_many",
    "news_scale_spec",
    "RunConfig",
    "run_analyze",
    "render_trend_svg",
    "render_grid_svg",
    "render_matrix_svg",
]
