"""Tokenization, vocabulary building, and sparse bag-of-words / tf-idf vectors.

Weighting follows the classic convention: tf is the raw occurrence count of a
term within one document, and idf(t) = log(n / (1 + df(t))) with natural log.
No smoothing and no clamping, so idf can be zero or negative when a term
appears in (almost) every document; zero-weight entries are never stored.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)  # alphanumeric runs, no underscore


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    min_token_len: int = 1

    def __post_init__(self) -> None:
        if self.min_token_len < 1:
            raise ValueError(f"min_token_len must be >= 1, got {self.min_token_len}")


def tokenize(text: str, cfg: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Split text into maximal alphanumeric runs, dropping short tokens."""
    if cfg.lowercase:
        text = text.lower()
    tokens = _TOKEN_RE.findall(text)
    if cfg.min_token_len > 1:
        tokens = [t for t in tokens if len(t) >= cfg.min_token_len]
    return tokens


@dataclass
class Vocabulary:
    """Term -> dense id mapping plus document-frequency statistics.

    Ids are assigned in first-occurrence order over the corpus that built the
    vocabulary.  ``doc_freq[i]`` is the number of documents containing the term
    with id ``i`` at least once; ``n_docs`` is the corpus size.
    """

    term_to_id: dict[str, int] = field(default_factory=dict)
    doc_freq: list[int] = field(default_factory=list)
    n_docs: int = 0

    @property
    def size(self) -> int:
        return len(self.term_to_id)

    def id_to_term(self) -> list[str]:
        terms = [""] * self.size
        for term, tid in self.term_to_id.items():
            terms[tid] = term
        return terms


def build_vocabulary(corpus: list[list[str]]) -> Vocabulary:
    """Assign ids in first-occurrence order and count document frequencies."""
    vocab = Vocabulary(n_docs=len(corpus))
    for tokens in corpus:
        seen: set[int] = set()
        for token in tokens:
            tid = vocab.term_to_id.get(token)
            if tid is None:
                tid = len(vocab.term_to_id)
                vocab.term_to_id[token] = tid
                vocab.doc_freq.append(0)
            seen.add(tid)
        for tid in seen:
            vocab.doc_freq[tid] += 1
    return vocab


@dataclass(frozen=True)
class SparseVector:
    """Sorted (term-id, weight) pairs over a fixed-dimension term space.

    Invariants: indices strictly increasing, all below ``dimension``, and no
    stored weight is zero.
    """

    dimension: int
    indices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dimension < 0:
            raise ValueError("dimension must be non-negative")
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values length mismatch")
        prev = -1
        for idx, val in zip(self.indices, self.values):
            if idx <= prev:
                raise ValueError("indices must be strictly increasing")
            if idx >= self.dimension:
                raise ValueError(f"index {idx} out of range for dimension {self.dimension}")
            if val == 0:
                raise ValueError("zero-valued entries must not be stored")
            prev = idx

    def __len__(self) -> int:
        return len(self.indices)

    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices, self.values))

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))

    def dot(self, other: SparseVector) -> float:
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")
        weights = dict(zip(other.indices, other.values))
        return sum(v * weights[i] for i, v in zip(self.indices, self.values) if i in weights)


def _from_pairs(dimension: int, pairs: dict[int, float]) -> SparseVector:
    items = sorted((i, w) for i, w in pairs.items() if w != 0)
    return SparseVector(
        dimension=dimension,
        indices=tuple(i for i, _ in items),
        values=tuple(w for _, w in items),
    )


def count_vectorize(tokens: list[str], vocab: Vocabulary) -> SparseVector:
    """Raw occurrence counts over the vocabulary; out-of-vocabulary tokens ignored."""
    counts: Counter[int] = Counter()
    for token in tokens:
        tid = vocab.term_to_id.get(token)
        if tid is not None:
            counts[tid] += 1
    return _from_pairs(vocab.size, dict(counts))


def idf(term_id: int, vocab: Vocabulary) -> float:
    """Inverse document frequency, log(n / (1 + df)).  May be zero or negative."""
    if not 0 <= term_id < vocab.size:
        raise KeyError(f"term id {term_id} not in vocabulary of size {vocab.size}")
    return math.log(vocab.n_docs / (1 + vocab.doc_freq[term_id]))


def tfidf_vectorize(tokens: list[str], vocab: Vocabulary) -> SparseVector:
    """Per-term weight tf(t, d) * idf(t); exactly-zero products are dropped."""
    counts = count_vectorize(tokens, vocab)
    pairs = {tid: tf * idf(tid, vocab) for tid, tf in counts.entries()}
    return _from_pairs(vocab.size, pairs)


def binarize(v: SparseVector) -> SparseVector:
    """Set every stored weight to 1, keeping the entry set unchanged."""
    return SparseVector(
        dimension=v.dimension,
        indices=v.indices,
        values=tuple(1.0 for _ in v.values),
    )
