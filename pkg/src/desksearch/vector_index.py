"""Dense-vector store with exact cosine top-k search and hybrid score fusion.

The store is a brute-force exact scan (no approximate structures): fine for
desk-scale corpora and trivially correct against an all-pairs oracle.  Hybrid
search min-max normalizes the lexical and vector candidate scores to [0, 1]
and blends them with a configurable lexical weight.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .io_utils import atomic_write_bytes
from .lexical_index import InvertedIndex, SearchHit, search_lexical

VECTOR_FORMAT = "desksearch-vector-index"
VECTOR_VERSION = 1
UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class HybridConfig:
    alpha: float = 0.5  # lexical weight; 1 - alpha goes to the vector side
    k: int = 10
    candidate_factor: int = 4  # each side contributes a top-(factor * k) pool

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.candidate_factor < 1:
            raise ValueError("candidate_factor must be >= 1")


class VectorIndex:
    """doc id -> unit-norm embedding, fixed dimension, exact cosine search."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._doc_ids: list[int] = []
        self._vectors: list[np.ndarray] = []
        self._positions: dict[int, int] = {}
        self._matrix: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._doc_ids)

    @property
    def doc_ids(self) -> list[int]:
        return list(self._doc_ids)

    def add(self, doc_id: int, embedding: np.ndarray) -> None:
        vec = np.asarray(embedding, dtype=float)
        if vec.shape != (self.dimension,):
            raise ValueError(f"expected dimension {self.dimension}, got shape {vec.shape}")
        if doc_id in self._positions:
            raise ValueError(f"doc id {doc_id} already present")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"embedding for doc {doc_id} is not unit-norm (|v| = {norm:.6g})")
        self._doc_ids.append(doc_id)
        self._vectors.append(vec)
        self._positions[doc_id] = len(self._doc_ids) - 1
        self._matrix = None

    def get(self, doc_id: int) -> np.ndarray:
        return self._vectors[self._positions[doc_id]]

    def _stacked(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = (
                np.stack(self._vectors) if self._vectors else np.empty((0, self.dimension))
            )
        return self._matrix

    def search(self, query: np.ndarray, k: int) -> list[SearchHit]:
        """Exact scan: cosine similarity against every stored vector, top-k."""
        if k < 1:
            raise ValueError("k must be >= 1")
        q = np.asarray(query, dtype=float)
        if q.shape != (self.dimension,):
            raise ValueError(f"expected dimension {self.dimension}, got shape {q.shape}")
        q_norm = float(np.linalg.norm(q))
        if q_norm == 0.0:
            raise ValueError("cannot search with a zero-norm query")
        if not self._doc_ids:
            return []
        matrix = self._stacked()
        doc_norms = np.linalg.norm(matrix, axis=1)
        scores = (matrix @ q) / (doc_norms * q_norm)
        hits = [SearchHit(doc_id, float(s)) for doc_id, s in zip(self._doc_ids, scores)]
        hits.sort(key=lambda h: (-h.score, h.doc_id))
        return hits[:k]


def minmax_normalize(hits: list[SearchHit]) -> dict[int, float]:
    """Map each hit's score into [0, 1]; a constant score list maps to all ones."""
    if not hits:
        return {}
    scores = [h.score for h in hits]
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return {h.doc_id: 1.0 for h in hits}
    return {h.doc_id: (h.score - lo) / (hi - lo) for h in hits}


def search_hybrid(
    lex_index: InvertedIndex,
    vec_index: VectorIndex,
    query_tokens: list[str],
    query_embedding: np.ndarray | None,
    cfg: HybridConfig,
) -> list[SearchHit]:
    """Fuse lexical and vector rankings over a shared doc-id space.

    Each side contributes its top-(candidate_factor * k) list; scores are
    min-max normalized per side and blended as
    alpha * lexical + (1 - alpha) * vector, with a missing side contributing
    zero.  ``query_embedding=None`` (e.g. a fully out-of-vocabulary query)
    degrades to the lexical side only.
    """
    pool = cfg.candidate_factor * cfg.k
    lex_hits = search_lexical(lex_index, query_tokens, pool)
    vec_hits = (
        vec_index.search(query_embedding, pool) if query_embedding is not None else []
    )
    lex_norm = minmax_normalize(lex_hits)
    vec_norm = minmax_normalize(vec_hits)

    fused = []
    for doc_id in sorted(set(lex_norm) | set(vec_norm)):
        score = cfg.alpha * lex_norm.get(doc_id, 0.0) + (1.0 - cfg.alpha) * vec_norm.get(
            doc_id, 0.0
        )
        fused.append(SearchHit(doc_id, score))
    fused.sort(key=lambda h: (-h.score, h.doc_id))
    return fused[: cfg.k]


def save_vectors(index: VectorIndex, path: str | Path) -> None:
    """Persist as a JSON header line (dimension, count, doc ids) followed by the
    raw little-endian float64 matrix, rows in ascending doc-id order.

    The byte stream is a pure function of the stored vectors, so identical
    indexes serialize to identical files.
    """
    path = Path(path)
    order = np.argsort(np.asarray(index.doc_ids, dtype=np.int64), kind="stable")
    doc_ids = [index.doc_ids[i] for i in order]
    matrix = (
        np.stack([index.get(d) for d in doc_ids]).astype("<f8")
        if doc_ids
        else np.empty((0, index.dimension), dtype="<f8")
    )
    header = {
        "format": VECTOR_FORMAT,
        "version": VECTOR_VERSION,
        "dimension": index.dimension,
        "count": len(doc_ids),
        "doc_ids": doc_ids,
    }
    blob = json.dumps(header).encode("utf-8") + b"\n" + matrix.tobytes(order="C")
    atomic_write_bytes(path, blob)


def load_vectors(path: str | Path) -> VectorIndex:
    raw = Path(path).read_bytes()
    newline = raw.index(b"\n")
    header = json.loads(raw[:newline].decode("utf-8"))
    if header.get("format") != VECTOR_FORMAT:
        raise ValueError(f"{path}: not a vector index file")
    if header.get("version") != VECTOR_VERSION:
        raise ValueError(f"{path}: unsupported vector index version {header.get('version')}")
    dimension, count = header["dimension"], header["count"]
    matrix = np.frombuffer(raw[newline + 1 :], dtype="<f8").reshape(count, dimension)
    index = VectorIndex(dimension)
    for doc_id, row in zip(header["doc_ids"], matrix):
        index.add(doc_id, row.astype(float))
    return index
