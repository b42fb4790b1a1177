"""Interest topic mining over cleaned course descriptions.

The built-in pipeline is: term-count vectorization, TF-IDF weighting,
deterministic spherical k-means clustering, then class-based TF-IDF
keyword scoring per cluster. Externally computed topics can be imported
through the Topics JSON schema instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .catalog import Catalog, Course

OUTLIER = -1  # assignment label for courses not in any cluster


class TopicError(Exception):
    """Topic mining or import failure."""


class EmptyCorpusError(TopicError):
    pass


class InfeasibleClusterCountError(TopicError):
    pass


class TopicValidationError(TopicError):
    pass


@dataclass(frozen=True)
class InterestTopic:
    """Keyword cluster with importance weights, sorted descending."""

    id: int
    keywords: tuple[tuple[str, float], ...]

    def keyword_strings(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.keywords)


@dataclass(frozen=True)
class TopicModelConfig:
    h: int = 30
    gamma: int = 20
    clusterer: str = "spherical-kmeans"
    seed: int = 1

    def __post_init__(self) -> None:
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")


def validate_topic(topic: InterestTopic, gamma: int | None = None) -> None:
    if topic.id < 1:
        raise TopicValidationError(f"topic id must be >= 1, got {topic.id}")
    if not topic.keywords:
        raise TopicValidationError(f"topic {topic.id} has no keywords")
    if gamma is not None and len(topic.keywords) > gamma:
        raise TopicValidationError(
            f"topic {topic.id} has {len(topic.keywords)} keywords, limit {gamma}"
        )
    words = [w for w, _ in topic.keywords]
    if len(set(words)) != len(words):
        raise TopicValidationError(f"topic {topic.id} has duplicate keywords")
    weights = [s for _, s in topic.keywords]
    if any(s < 0 for s in weights):
        raise TopicValidationError(f"topic {topic.id} has a negative weight")
    if any(a < b for a, b in zip(weights, weights[1:])):
        raise TopicValidationError(f"topic {topic.id} weights not sorted descending")


# ---------------------------------------------------------------------------
# vectorization

def vectorize(courses: Sequence[Course]) -> tuple[sparse.csr_matrix, tuple[str, ...]]:
    """Term-count matrix (row per course) over a lexicographic vocabulary.

    Counts come from the courses' keyword extraction with multiplicity,
    before any set collapse.
    """
    if not any(c.keywords for c in courses):
        raise EmptyCorpusError("no course has any keywords")
    vocab = tuple(sorted({w for c in courses for w in c.keywords}))
    index = {w: j for j, w in enumerate(vocab)}
    rows: list[int] = []
    cols: list[int] = []
    for i, course in enumerate(courses):
        for w in course.keywords:
            rows.append(i)
            cols.append(index[w])
    matrix = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(len(courses), len(vocab)),
    )
    matrix.sum_duplicates()
    return matrix, vocab


def _tfidf_rows(counts: sparse.csr_matrix) -> sparse.csr_matrix:
    """Smooth TF-IDF with L2-normalized rows; zero rows stay zero."""
    n_docs = counts.shape[0]
    df = np.asarray((counts > 0).sum(axis=0)).ravel()
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    weighted = counts.multiply(idf).tocsr()
    norms = np.sqrt(np.asarray(weighted.multiply(weighted).sum(axis=1)).ravel())
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sparse.diags(scale) @ weighted


# ---------------------------------------------------------------------------
# clustering

Clusterer = Callable[[sparse.csr_matrix, int, int], np.ndarray]


def _cosine_dist_sq(x: sparse.csr_matrix, idx: int) -> np.ndarray:
    sims = np.asarray((x @ x[idx].T).todense()).ravel()
    return np.maximum(0.0, 1.0 - sims) ** 2


def _kmeans_pp_init(x: sparse.csr_matrix, h: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding under cosine distance on unit rows."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    dist = _cosine_dist_sq(x, chosen[0])
    for _ in range(1, h):
        total = dist.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=dist / total))
        else:
            remaining = np.setdiff1d(np.arange(n), np.array(chosen))
            nxt = int(rng.choice(remaining))
        chosen.append(nxt)
        dist = np.minimum(dist, _cosine_dist_sq(x, nxt))
    return x[chosen].toarray()


def spherical_kmeans(
    x: sparse.csr_matrix, h: int, seed: int, max_iter: int = 100
) -> np.ndarray:
    """Cosine k-means on L2-normalized rows; deterministic for a seed.

    Returns 1-based cluster ids; produces no outliers. Empty clusters are
    repaired by moving the member farthest from its centroid.
    """
    n = x.shape[0]
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(x, h, rng)
    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        sims = np.asarray(x @ centroids.T)  # (n, h)
        new_assign = np.argmax(sims, axis=1)
        for k in range(h):
            if np.any(new_assign == k):
                continue
            own = sims[np.arange(n), new_assign]
            sizes = np.bincount(new_assign, minlength=h)
            candidates = np.where(sizes[new_assign] > 1)[0]
            worst = candidates[np.argmin(own[candidates])]
            new_assign[worst] = k
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for k in range(h):
            members = x[assign == k]
            c = np.asarray(members.sum(axis=0)).ravel()
            norm = np.linalg.norm(c)
            if norm > 0:
                centroids[k] = c / norm
    return assign + 1


CLUSTERERS: dict[str, Clusterer] = {
    "spherical-kmeans": spherical_kmeans,
}


def cluster(
    matrix: sparse.csr_matrix, config: TopicModelConfig
) -> np.ndarray:
    """Assign each course to one of h clusters (1-based; -1 marks outliers)."""
    n = matrix.shape[0]
    if n == 0:
        raise EmptyCorpusError("empty matrix")
    if config.h > n:
        raise InfeasibleClusterCountError(
            f"h={config.h} exceeds the number of courses ({n})"
        )
    try:
        clusterer = CLUSTERERS[config.clusterer]
    except KeyError:
        raise TopicError(f"unknown clusterer {config.clusterer!r}") from None
    return clusterer(_tfidf_rows(matrix), config.h, config.seed)


# ---------------------------------------------------------------------------
# class-based TF-IDF keyword scoring

def ctfidf_keywords(
    assignment: np.ndarray,
    matrix: sparse.csr_matrix,
    vocab: Sequence[str],
    gamma: int,
) -> list[InterestTopic]:
    """Top-gamma keywords per cluster by tf * ln(1 + A / f).

    tf is the term's count in the concatenated cluster, f its count over
    all clusters, and A the average term count per cluster. Ties break
    lexicographically on the keyword.
    """
    class_ids = sorted(int(k) for k in np.unique(assignment) if k != OUTLIER)
    if not class_ids:
        return []
    tf_rows = []
    for k in class_ids:
        members = matrix[np.asarray(assignment) == k]
        tf_rows.append(np.asarray(members.sum(axis=0)).ravel().astype(np.float64))
    tf = np.vstack(tf_rows)  # (classes, terms)
    f = tf.sum(axis=0)
    average = f.sum() / len(class_ids)
    with np.errstate(divide="ignore"):
        idf = np.log1p(np.divide(average, f, out=np.zeros_like(f), where=f > 0))
    scores = tf * idf

    topics = []
    for row, k in zip(scores, class_ids):
        present = np.nonzero(row > 0)[0]
        ranked = sorted(((vocab[j], float(row[j])) for j in present),
                        key=lambda kv: (-kv[1], kv[0]))
        if not ranked:
            continue
        topics.append(InterestTopic(id=k, keywords=tuple(ranked[:gamma])))
    return topics


def mine_topics(catalog: Catalog, config: TopicModelConfig) -> list[InterestTopic]:
    """Full built-in pipeline: vectorize, cluster, score keywords."""
    matrix, vocab = vectorize(catalog.courses)
    assignment = cluster(matrix, config)
    return ctfidf_keywords(assignment, matrix, vocab, config.gamma)


# ---------------------------------------------------------------------------
# Topics JSON interchange

def export_topics(topics: Sequence[InterestTopic], gamma: int | None = None) -> bytes:
    """Serialize to the Topics JSON schema; byte-stable for equal input."""
    if gamma is None:
        gamma = max((len(t.keywords) for t in topics), default=0)
    doc = {
        "h": len(topics),
        "gamma": gamma,
        "topics": [
            {
                "id": t.id,
                "keywords": [{"w": w, "score": s} for w, s in t.keywords],
            }
            for t in topics
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def parse_topics(data: bytes | str) -> list[InterestTopic]:
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise TopicValidationError(f"topics file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "topics" not in raw:
        raise TopicValidationError("expected object with a 'topics' list")
    gamma = raw.get("gamma")
    if gamma is not None and int(gamma) < 1:
        raise TopicValidationError("gamma must be >= 1")

    topics = []
    seen_ids = set()
    for entry in raw["topics"]:
        try:
            tid = int(entry["id"])
            keywords = [(str(kw["w"]), float(kw["score"])) for kw in entry["keywords"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise TopicValidationError(f"malformed topic entry: {entry!r}") from exc
        if tid in seen_ids:
            raise TopicValidationError(f"duplicate topic id {tid}")
        seen_ids.add(tid)
        keywords.sort(key=lambda kv: (-kv[1], kv[0]))
        topic = InterestTopic(id=tid, keywords=tuple(keywords))
        validate_topic(topic)
        if gamma is not None and len(keywords) > int(gamma):
            topic = InterestTopic(id=tid, keywords=tuple(keywords[: int(gamma)]))
        topics.append(topic)
    if not topics:
        raise TopicValidationError("topics file contains no topics")
    return topics


def import_topics(source: str | Path) -> list[InterestTopic]:
    """Load topics computed elsewhere, validated and truncated to gamma."""
    try:
        data = Path(source).read_bytes()
    except OSError as exc:
        raise TopicError(f"cannot read topics file {source}: {exc}") from exc
    return parse_topics(data)
