"""Independent brute-force reference implementations used by the tests.

Everything here works on plain dicts and scalar Python so it shares no
code path with the engine: the ranking oracle follows the backtracking
loops literally, the keyword-score oracle evaluates the weighting
formula term by term, and the reachability oracle enumerates subsets one
recommendation at a time.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from toprorec.catalog import Catalog, Course, Program, build_knowledge_map
from toprorec.topics import InterestTopic


@dataclass
class RawInstance:
    """Dict-of-dicts mirror of a catalog plus topics."""

    programs: dict[str, list[str]]  # program id -> course ids
    courses: dict[str, set[str]]  # course id -> cleaned keyword set
    edges: list[tuple[str, str]]  # (course id, program id)
    topics: dict[int, list[str]]  # topic id -> keywords

    def to_catalog(self) -> Catalog:
        courses = tuple(
            Course(id=cid, name=cid, raw_description=" ".join(sorted(kws)),
                   keywords=tuple(sorted(kws)))
            for cid, kws in sorted(self.courses.items())
        )
        programs = tuple(
            Program(id=pid, name=pid, college="", course_ids=tuple(sorted(cids)))
            for pid, cids in sorted(self.programs.items())
        )
        return Catalog(programs=programs, courses=courses)

    def to_topics(self) -> list[InterestTopic]:
        out = []
        for tid, words in sorted(self.topics.items()):
            keywords = tuple((w, float(len(words) - i)) for i, w in enumerate(words))
            out.append(InterestTopic(id=tid, keywords=keywords))
        return out


def random_instance(
    rng: random.Random,
    max_programs: int = 10,
    max_courses: int = 30,
    max_topics: int = 8,
    max_keywords: int = 5,
    vocab_size: int = 40,
) -> RawInstance:
    vocab = [f"w{i:02d}" for i in range(vocab_size)]
    m = rng.randint(1, max_courses)
    courses = {
        f"c{i:03d}": set(rng.sample(vocab, k=rng.randint(0, 6))) for i in range(m)
    }
    course_ids = sorted(courses)
    n = rng.randint(1, max_programs)
    programs = {
        f"p{j:02d}": sorted(rng.sample(course_ids, k=rng.randint(1, m)))
        for j in range(n)
    }
    edges = [(cid, pid) for pid, cids in programs.items() for cid in cids]
    t = rng.randint(1, max_topics)
    topics = {
        tid: rng.sample(vocab, k=rng.randint(1, max_keywords))
        for tid in range(1, t + 1)
    }
    return RawInstance(programs=programs, courses=courses, edges=edges, topics=topics)


def naive_recommend(
    instance: RawInstance, selection: list[int], tau: int
) -> tuple[list[str], dict[str, int], dict[str, float], dict[str, float]]:
    """Literal nested-loop ranking: returns (ranked ids, PIS, R-PIS, SCORE)."""
    pis = {p: 0 for p in instance.programs}
    for tid in selection:
        for w in instance.topics[tid]:
            for cid in instance.courses:
                if w in instance.courses[cid]:
                    for c2, p in instance.edges:
                        if c2 == cid:
                            pis[p] += 1
    rpis = {p: pis[p] / len(instance.programs[p]) for p in instance.programs}

    ranked: list[str] = []
    remaining = set(instance.programs)
    while remaining:
        best = min(remaining, key=lambda p: (-rpis[p], p))
        if rpis[best] == 0:
            break
        ranked.append(best)
        remaining.discard(best)
        if len(ranked) == tau:
            break
    score = {}
    if ranked:
        top = rpis[ranked[0]]
        score = {p: 100.0 * rpis[p] / top for p in ranked}
    return ranked, pis, rpis, score


def naive_matrix_counts(instance: RawInstance) -> dict[int, dict[str, int]]:
    """Triple loop over (topic, keyword, course, edge)."""
    counts: dict[int, dict[str, int]] = {
        tid: {p: 0 for p in instance.programs} for tid in instance.topics
    }
    for tid, words in instance.topics.items():
        for w in words:
            for cid, kws in instance.courses.items():
                if w in kws:
                    for c2, p in instance.edges:
                        if c2 == cid:
                            counts[tid][p] += 1
    return counts


def naive_reachability(
    instance: RawInstance, phi: int, tau: int
) -> tuple[float, set[str]]:
    """Union of per-subset naive recommendations, exact size phi."""
    reached: set[str] = set()
    for subset in itertools.combinations(sorted(instance.topics), phi):
        ranked, _, _, _ = naive_recommend(instance, list(subset), tau)
        reached.update(ranked)
    return 100.0 * len(reached) / len(instance.programs), reached


def naive_ctfidf(
    docs: list[dict[str, int]], assignment: list[int], gamma: int
) -> dict[int, list[tuple[str, float]]]:
    """Direct evaluation of tf * ln(1 + A / f) per cluster, top gamma."""
    classes = sorted({k for k in assignment if k != -1})
    tf: dict[int, dict[str, int]] = {k: {} for k in classes}
    for doc, k in zip(docs, assignment):
        if k == -1:
            continue
        for w, c in doc.items():
            tf[k][w] = tf[k].get(w, 0) + c
    f: dict[str, int] = {}
    for k in classes:
        for w, c in tf[k].items():
            f[w] = f.get(w, 0) + c
    average = sum(f.values()) / len(classes)
    out = {}
    for k in classes:
        scored = [
            (w, c * math.log(1 + average / f[w])) for w, c in tf[k].items() if c > 0
        ]
        scored.sort(key=lambda kv: (-kv[1], kv[0]))
        out[k] = scored[:gamma]
    return out


def naive_personalization(rows: list[list[int]]) -> float:
    sims = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            dot = sum(a * b for a, b in zip(rows[i], rows[j]))
            na = math.sqrt(sum(a * a for a in rows[i]))
            nb = math.sqrt(sum(b * b for b in rows[j]))
            sims.append(dot / (na * nb))
    return 1.0 - sum(sims) / len(sims)
