"""Quantitative evaluation: program reachability, personalization, coverage.

Reachability enumerates every topic subset of a given size, collects the
union of top-tau recommendations, and reports the percentage of programs
reached. Enumeration runs on the precomputed topic-program matrix so a
subset evaluation is a column sum plus a top-tau selection; chunks of
subsets are processed with vectorized scoring and can be spread over
worker threads with an associative union reduction.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .catalog import Catalog
from .matrix import TopicProgramMatrix
from .recommend import Recommendation

_CHUNK = 32768


class EvaluationError(Exception):
    pass


class InfeasibleParameterError(EvaluationError):
    pass


class DegenerateMatrixError(EvaluationError):
    pass


@dataclass(frozen=True)
class ReachabilityResult:
    h: int
    phi: int
    gamma: int
    tau: int
    rho: float  # percent of programs reached, in [0, 100]
    reachable_programs: frozenset[str]
    subsets_evaluated: int


def _combo_chunks(h: int, phi: int, chunk: int = _CHUNK) -> Iterable[np.ndarray]:
    combos = itertools.combinations(range(h), phi)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def _reached_sets(
    matrix: TopicProgramMatrix,
    phi: int,
    taus: Sequence[int],
    workers: int = 1,
) -> dict[int, frozenset[str]]:
    """Union of top-tau programs over all exact-size-phi subsets, per tau."""
    n = matrix.n
    h = matrix.h
    # columns in ascending program id so a stable sort breaks ties correctly
    perm = sorted(range(n), key=lambda j: matrix.program_ids[j])
    counts = matrix.counts[:, perm]
    sizes = matrix.courses_per_program[perm].astype(np.float64)
    taus = sorted({int(t) for t in taus})
    if taus[0] < 1:
        raise InfeasibleParameterError(f"tau must be >= 1, got {taus[0]}")
    max_tau = min(max(taus), n)

    def process(chunk: np.ndarray) -> dict[int, np.ndarray]:
        pis = counts[chunk[:, 0]].copy()
        for j in range(1, phi):
            pis += counts[chunk[:, j]]
        rpis = pis / sizes
        order = np.argsort(-rpis, axis=1, kind="stable")
        top = order[:, :max_tau]
        valid = np.take_along_axis(pis, top, axis=1) > 0
        local = {}
        for t in taus:
            width = min(t, n)
            mask = np.zeros(n, dtype=bool)
            mask[top[:, :width][valid[:, :width]]] = True
            local[t] = mask
        return local

    masks = {t: np.zeros(n, dtype=bool) for t in taus}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for local in pool.map(process, _combo_chunks(h, phi)):
                for t in taus:
                    masks[t] |= local[t]
    else:
        for chunk in _combo_chunks(h, phi):
            local = process(chunk)
            for t in taus:
                masks[t] |= local[t]

    return {
        t: frozenset(matrix.program_ids[perm[i]] for i in np.nonzero(masks[t])[0])
        for t in taus
    }


def reachability(
    matrix: TopicProgramMatrix,
    h: int,
    phi: int,
    gamma: int,
    tau: int,
    up_to: bool = False,
    workers: int = 1,
) -> ReachabilityResult:
    """Percentage of programs reached by at least one size-phi selection.

    With ``up_to`` the union additionally covers all selection sizes 1..phi.
    ``gamma`` is echoed into the result; the matrix must already have been
    built from topics truncated to that many keywords.
    """
    if h != matrix.h:
        raise InfeasibleParameterError(f"h={h} but matrix has {matrix.h} topics")
    if phi < 1 or phi > h:
        raise InfeasibleParameterError(f"phi={phi} infeasible for h={h}")
    sizes = range(1, phi + 1) if up_to else (phi,)
    reached: set[str] = set()
    subsets = 0
    for k in sizes:
        reached |= _reached_sets(matrix, k, [tau], workers=workers)[tau]
        subsets += math.comb(h, k)
    return ReachabilityResult(
        h=h,
        phi=phi,
        gamma=gamma,
        tau=tau,
        rho=100.0 * len(reached) / matrix.n,
        reachable_programs=frozenset(reached),
        subsets_evaluated=subsets,
    )


MatrixProvider = Callable[[int, int], TopicProgramMatrix]


def reachability_grid(
    matrix: TopicProgramMatrix | MatrixProvider,
    h_values: Iterable[int],
    phi_values: Iterable[int],
    gamma_values: Iterable[int],
    tau_values: Iterable[int],
    up_to: bool = False,
    workers: int = 1,
) -> list[ReachabilityResult]:
    """Evaluate the full Cartesian parameter product.

    ``matrix`` is either one precomputed matrix used everywhere or a
    ``(h, gamma) -> TopicProgramMatrix`` provider, since changing h or gamma
    requires re-mined topics. Top-tau prefixes are shared across the tau
    grid, so each (h, gamma, phi) triple enumerates its subsets once.
    """
    provider: MatrixProvider = matrix if callable(matrix) else (lambda h, g: matrix)
    hs = sorted({int(v) for v in h_values})
    phis = sorted({int(v) for v in phi_values})
    gammas = sorted({int(v) for v in gamma_values})
    taus = sorted({int(v) for v in tau_values})
    if not (hs and phis and gammas and taus):
        raise InfeasibleParameterError("empty parameter grid")

    results = []
    reached_cache: dict[tuple[int, int, int], dict[int, frozenset[str]]] = {}
    for h in hs:
        for phi in phis:
            for gamma in gammas:
                mat = provider(h, gamma)
                if mat.h != h:
                    raise InfeasibleParameterError(
                        f"provider returned {mat.h} topics for h={h}"
                    )
                if phi < 1 or phi > h:
                    raise InfeasibleParameterError(f"phi={phi} infeasible for h={h}")
                sizes = range(1, phi + 1) if up_to else (phi,)
                per_tau: dict[int, set[str]] = {t: set() for t in taus}
                subsets = 0
                for k in sizes:
                    key = (h, gamma, k)
                    if key not in reached_cache:
                        reached_cache[key] = _reached_sets(mat, k, taus, workers)
                    for t in taus:
                        per_tau[t] |= reached_cache[key][t]
                    subsets += math.comb(h, k)
                for tau in taus:
                    reached = per_tau[tau]
                    results.append(
                        ReachabilityResult(
                            h=h,
                            phi=phi,
                            gamma=gamma,
                            tau=tau,
                            rho=100.0 * len(reached) / mat.n,
                            reachable_programs=frozenset(reached),
                            subsets_evaluated=subsets,
                        )
                    )
    return results


def grid_to_csv(results: Sequence[ReachabilityResult], path: str | Path | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["h", "phi", "gamma", "tau", "rho", "reachable_count", "subsets"])
    for r in results:
        writer.writerow(
            [r.h, r.phi, r.gamma, r.tau, repr(r.rho), len(r.reachable_programs), r.subsets_evaluated]
        )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# session matrices and personalization

@dataclass(frozen=True, eq=False)
class RecommendationMatrix:
    """Binary matrix: one row per session, one column per program/college."""

    columns: tuple[str, ...]
    rows: np.ndarray  # (sessions, columns), entries 0/1

    def __post_init__(self) -> None:
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise DegenerateMatrixError("matrix shape does not match columns")
        if not np.isin(self.rows, (0, 1)).all():
            raise DegenerateMatrixError("matrix entries must be 0 or 1")
        self.rows.setflags(write=False)

    @classmethod
    def from_recommendations(
        cls, sessions: Sequence[Recommendation], program_ids: Sequence[str]
    ) -> "RecommendationMatrix":
        columns = tuple(program_ids)
        pos = {p: j for j, p in enumerate(columns)}
        rows = np.zeros((len(sessions), len(columns)), dtype=np.int8)
        for i, rec in enumerate(sessions):
            for entry in rec.entries:
                try:
                    rows[i, pos[entry.program]] = 1
                except KeyError:
                    raise DegenerateMatrixError(
                        f"recommendation references unknown program {entry.program!r}"
                    ) from None
        return cls(columns=columns, rows=rows)

    def grouped(self, group_of: Mapping[str, str]) -> "RecommendationMatrix":
        """Aggregate columns into groups (e.g. programs into colleges)."""
        groups = tuple(sorted(set(group_of.values())))
        gpos = {g: j for j, g in enumerate(groups)}
        out = np.zeros((self.rows.shape[0], len(groups)), dtype=np.int8)
        for j, col in enumerate(self.columns):
            out[:, gpos[group_of[col]]] |= self.rows[:, j].astype(np.int8)
        return RecommendationMatrix(columns=groups, rows=out)

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(row.tolist())
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source: str | Path) -> "RecommendationMatrix":
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise EvaluationError(f"cannot read session matrix {source}: {exc}") from exc
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DegenerateMatrixError(f"{source}: empty file") from None
        rows = [[int(v) for v in row] for row in reader if row]
        return cls(columns=tuple(header), rows=np.array(rows, dtype=np.int8))


@dataclass(frozen=True)
class PersonalizationResult:
    mean_similarity: float
    personalization: float  # 1 - mean pairwise cosine similarity
    pairs: int


def personalization(matrix: RecommendationMatrix | np.ndarray) -> PersonalizationResult:
    """1 minus the mean pairwise cosine similarity of session rows."""
    rows = matrix.rows if isinstance(matrix, RecommendationMatrix) else np.asarray(matrix)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise DegenerateMatrixError("need at least two session rows")
    if not np.isin(rows, (0, 1)).all():
        raise DegenerateMatrixError("matrix entries must be 0 or 1")
    m = rows.astype(np.float64)
    norms = np.sqrt(m.sum(axis=1))
    if np.any(norms == 0):
        raise DegenerateMatrixError("a session row has no recommendations")
    gram = m @ m.T
    sims = gram / np.outer(norms, norms)
    iu = np.triu_indices(rows.shape[0], k=1)
    mean_sim = float(sims[iu].mean())
    return PersonalizationResult(
        mean_similarity=mean_sim,
        personalization=1.0 - mean_sim,
        pairs=len(iu[0]),
    )


# ---------------------------------------------------------------------------
# coverage over recorded sessions

@dataclass(frozen=True)
class CoverageReport:
    sessions: int
    programs_total: int
    programs_recommended: int
    program_counts: dict[str, int]
    program_rank_histogram: dict[str, dict[int, int]]
    unique_recommendation_sets: int
    college_counts: dict[str, int] | None = None
    college_rank_histogram: dict[str, dict[int, int]] | None = None
    unique_college_sets: int | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "sessions": self.sessions,
            "programs_total": self.programs_total,
            "programs_recommended": self.programs_recommended,
            "program_counts": self.program_counts,
            "program_rank_histogram": {
                p: {str(r): c for r, c in hist.items()}
                for p, hist in self.program_rank_histogram.items()
            },
            "unique_recommendation_sets": self.unique_recommendation_sets,
        }
        if self.college_counts is not None:
            doc["college_counts"] = self.college_counts
            doc["college_rank_histogram"] = {
                g: {str(r): c for r, c in hist.items()}
                for g, hist in (self.college_rank_histogram or {}).items()
            }
            doc["unique_college_sets"] = self.unique_college_sets
        return doc


def coverage_report(
    sessions: Sequence[Recommendation],
    catalog: Catalog | Sequence[str],
) -> CoverageReport:
    """How often each program was recommended, and at which ranks."""
    if not sessions:
        raise EvaluationError("need at least one session")
    if isinstance(catalog, Catalog):
        program_ids = [p.id for p in catalog.programs]
        college_of = {p.id: p.college for p in catalog.programs}
        has_colleges = any(college_of.values())
    else:
        program_ids = list(catalog)
        college_of = {}
        has_colleges = False
    universe = set(program_ids)

    counts = {p: 0 for p in program_ids}
    histogram: dict[str, dict[int, int]] = {p: {} for p in program_ids}
    seen_sets: set[frozenset[str]] = set()
    college_counts: dict[str, int] = {}
    college_hist: dict[str, dict[int, int]] = {}
    seen_college_sets: set[frozenset[str]] = set()

    for rec in sessions:
        ids = rec.program_ids()
        unknown = [p for p in ids if p not in universe]
        if unknown:
            raise EvaluationError(f"session references unknown programs: {unknown}")
        seen_sets.add(frozenset(ids))
        for rank, p in enumerate(ids, start=1):
            counts[p] += 1
            histogram[p][rank] = histogram[p].get(rank, 0) + 1
        if has_colleges:
            colleges_at = [college_of[p] for p in ids]
            seen_college_sets.add(frozenset(colleges_at))
            seen_this_session = set()
            for rank, g in enumerate(colleges_at, start=1):
                college_hist.setdefault(g, {})[rank] = (
                    college_hist.setdefault(g, {}).get(rank, 0) + 1
                )
                if g not in seen_this_session:
                    college_counts[g] = college_counts.get(g, 0) + 1
                    seen_this_session.add(g)

    return CoverageReport(
        sessions=len(sessions),
        programs_total=len(program_ids),
        programs_recommended=sum(1 for c in counts.values() if c > 0),
        program_counts=counts,
        program_rank_histogram={p: h for p, h in histogram.items() if h},
        unique_recommendation_sets=len(seen_sets),
        college_counts=college_counts if has_colleges else None,
        college_rank_histogram=college_hist if has_colleges else None,
        unique_college_sets=len(seen_college_sets) if has_colleges else None,
    )
