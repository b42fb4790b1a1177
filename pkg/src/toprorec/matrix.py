"""Precomputed topic-program keyword-hit counts.

``counts[t][p]`` is the number of (keyword, course) pairs where the
keyword belongs to topic t, the course's cleaned description contains
the keyword, and the course can be taken in program p. A keyword hits
each (course, program) edge at most once. The per-program course count
column makes the matrix self-contained for scoring.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .catalog import Catalog, KnowledgeMap
from .topics import InterestTopic


class MatrixError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class TopicProgramMatrix:
    topic_ids: tuple[int, ...]
    program_ids: tuple[str, ...]
    counts: np.ndarray  # (topics, programs) int64
    courses_per_program: np.ndarray  # (programs,) int64

    def __post_init__(self) -> None:
        h, n = self.counts.shape
        if h != len(self.topic_ids) or n != len(self.program_ids):
            raise MatrixError("count matrix shape does not match labels")
        if len(set(self.topic_ids)) != h:
            raise MatrixError("duplicate topic ids")
        if len(set(self.program_ids)) != n:
            raise MatrixError("duplicate program ids")
        if np.any(self.counts < 0):
            raise MatrixError("negative count")
        if np.any(self.courses_per_program < 1):
            raise MatrixError("every program must have at least one course")
        self.counts.setflags(write=False)
        self.courses_per_program.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TopicProgramMatrix)
            and self.topic_ids == other.topic_ids
            and self.program_ids == other.program_ids
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.courses_per_program, other.courses_per_program)
        )

    @property
    def h(self) -> int:
        return len(self.topic_ids)

    @property
    def n(self) -> int:
        return len(self.program_ids)

    def topic_row(self, topic_id: int) -> np.ndarray:
        return self.counts[self.topic_ids.index(topic_id)]

    def topic_index(self, topic_id: int) -> int:
        try:
            return self.topic_ids.index(topic_id)
        except ValueError:
            raise MatrixError(f"unknown topic id {topic_id}") from None

    def program_index(self, program_id: str) -> int:
        try:
            return self.program_ids.index(program_id)
        except ValueError:
            raise MatrixError(f"unknown program id {program_id!r}") from None


def build_topic_program_matrix(
    catalog: Catalog,
    knowledge_map: KnowledgeMap,
    topics: Sequence[InterestTopic],
) -> TopicProgramMatrix:
    """Count keyword hits per (topic, program) over the knowledge map."""
    course_ids = [c.id for c in catalog.courses]
    course_pos = {cid: i for i, cid in enumerate(course_ids)}
    program_ids = [p.id for p in catalog.programs]
    program_pos = {pid: j for j, pid in enumerate(program_ids)}

    # course -> program incidence from the edge set
    rows, cols = [], []
    for cid, pid in knowledge_map.edges:
        rows.append(course_pos[cid])
        cols.append(program_pos[pid])
    incidence = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(catalog.m, catalog.n),
    )

    keyword_sets = [c.cleaned_keywords for c in catalog.courses]
    hits = np.zeros((len(topics), catalog.m), dtype=np.int64)
    for t, topic in enumerate(topics):
        for w in topic.keyword_strings():
            for i, kws in enumerate(keyword_sets):
                if w in kws:
                    hits[t, i] += 1
    counts = hits @ incidence.toarray()

    sizes = np.array([p.size for p in catalog.programs], dtype=np.int64)
    return TopicProgramMatrix(
        topic_ids=tuple(t.id for t in topics),
        program_ids=tuple(program_ids),
        counts=counts.astype(np.int64),
        courses_per_program=sizes,
    )


def matrix_to_csv(matrix: TopicProgramMatrix, path: str | Path | None = None) -> str:
    """Rows are programs, columns topic ids 1..h plus the |p| column."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["program", *[str(t) for t in matrix.topic_ids], "|p|"])
    for j, pid in enumerate(matrix.program_ids):
        writer.writerow(
            [pid, *matrix.counts[:, j].tolist(), int(matrix.courses_per_program[j])]
        )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def matrix_from_csv(source: str | Path) -> TopicProgramMatrix:
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise MatrixError(f"cannot read matrix file {source}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MatrixError(f"{source}: empty matrix file") from None
    if len(header) < 3 or header[0] != "program" or header[-1] != "|p|":
        raise MatrixError(f"{source}: expected header 'program,<topics...>,|p|'")
    try:
        topic_ids = tuple(int(t) for t in header[1:-1])
    except ValueError as exc:
        raise MatrixError(f"{source}: non-integer topic column: {exc}") from exc

    program_ids: list[str] = []
    count_rows: list[list[int]] = []
    sizes: list[int] = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise MatrixError(f"{source}: row width mismatch: {row[:2]}...")
        program_ids.append(row[0])
        try:
            values = [int(v) for v in row[1:]]
        except ValueError as exc:
            raise MatrixError(f"{source}: non-integer count in {row[0]!r}") from exc
        count_rows.append(values[:-1])
        sizes.append(values[-1])
    if not program_ids:
        raise MatrixError(f"{source}: no program rows")
    counts = np.array(count_rows, dtype=np.int64).T.copy()
    return TopicProgramMatrix(
        topic_ids=topic_ids,
        program_ids=tuple(program_ids),
        counts=counts,
        courses_per_program=np.array(sizes, dtype=np.int64),
    )


def case_study_matrix() -> TopicProgramMatrix:
    """The bundled 84-program, 30-topic case-study fixture."""
    from importlib import resources

    ref = resources.files("toprorec.data").joinpath("case_study_pis.csv")
    with resources.as_file(ref) as path:
        return matrix_from_csv(path)


def case_study_program_names() -> dict[str, str]:
    """Display names for the bundled case-study programs."""
    from importlib import resources

    text = resources.files("toprorec.data").joinpath("case_study_programs.csv").read_text()
    reader = csv.DictReader(io.StringIO(text))
    return {row["id"]: row["name"] for row in reader}
