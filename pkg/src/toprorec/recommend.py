"""Program ranking from a topic selection.

Scores per program: PIS (total keyword hits for the selected topics),
R-PIS (PIS divided by the program's course count, removing the
large-program advantage), and SCORE (R-PIS rescaled so the top ranked
program reads 100). Programs with no interest overlap are never
recommended. Ranking ties break on ascending program id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .matrix import TopicProgramMatrix


class RecommendError(Exception):
    pass


class EmptySelectionError(RecommendError):
    pass


class UnknownTopicError(RecommendError):
    pass


class SelectionTooLargeError(RecommendError):
    pass


class UnknownProgramError(RecommendError):
    pass


@dataclass(frozen=True)
class RankedProgram:
    program: str
    pis: int
    rpis: float
    score: float


@dataclass(frozen=True)
class Recommendation:
    selection: tuple[int, ...]
    entries: tuple[RankedProgram, ...]

    def program_ids(self) -> tuple[str, ...]:
        return tuple(e.program for e in self.entries)

    def to_json_dict(self) -> dict:
        return {
            "selection": list(self.selection),
            "entries": [
                {"program": e.program, "pis": e.pis, "rpis": e.rpis, "score": e.score}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json_dict(cls, raw: Mapping) -> "Recommendation":
        return cls(
            selection=tuple(int(t) for t in raw["selection"]),
            entries=tuple(
                RankedProgram(
                    program=str(e["program"]),
                    pis=int(e["pis"]),
                    rpis=float(e["rpis"]),
                    score=float(e["score"]),
                )
                for e in raw["entries"]
            ),
        )


def validate_selection(
    topic_ids: Sequence[int],
    matrix: TopicProgramMatrix,
    phi: int | None = None,
) -> tuple[int, ...]:
    """Deduplicate (ordered-set semantics) and bounds-check a selection."""
    selection = tuple(dict.fromkeys(int(t) for t in topic_ids))
    if not selection:
        raise EmptySelectionError("at least one interest topic must be selected")
    if phi is not None and len(selection) > phi:
        raise SelectionTooLargeError(
            f"{len(selection)} topics selected, at most {phi} allowed"
        )
    known = set(matrix.topic_ids)
    unknown = [t for t in selection if t not in known]
    if unknown:
        raise UnknownTopicError(f"unknown topic ids: {unknown}")
    return selection


def recommend(
    topic_ids: Sequence[int],
    matrix: TopicProgramMatrix,
    tau: int,
    phi: int | None = None,
) -> Recommendation:
    """Rank at most tau programs by R-PIS for the selected topics."""
    if tau < 1:
        raise RecommendError(f"tau must be >= 1, got {tau}")
    selection = validate_selection(topic_ids, matrix, phi)

    rows = [matrix.topic_index(t) for t in selection]
    pis = [0] * matrix.n
    for r in rows:
        row = matrix.counts[r]
        for j in range(matrix.n):
            pis[j] += int(row[j])
    sizes = matrix.courses_per_program
    rpis = [pis[j] / int(sizes[j]) for j in range(matrix.n)]

    order = sorted(range(matrix.n), key=lambda j: (-rpis[j], matrix.program_ids[j]))
    picked = []
    for j in order:
        if len(picked) == tau or rpis[j] == 0.0:
            break
        picked.append(j)
    if not picked:
        return Recommendation(selection=selection, entries=())

    top = rpis[picked[0]]
    entries = tuple(
        RankedProgram(
            program=matrix.program_ids[j],
            pis=pis[j],
            rpis=rpis[j],
            score=100.0 * rpis[j] / top,
        )
        for j in picked
    )
    return Recommendation(selection=selection, entries=entries)


@dataclass(frozen=True)
class TopicScoreTable:
    """Per-(topic, program) influence scores over a comparison set.

    ``cells[i][j]`` is topic ``topics[i]`` against program ``programs[j]``:
    the program's per-course hit rate for that topic, normalized by the
    largest per-course total in the comparison set. ``aggregate[j]`` sums a
    program's cells, so the best program in the set reads 1.0.
    """

    topics: tuple[int, ...]
    programs: tuple[str, ...]
    cells: tuple[tuple[float, ...], ...]
    aggregate: tuple[float, ...]

    def cell(self, topic_id: int, program_id: str) -> float:
        return self.cells[self.topics.index(topic_id)][self.programs.index(program_id)]

    def aggregate_for(self, program_id: str) -> float:
        return self.aggregate[self.programs.index(program_id)]

    def to_json_dict(self) -> dict:
        return {
            "topics": list(self.topics),
            "programs": list(self.programs),
            "cells": [list(row) for row in self.cells],
            "aggregate": list(self.aggregate),
        }


def topic_scores(
    topic_ids: Sequence[int],
    matrix: TopicProgramMatrix,
    programs: Sequence[str],
) -> TopicScoreTable:
    """Explain how much each selected topic contributed to each program."""
    selection = validate_selection(topic_ids, matrix)
    if not programs:
        raise UnknownProgramError("no programs given")
    known = set(matrix.program_ids)
    unknown = [p for p in programs if p not in known]
    if unknown:
        raise UnknownProgramError(f"unknown program ids: {unknown}")
    cols = [matrix.program_index(p) for p in programs]
    rows = [matrix.topic_index(t) for t in selection]

    raw = [
        [int(matrix.counts[r][j]) / int(matrix.courses_per_program[j]) for j in cols]
        for r in rows
    ]
    totals = [sum(raw[i][k] for i in range(len(rows))) for k in range(len(cols))]
    denom = max(totals)
    if denom == 0.0:
        cells = tuple(tuple(0.0 for _ in cols) for _ in rows)
        aggregate = tuple(0.0 for _ in cols)
    else:
        cells = tuple(tuple(v / denom for v in row) for row in raw)
        aggregate = tuple(t / denom for t in totals)
    return TopicScoreTable(
        topics=selection,
        programs=tuple(programs),
        cells=cells,
        aggregate=aggregate,
    )
