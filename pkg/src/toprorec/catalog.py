"""Program/course catalog: loading, validation, and the knowledge map.

The catalog couples study programs to the courses that can be taken in
them. The many-to-many course-program relation is exposed as an
immutable ``KnowledgeMap`` with forward (course -> programs) and reverse
(program -> courses) indices.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .cleaning import CleaningConfig, extract_keywords


class CatalogError(Exception):
    """Catalog file could not be parsed."""


class CatalogValidationError(CatalogError):
    """Catalog parsed but violates an integrity constraint."""


@dataclass(frozen=True)
class Course:
    id: str
    name: str
    raw_description: str
    keywords: tuple[str, ...]  # normalized, with multiplicity, for weighting

    @property
    def cleaned_keywords(self) -> frozenset[str]:
        return frozenset(self.keywords)


@dataclass(frozen=True)
class Program:
    id: str
    name: str
    college: str
    course_ids: tuple[str, ...]  # sorted, duplicate-free

    @property
    def size(self) -> int:
        """Number of courses that can be taken in the program (|p|)."""
        return len(self.course_ids)


@dataclass(frozen=True)
class Catalog:
    programs: tuple[Program, ...]
    courses: tuple[Course, ...]
    _program_index: dict = field(repr=False, compare=False, default_factory=dict)
    _course_index: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        self._program_index.update((p.id, p) for p in self.programs)
        self._course_index.update((c.id, c) for c in self.courses)

    @property
    def n(self) -> int:
        return len(self.programs)

    @property
    def m(self) -> int:
        return len(self.courses)

    def program(self, program_id: str) -> Program:
        return self._program_index[program_id]

    def course(self, course_id: str) -> Course:
        return self._course_index[course_id]


@dataclass(frozen=True)
class KnowledgeMap:
    edges: frozenset[tuple[str, str]]  # (course_id, program_id)
    course_to_programs: dict[str, tuple[str, ...]]
    program_to_courses: dict[str, tuple[str, ...]]
    n: int
    m: int

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def linked_courses(self) -> int:
        """Courses that appear in at least one program."""
        return len(self.course_to_programs)


def _validate_and_build(
    program_rows: Iterable[dict],
    course_rows: Iterable[dict],
    cleaning: CleaningConfig,
) -> Catalog:
    courses = []
    seen_courses: set[str] = set()
    for row in course_rows:
        cid = str(row.get("id", "")).strip()
        if not cid:
            raise CatalogValidationError("course with empty id")
        if cid in seen_courses:
            raise CatalogValidationError(f"duplicate course id {cid!r}")
        seen_courses.add(cid)
        description = str(row.get("description", "") or "")
        courses.append(
            Course(
                id=cid,
                name=str(row.get("name", "") or cid),
                raw_description=description,
                keywords=tuple(extract_keywords(description, cleaning)),
            )
        )

    programs = []
    seen_programs: set[str] = set()
    for row in program_rows:
        pid = str(row.get("id", "")).strip()
        if not pid:
            raise CatalogValidationError("program with empty id")
        if pid in seen_programs:
            raise CatalogValidationError(f"duplicate program id {pid!r}")
        seen_programs.add(pid)
        course_ids = tuple(sorted(set(str(c) for c in row.get("courses", []))))
        if not course_ids:
            raise CatalogValidationError(f"program {pid!r} has no courses")
        for cid in course_ids:
            if cid not in seen_courses:
                raise CatalogValidationError(
                    f"program {pid!r} references unknown course {cid!r}"
                )
        programs.append(
            Program(
                id=pid,
                name=str(row.get("name", "") or pid),
                college=str(row.get("college", "") or ""),
                course_ids=course_ids,
            )
        )
    if not programs:
        raise CatalogValidationError("catalog contains no programs")

    programs.sort(key=lambda p: p.id)
    courses.sort(key=lambda c: c.id)
    return Catalog(programs=tuple(programs), courses=tuple(courses))


def _load_json(path: Path, cleaning: CleaningConfig) -> Catalog:
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogError(f"cannot parse catalog {path}: {exc}") from exc
    if not isinstance(raw, dict) or "programs" not in raw or "courses" not in raw:
        raise CatalogError(f"{path}: expected object with 'programs' and 'courses'")
    return _validate_and_build(raw["programs"], raw["courses"], cleaning)


def _read_csv(path: Path) -> list[dict]:
    try:
        with path.open(newline="") as f:
            return list(csv.DictReader(f))
    except OSError as exc:
        raise CatalogError(f"cannot read {path}: {exc}") from exc


def _load_csv(directory: Path, cleaning: CleaningConfig) -> Catalog:
    programs = _read_csv(directory / "programs.csv")
    courses = _read_csv(directory / "courses.csv")
    edges = _read_csv(directory / "edges.csv")
    by_program: dict[str, list[str]] = {}
    for row in edges:
        cid = (row.get("course_id") or "").strip()
        pid = (row.get("program_id") or "").strip()
        if not cid or not pid:
            raise CatalogError(f"{directory / 'edges.csv'}: malformed edge row {row}")
        by_program.setdefault(pid, []).append(cid)
    program_rows = [
        {**row, "courses": by_program.get((row.get("id") or "").strip(), [])}
        for row in programs
    ]
    return _validate_and_build(program_rows, courses, cleaning)


def load_catalog(
    source: str | Path,
    format: str = "json",
    cleaning: CleaningConfig | None = None,
) -> Catalog:
    """Load and validate a catalog file (JSON) or directory (CSV triple)."""
    cleaning = cleaning if cleaning is not None else CleaningConfig()
    path = Path(source)
    if format == "json":
        return _load_json(path, cleaning)
    if format == "csv":
        return _load_csv(path, cleaning)
    raise ValueError(f"unknown catalog format {format!r}")


def save_catalog(catalog: Catalog, path: str | Path | None = None) -> bytes:
    """Serialize to the JSON catalog schema; deterministic byte output."""
    doc = {
        "programs": [
            {
                "id": p.id,
                "name": p.name,
                "college": p.college,
                "courses": list(p.course_ids),
            }
            for p in catalog.programs
        ],
        "courses": [
            {"id": c.id, "name": c.name, "description": c.raw_description}
            for c in catalog.courses
        ],
    }
    data = json.dumps(doc, sort_keys=True, indent=1).encode()
    if path is not None:
        Path(path).write_bytes(data)
    return data


def build_knowledge_map(catalog: Catalog) -> KnowledgeMap:
    edges = set()
    forward: dict[str, list[str]] = {}
    reverse: dict[str, tuple[str, ...]] = {}
    for program in catalog.programs:
        reverse[program.id] = program.course_ids
        for cid in program.course_ids:
            edges.add((cid, program.id))
            forward.setdefault(cid, []).append(program.id)
    return KnowledgeMap(
        edges=frozenset(edges),
        course_to_programs={c: tuple(sorted(ps)) for c, ps in sorted(forward.items())},
        program_to_courses=reverse,
        n=catalog.n,
        m=catalog.m,
    )
