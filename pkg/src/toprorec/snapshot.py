"""Ingest snapshots: a validated catalog plus its knowledge map, on disk.

The snapshot pins the keyword extraction so downstream mining and
scoring do not depend on re-running the cleaning pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .catalog import (
    Catalog,
    CatalogError,
    Course,
    KnowledgeMap,
    Program,
    build_knowledge_map,
)
from .cleaning import CleaningConfig

_FORMAT = "toprorec-snapshot"
_VERSION = 1


@dataclass(frozen=True)
class Snapshot:
    catalog: Catalog
    knowledge_map: KnowledgeMap


def build_snapshot(catalog: Catalog) -> Snapshot:
    return Snapshot(catalog=catalog, knowledge_map=build_knowledge_map(catalog))


def save_snapshot(
    snapshot: Snapshot,
    path: str | Path | None = None,
    cleaning: CleaningConfig | None = None,
) -> bytes:
    catalog = snapshot.catalog
    doc = {
        "format": _FORMAT,
        "version": _VERSION,
        "cleaning": cleaning.to_json_dict() if cleaning is not None else None,
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
            {
                "id": c.id,
                "name": c.name,
                "description": c.raw_description,
                "keywords": list(c.keywords),
            }
            for c in catalog.courses
        ],
    }
    data = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    if path is not None:
        Path(path).write_bytes(data)
    return data


def load_snapshot(path: str | Path) -> Snapshot:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogError(f"cannot parse snapshot {path}: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("format") != _FORMAT:
        raise CatalogError(f"{path}: not a {_FORMAT} file")
    if raw.get("version") != _VERSION:
        raise CatalogError(f"{path}: unsupported snapshot version {raw.get('version')}")

    courses = tuple(
        Course(
            id=c["id"],
            name=c.get("name", c["id"]),
            raw_description=c.get("description", ""),
            keywords=tuple(c.get("keywords", [])),
        )
        for c in raw["courses"]
    )
    programs = tuple(
        Program(
            id=p["id"],
            name=p.get("name", p["id"]),
            college=p.get("college", ""),
            course_ids=tuple(p["courses"]),
        )
        for p in raw["programs"]
    )
    catalog = Catalog(programs=programs, courses=courses)
    return build_snapshot(catalog)
