"""Batch command-line entry points.

Flag names mirror the engine parameters (h, phi, gamma, tau) so report
files can be read against the configuration that produced them.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .catalog import CatalogError, load_catalog
from .cleaning import CleaningConfig
from .evaluate import (
    EvaluationError,
    RecommendationMatrix,
    grid_to_csv,
    personalization,
    reachability_grid,
)
from .matrix import (
    MatrixError,
    build_topic_program_matrix,
    matrix_from_csv,
    matrix_to_csv,
)
from .recommend import RecommendError, recommend, topic_scores
from .snapshot import build_snapshot, load_snapshot, save_snapshot
from .topics import TopicError, TopicModelConfig, export_topics, import_topics, mine_topics

_ERRORS = (CatalogError, TopicError, MatrixError, RecommendError, EvaluationError)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Interest-topic based study program recommender."""


@main.command()
@click.option("--catalog", "catalog_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--clean-config", type=click.Path(exists=True), default=None)
@click.option("--out", required=True, type=click.Path())
def ingest(catalog_path: str, fmt: str, clean_config: str | None, out: str) -> None:
    """Validate a catalog and write a snapshot with the knowledge map."""
    try:
        cleaning = CleaningConfig.from_json(clean_config) if clean_config else CleaningConfig()
        catalog = load_catalog(catalog_path, format=fmt, cleaning=cleaning)
        snapshot = build_snapshot(catalog)
        save_snapshot(snapshot, out, cleaning=cleaning)
    except _ERRORS as exc:
        _fail(str(exc))
    kmap = snapshot.knowledge_map
    click.echo(
        f"ingested {catalog.n} programs, {catalog.m} courses, "
        f"{kmap.edge_count} knowledge-map edges -> {out}"
    )


@main.command()
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True))
@click.option("--h", "h", type=int, default=30, show_default=True)
@click.option("--gamma", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--clusterer", default="spherical-kmeans", show_default=True)
@click.option("--out", required=True, type=click.Path())
def mine(snapshot_path: str, h: int, gamma: int, seed: int, clusterer: str, out: str) -> None:
    """Mine interest topics from a snapshot and write a topics file."""
    try:
        snapshot = load_snapshot(snapshot_path)
        config = TopicModelConfig(h=h, gamma=gamma, seed=seed, clusterer=clusterer)
        topics = mine_topics(snapshot.catalog, config)
        Path(out).write_bytes(export_topics(topics, gamma=gamma))
    except _ERRORS as exc:
        _fail(str(exc))
    click.echo(f"mined {len(topics)} topics (gamma={gamma}, seed={seed}) -> {out}")


def _load_matrix_for_cli(
    snapshot_path: str | None, topics_path: str | None, matrix_path: str | None
):
    """Returns (matrix, program display names)."""
    if matrix_path:
        return matrix_from_csv(matrix_path), {}
    if not (snapshot_path and topics_path):
        raise MatrixError("need --matrix, or --snapshot together with --topics")
    snapshot = load_snapshot(snapshot_path)
    topics = import_topics(topics_path)
    matrix = build_topic_program_matrix(snapshot.catalog, snapshot.knowledge_map, topics)
    names = {p.id: p.name for p in snapshot.catalog.programs}
    return matrix, names


@main.command("recommend")
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), default=None)
@click.option("--topics", "topics_path", type=click.Path(exists=True), default=None)
@click.option("--matrix", "matrix_path", type=click.Path(exists=True), default=None)
@click.option("--select", required=True, help="comma-separated topic ids, e.g. 2,19,21")
@click.option("--tau", type=int, default=7, show_default=True)
@click.option("--explain", is_flag=True, help="also print per-topic influence scores")
@click.option("--json", "json_out", type=click.Path(), default=None)
def recommend_cmd(
    snapshot_path: str | None,
    topics_path: str | None,
    matrix_path: str | None,
    select: str,
    tau: int,
    explain: bool,
    json_out: str | None,
) -> None:
    """Rank programs for a topic selection."""
    try:
        selection = [int(t) for t in select.split(",") if t.strip()]
    except ValueError:
        _fail(f"--select must be comma-separated integers, got {select!r}")
    try:
        matrix, names = _load_matrix_for_cli(snapshot_path, topics_path, matrix_path)
        rec = recommend(selection, matrix, tau)
    except _ERRORS as exc:
        _fail(str(exc))

    if not rec.entries:
        click.echo("no matching programs for this selection")
    else:
        sizes = {
            pid: int(matrix.courses_per_program[j])
            for j, pid in enumerate(matrix.program_ids)
        }
        click.echo(f"{'Rank':>4}  {'Program':<42} {'#Courses':>8} {'PIS':>6} {'R-PIS':>7} {'SCORE':>6}")
        for rank, e in enumerate(rec.entries, start=1):
            label = names.get(e.program, e.program)
            click.echo(
                f"{rank:>4}  {label:<42} {sizes[e.program]:>8} {e.pis:>6} "
                f"{e.rpis:>7.3f} {e.score:>6.1f}"
            )

    doc = rec.to_json_dict()
    if explain and rec.entries:
        table = topic_scores(rec.selection, matrix, rec.program_ids())
        doc["topic_scores"] = table.to_json_dict()
        click.echo("\nTopic influence (0..1, per program):")
        header = "  ".join(f"t{t:<4}" for t in table.topics)
        click.echo(f"{'Program':<42} {header}")
        for j, pid in enumerate(table.programs):
            vals = "  ".join(f"{table.cells[i][j]:.3f}" for i in range(len(table.topics)))
            click.echo(f"{names.get(pid, pid):<42} {vals}")
    if json_out:
        Path(json_out).write_text(json.dumps(doc, indent=1, sort_keys=True))
        click.echo(f"wrote {json_out}")


def _parse_grid_token(token: str) -> tuple[str, list[int]]:
    if "=" not in token:
        raise EvaluationError(f"grid token {token!r} must look like name=values")
    name, spec = token.split("=", 1)
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(v) for v in spec.split(",") if v.strip()]
    if not values:
        raise EvaluationError(f"grid token {token!r} has no values")
    return name.strip(), values


@main.command()
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), default=None)
@click.option("--matrix", "matrix_path", type=click.Path(exists=True), default=None)
@click.option(
    "--grid",
    nargs=4,
    required=True,
    help="four tokens: h=... phi=... gamma=... tau=... (values a,b,c or lo..hi)",
)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--clusterer", default="spherical-kmeans", show_default=True)
@click.option("--up-to", "up_to", is_flag=True, help="union selection sizes 1..phi")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path())
def evaluate(
    snapshot_path: str | None,
    matrix_path: str | None,
    grid: tuple[str, str, str, str],
    seed: int,
    clusterer: str,
    up_to: bool,
    workers: int,
    out: str,
) -> None:
    """Program reachability over a parameter grid; writes a CSV report."""
    try:
        params: dict[str, list[int]] = {}
        for token in grid:
            name, values = _parse_grid_token(token)
            params[name] = values
        missing = {"h", "phi", "gamma", "tau"} - set(params)
        if missing:
            raise EvaluationError(f"grid is missing {sorted(missing)}")

        if matrix_path:
            matrix = matrix_from_csv(matrix_path)
            bad = [h for h in params["h"] if h != matrix.h]
            if bad:
                raise EvaluationError(
                    f"grid h values {bad} do not match the {matrix.h}-topic matrix; "
                    "re-mining needs --snapshot"
                )
            provider = matrix
        else:
            if not snapshot_path:
                raise EvaluationError("need --snapshot or --matrix")
            snapshot = load_snapshot(snapshot_path)
            cache: dict[tuple[int, int], object] = {}

            def provider(h: int, gamma: int):
                key = (h, gamma)
                if key not in cache:
                    config = TopicModelConfig(h=h, gamma=gamma, seed=seed, clusterer=clusterer)
                    topics = mine_topics(snapshot.catalog, config)
                    cache[key] = build_topic_program_matrix(
                        snapshot.catalog, snapshot.knowledge_map, topics
                    )
                return cache[key]

        results = reachability_grid(
            provider,
            params["h"],
            params["phi"],
            params["gamma"],
            params["tau"],
            up_to=up_to,
            workers=workers,
        )
        grid_to_csv(results, out)
    except _ERRORS as exc:
        _fail(str(exc))
    click.echo(f"evaluated {len(results)} parameter points -> {out}")


@main.command()
@click.option("--sessions", "sessions_path", required=True, type=click.Path(exists=True))
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None,
              help="catalog JSON for college-level aggregation")
@click.option("--out", required=True, type=click.Path())
def metrics(sessions_path: str, catalog_path: str | None, out: str) -> None:
    """Personalization and coverage metrics from a binary session matrix."""
    try:
        mat = RecommendationMatrix.from_csv(sessions_path)
        program_result = personalization(mat)
        report = {
            "sessions": int(mat.rows.shape[0]),
            "programs": len(mat.columns),
            "personalization": program_result.personalization,
            "mean_similarity": program_result.mean_similarity,
            "pairs": program_result.pairs,
            "program_counts": {
                c: int(mat.rows[:, j].sum()) for j, c in enumerate(mat.columns)
            },
            "programs_recommended": int((mat.rows.sum(axis=0) > 0).sum()),
            "unique_recommendation_sets": len({tuple(r) for r in mat.rows.tolist()}),
        }
        if catalog_path:
            catalog = load_catalog(catalog_path)
            college_of = {p.id: p.college for p in catalog.programs}
            missing = [c for c in mat.columns if c not in college_of]
            if missing:
                raise EvaluationError(f"programs not in catalog: {missing[:5]}")
            college = mat.grouped(college_of)
            college_result = personalization(college)
            report["college_personalization"] = college_result.personalization
            report["college_counts"] = {
                c: int(college.rows[:, j].sum()) for j, c in enumerate(college.columns)
            }
            report["unique_college_sets"] = len(
                {tuple(r) for r in college.rows.tolist()}
            )
    except _ERRORS as exc:
        _fail(str(exc))
    Path(out).write_text(json.dumps(report, indent=1, sort_keys=True))
    click.echo(
        f"personalization {report['personalization']:.4f} over "
        f"{report['sessions']} sessions -> {out}"
    )


@main.command()
@click.option("--bind", default="127.0.0.1:8000", show_default=True, envvar="TOPROREC_BIND")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None,
              envvar="TOPROREC_CATALOG")
@click.option("--topics", "topics_path", type=click.Path(exists=True), default=None,
              envvar="TOPROREC_TOPICS")
@click.option("--matrix", "matrix_path", type=click.Path(exists=True), default=None,
              envvar="TOPROREC_MATRIX")
@click.option("--phi", type=int, default=8, show_default=True, envvar="TOPROREC_PHI")
@click.option("--tau", type=int, default=7, show_default=True, envvar="TOPROREC_TAU")
@click.option("--admin-token", default=None, envvar="TOPROREC_ADMIN_TOKEN")
@click.option("--ui", "ui_dir", type=click.Path(), default=None, envvar="TOPROREC_UI")
@click.option("--session-ttl", type=float, default=1800.0, show_default=True,
              envvar="TOPROREC_SESSION_TTL")
def serve(
    bind: str,
    catalog_path: str | None,
    topics_path: str | None,
    matrix_path: str | None,
    phi: int,
    tau: int,
    admin_token: str | None,
    ui_dir: str | None,
    session_ttl: float,
) -> None:
    """Serve the recommendation API (and the UI bundle if present)."""
    import uvicorn

    from .service import EngineSnapshot, create_app

    engine = None
    try:
        if matrix_path:
            engine = EngineSnapshot.from_matrix_file(matrix_path, topics_path)
        elif catalog_path and topics_path:
            engine = EngineSnapshot.from_catalog_files(catalog_path, topics_path)
    except _ERRORS as exc:
        _fail(str(exc))
    app = create_app(
        engine=engine,
        phi=phi,
        tau=tau,
        admin_token=admin_token,
        session_ttl=session_ttl,
        ui_dir=ui_dir,
    )
    host, _, port = bind.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
