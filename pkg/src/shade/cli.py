"""Operator command line: ingest dumps, manage annotators, serve, report."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import ingest as ingest_mod
from .annostore import AnnotationStore, DuplicateAnnotator
from .ingest import FetchConfig, IngestError, NewEntityPage, Skipped


def _load_fetch_config(config_path: str | None) -> FetchConfig:
    config = FetchConfig()
    if config_path:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
        for key in ("batch_size", "delay", "attempts", "backoff", "timeout"):
            if key in raw:
                setattr(config, key, raw[key])
    return config


@click.group()
def main() -> None:
    """Entity-annotation platform for MediaWiki-based wikis."""


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), help="Export XML file to ingest.")
@click.option("--fetch", is_flag=True, help="Fetch the export from an endpoint instead.")
@click.option("--endpoint", help="Export endpoint URL (with --fetch).")
@click.option("--titles", "titles_path", type=click.Path(exists=True, dir_okay=False), help="File with one title per line (with --fetch).")
@click.option("--db", "db_path", required=True, envvar="SHADE_DB", help="Store database path.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON file with batch_size/delay/attempts/backoff/timeout.")
def ingest(input_path, fetch, endpoint, titles_path, db_path, config_path) -> None:
    """Parse or fetch an export and build entity pages with candidate lists."""
    if fetch:
        if not endpoint or not titles_path:
            raise click.UsageError("--fetch requires --endpoint and --titles")
        titles = [
            line.strip()
            for line in Path(titles_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        try:
            xml = ingest_mod.fetch_export(titles, endpoint, _load_fetch_config(config_path))
        except IngestError as exc:
            click.echo(f"fetch failed: {exc}", err=True)
            sys.exit(1)
    elif input_path:
        xml = Path(input_path).read_bytes()
    else:
        raise click.UsageError("either --input or --fetch is required")

    try:
        articles = ingest_mod.parse_export_xml(xml)
    except IngestError as exc:
        click.echo(f"ingest failed: {exc}", err=True)
        sys.exit(1)

    counts = {"ingested": 0, "redirect": 0, "empty": 0, "existing": 0}
    with AnnotationStore(db_path) as store:
        for article in articles:
            built = ingest_mod.build_entity_page(article)
            if isinstance(built, Skipped):
                counts[built.reason] += 1
                continue
            assert isinstance(built, NewEntityPage)
            inserted = store.insert_entity(
                built.entity_name,
                built.first_paragraph,
                built.links_list,
                built.noun_list,
            )
            counts["ingested" if inserted is not None else "existing"] += 1

    line = (
        f"ingested={counts['ingested']}"
        f" skipped_redirect={counts['redirect']}"
        f" skipped_empty={counts['empty']}"
    )
    if counts["existing"]:
        line += f" skipped_existing={counts['existing']}"
    click.echo(line)


@main.command()
@click.option("--db", "db_path", required=True, envvar="SHADE_DB")
@click.option("--addr", default="127.0.0.1:8080", show_default=True, help="host:port to listen on.")
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False), help="Directory with the built web UI, served at /.")
def serve(db_path, addr, static_dir) -> None:
    """Run the HTTP JSON API (and optionally the web UI)."""
    import uvicorn

    from .service import create_app

    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise click.UsageError("--addr must look like host:port")
    store = AnnotationStore(db_path)
    try:
        uvicorn.run(create_app(store, static_dir=static_dir), host=host, port=int(port), log_level="info")
    finally:
        store.close()


@main.group()
def annotator() -> None:
    """Manage annotator accounts."""


@annotator.command("add")
@click.argument("name")
@click.option("--db", "db_path", required=True, envvar="SHADE_DB")
def annotator_add(name, db_path) -> None:
    """Register an annotator and print their access token."""
    with AnnotationStore(db_path) as store:
        try:
            created = store.add_annotator(name)
        except DuplicateAnnotator:
            click.echo(f"annotator already exists: {name}", err=True)
            sys.exit(1)
    click.echo(f"name={created.name} token={created.token}")


@main.command()
@click.option("--db", "db_path", required=True, envvar="SHADE_DB")
def stats(db_path) -> None:
    """Print the annotation breakdown, skip count and first-link agreement."""
    with AnnotationStore(db_path) as store:
        breakdown = store.breakdown_by_source()
        skipped = store.skipped_count()
        agreement = store.first_link_agreement()
    width = max(len(key) for key in breakdown)
    for key in ("LINKS", "NOUN_PHRASES", "MANUAL", "total"):
        click.echo(f"{key:<{width}} {breakdown[key]}")
    click.echo(f"skipped {skipped}")
    click.echo(f"first_link_agreement {'n/a' if agreement is None else f'{agreement:.3f}'}")


@main.command()
@click.option("--db", "db_path", required=True, envvar="SHADE_DB")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def export(db_path, out_path) -> None:
    """Write all annotations to a TSV file."""
    with AnnotationStore(db_path) as store:
        count = store.export_annotations(out_path)
    click.echo(f"rows={count}")


if __name__ == "__main__":
    main()
