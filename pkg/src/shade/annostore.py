"""Persistence for entities, annotators, assignments and annotations.

A single-file SQLite database holds the whole annotation state. Every
mutation runs inside a savepoint under one process-wide lock, so writes are
serialized and an entity can never be claimed by two annotators at once.
Reads share the same connection and lock.

Label provenance is ranked by a fixed weight scale: 1 for labels picked from
the links list, 2 from the noun-phrase list, 3 typed in manually.
"""

from __future__ import annotations

import json
import secrets
import sqlite3
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import IO, Iterator


class Source(str, Enum):
    """Where a candidate label came from; doubles as the workflow stage."""

    LINKS = "LINKS"
    NOUN_PHRASES = "NOUN_PHRASES"
    MANUAL = "MANUAL"


WEIGHT_BY_SOURCE = {
    Source.LINKS: 1,
    Source.NOUN_PHRASES: 2,
    Source.MANUAL: 3,
}


class StoreError(Exception):
    """Base class for annotation-store failures."""


class UnknownAnnotator(StoreError):
    pass


class UnknownEntity(StoreError):
    pass


class DuplicateAnnotator(StoreError):
    pass


class NotAssignee(StoreError):
    pass


class AlreadyCompleted(StoreError):
    pass


class AlreadySkipped(StoreError):
    pass


class EmptyLabel(StoreError):
    pass


class IoError(StoreError):
    """Export destination could not be written."""


@dataclass(frozen=True)
class Annotator:
    id: int
    name: str
    token: str


@dataclass(frozen=True)
class EntityPage:
    """One annotation unit, mirroring the entity_page table."""

    id: int
    entity_name: str
    first_paragraph: str
    links_list: list[str] = field(default_factory=list)
    noun_list: list[str] = field(default_factory=list)
    assignee: int | None = None
    completed: bool = False
    skipped: bool = False


@dataclass(frozen=True)
class Annotation:
    entity_id: int
    annotator_id: int
    label_text: str
    source: Source
    weight: int
    created_at: str


_SCHEMA = """
CREATE TABLE IF NOT EXISTS entity_page (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    entity_name TEXT NOT NULL UNIQUE,
    first_paragraph TEXT NOT NULL,
    links_list TEXT NOT NULL,
    noun_list TEXT NOT NULL,
    assignee INTEGER REFERENCES annotator(id),
    completed INTEGER NOT NULL DEFAULT 0,
    skipped INTEGER NOT NULL DEFAULT 0,
    CHECK (NOT (completed = 1 AND skipped = 1)),
    CHECK (assignee IS NOT NULL OR (completed = 0 AND skipped = 0))
);
CREATE TABLE IF NOT EXISTS annotator (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL UNIQUE,
    token TEXT NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS annotation (
    entity_id INTEGER PRIMARY KEY REFERENCES entity_page(id),
    annotator_id INTEGER NOT NULL REFERENCES annotator(id),
    label_text TEXT NOT NULL,
    source TEXT NOT NULL CHECK (source IN ('LINKS', 'NOUN_PHRASES', 'MANUAL')),
    weight INTEGER NOT NULL,
    created_at TEXT NOT NULL,
    CHECK ((source = 'LINKS' AND weight = 1)
        OR (source = 'NOUN_PHRASES' AND weight = 2)
        OR (source = 'MANUAL' AND weight = 3))
);
CREATE INDEX IF NOT EXISTS idx_entity_pending
    ON entity_page(assignee, completed, skipped);
"""

EXPORT_HEADER = "entity_name\tlabel\tsource\tweight\tannotator\tcreated_at"


def _tsv_field(value: str) -> str:
    """Tabs and line breaks inside a field become single spaces."""
    return value.replace("\t", " ").replace("\n", " ").replace("\r", " ")


class AnnotationStore:
    """SQLite-backed store answering assignment and statistics queries."""

    def __init__(self, path: str | Path) -> None:
        self._path = str(path)
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(
            self._path, check_same_thread=False, isolation_level=None
        )
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA synchronous=NORMAL")
        self._conn.execute("PRAGMA foreign_keys=ON")
        self._conn.executescript(_SCHEMA)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def __enter__(self) -> "AnnotationStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    @contextmanager
    def _tx(self) -> Iterator[sqlite3.Connection]:
        # Savepoints instead of BEGIN so transactions nest cleanly when a
        # caller wraps several store calls in an outer savepoint.
        with self._lock:
            self._conn.execute("SAVEPOINT shade_tx")
            try:
                yield self._conn
            except BaseException:
                self._conn.execute("ROLLBACK TO shade_tx")
                self._conn.execute("RELEASE shade_tx")
                raise
            self._conn.execute("RELEASE shade_tx")

    # -- annotators ---------------------------------------------------------

    def add_annotator(self, name: str) -> Annotator:
        token = secrets.token_hex(16)
        with self._tx() as conn:
            try:
                cur = conn.execute(
                    "INSERT INTO annotator (name, token) VALUES (?, ?)", (name, token)
                )
            except sqlite3.IntegrityError:
                raise DuplicateAnnotator(name) from None
            return Annotator(id=cur.lastrowid, name=name, token=token)

    def annotator_by_name(self, name: str) -> Annotator | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, name, token FROM annotator WHERE name = ?", (name,)
            ).fetchone()
        return Annotator(**row) if row else None

    def annotator_by_token(self, token: str) -> Annotator | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, name, token FROM annotator WHERE token = ?", (token,)
            ).fetchone()
        return Annotator(**row) if row else None

    def _require_annotator(self, annotator_id: int) -> None:
        row = self._conn.execute(
            "SELECT id FROM annotator WHERE id = ?", (annotator_id,)
        ).fetchone()
        if row is None:
            raise UnknownAnnotator(annotator_id)

    # -- entities -----------------------------------------------------------

    @staticmethod
    def _page(row: sqlite3.Row) -> EntityPage:
        return EntityPage(
            id=row["id"],
            entity_name=row["entity_name"],
            first_paragraph=row["first_paragraph"],
            links_list=json.loads(row["links_list"]),
            noun_list=json.loads(row["noun_list"]),
            assignee=row["assignee"],
            completed=bool(row["completed"]),
            skipped=bool(row["skipped"]),
        )

    def insert_entity(
        self,
        entity_name: str,
        first_paragraph: str,
        links_list: list[str],
        noun_list: list[str],
    ) -> int | None:
        """Insert one entity; returns its id, or None when the name already
        exists (re-ingesting a dump must not duplicate entities)."""
        with self._tx() as conn:
            cur = conn.execute(
                "INSERT OR IGNORE INTO entity_page"
                " (entity_name, first_paragraph, links_list, noun_list)"
                " VALUES (?, ?, ?, ?)",
                (
                    entity_name,
                    first_paragraph,
                    json.dumps(links_list, ensure_ascii=False),
                    json.dumps(noun_list, ensure_ascii=False),
                ),
            )
            return cur.lastrowid if cur.rowcount == 1 else None

    def get_entity(self, entity_id: int) -> EntityPage | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM entity_page WHERE id = ?", (entity_id,)
            ).fetchone()
        return self._page(row) if row else None

    def entities(self) -> list[EntityPage]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM entity_page ORDER BY id"
            ).fetchall()
        return [self._page(row) for row in rows]

    def entity_count(self) -> int:
        with self._lock:
            return self._conn.execute("SELECT COUNT(*) FROM entity_page").fetchone()[0]

    # -- assignment ---------------------------------------------------------

    def assign_next(self, annotator_id: int) -> EntityPage | None:
        """The annotator's pending entity, or an atomically claimed fresh one.

        The unassigned entity with the lowest id is claimed; None when the
        annotator has no pending entity and nothing is left to assign.
        """
        with self._tx() as conn:
            self._require_annotator(annotator_id)
            row = conn.execute(
                "SELECT * FROM entity_page"
                " WHERE assignee = ? AND completed = 0 AND skipped = 0"
                " ORDER BY id LIMIT 1",
                (annotator_id,),
            ).fetchone()
            if row is not None:
                return self._page(row)
            row = conn.execute(
                "SELECT * FROM entity_page WHERE assignee IS NULL ORDER BY id LIMIT 1"
            ).fetchone()
            if row is None:
                return None
            conn.execute(
                "UPDATE entity_page SET assignee = ? WHERE id = ? AND assignee IS NULL",
                (annotator_id, row["id"]),
            )
            claimed = conn.execute(
                "SELECT * FROM entity_page WHERE id = ?", (row["id"],)
            ).fetchone()
            return self._page(claimed)

    def current_task(self, annotator_id: int) -> EntityPage | None:
        """Lowest-id pending entity of the annotator; falls through to
        assign_next when none is pending. Read-only when a task exists, so
        repeated calls return the same entity."""
        with self._tx() as conn:
            self._require_annotator(annotator_id)
            row = conn.execute(
                "SELECT * FROM entity_page"
                " WHERE assignee = ? AND completed = 0 AND skipped = 0"
                " ORDER BY id LIMIT 1",
                (annotator_id,),
            ).fetchone()
            if row is not None:
                return self._page(row)
            return self.assign_next(annotator_id)

    # -- annotation ---------------------------------------------------------

    def _pending_entity(self, conn: sqlite3.Connection, entity_id: int, annotator_id: int) -> sqlite3.Row:
        row = conn.execute(
            "SELECT * FROM entity_page WHERE id = ?", (entity_id,)
        ).fetchone()
        if row is None:
            raise UnknownEntity(entity_id)
        if row["completed"]:
            raise AlreadyCompleted(entity_id)
        if row["skipped"]:
            raise AlreadySkipped(entity_id)
        if row["assignee"] != annotator_id:
            raise NotAssignee(entity_id)
        return row

    def save_annotation(
        self,
        entity_id: int,
        annotator_id: int,
        label_text: str,
        source: Source,
    ) -> Annotation:
        """Record the single annotation of an entity and mark it completed.

        The write is atomic: a second writer for the same entity gets
        AlreadyCompleted.
        """
        source = Source(source)
        label = label_text.strip()
        with self._tx() as conn:
            self._require_annotator(annotator_id)
            self._pending_entity(conn, entity_id, annotator_id)
            if not label:
                raise EmptyLabel(entity_id)
            record = Annotation(
                entity_id=entity_id,
                annotator_id=annotator_id,
                label_text=label,
                source=source,
                weight=WEIGHT_BY_SOURCE[source],
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            conn.execute(
                "INSERT INTO annotation"
                " (entity_id, annotator_id, label_text, source, weight, created_at)"
                " VALUES (?, ?, ?, ?, ?, ?)",
                (
                    record.entity_id,
                    record.annotator_id,
                    record.label_text,
                    record.source.value,
                    record.weight,
                    record.created_at,
                ),
            )
            conn.execute(
                "UPDATE entity_page SET completed = 1 WHERE id = ?", (entity_id,)
            )
            return record

    def mark_skipped(self, entity_id: int, annotator_id: int) -> None:
        """Record an explicit 'too hard to label' declaration."""
        with self._tx() as conn:
            self._require_annotator(annotator_id)
            self._pending_entity(conn, entity_id, annotator_id)
            conn.execute(
                "UPDATE entity_page SET skipped = 1 WHERE id = ?", (entity_id,)
            )

    def annotations(self) -> list[Annotation]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM annotation ORDER BY entity_id"
            ).fetchall()
        return [
            Annotation(
                entity_id=row["entity_id"],
                annotator_id=row["annotator_id"],
                label_text=row["label_text"],
                source=Source(row["source"]),
                weight=row["weight"],
                created_at=row["created_at"],
            )
            for row in rows
        ]

    # -- statistics ---------------------------------------------------------

    def breakdown_by_source(self) -> dict[str, int]:
        """Annotation counts per label source, plus the grand total."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT source, COUNT(*) AS n FROM annotation GROUP BY source"
            ).fetchall()
        counts = {source.value: 0 for source in Source}
        for row in rows:
            counts[row["source"]] = row["n"]
        counts["total"] = sum(counts[source.value] for source in Source)
        return counts

    def skipped_count(self) -> int:
        with self._lock:
            return self._conn.execute(
                "SELECT COUNT(*) FROM entity_page WHERE skipped = 1"
            ).fetchone()[0]

    def first_link_agreement(self) -> float | None:
        """Fraction of completed entities whose label matches the first entry
        of their links list, case-insensitively; None with no completions."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT e.links_list AS links_list, a.label_text AS label_text"
                " FROM entity_page e JOIN annotation a ON a.entity_id = e.id"
                " WHERE e.completed = 1"
            ).fetchall()
        if not rows:
            return None
        agreed = 0
        for row in rows:
            links = json.loads(row["links_list"])
            if links and row["label_text"].casefold() == links[0].casefold():
                agreed += 1
        return agreed / len(rows)

    # -- export -------------------------------------------------------------

    def export_annotations(self, destination: str | Path | IO[str]) -> int:
        """Write all annotations as TSV, sorted by entity id; returns the
        data-row count. Tabs and newlines inside fields become spaces."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT e.entity_name AS entity_name, a.label_text AS label,"
                " a.source AS source, a.weight AS weight,"
                " n.name AS annotator, a.created_at AS created_at"
                " FROM annotation a"
                " JOIN entity_page e ON e.id = a.entity_id"
                " JOIN annotator n ON n.id = a.annotator_id"
                " ORDER BY a.entity_id"
            ).fetchall()

        def write(out: IO[str]) -> int:
            out.write(EXPORT_HEADER + "\n")
            for row in rows:
                fields = [
                    _tsv_field(row["entity_name"]),
                    _tsv_field(row["label"]),
                    row["source"],
                    str(row["weight"]),
                    _tsv_field(row["annotator"]),
                    row["created_at"],
                ]
                out.write("\t".join(fields) + "\n")
            return len(rows)

        if hasattr(destination, "write"):
            return write(destination)  # type: ignore[arg-type]
        try:
            with open(destination, "w", encoding="utf-8") as out:  # type: ignore[arg-type]
                return write(out)
        except OSError as exc:
            raise IoError(str(exc)) from exc
