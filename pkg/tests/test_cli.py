from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from click.testing import CliRunner

from shade.annostore import AnnotationStore, Source
from shade.cli import main
from shade.ingest import WikiArticle, serialize_export_xml

from .conftest import TIAMAT_ARTICLE


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dump_path(tmp_path):
    xml = serialize_export_xml(
        [
            WikiArticle(title="Tiamat", wikitext=TIAMAT_ARTICLE),
            WikiArticle(title="Bane", wikitext="Bane was the [[god]] of tyranny."),
            WikiArticle(title="Takhisis", redirect_target="Tiamat", wikitext="#REDIRECT [[Tiamat]]"),
        ]
    )
    path = tmp_path / "dump.xml"
    path.write_bytes(xml)
    return path


class TestIngestCommand:
    def test_fixture_dump_summary(self, runner, tmp_path, dump_path):
        db = tmp_path / "db.sqlite"
        result = runner.invoke(main, ["ingest", "--input", str(dump_path), "--db", str(db)])
        assert result.exit_code == 0, result.output
        assert result.output.strip() == "ingested=2 skipped_redirect=1 skipped_empty=0"

    def test_empty_dump(self, runner, tmp_path):
        empty = tmp_path / "empty.xml"
        empty.write_bytes(b"<mediawiki></mediawiki>")
        db = tmp_path / "db.sqlite"
        result = runner.invoke(main, ["ingest", "--input", str(empty), "--db", str(db)])
        assert result.exit_code == 0
        assert result.output.startswith("ingested=0")

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(
            main, ["ingest", "--input", str(tmp_path / "nope.xml"), "--db", str(tmp_path / "db")]
        )
        assert result.exit_code != 0

    def test_malformed_xml_exits_nonzero(self, runner, tmp_path):
        bad = tmp_path / "bad.xml"
        bad.write_bytes(b"<mediawiki><page>")
        result = runner.invoke(main, ["ingest", "--input", str(bad), "--db", str(tmp_path / "db")])
        assert result.exit_code == 1

    def test_fetch_mode_with_config_file(self, runner, tmp_path):
        responses = serialize_export_xml(
            [WikiArticle(title="Bane", wikitext="Bane was the [[god]] of tyranny.")]
        )
        seen = []

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                seen.append(self.rfile.read(int(self.headers.get("Content-Length", "0"))))
                self.send_response(200)
                self.end_headers()
                self.wfile.write(responses)

            def log_message(self, *args):
                pass

        server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        try:
            titles = tmp_path / "titles.txt"
            titles.write_text("Bane\n", encoding="utf-8")
            config = tmp_path / "fetch.json"
            config.write_text(json.dumps({"batch_size": 10, "delay": 0.0}), encoding="utf-8")
            result = runner.invoke(
                main,
                [
                    "ingest",
                    "--fetch",
                    "--endpoint", f"http://127.0.0.1:{server.server_address[1]}/export",
                    "--titles", str(titles),
                    "--config", str(config),
                    "--db", str(tmp_path / "db.sqlite"),
                ],
            )
            assert result.exit_code == 0, result.output
            assert result.output.strip() == "ingested=1 skipped_redirect=0 skipped_empty=0"
            assert seen and b"Bane" in seen[0]
        finally:
            server.shutdown()
            server.server_close()

    def test_reingest_does_not_duplicate(self, runner, tmp_path, dump_path):
        db = tmp_path / "db.sqlite"
        runner.invoke(main, ["ingest", "--input", str(dump_path), "--db", str(db)])
        result = runner.invoke(main, ["ingest", "--input", str(dump_path), "--db", str(db)])
        assert result.exit_code == 0
        assert "ingested=0" in result.output
        assert "skipped_existing=2" in result.output
        with AnnotationStore(db) as store:
            assert store.entity_count() == 2


class TestAnnotatorCommand:
    def test_add_prints_token(self, runner, tmp_path):
        result = runner.invoke(main, ["annotator", "add", "alice", "--db", str(tmp_path / "db")])
        assert result.exit_code == 0
        assert re.match(r"name=alice token=[0-9a-f]{32}", result.output.strip())

    def test_duplicate_exits_nonzero(self, runner, tmp_path):
        db = str(tmp_path / "db")
        assert runner.invoke(main, ["annotator", "add", "alice", "--db", db]).exit_code == 0
        assert runner.invoke(main, ["annotator", "add", "alice", "--db", db]).exit_code == 1


class TestStatsAndExport:
    def seed(self, db_path):
        with AnnotationStore(db_path) as store:
            a = store.add_annotator("seeder")
            for i, source in enumerate(
                [Source.LINKS, Source.LINKS, Source.NOUN_PHRASES, Source.MANUAL]
            ):
                store.insert_entity(f"E{i}", "text", ["x"], ["y"])
                page = store.assign_next(a.id)
                store.save_annotation(page.id, a.id, "label", source)

    def test_stats_table(self, runner, tmp_path):
        db = tmp_path / "db.sqlite"
        self.seed(db)
        result = runner.invoke(main, ["stats", "--db", str(db)])
        assert result.exit_code == 0
        assert re.search(r"LINKS\s+2", result.output)
        assert re.search(r"NOUN_PHRASES\s+1", result.output)
        assert re.search(r"MANUAL\s+1", result.output)
        assert re.search(r"total\s+4", result.output)
        assert "skipped 0" in result.output

    def test_export_row_count_matches(self, runner, tmp_path):
        db = tmp_path / "db.sqlite"
        self.seed(db)
        out = tmp_path / "out.tsv"
        result = runner.invoke(main, ["export", "--db", str(db), "--out", str(out)])
        assert result.exit_code == 0
        assert result.output.strip() == "rows=4"
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 5  # header + rows

    def test_db_from_env(self, runner, tmp_path, dump_path):
        db = tmp_path / "env.sqlite"
        result = runner.invoke(
            main, ["ingest", "--input", str(dump_path)], env={"SHADE_DB": str(db)}
        )
        assert result.exit_code == 0
        assert db.exists()
