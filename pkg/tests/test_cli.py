import subprocess
import sys

import pytest

from rdfgql import Engine
from rdfgql.cli import main
from rdfgql.service import create_app
from conftest import PEOPLE, read
from test_service import LiveServer

BASE = ["--schema", str(PEOPLE / "schema.graphql"), "--data", str(PEOPLE / "data.nt")]


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_load_summary(capsys):
    code, out, _ = cli(capsys, "load", *BASE)
    assert code == 0
    assert "triples 7" in out and "fingerprint " in out


def test_query_doe_people(capsys):
    code, out, _ = cli(capsys, "query", *BASE, "--file", str(PEOPLE / "doe_people.graphql"))
    assert code == 0
    assert out.strip() == read(PEOPLE / "doe_people.response.json").strip()


def test_query_company_staff_inline(capsys):
    code, out, _ = cli(capsys, "query", *BASE, read(PEOPLE / "company_staff.graphql"))
    assert code == 0
    assert out.strip() == '{"data":{"companies":[]}}'


def test_query_stats_to_stderr(capsys):
    code, _, err = cli(capsys, "query", *BASE, "--stats", read(PEOPLE / "doe_people.graphql"))
    assert code == 0 and "emitted" in err


def test_syntax_error_exit_code(capsys):
    code, _, err = cli(capsys, "query", *BASE, "{")
    assert code == 2
    assert err.startswith("error: syntax error:") and "syntax error: syntax error" not in err


def test_validation_error_exit_code(capsys):
    code, _, err = cli(capsys, "query", *BASE, "{ people { nope } }")
    assert code == 3 and "unknown field nope" in err


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.graphql"
    bad.write_text("type Query { a: Foo }")
    code, _, err = cli(capsys, "load", "--schema", str(bad), "--data", str(PEOPLE / "data.nt"))
    assert code == 4 and "unknown-type" in err


def test_data_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.nt"
    bad.write_text('<a> <b> "ok" .\n<p1> <lname>\n')
    code, _, err = cli(capsys, "load", "--schema", str(PEOPLE / "schema.graphql"), "--data", str(bad))
    assert code == 5 and "line 2" in err


def test_missing_data_without_url(capsys):
    code, _, err = cli(capsys, "query", "{ people { fname } }")
    assert code == 3 and "--url" in err


def test_compare_random(capsys):
    code, out, _ = cli(capsys, "compare", "--random", "30", "--seed", "3")
    assert code == 0 and "mismatches 0" in out


def test_compare_corpus(capsys):
    code, out, _ = cli(capsys, "compare", *BASE, str(PEOPLE / "doe_people.graphql"), str(PEOPLE / "company_staff.graphql"))
    assert code == 0 and "cases 2" in out


def test_compare_mismatch_exit_code(monkeypatch, capsys):
    import rdfgql.engine as engine_module

    original = engine_module.leapfrog
    monkeypatch.setattr(engine_module, "leapfrog", lambda cols: iter(list(original(cols))[:-1]))
    code, out, _ = cli(capsys, "compare", "--random", "50", "--seed", "7")
    assert code == 1 and "mismatch (engine)" in out


def test_bench_lines(capsys):
    code, out, _ = cli(capsys, "bench", *BASE, "--repetitions", "2", str(PEOPLE / "doe_people.graphql"),
                       str(PEOPLE / "company_staff.graphql"))
    assert code == 0
    lines = out.splitlines()
    assert any(line.startswith("qps doe_people ") for line in lines)
    assert lines[-1].startswith("pavgqps ")


def test_bench_zero_clients(capsys):
    code, _, err = cli(capsys, "bench", *BASE, "--clients", "0", str(PEOPLE / "doe_people.graphql"))
    assert code == 3 and "client" in err


def test_timeout_exit_code(tmp_path, capsys):
    from workloads import STAR_QUERY, STAR_SCHEMA, star_ntriples

    d = tmp_path
    (d / "schema.graphql").write_text(STAR_SCHEMA)
    (d / "data.nt").write_text(star_ntriples(2000))
    code, _, err = cli(capsys, "query", "--schema", str(d / "schema.graphql"), "--data", str(d / "data.nt"),
                       "--timeout-s", "0.000001", STAR_QUERY)
    assert code == 6 and "time limit" in err


def test_thin_client_against_server(capsys):
    engine = Engine.from_files(PEOPLE / "schema.graphql", PEOPLE / "data.nt")
    with LiveServer(create_app(engine)) as live:
        code, out, _ = cli(capsys, "query", "--url", live.url, read(PEOPLE / "doe_people.graphql"))
        assert code == 0 and out.strip() == read(PEOPLE / "doe_people.response.json").strip()
        code, out, _ = cli(capsys, "query", "--url", live.url, "{")
        assert code == 2 and "syntax error" in out
        code, out, _ = cli(capsys, "query", "--url", live.url, "{ people { nope } }")
        assert code == 3
        code, out, _ = cli(capsys, "bench", "--url", live.url, "--repetitions", "2", str(PEOPLE / "doe_people.graphql"))
        assert code == 0 and "pavgqps" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rdfgql.cli", "query", *BASE, read(PEOPLE / "company_staff.graphql")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == '{"data":{"companies":[]}}'
