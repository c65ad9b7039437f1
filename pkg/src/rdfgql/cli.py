"""Command-line interface: load, query, serve, compare, bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .bench import DEFAULT_PENALTY, DEFAULT_TIMEOUT, BenchConfigError, engine_runner, run_bench
from .compare import compare_corpus, compare_random
from .errors import (
    BindingError,
    NTriplesError,
    QuerySyntaxError,
    QueryTimeout,
    QueryValidationError,
    SchemaError,
    SchemaValidationError,
)
from .executor import DEFAULT_DEPTH_LIMIT, Engine
from .operands import RDF_TYPE
from .schema import DIRECT, ID_MODES

EXIT_MISMATCH = 1
EXIT_SYNTAX = 2
EXIT_VALIDATION = 3
EXIT_SCHEMA = 4
EXIT_DATA = 5
EXIT_TIMEOUT = 6


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _add_engine_options(p: argparse.ArgumentParser, data_required: bool = True):
    p.add_argument("--schema", required=data_required, help="GraphQL SDL file with @uri bindings")
    p.add_argument("--data", required=data_required, help="N-Triples file")
    p.add_argument("--id-mode", choices=ID_MODES, default=DIRECT)
    p.add_argument("--type-iri", default=RDF_TYPE)
    p.add_argument("--depth-limit", type=int, default=DEFAULT_DEPTH_LIMIT)


def _load(args) -> Engine:
    return Engine.from_files(args.schema, args.data, id_mode=args.id_mode, type_iri=args.type_iri,
                             depth_limit=args.depth_limit)


def _post(url: str, text: str, timeout: Optional[float]) -> tuple[int, str]:
    import httpx

    resp = httpx.post(url.rstrip("/") + "/graphql", json={"query": text}, timeout=timeout)
    return resp.status_code, resp.text


def _remote_exit(status: int, body: str) -> int:
    if status == 200:
        return 0
    if status == 504:
        return EXIT_TIMEOUT
    if status == 400:
        try:
            messages = [e["message"] for e in json.loads(body)["errors"]]
        except (ValueError, KeyError, TypeError):
            messages = []
        if messages and all(m.startswith("syntax error") for m in messages):
            return EXIT_SYNTAX
    return EXIT_VALIDATION


def _read_query(args) -> str:
    if args.file:
        return Path(args.file).read_text(encoding="utf-8")
    if args.query is None or args.query == "-":
        return sys.stdin.read()
    return args.query


def cmd_load(args) -> int:
    engine = _load(args)
    print(f"triples {len(engine.index)}")
    print(f"terms {len(engine.index.dictionary)}")
    print(f"types {len(engine.schema.object_types)}")
    print(f"fingerprint {engine.index.fingerprint()}")
    return 0


def cmd_query(args) -> int:
    text = _read_query(args)
    if args.url:
        status, body = _post(args.url, text, args.timeout_s)
        print(body)
        return _remote_exit(status, body)
    engine = _load(args)
    result = engine.execute(text, timeout=args.timeout_s)
    print(result.serialize())
    if args.stats:
        print(result.stats.as_dict(), file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    engine = _load(args)
    host, _, port = args.listen.rpartition(":")
    uvicorn.run(create_app(engine, timeout=args.timeout_s), host=host or "127.0.0.1", port=int(port),
                log_level="warning")
    return 0


def cmd_compare(args) -> int:
    if args.random is not None:
        schema_text = Path(args.schema).read_text(encoding="utf-8") if args.schema else None
        report = compare_random(args.random, args.seed, schema_text, args.id_mode, args.type_iri)
    else:
        if not (args.schema and args.data and args.queries):
            return _fail(EXIT_VALIDATION, "corpus mode needs --schema, --data and query files")
        engine = _load(args)
        corpus = [(Path(q).name, Path(q).read_text(encoding="utf-8")) for q in args.queries]
        report = compare_corpus(engine, corpus)
    for mismatch in report.mismatches:
        print(mismatch.report())
        print()
    print(f"cases {report.cases}")
    print(f"mismatches {len(report.mismatches)}")
    return 0 if report.ok else EXIT_MISMATCH


def cmd_bench(args) -> int:
    mix = [(Path(q).stem, Path(q).read_text(encoding="utf-8")) for q in args.queries]
    if args.url:
        def run(_qid, text):
            status, body = _post(args.url, text, args.timeout_s)
            if status != 200:
                raise RuntimeError(body)
    else:
        run = engine_runner(_load(args), timeout=args.timeout_s)
    try:
        report = run_bench(run, mix, clients=args.clients, repetitions=args.repetitions,
                           timeout=args.timeout_s, penalty=args.penalty_s)
    except BenchConfigError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    print(report.table())
    for line in report.lines():
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdfgql", description="GraphQL queries evaluated natively over RDF")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="load schema and data, print a summary")
    _add_engine_options(p)
    p.set_defaults(func=cmd_load)

    p = sub.add_parser("query", help="run one query")
    _add_engine_options(p, data_required=False)
    p.add_argument("query", nargs="?", help="query text, or - for stdin")
    p.add_argument("--file", "-f")
    p.add_argument("--url", help="send to a running server instead of executing locally")
    p.add_argument("--timeout-s", type=float, default=None)
    p.add_argument("--stats", action="store_true", help="print execution counters to stderr")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve", help="serve POST /graphql")
    _add_engine_options(p)
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.add_argument("--timeout-s", type=float, default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("compare", help="check the engine against the reference evaluator")
    p.add_argument("--schema")
    p.add_argument("--data")
    p.add_argument("--id-mode", choices=ID_MODES, default=DIRECT)
    p.add_argument("--type-iri", default=RDF_TYPE)
    p.add_argument("--depth-limit", type=int, default=DEFAULT_DEPTH_LIMIT)
    p.add_argument("--random", type=int, metavar="N", help="generate N random graph/query cases")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("queries", nargs="*")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="measure QPS and pAvgQPS over a query mix")
    _add_engine_options(p, data_required=False)
    p.add_argument("queries", nargs="+")
    p.add_argument("--clients", type=int, default=1)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--timeout-s", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--penalty-s", type=float, default=DEFAULT_PENALTY)
    p.add_argument("--url")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    needs_data = args.command in ("query", "bench") and not getattr(args, "url", None)
    if needs_data and not (args.schema and args.data):
        return _fail(EXIT_VALIDATION, "--schema and --data are required unless --url is given")
    try:
        return args.func(args)
    except QuerySyntaxError as exc:
        return _fail(EXIT_SYNTAX, str(exc))
    except QueryValidationError as exc:
        return _fail(EXIT_VALIDATION, "invalid query:\n  " + "\n  ".join(exc.errors))
    except (SchemaValidationError, SchemaError, BindingError) as exc:
        return _fail(EXIT_SCHEMA, f"schema: {exc}")
    except NTriplesError as exc:
        return _fail(EXIT_DATA, f"data: {exc}")
    except (OSError, ValueError) as exc:
        return _fail(EXIT_DATA, str(exc))
    except QueryTimeout as exc:
        return _fail(EXIT_TIMEOUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())
