import json
import socket
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import httpx
import pytest
import uvicorn

from rdfgql import Engine
from rdfgql.service import create_app
from conftest import PEOPLE, read
from workloads import STAR_QUERY, STAR_SCHEMA, star_ntriples


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class LiveServer:
    def __init__(self, app):
        self.port = free_port()
        self.server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="warning"))
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def __enter__(self):
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture(scope="module")
def engine() -> Engine:
    return Engine.from_files(PEOPLE / "schema.graphql", PEOPLE / "data.nt")


@pytest.fixture(scope="module")
def server(engine):
    with LiveServer(create_app(engine)) as live:
        yield live


def post(server, body):
    return httpx.post(server.url + "/graphql", json=body, timeout=30)


def test_healthz(server):
    resp = httpx.get(server.url + "/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "triples": 7, "id_mode": "direct"}


def test_doe_people_over_http(server):
    resp = post(server, {"query": read(PEOPLE / "doe_people.graphql")})
    assert resp.status_code == 200
    assert resp.text == read(PEOPLE / "doe_people.response.json").strip()


@pytest.mark.parametrize("body, fragment", [
    ({"query": "{"}, "syntax error"),
    ({"query": "{ people { nope } }"}, "unknown field"),
    ({"query": ""}, "malformed request body"),
    ({"nothing": 1}, "malformed request body"),
])
def test_bad_requests_are_400(server, body, fragment):
    resp = post(server, body)
    assert resp.status_code == 400
    assert fragment in resp.json()["errors"][0]["message"]


def test_non_json_body_is_400(server):
    resp = httpx.post(server.url + "/graphql", content=b"not json", headers={"content-type": "application/json"})
    assert resp.status_code == 400


def test_concurrent_clients_and_read_only_index(server, engine):
    before = engine.index.fingerprint()
    queries = [read(PEOPLE / "doe_people.graphql"), read(PEOPLE / "company_staff.graphql")]
    golden = [read(PEOPLE / "doe_people.response.json").strip(), read(PEOPLE / "company_staff.response.json").strip()]

    def client(i):
        with httpx.Client(base_url=server.url, timeout=30) as c:
            out = []
            for j in range(10):
                k = (i + j) % 2
                resp = c.post("/graphql", json={"query": queries[k]})
                out.append(resp.status_code == 200 and resp.text == golden[k])
            return out

    with ThreadPoolExecutor(16) as pool:
        results = [ok for chunk in pool.map(client, range(16)) for ok in chunk]
    assert len(results) == 160 and all(results)
    assert engine.index.fingerprint() == before


def test_timeout_is_504():
    engine = Engine.from_text(STAR_SCHEMA, star_ntriples(2000))
    with LiveServer(create_app(engine, timeout=1e-6)) as live:
        resp = httpx.post(live.url + "/graphql", json={"query": STAR_QUERY}, timeout=30)
    assert resp.status_code == 504
    assert "time limit" in json.dumps(resp.json())
