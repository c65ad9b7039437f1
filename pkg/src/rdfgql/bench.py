"""Stress benchmark: queries per second and penalized average QPS.

Each client runs the whole query mix repeatedly. A run that raises, or that
takes longer than the timeout, is a failure and is charged the penalty time.
Per query, the penalized mean runtime averages all runs with failures
counted at the penalty; the mix score is the mean of the reciprocals.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

DEFAULT_TIMEOUT = 180.0
DEFAULT_PENALTY = 180.0


class BenchConfigError(ValueError):
    pass


@dataclass
class QueryStats:
    query_id: str
    executions: int = 0
    successes: int = 0
    failures: int = 0
    # (wall time, succeeded) per measured run
    runs: list[tuple[float, bool]] = field(default_factory=list)
    penalty: float = DEFAULT_PENALTY

    def record(self, elapsed: float, ok: bool):
        self.executions += 1
        self.runs.append((elapsed, ok))
        if ok:
            self.successes += 1
        else:
            self.failures += 1

    @property
    def qps(self) -> float:
        """Successful executions per second of successful runtime."""
        busy = sum(t for t, ok in self.runs if ok)
        return self.successes / busy if busy > 0 else 0.0

    @property
    def penalized(self) -> list[float]:
        return [t if ok else self.penalty for t, ok in self.runs]

    @property
    def penalized_mean(self) -> float:
        return sum(self.penalized) / len(self.runs)


def pavgqps(penalized_means: Sequence[float]) -> float:
    """Mean over queries of 1 / penalized mean runtime."""
    if not penalized_means:
        raise ValueError("no queries")
    return sum(1.0 / t for t in penalized_means) / len(penalized_means)


@dataclass
class BenchReport:
    queries: list[QueryStats]
    clients: int
    timeout: float
    penalty: float

    @property
    def pavgqps(self) -> float:
        return pavgqps([q.penalized_mean for q in self.queries])

    def lines(self) -> list[str]:
        out = [f"qps {q.query_id} {q.qps:.6f}" for q in self.queries]
        out.append(f"pavgqps {self.pavgqps:.6f}")
        return out

    def table(self) -> str:
        head = f"{'query':<24}{'runs':>6}{'ok':>6}{'failed':>8}{'mean s':>12}{'qps':>12}"
        rows = [head, "-" * len(head)]
        for q in self.queries:
            rows.append(f"{q.query_id:<24}{q.executions:>6}{q.successes:>6}{q.failures:>8}"
                        f"{q.penalized_mean:>12.6f}{q.qps:>12.3f}")
        rows.append(f"pAvgQPS {self.pavgqps:.6f} (clients={self.clients}, timeout={self.timeout}s, "
                    f"penalty={self.penalty}s)")
        return "\n".join(rows)


Runner = Callable[[str, str], object]


def run_bench(run: Runner, mix: Sequence[tuple[str, str]], clients: int = 1, repetitions: int = 5,
              timeout: float = DEFAULT_TIMEOUT, penalty: float = DEFAULT_PENALTY, warmup: bool = True,
              clock: Callable[[], float] = time.perf_counter) -> BenchReport:
    """Run ``mix`` (pairs of id and query text) ``repetitions`` times per client.

    ``run(query_id, text)`` executes one query; any exception marks a failure.
    """
    if clients < 1:
        raise BenchConfigError("at least one client is required")
    if repetitions < 1:
        raise BenchConfigError("at least one repetition is required")
    if penalty < timeout:
        raise BenchConfigError("the penalty must not be shorter than the timeout")
    if not mix:
        raise BenchConfigError("the query mix is empty")
    if warmup:
        for qid, text in mix:
            try:
                run(qid, text)
            except Exception:
                pass
    stats = {qid: QueryStats(qid, penalty=penalty) for qid, _ in mix}
    lock = threading.Lock()

    def client():
        for _ in range(repetitions):
            for qid, text in mix:
                start = clock()
                try:
                    run(qid, text)
                    ok = True
                except Exception:
                    ok = False
                elapsed = clock() - start
                if elapsed > timeout:
                    ok = False
                with lock:
                    stats[qid].record(elapsed, ok)

    with ThreadPoolExecutor(max_workers=clients) as pool:
        for future in [pool.submit(client) for _ in range(clients)]:
            future.result()
    return BenchReport([stats[qid] for qid, _ in mix], clients, timeout, penalty)


def engine_runner(engine, timeout: Optional[float] = None) -> Runner:
    def run(_qid: str, text: str):
        return engine.query(text, timeout=timeout)

    return run
