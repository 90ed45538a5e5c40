"""
Master side: scatters the dataset, then runs the MCPAM decision loop with
its two heavy steps (full-data eccentricity and swap evaluation) fanned out
to the workers.

Rounds are bulk synchronous. The master samples indices with the same
substreams as a single-node run, sends the sampled rows, and merges worker
partials in ascending worker order, so the decision sequence matches the
single-node search.
"""

import socket
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.errors.exceptions import ConfigError, ProtocolError
from app.medoids.clustering import McpamConfig, MedoidResult, SwapPartial, initial_medoid, run_mcpam
from app.medoids.core import Dataset, KTuple, MetricSpec, Point
from .protocol import (MessageKind, ktuple_to_payload, parse_endpoint, partition, recv_message, rows_to_payload,
                       send_message)

logger = logging.getLogger(__name__)


class WorkerLink:
    def __init__(self, index: int, endpoint: str, timeout: float | None = None):
        self.index = index
        self.endpoint = endpoint
        host, port = parse_endpoint(endpoint)
        try:
            self.sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as e:
            raise ProtocolError(f"Cannot reach worker {index} at {endpoint}: {e}") from None

    def request(self, kind: MessageKind, round_id: int, payload: dict, expect: MessageKind | None) -> dict:
        try:
            send_message(self.sock, kind, round_id, payload)
            if expect is None:
                return {}
            reply_kind, reply_round, reply = recv_message(self.sock)
        except (OSError, ProtocolError) as e:
            raise ProtocolError(f"Lost worker {self.index} ({self.endpoint}): {e}") from None
        if reply_kind == MessageKind.ERROR:
            raise ProtocolError(f"Worker {self.index} ({self.endpoint}): {reply.get('message')}")
        if reply_round != round_id:
            raise ProtocolError(f"Worker {self.index} answered round {reply_round}, expected {round_id}")
        if reply_kind != expect:
            raise ProtocolError(f"Worker {self.index} sent {reply_kind.value}, expected {expect.value}")
        return reply

    def close(self) -> None:
        self.sock.close()


class RemoteEvaluator:
    """MCPAM evaluator backed by worker processes over TCP."""

    def __init__(self, data: Dataset, metric: MetricSpec, endpoints: list[str], timeout: float | None = None):
        if not endpoints:
            raise ConfigError("At least one worker endpoint is needed")
        self.data = data
        self.metric = metric
        self.size = len(data)
        self.round_id = 0
        self.messages = 0
        self.links: list[WorkerLink] = []
        try:
            for index, endpoint in enumerate(endpoints):
                self.links.append(WorkerLink(index, endpoint, timeout))
        except ProtocolError:
            self.close()
            raise
        self.pool = ThreadPoolExecutor(max_workers=len(self.links))

    def _scatter(self, kind: MessageKind, payloads: list[dict], expect: MessageKind | None) -> list[dict]:
        self.round_id += 1
        round_id = self.round_id
        futures = [self.pool.submit(link.request, kind, round_id, payload, expect)
                   for link, payload in zip(self.links, payloads)]
        self.messages += len(self.links) * (1 if expect is None else 2)
        # ascending worker order
        return [future.result() for future in futures]

    def broadcast(self, kind: MessageKind, payload: dict, expect: MessageKind | None) -> list[dict]:
        return self._scatter(kind, [payload] * len(self.links), expect)

    def hello(self) -> None:
        self.broadcast(MessageKind.HELLO, {}, MessageKind.HELLO)

    def load(self) -> None:
        ranges = partition(self.size, len(self.links))
        schema = self.data.schema.to_dict()
        metric = self.metric.to_dict()
        payloads = []
        for part in ranges:
            payload = rows_to_payload(self.data.slice(part.start, part.stop))
            payload.update(offset=part.start, schema=schema, metric=metric)
            payloads.append(payload)
        replies = self._scatter(MessageKind.LOAD_CHUNK, payloads, MessageKind.HELLO)
        logger.info("Loaded %s rows on %d workers", [r.get('rows') for r in replies], len(self.links))

    def full_moments(self, cur: KTuple) -> tuple[float, float, int]:
        replies = self.broadcast(MessageKind.EVAL_FULL_ECC, {'cur': ktuple_to_payload(cur)},
                                 MessageKind.FULL_ECC_PARTIAL)
        total = total_sq = 0.0
        count = 0
        for reply in replies:
            total += float(reply['sum'])
            total_sq += float(reply['sumsq'])
            count += int(reply['count'])
        return total, total_sq, count

    def eval_swaps(self, cur: KTuple, sample_indices: np.ndarray, z: float) -> SwapPartial:
        sample = self.data.take(sample_indices)
        self.broadcast(MessageKind.BROADCAST_SAMPLE, rows_to_payload(sample), None)
        replies = self.broadcast(MessageKind.EVAL_SWAPS, {'cur': ktuple_to_payload(cur), 'z': z},
                                 MessageKind.SWAP_PARTIAL_RESULT)
        merged = SwapPartial(None, None)
        for reply in replies:
            merged = merged.merge(SwapPartial.from_dict(reply))
        # every worker also counts the n*k sample-to-medoid distances; only one set is needed
        extra = (len(self.links) - 1) * len(sample) * cur.k
        return SwapPartial(merged.minhi, merged.minlo, evals=merged.evals - extra)

    def point(self, index: int) -> Point:
        return self.data.point(index)

    def shutdown(self) -> None:
        self.round_id += 1
        for link in self.links:
            try:
                send_message(link.sock, MessageKind.SHUTDOWN, self.round_id)
            except OSError:
                logger.warning("Worker %d gone before shutdown", link.index)

    def close(self) -> None:
        for link in self.links:
            link.close()
        pool = getattr(self, 'pool', None)
        if pool is not None:
            pool.shutdown(wait=False)


def master_run(cfg: McpamConfig, endpoints: list[str], data: Dataset, metric: MetricSpec,
               init: KTuple | None = None, init_indices=None, shutdown: bool = True,
               timeout: float | None = None) -> MedoidResult:
    """MCPAM with the heavy steps on remote workers; seeding happens on the master."""
    cfg.validate()
    if len(data) < len(endpoints):
        raise ConfigError(f"Cannot split {len(data)} points over {len(endpoints)} workers")
    if len(data) < cfg.k:
        raise ConfigError(f"Need at least k={cfg.k} points, dataset has {len(data)}")
    init, init_indices = initial_medoid(cfg, metric, init, init_indices, data)
    evaluator = RemoteEvaluator(data, metric, endpoints, timeout=timeout)
    try:
        evaluator.hello()
        evaluator.load()
        result = run_mcpam(evaluator, cfg, init, init_indices)
        logger.info("Distributed run finished after %d messages over %d rounds",
                    evaluator.messages, evaluator.round_id)
        if shutdown:
            evaluator.shutdown()
        return result
    finally:
        evaluator.close()
