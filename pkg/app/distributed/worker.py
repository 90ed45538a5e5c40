"""Worker side: holds one chunk of the dataset and answers evaluation requests."""

import socket
import logging
from dataclasses import dataclass

from app.errors.exceptions import ProtocolError
from app.medoids.clustering import evaluate_swaps
from app.medoids.core import Dataset, MetricSpec, Schema, min_distances
from app.medoids.eccentricity import moments
from .protocol import (PROTOCOL_VERSION, MessageKind, ktuple_from_payload, metric_from_payload, recv_message,
                       rows_from_payload, send_message)

logger = logging.getLogger(__name__)


@dataclass
class WorkerState:
    threads: int = 1
    chunk: Dataset | None = None
    offset: int = 0
    metric: MetricSpec | None = None
    sample: Dataset | None = None

    def require_chunk(self) -> None:
        if self.chunk is None:
            raise ProtocolError("Evaluation requested before LoadChunk")


def handle(state: WorkerState, kind: MessageKind, payload: dict) -> tuple[MessageKind, dict] | None:
    """Apply one request; returns the response, or None when the request has none."""
    if kind == MessageKind.HELLO:
        return MessageKind.HELLO, {'version': PROTOCOL_VERSION, 'loaded': state.chunk is not None}
    if kind == MessageKind.LOAD_CHUNK:
        schema = Schema.from_dict(payload['schema'])
        state.chunk = rows_from_payload(payload, schema)
        state.offset = int(payload['offset'])
        state.metric = metric_from_payload(payload['metric'])
        state.sample = None
        logger.info("Loaded chunk of %d points at offset %d", len(state.chunk), state.offset)
        return MessageKind.HELLO, {'version': PROTOCOL_VERSION, 'loaded': True, 'rows': len(state.chunk)}
    if kind == MessageKind.BROADCAST_SAMPLE:
        state.require_chunk()
        state.sample = rows_from_payload(payload, state.chunk.schema)
        return None
    if kind == MessageKind.EVAL_SWAPS:
        state.require_chunk()
        if state.sample is None:
            raise ProtocolError("EvalSwaps before BroadcastSample")
        cur = ktuple_from_payload(payload['cur'])
        part = evaluate_swaps(state.chunk, state.offset, cur, state.sample, state.metric, float(payload['z']),
                              state.threads)
        return MessageKind.SWAP_PARTIAL_RESULT, part.to_dict()
    if kind == MessageKind.EVAL_FULL_ECC:
        state.require_chunk()
        total, total_sq, count = moments(min_distances(state.metric, state.chunk, ktuple_from_payload(payload['cur'])))
        return MessageKind.FULL_ECC_PARTIAL, {'sum': total, 'sumsq': total_sq, 'count': count}
    raise ProtocolError(f"Unexpected message kind {kind.value}")


def serve_connection(conn: socket.socket, state: WorkerState) -> bool:
    """Answer requests on one master connection; True once Shutdown arrives."""
    while True:
        try:
            kind, round_id, payload = recv_message(conn)
        except ProtocolError as e:
            logger.info("Master connection ended: %s", e)
            return False
        if kind == MessageKind.SHUTDOWN:
            logger.info("Shutdown requested")
            return True
        try:
            response = handle(state, kind, payload)
        except (ProtocolError, ValueError, KeyError) as e:
            logger.warning("Rejected %s (round %d): %s", kind.value, round_id, e)
            response = MessageKind.ERROR, {'message': str(e)}
        except Exception as e:
            logger.exception("Worker failed on %s", kind.value)
            response = MessageKind.ERROR, {'message': f"worker failure: {e}"}
        if kind == MessageKind.BROADCAST_SAMPLE and response is not None:
            # the master reads no reply here; the next EvalSwaps reports the missing sample
            logger.warning("Dropped sample of round %d", round_id)
            state.sample = None
            continue
        if response is not None:
            send_message(conn, response[0], round_id, response[1])


def worker_loop(listener: socket.socket, threads: int = 1) -> None:
    """Serve master connections one at a time until a Shutdown message."""
    state = WorkerState(threads=threads)
    while True:
        conn, address = listener.accept()
        logger.info("Master connected from %s:%d", *address[:2])
        with conn:
            if serve_connection(conn, state):
                return


def listen(host: str, port: int) -> socket.socket:
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    listener.bind((host, port))
    listener.listen()
    return listener


def serve(host: str, port: int, threads: int = 1) -> None:
    with listen(host, port) as listener:
        logger.info("Worker listening on %s:%d", host, listener.getsockname()[1])
        worker_loop(listener, threads=threads)
