"""
Framed JSON messages between the master and its workers.

Each frame is a 4-byte big-endian length followed by that many bytes of UTF-8
JSON: ``{"kind": ..., "round": ..., "payload": {...}}``. Requests carry a
round id that the response echoes.
"""

import json
import socket
import struct
import logging
from enum import Enum

import numpy as np

from app.errors.exceptions import ProtocolError
from app.medoids.core import Dataset, KTuple, MetricSpec, Point, Schema
from app.utils import partition  # noqa: F401  re-exported for master/worker callers

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
HEADER = struct.Struct('>I')
MAX_FRAME = 1 << 30


class MessageKind(Enum):
    HELLO = 'Hello'
    LOAD_CHUNK = 'LoadChunk'
    BROADCAST_SAMPLE = 'BroadcastSample'
    EVAL_SWAPS = 'EvalSwaps'
    SWAP_PARTIAL_RESULT = 'SwapPartialResult'
    EVAL_FULL_ECC = 'EvalFullEcc'
    FULL_ECC_PARTIAL = 'FullEccPartial'
    SHUTDOWN = 'Shutdown'
    ERROR = 'Error'


def encode_frame(kind: MessageKind, round_id: int, payload: dict | None = None) -> bytes:
    body = json.dumps({'kind': kind.value, 'round': int(round_id), 'payload': payload or {}},
                      separators=(',', ':'), allow_nan=False).encode('utf-8')
    return HEADER.pack(len(body)) + body


def decode_body(body: bytes) -> tuple[MessageKind, int, dict]:
    try:
        message = json.loads(body.decode('utf-8'))
        kind = MessageKind(message['kind'])
        return kind, int(message['round']), dict(message.get('payload') or {})
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ProtocolError(f"Malformed message: {e}") from None


def decode_frame(frame: bytes) -> tuple[MessageKind, int, dict]:
    if len(frame) < HEADER.size:
        raise ProtocolError("Frame shorter than its length prefix")
    (length,) = HEADER.unpack_from(frame)
    if length != len(frame) - HEADER.size:
        raise ProtocolError(f"Length prefix {length} does not match body of {len(frame) - HEADER.size} bytes")
    return decode_body(frame[HEADER.size:])


def _recv_exact(sock: socket.socket, size: int) -> bytes:
    chunks = []
    remaining = size
    while remaining:
        chunk = sock.recv(min(remaining, 1 << 20))
        if not chunk:
            raise ProtocolError("Connection closed by peer")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b''.join(chunks)


def send_message(sock: socket.socket, kind: MessageKind, round_id: int, payload: dict | None = None) -> None:
    sock.sendall(encode_frame(kind, round_id, payload))


def recv_message(sock: socket.socket) -> tuple[MessageKind, int, dict]:
    (length,) = HEADER.unpack(_recv_exact(sock, HEADER.size))
    if length > MAX_FRAME:
        raise ProtocolError(f"Frame of {length} bytes exceeds the limit")
    return decode_body(_recv_exact(sock, length))


def parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port = text.strip().rpartition(':')
    if not sep or not port.isdigit():
        raise ValueError(f"Endpoint must look like host:port, got {text!r}")
    return host or '127.0.0.1', int(port)


# Payload helpers. Floats go through JSON's shortest round-trip repr, so
# values arrive bit for bit.

def rows_to_payload(data: Dataset) -> dict:
    return {'numeric': data.numeric.tolist(), 'categorical': data.categorical.tolist()}


def rows_from_payload(payload: dict, schema: Schema) -> Dataset:
    numeric = np.asarray(payload['numeric'], dtype=np.float64).reshape(-1, schema.numeric_count)
    categorical = np.asarray(payload['categorical'], dtype=np.int64).reshape(-1, schema.categorical_count)
    return Dataset(schema=schema, numeric=numeric, categorical=categorical)


def ktuple_to_payload(cur: KTuple) -> list[dict]:
    return cur.to_list()


def ktuple_from_payload(slots: list) -> KTuple:
    return KTuple(tuple(Point.from_dict(slot) for slot in slots))


def metric_from_payload(data: dict) -> MetricSpec:
    return MetricSpec.parse(data['kind'], data.get('weights'))
