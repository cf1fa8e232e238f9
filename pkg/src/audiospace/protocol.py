"""Datagram codec for the control channel between paired devices.

Every message shares a fixed 20-byte header followed by a payload whose
shape depends on the message type.  All integers are big-endian and
unsigned.

     0        1        2        3        4..7     8..11    12..19
  +--------+--------+--------+--------+--------+--------+--------+
  |  'S'   |  'V'   | version|  type  | sender | seq    | send_ts|
  +--------+--------+--------+--------+--------+--------+--------+
     magic             0x01    1..4     u32      u32      u64 ms

  HELLO  (0x01): group_id u32                          total 24 bytes
  START  (0x02): clip_id u16, start_ts_ms u64          total 30 bytes
  STOP   (0x03): clip_id u16, stop_ts_ms u64           total 30 bytes
  BEACON (0x04): playing u8, clip_id u16,
                 start_ts_ms u64                       total 31 bytes

An idle beacon carries playing=0 with clip_id and start_ts_ms zeroed.
Sequence numbers increase strictly per sender; receivers drop anything
at or below the last value seen so duplicated or reordered datagrams
are applied at most once and never out of order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Union

MAGIC = b"SV"
VERSION = 0x01

_U16_MAX = 0xFFFF
_U32_MAX = 0xFFFFFFFF
_U64_MAX = 0xFFFFFFFFFFFFFFFF

_HEADER = struct.Struct(">2sBBIIQ")
_HELLO_PAYLOAD = struct.Struct(">I")
_START_PAYLOAD = struct.Struct(">HQ")
_STOP_PAYLOAD = struct.Struct(">HQ")
_BEACON_PAYLOAD = struct.Struct(">BHQ")

HEADER_SIZE = _HEADER.size  # 20


class MessageType(IntEnum):
    HELLO = 0x01
    START = 0x02
    STOP = 0x03
    BEACON = 0x04


MESSAGE_SIZES = {
    MessageType.HELLO: HEADER_SIZE + _HELLO_PAYLOAD.size,
    MessageType.START: HEADER_SIZE + _START_PAYLOAD.size,
    MessageType.STOP: HEADER_SIZE + _STOP_PAYLOAD.size,
    MessageType.BEACON: HEADER_SIZE + _BEACON_PAYLOAD.size,
}


class ProtocolError(Exception):
    """Base class for malformed datagrams."""


class BadMagic(ProtocolError):
    pass


class BadVersion(ProtocolError):
    pass


class BadType(ProtocolError):
    pass


class BadLength(ProtocolError):
    pass


class BadPayload(ProtocolError):
    pass


@dataclass(frozen=True)
class Hello:
    """Join announcement; receivers learn the sender's group."""

    sender_id: int
    seq: int
    send_ts_ms: int
    group_id: int

    type = MessageType.HELLO


@dataclass(frozen=True)
class Start:
    """The sender began playing clip_id at start_ts_ms."""

    sender_id: int
    seq: int
    send_ts_ms: int
    clip_id: int
    start_ts_ms: int

    type = MessageType.START


@dataclass(frozen=True)
class Stop:
    """The sender stopped clip_id early at stop_ts_ms.

    A clip that runs to its natural end is never announced; everyone
    can see the end coming from the clip duration.
    """

    sender_id: int
    seq: int
    send_ts_ms: int
    clip_id: int
    stop_ts_ms: int

    type = MessageType.STOP


@dataclass(frozen=True)
class Beacon:
    """Periodic full-state repeat so lost datagrams heal themselves."""

    sender_id: int
    seq: int
    send_ts_ms: int
    playing: bool
    clip_id: int
    start_ts_ms: int

    type = MessageType.BEACON


Message = Union[Hello, Start, Stop, Beacon]


def _check_u16(value: int, name: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= _U16_MAX:
        raise ValueError(f"{name} must be a u16, got {value!r}")


def _check_u32(value: int, name: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= _U32_MAX:
        raise ValueError(f"{name} must be a u32, got {value!r}")


def _check_u64(value: int, name: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= _U64_MAX:
        raise ValueError(f"{name} must be a u64, got {value!r}")


def encode(msg: Message) -> bytes:
    """Serialize a message; raises ValueError on out-of-range fields."""
    _check_u32(msg.sender_id, "sender_id")
    _check_u32(msg.seq, "seq")
    _check_u64(msg.send_ts_ms, "send_ts_ms")
    header = _HEADER.pack(MAGIC, VERSION, msg.type, msg.sender_id, msg.seq, msg.send_ts_ms)

    if isinstance(msg, Hello):
        _check_u32(msg.group_id, "group_id")
        return header + _HELLO_PAYLOAD.pack(msg.group_id)
    if isinstance(msg, Start):
        _check_u16(msg.clip_id, "clip_id")
        _check_u64(msg.start_ts_ms, "start_ts_ms")
        return header + _START_PAYLOAD.pack(msg.clip_id, msg.start_ts_ms)
    if isinstance(msg, Stop):
        _check_u16(msg.clip_id, "clip_id")
        _check_u64(msg.stop_ts_ms, "stop_ts_ms")
        return header + _STOP_PAYLOAD.pack(msg.clip_id, msg.stop_ts_ms)
    if isinstance(msg, Beacon):
        _check_u16(msg.clip_id, "clip_id")
        _check_u64(msg.start_ts_ms, "start_ts_ms")
        return header + _BEACON_PAYLOAD.pack(int(msg.playing), msg.clip_id, msg.start_ts_ms)
    raise ValueError(f"not a protocol message: {msg!r}")


def decode(datagram: bytes) -> Message:
    """Parse one datagram.

    Raises BadLength, BadMagic, BadVersion, BadType, or BadPayload; a
    datagram too short to carry the magic, version, and type bytes is a
    length problem, everything after that is judged field by field.
    """
    if len(datagram) < 4:
        raise BadLength(f"datagram of {len(datagram)} bytes is shorter than any header")
    if datagram[0:2] != MAGIC:
        raise BadMagic(f"expected {MAGIC!r}, got {bytes(datagram[0:2])!r}")
    if datagram[2] != VERSION:
        raise BadVersion(f"unsupported version 0x{datagram[2]:02x}")
    try:
        mtype = MessageType(datagram[3])
    except ValueError:
        raise BadType(f"unknown message type 0x{datagram[3]:02x}") from None
    if len(datagram) != MESSAGE_SIZES[mtype]:
        raise BadLength(
            f"{mtype.name} must be {MESSAGE_SIZES[mtype]} bytes, got {len(datagram)}"
        )

    _, _, _, sender_id, seq, send_ts_ms = _HEADER.unpack_from(datagram, 0)
    body = datagram[HEADER_SIZE:]

    if mtype is MessageType.HELLO:
        (group_id,) = _HELLO_PAYLOAD.unpack(body)
        return Hello(sender_id, seq, send_ts_ms, group_id)
    if mtype is MessageType.START:
        clip_id, start_ts_ms = _START_PAYLOAD.unpack(body)
        return Start(sender_id, seq, send_ts_ms, clip_id, start_ts_ms)
    if mtype is MessageType.STOP:
        clip_id, stop_ts_ms = _STOP_PAYLOAD.unpack(body)
        return Stop(sender_id, seq, send_ts_ms, clip_id, stop_ts_ms)
    playing, clip_id, start_ts_ms = _BEACON_PAYLOAD.unpack(body)
    if playing not in (0, 1):
        raise BadPayload(f"beacon playing byte must be 0 or 1, got 0x{playing:02x}")
    return Beacon(sender_id, seq, send_ts_ms, bool(playing), clip_id, start_ts_ms)


def dedup_filter(last_seq_by_sender: dict[int, int], msg: Message) -> bool:
    """Accept msg iff its seq advances past the sender's last accepted.

    Mutates the map on accept and returns whether to apply the message.
    A sender never seen before is always accepted.
    """
    last = last_seq_by_sender.get(msg.sender_id)
    if last is not None and msg.seq <= last:
        return False
    last_seq_by_sender[msg.sender_id] = msg.seq
    return True
