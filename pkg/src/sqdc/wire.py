"""Newline-delimited JSON codec for the two-process session mode.

One message per line, one JSON object per message, a ``kind`` field
selecting the type and a ``session`` id tying messages to a session.
The classical messages mirror the protocol's classical channel; the
three quantum-hop kinds (qubit, action, result) stand in for the
physical quantum channel: the sender's process keeps the ground-truth
state and hands out only a slot handle, the receiver answers with a
measure/reflect intent, and the resolved measurement result rides back.

Decoding is strict -- unknown kinds, missing fields, wrong types, or
malformed bit strings raise WireError before anything touches protocol
state.  The transport maps that to an error abort, never to an attack
detection.
"""

import json
from dataclasses import dataclass, fields
from typing import Optional, Union

VERSION = 1

ABORT_INSECURE = "insecure"
ABORT_ERROR = "error"


class WireError(Exception):
    """Malformed, unknown, or invalid message on the wire."""


@dataclass(frozen=True)
class Hello:
    """Opening handshake: protocol version and the shared parameters."""

    session: str
    version: int
    params: dict


@dataclass(frozen=True)
class PhaseMark:
    """Sender announces the next phase: calibration or message."""

    session: str
    phase: str


@dataclass(frozen=True)
class QubitMove:
    """A travelling qubit, as an opaque slot handle (state stays at the
    sender, who simulates the channel)."""

    session: str
    slot: int


@dataclass(frozen=True)
class ActionChoice:
    """Receiver's intent for the arrived qubit: measure or reflect."""

    session: str
    slot: int
    action: str


@dataclass(frozen=True)
class ActionResult:
    """Resolution of the intent: the measured bit, or None for reflect."""

    session: str
    slot: int
    result: Optional[int]


@dataclass(frozen=True)
class PositionsReveal:
    """Receiver's disclosure of which slots he measured (1) vs reflected (0)."""

    session: str
    mask: str


@dataclass(frozen=True)
class SignalList:
    """Sender's keep/flip rectification signals, one per data bit."""

    session: str
    signals: tuple


@dataclass(frozen=True)
class Abort:
    """Session end without delivery: a detection ('insecure') or a fault."""

    session: str
    reason: str
    detail: str = ""


@dataclass(frozen=True)
class Done:
    """Receiver's acknowledgement closing the session."""

    session: str


Message = Union[Hello, PhaseMark, QubitMove, ActionChoice, ActionResult,
                PositionsReveal, SignalList, Abort, Done]

_KINDS = {
    "hello": Hello,
    "phase": PhaseMark,
    "qubit": QubitMove,
    "action": ActionChoice,
    "result": ActionResult,
    "positions": PositionsReveal,
    "signals": SignalList,
    "abort": Abort,
    "done": Done,
}
_KIND_OF = {cls: kind for kind, cls in _KINDS.items()}


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise WireError(what)


def _is_int(value) -> bool:
    # bool is an int subclass; JSON true must not pass for 1
    return type(value) is int


def _validate(msg: Message) -> None:
    _require(isinstance(msg.session, str) and msg.session != "",
             "session id must be a nonempty string")
    if isinstance(msg, Hello):
        _require(_is_int(msg.version), "version must be an integer")
        _require(isinstance(msg.params, dict), "params must be an object")
    elif isinstance(msg, PhaseMark):
        _require(msg.phase in ("calibration", "message"),
                 f"unknown phase {msg.phase!r}")
    elif isinstance(msg, (QubitMove, ActionChoice, ActionResult)):
        _require(_is_int(msg.slot) and msg.slot >= 0,
                 "slot must be a nonnegative integer")
        if isinstance(msg, ActionChoice):
            _require(msg.action in ("measure", "reflect"),
                     f"unknown action {msg.action!r}")
        if isinstance(msg, ActionResult):
            _require(msg.result is None or (_is_int(msg.result) and msg.result in (0, 1)),
                     "result must be 0, 1 or null")
    elif isinstance(msg, PositionsReveal):
        _require(isinstance(msg.mask, str) and msg.mask.strip("01") == ""
                 and msg.mask != "", "mask must be a nonempty bit string")
    elif isinstance(msg, SignalList):
        _require(isinstance(msg.signals, tuple)
                 and all(s in ("keep", "flip") for s in msg.signals),
                 "signals must all be keep or flip")
    elif isinstance(msg, Abort):
        _require(msg.reason in (ABORT_INSECURE, ABORT_ERROR),
                 f"unknown abort reason {msg.reason!r}")
        _require(isinstance(msg.detail, str), "detail must be a string")


def encode(msg: Message) -> bytes:
    """One message to one JSON line (trailing newline included)."""
    kind = _KIND_OF.get(type(msg))
    if kind is None:
        raise WireError(f"not a wire message: {type(msg).__name__}")
    _validate(msg)
    payload = {"kind": kind}
    for f in fields(msg):
        value = getattr(msg, f.name)
        if isinstance(value, tuple):
            value = list(value)
        payload[f.name] = value
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


def decode(line: Union[bytes, str]) -> Message:
    """One JSON line back to a validated message."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireError(f"undecodable bytes: {exc}") from None
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"bad JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise WireError("message must be a JSON object")
    kind = payload.pop("kind", None)
    cls = _KINDS.get(kind)
    if cls is None:
        raise WireError(f"unknown message kind {kind!r}")
    names = {f.name for f in fields(cls)}
    missing = names - set(payload)
    extra = set(payload) - names
    if missing or extra:
        raise WireError(
            f"{kind}: missing fields {sorted(missing)}, unexpected {sorted(extra)}"
        )
    if cls is SignalList and isinstance(payload.get("signals"), list):
        payload["signals"] = tuple(payload["signals"])
    try:
        msg = cls(**payload)
    except TypeError as exc:
        raise WireError(f"{kind}: {exc}") from None
    _validate(msg)
    return msg
