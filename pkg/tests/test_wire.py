"""Codec totality and strictness for the newline-JSON wire format."""

import json

import pytest

from sqdc.wire import (
    Abort,
    ActionChoice,
    ActionResult,
    Done,
    Hello,
    PhaseMark,
    PositionsReveal,
    QubitMove,
    SignalList,
    WireError,
    decode,
    encode,
)

ALL_MESSAGES = [
    Hello("sid", 1, {"s": 4, "r": 2}),
    PhaseMark("sid", "calibration"),
    PhaseMark("sid", "message"),
    QubitMove("sid", 0),
    ActionChoice("sid", 3, "measure"),
    ActionChoice("sid", 3, "reflect"),
    ActionResult("sid", 3, 1),
    ActionResult("sid", 3, None),
    PositionsReveal("sid", "0110"),
    SignalList("sid", ("keep", "flip", "keep")),
    SignalList("sid", ()),
    Abort("sid", "insecure", "probe check failed"),
    Abort("sid", "error", ""),
    Done("sid"),
]


@pytest.mark.parametrize("msg", ALL_MESSAGES, ids=lambda m: type(m).__name__)
def test_round_trip_identity(msg):
    assert decode(encode(msg)) == msg


def test_encoding_is_one_json_line(msg=ALL_MESSAGES[0]):
    raw = encode(msg)
    assert raw.endswith(b"\n") and raw.count(b"\n") == 1
    payload = json.loads(raw)
    assert payload["kind"] == "hello"


def test_encoding_is_deterministic():
    assert encode(Hello("x", 1, {"b": 2, "a": 1})) == encode(Hello("x", 1, {"b": 2, "a": 1}))


def test_decode_accepts_str_and_bytes():
    raw = encode(Done("sid"))
    assert decode(raw) == decode(raw.decode())


@pytest.mark.parametrize("line", [
    b"not json\n",
    b"[1,2]\n",
    b'{"no":"kind"}\n',
    b'{"kind":"mystery","session":"s"}\n',
    b'{"kind":"done"}\n',                                      # missing field
    b'{"kind":"done","session":"s","extra":1}\n',              # extra field
    b'{"kind":"done","session":""}\n',                         # empty session
    b'{"kind":"phase","session":"s","phase":"warmup"}\n',
    b'{"kind":"qubit","session":"s","slot":-1}\n',
    b'{"kind":"qubit","session":"s","slot":"0"}\n',
    b'{"kind":"action","session":"s","slot":0,"action":"peek"}\n',
    b'{"kind":"result","session":"s","slot":0,"result":2}\n',
    b'{"kind":"positions","session":"s","mask":"012"}\n',
    b'{"kind":"positions","session":"s","mask":""}\n',
    b'{"kind":"signals","session":"s","signals":["keep","maybe"]}\n',
    b'{"kind":"abort","session":"s","reason":"tired","detail":""}\n',
    b'{"kind":"hello","session":"s","version":"1","params":{}}\n',
    b'{"kind":"hello","session":"s","version":1,"params":[]}\n',
    b"\xff\xfe\n",
])
def test_malformed_lines_raise(line):
    with pytest.raises(WireError):
        decode(line)


def test_encode_rejects_foreign_objects():
    with pytest.raises(WireError):
        encode({"kind": "done", "session": "s"})


def test_encode_validates_before_sending():
    with pytest.raises(WireError):
        encode(PhaseMark("sid", "warmup"))
    with pytest.raises(WireError):
        encode(Abort("sid", "bored"))
