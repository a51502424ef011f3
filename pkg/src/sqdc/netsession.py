"""Running one session across two processes over a byte stream.

The sender process (Alice) owns the ground-truth quantum state, so the
quantum channel is simulated by a three-message round trip per slot:
slot handle out, measure/reflect intent back, resolved result out.  The
classical channel is the same stream.  Both processes drive the same
engines as the in-process runner with the same named random streams,
which makes the resulting transcripts byte-identical to a local run at
the same seed.

The wire is assumed authentic (unforgeable, unmodifiable) -- matching
the protocol's standing assumption of an authenticated classical
channel -- but not reliable: any timeout, disconnect, malformed message,
or protocol-order violation ends the session as an error abort, which is
deliberately distinct from the insecure abort an attack detection
produces.
"""

import queue
import socket
from typing import Optional

from .protocol import (
    AliceEngine,
    BobEngine,
    PHASE_MESSAGE,
    ProtocolViolation,
    SessionConfig,
    SessionOutcome,
    SessionStatus,
    Signal,
    phases_for,
)
from .actors import BobAction
from . import wire
from .wire import (
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
)

DEFAULT_TIMEOUT = 30.0


class SessionFault(Exception):
    """Transport- or peer-level failure that ends the session as an error."""


class StreamEndpoint:
    """Message port over a connected socket, one JSON line per message."""

    def __init__(self, sock: socket.socket, timeout: float = DEFAULT_TIMEOUT):
        sock.settimeout(timeout)
        self._sock = sock
        self._reader = sock.makefile("rb")

    def send(self, msg) -> None:
        try:
            self._sock.sendall(wire.encode(msg))
        except OSError as exc:
            raise SessionFault(f"send failed: {exc}") from None

    def recv(self):
        try:
            line = self._reader.readline()
        except socket.timeout:
            raise SessionFault("timed out waiting for the peer") from None
        except OSError as exc:
            raise SessionFault(f"receive failed: {exc}") from None
        if not line:
            raise SessionFault("peer closed the connection")
        try:
            return wire.decode(line)
        except WireError as exc:
            raise SessionFault(f"bad message: {exc}") from None

    def close(self) -> None:
        try:
            self._reader.close()
        finally:
            self._sock.close()


class QueueEndpoint:
    """In-memory message port; two of them back-to-back form a loopback."""

    def __init__(self, inbox: "queue.Queue", outbox: "queue.Queue",
                 timeout: float = DEFAULT_TIMEOUT):
        self._inbox = inbox
        self._outbox = outbox
        self._timeout = timeout

    def send(self, msg) -> None:
        # Round-trip through the codec so the loopback exercises exactly
        # the bytes a socket would carry.
        self._outbox.put(wire.encode(msg))

    def recv(self):
        try:
            line = self._inbox.get(timeout=self._timeout)
        except queue.Empty:
            raise SessionFault("timed out waiting for the peer") from None
        if line is None:
            raise SessionFault("peer closed the connection")
        try:
            return wire.decode(line)
        except WireError as exc:
            raise SessionFault(f"bad message: {exc}") from None

    def close(self) -> None:
        self._outbox.put(None)


def loopback_pair(timeout: float = DEFAULT_TIMEOUT) -> tuple[QueueEndpoint, QueueEndpoint]:
    a_to_b: queue.Queue = queue.Queue()
    b_to_a: queue.Queue = queue.Queue()
    return (QueueEndpoint(b_to_a, a_to_b, timeout),
            QueueEndpoint(a_to_b, b_to_a, timeout))


def _expect(endpoint, cls, session: Optional[str] = None):
    msg = endpoint.recv()
    if isinstance(msg, Abort):
        raise SessionFault(f"peer aborted: {msg.reason}: {msg.detail}")
    if not isinstance(msg, cls):
        raise SessionFault(
            f"expected {cls.__name__} but received {type(msg).__name__}"
        )
    if session is not None and msg.session != session:
        raise SessionFault(f"message for foreign session {msg.session!r}")
    return msg


def _error_outcome(detail: str) -> SessionOutcome:
    return SessionOutcome(status=SessionStatus.ABORTED_ERROR, detail=detail)


def run_alice_endpoint(config: SessionConfig, endpoint) -> SessionOutcome:
    """Drive the sending side of one session over an endpoint."""
    engine = AliceEngine(config)
    try:
        hello = _expect(endpoint, Hello)
        if hello.version != wire.VERSION:
            raise SessionFault(f"peer speaks version {hello.version}, not {wire.VERSION}")
        if hello.params != config.shared_fields():
            raise SessionFault(
                f"parameter mismatch: peer {hello.params}, ours {config.shared_fields()}"
            )
        session = hello.session
        endpoint.send(Hello(session, wire.VERSION, config.shared_fields()))

        for phase, count in engine.phases():
            endpoint.send(PhaseMark(session, phase))
            engine.begin_phase(phase)
            for k in range(count):
                engine.send_slot(k)
                endpoint.send(QubitMove(session, k))
                choice = _expect(endpoint, ActionChoice, session)
                if choice.slot != k:
                    raise SessionFault(f"intent for slot {choice.slot}, expected {k}")
                u = engine.resolve_slot(k, BobAction(choice.action))
                endpoint.send(ActionResult(session, k, u))

        reveal = _expect(endpoint, PositionsReveal, session)
        decision = engine.decide(reveal.mask)
        if decision.status is SessionStatus.ABORTED_INSECURE:
            endpoint.send(Abort(session, wire.ABORT_INSECURE,
                                "probe check rejected the channel"))
        else:
            endpoint.send(SignalList(session, tuple(s.value for s in decision.signals)))
        _expect(endpoint, Done, session)
        any_attack, any_dist = engine.ground_truth()
        return SessionOutcome(
            status=decision.status,
            recovered=None,
            stats=decision.stats,
            transcript=decision.transcript,
            any_attack=any_attack,
            any_disturbance=any_dist,
        )
    except (SessionFault, ProtocolViolation, WireError) as exc:
        try:
            endpoint.send(Abort("-", wire.ABORT_ERROR, str(exc)))
        except Exception:
            pass
        return _error_outcome(str(exc))


def run_bob_endpoint(config: SessionConfig, endpoint,
                     session: str = "session") -> SessionOutcome:
    """Drive the receiving side of one session over an endpoint."""
    engine = BobEngine(config)
    try:
        endpoint.send(Hello(session, wire.VERSION, config.shared_fields()))
        hello = _expect(endpoint, Hello, session)
        if hello.version != wire.VERSION:
            raise SessionFault(f"peer speaks version {hello.version}, not {wire.VERSION}")
        if hello.params != config.shared_fields():
            raise SessionFault("parameter mismatch in handshake echo")

        for phase, count in phases_for(config):
            mark = _expect(endpoint, PhaseMark, session)
            if mark.phase != phase:
                raise SessionFault(f"phase {mark.phase!r} announced, expected {phase!r}")
            for k in range(count):
                move = _expect(endpoint, QubitMove, session)
                if move.slot != k:
                    raise SessionFault(f"qubit for slot {move.slot}, expected {k}")
                action = engine.action(phase, k)
                endpoint.send(ActionChoice(session, k, action.value))
                res = _expect(endpoint, ActionResult, session)
                if res.slot != k:
                    raise SessionFault(f"result for slot {res.slot}, expected {k}")
                if action is BobAction.MEASURE:
                    if res.result is None:
                        raise SessionFault(f"slot {k}: measurement returned no bit")
                    if phase == PHASE_MESSAGE:
                        engine.record_result(k, res.result)
                elif res.result is not None:
                    raise SessionFault(f"slot {k}: unexpected result for a reflection")

        endpoint.send(PositionsReveal(session, engine.measured_mask()))
        msg = endpoint.recv()
        if isinstance(msg, Abort):
            if msg.reason == wire.ABORT_INSECURE:
                endpoint.send(Done(session))
                return SessionOutcome(status=SessionStatus.ABORTED_INSECURE,
                                      detail=msg.detail)
            return _error_outcome(f"peer aborted: {msg.detail}")
        if not isinstance(msg, SignalList):
            raise SessionFault(f"expected signals or abort, got {type(msg).__name__}")
        recovered = engine.recover([Signal(v) for v in msg.signals])
        endpoint.send(Done(session))
        return SessionOutcome(status=SessionStatus.DELIVERED, recovered=recovered)
    except (SessionFault, ProtocolViolation, WireError) as exc:
        try:
            endpoint.send(Abort(session, wire.ABORT_ERROR, str(exc)))
        except Exception:
            pass
        return _error_outcome(str(exc))


def serve_alice(config: SessionConfig, host: str = "127.0.0.1", port: int = 0,
                timeout: float = DEFAULT_TIMEOUT, on_listening=None) -> SessionOutcome:
    """Listen, accept one connection, run the sending side, return.

    With port 0 the OS picks a free port; ``on_listening`` (if given) is
    called with the bound (host, port) once the socket is ready, which is
    how tests and scripts learn where to connect.
    """
    with socket.create_server((host, port)) as server:
        server.settimeout(timeout)
        if on_listening is not None:
            on_listening(server.getsockname()[:2])
        try:
            conn, _ = server.accept()
        except socket.timeout:
            return _error_outcome("no connection before the timeout")
    # server socket closed; the accepted connection lives on
    endpoint = StreamEndpoint(conn, timeout)
    try:
        return run_alice_endpoint(config, endpoint)
    finally:
        endpoint.close()


def connect_bob(config: SessionConfig, host: str, port: int,
                timeout: float = DEFAULT_TIMEOUT) -> SessionOutcome:
    """Connect to a waiting sender and run the receiving side."""
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except OSError as exc:
        return _error_outcome(f"connect failed: {exc}")
    endpoint = StreamEndpoint(sock, timeout)
    try:
        return run_bob_endpoint(config, endpoint)
    finally:
        endpoint.close()
