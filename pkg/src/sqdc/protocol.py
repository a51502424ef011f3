"""Protocol orchestration: probe rounds, single-bit transfer, and full
message sessions in strict and tolerant modes.

A session interleaves s data slots (Bob measures, contributing one bit
each to a shared string) with r probing slots (Bob reflects, Alice
checks the pair survived) at positions only Bob knows until he reveals
them.  Classical post-processing then runs in three steps: the security
check over probing slots, Alice's inference of Bob's measured bits from
her Bell outcomes, and the keep/flip rectification that turns the shared
string into the intended message.

Strict mode assumes a noiseless channel and aborts on the first probe
mismatch.  Tolerant mode accepts a channel with background disturbance:
mismatches are counted, and a one-sided z-test decides whether their
rate exceeds what the disturbance rate (known a priori, or estimated in
an attack-free calibration phase) explains.

The two engines here hold each party's half of the session state.  The
in-process runner and the socket transport both drive the same engines
with the same named random streams, which is why a session transcript is
byte-identical across the two modes at equal seeds.
"""

import enum
from dataclasses import dataclass
from typing import Optional

from .actors import (
    BobAction,
    ChannelModel,
    Direction,
    FlightRecord,
    alice_measure,
    alice_send,
    bob_handle,
    channel_transit,
)
from .rng import MAX_SEED, StreamBank
from .stats import DetectionStats, rate_test

MODE_STRICT = "strict"
MODE_TOLERANT = "tolerant"

PHASE_CALIBRATION = "calibration"
PHASE_MESSAGE = "message"


class ProtocolViolation(Exception):
    """A party deviated from the agreed message/step sequence."""


def check_probe(e1: int, e2: int, i: int) -> int:
    """Security check for one reflected probe: 1 signals a mismatch.

    An intact pair prepared from bit i always yields the Bell outcome
    (i, i), so anything else proves the pair was destroyed in transit.
    """
    return 0 if e1 == e2 == i else 1


def infer_measured_bit(e1: int, e2: int, i: int) -> int:
    """Alice's reconstruction of Bob's measured bit from her outcome.

    Once Bob measures, Alice's retained half holds a definite value that
    the second Bell-outcome bit reveals (it flags whether her half agreed
    with the |0> qubit Bob returned).  Undoing the pair correlation with
    the preparation bit gives Bob's result: u = e2 XOR i.
    """
    return e2 ^ i


class Signal(enum.Enum):
    """Rectification signal Alice sends per data bit."""

    KEEP = "keep"
    FLIP = "flip"


def rectify_signal(m: int, c: int) -> Signal:
    """KEEP when Alice's inferred bit c already equals the message bit m."""
    return Signal.KEEP if c == m else Signal.FLIP


def apply_signal(signal: Signal, u: int) -> int:
    """Bob's side of rectification: keep his bit or take its complement."""
    return u if signal is Signal.KEEP else 1 - u


@dataclass(frozen=True)
class SessionConfig:
    """Everything that determines a session, including its randomness.

    ``message`` may be None on the receiving side, which never knows it.
    In strict mode the disturbance rate is forced to zero: that protocol
    variant is only sound on a noiseless channel, and modelling it there
    would just re-derive the motivation for the tolerant variant.
    """

    s: int
    r: int
    mode: str = MODE_STRICT
    p: float = 0.0
    omega: float = 0.0
    alpha: float = 0.05
    omega_known: bool = False
    s_est: int = 0
    seed: int = 0
    message: Optional[str] = None

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must be >= 0")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.s_est < 0:
            raise ValueError("s_est must be >= 0")
        if self.mode not in (MODE_STRICT, MODE_TOLERANT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0,1)")
        for name in ("p", "omega"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {val}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must be in [0, 2**64)")
        if self.mode == MODE_TOLERANT and not self.omega_known and self.s_est < 1:
            raise ValueError("tolerant mode with estimated disturbance needs s_est >= 1")
        if self.mode == MODE_STRICT and self.omega != 0.0:
            object.__setattr__(self, "omega", 0.0)
        if self.message is not None:
            if len(self.message) != self.s:
                raise ValueError(
                    f"message length {len(self.message)} != s={self.s}"
                )
            if self.message.strip("01") != "":
                raise ValueError("message must contain only 0 and 1")

    @property
    def total_slots(self) -> int:
        return self.s + self.r

    def shared_fields(self) -> dict:
        """The parameters both parties must agree on before starting.

        Excludes the message (Alice's secret) and the channel rates,
        which belong to the simulated world rather than the protocol.
        """
        return {
            "s": self.s,
            "r": self.r,
            "mode": self.mode,
            "alpha": self.alpha,
            "omega_known": self.omega_known,
            "s_est": self.s_est,
            "seed": self.seed,
        }


def phases_for(config: SessionConfig) -> list[tuple[str, int]]:
    """The phase schedule both parties must follow: (name, slot count).

    Only the tolerant protocol with an unknown disturbance rate has a
    calibration phase; everything else goes straight to the message
    phase of s+r slots.
    """
    out = []
    if config.mode == MODE_TOLERANT and not config.omega_known:
        out.append((PHASE_CALIBRATION, config.s_est))
    out.append((PHASE_MESSAGE, config.total_slots))
    return out


class SessionStatus(enum.Enum):
    DELIVERED = "delivered"
    ABORTED_INSECURE = "aborted_insecure"
    ABORTED_ERROR = "aborted_error"


@dataclass
class Transcript:
    """Alice's complete record of one session.

    Strings are indexed by slot; ``bob_results`` and ``inferred`` cover
    only the measured slots, in slot order.  A session aborted by the
    security check stops before inference, so ``inferred`` and
    ``signals`` stay empty there and the length invariants below apply
    to delivered sessions.
    """

    prepared: str
    measured_mask: str
    bell_first: str
    bell_second: str
    bob_results: str
    inferred: str
    signals: list[Signal]
    probe_mismatches: int
    baseline_probes: int = 0
    baseline_mismatches: int = 0

    def to_dict(self) -> dict:
        return {
            "prepared": self.prepared,
            "measured_mask": self.measured_mask,
            "bell_first": self.bell_first,
            "bell_second": self.bell_second,
            "bob_results": self.bob_results,
            "inferred": self.inferred,
            "signals": [sig.value for sig in self.signals],
            "probe_mismatches": self.probe_mismatches,
            "baseline_probes": self.baseline_probes,
            "baseline_mismatches": self.baseline_mismatches,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Transcript":
        return cls(
            prepared=d["prepared"],
            measured_mask=d["measured_mask"],
            bell_first=d["bell_first"],
            bell_second=d["bell_second"],
            bob_results=d["bob_results"],
            inferred=d["inferred"],
            signals=[Signal(v) for v in d["signals"]],
            probe_mismatches=d["probe_mismatches"],
            baseline_probes=d["baseline_probes"],
            baseline_mismatches=d["baseline_mismatches"],
        )


@dataclass
class SessionOutcome:
    """What one party knows when the session ends.

    Ground truth (``any_attack``, ``any_disturbance``) comes from the
    channel's flight records and exists only on the side that simulates
    the channel; the receiving side of a networked session sees None
    there, and has no transcript or test statistics of its own.
    """

    status: SessionStatus
    recovered: Optional[str] = None
    stats: Optional[DetectionStats] = None
    transcript: Optional[Transcript] = None
    any_attack: Optional[bool] = None
    any_disturbance: Optional[bool] = None
    detail: str = ""

    @property
    def delivered(self) -> bool:
        return self.status is SessionStatus.DELIVERED


@dataclass
class AliceDecision:
    """Result of Alice's classical post-processing."""

    status: SessionStatus
    signals: Optional[list[Signal]]
    transcript: Transcript
    stats: Optional[DetectionStats]


class AliceEngine:
    """Alice's half of a session.

    Owns the ground-truth pair states, so it also resolves Bob's
    measure/reflect choices: the collapse draw happens here, from the
    dedicated measurement stream, and the result travels back to Bob.
    Slots are strictly ping-pong: send k, resolve k, send k+1, ...
    """

    def __init__(self, config: SessionConfig):
        if config.message is None and config.s > 0:
            raise ValueError("the sending side needs the message")
        self.config = config
        bank = StreamBank(config.seed)
        self._alice = bank.stream("alice")
        self._eve = bank.stream("eve")
        self._env = bank.stream("env")
        self._measure = bank.stream("measure")
        self._bell = bank.stream("bell")
        self._phase: Optional[str] = None
        self._channel = ChannelModel()
        self._expect = 0          # next slot index to send
        self._inflight = None     # (slot, flying qubit) awaiting resolution
        self._phase_len = 0
        self.records: list[FlightRecord] = []
        # message-phase per-slot data
        self._prep: list[int] = []
        self._e1: list[int] = []
        self._e2: list[int] = []
        self._actions: list[BobAction] = []
        self._results: dict[int, int] = {}
        # calibration-phase counters
        self.baseline_probes = 0
        self.baseline_mismatches = 0

    def phases(self) -> list[tuple[str, int]]:
        return phases_for(self.config)

    def begin_phase(self, phase: str) -> None:
        expected = [name for name, _ in self.phases()]
        done = [] if self._phase is None else expected[: expected.index(self._phase) + 1]
        if phase not in expected or expected.index(phase) != len(done):
            raise ProtocolViolation(f"phase {phase!r} out of order")
        if self._inflight is not None:
            raise ProtocolViolation("previous slot still unresolved")
        self._phase = phase
        self._expect = 0
        self._phase_len = dict(self.phases())[phase]
        if phase == PHASE_CALIBRATION:
            # Calibration estimates the channel's own disturbance, which
            # only works if no attacker acts during it; the simulation
            # enforces that assumption by switching the attack off.
            self._channel = ChannelModel(0.0, self.config.omega)
        else:
            self._channel = ChannelModel(self.config.p, self.config.omega)

    def send_slot(self, index: int):
        """Create the pair for this slot and run the outbound transit.

        Returns the flying qubit; the driver only needs it as an opaque
        token, since resolution happens back on this engine.
        """
        if self._phase is None:
            raise ProtocolViolation("no phase begun")
        if index != self._expect or index >= self._phase_len:
            raise ProtocolViolation(f"slot {index} out of order")
        if self._inflight is not None:
            raise ProtocolViolation(f"slot {self._inflight[0].index} still in flight")
        slot, q = alice_send(index, self._alice)
        self.records.append(
            channel_transit(q, self._channel, Direction.ALICE_TO_BOB, self._eve, self._env)
        )
        self._inflight = (slot, q)
        return q

    def resolve_slot(self, index: int, action: BobAction) -> Optional[int]:
        """Apply Bob's choice, run the return leg, Bell-measure the slot."""
        if self._inflight is None or self._inflight[0].index != index:
            raise ProtocolViolation(f"slot {index} is not in flight")
        if self._phase == PHASE_CALIBRATION and action is not BobAction.REFLECT:
            raise ProtocolViolation("calibration slots must be reflected")
        slot, q = self._inflight
        self._inflight = None
        self._expect = index + 1
        returned, u = bob_handle(action, q, self._measure)
        channel_transit(returned, self._channel, Direction.BOB_TO_ALICE, self._eve, self._env)
        e1, e2 = alice_measure(slot, returned, self._bell)
        if self._phase == PHASE_CALIBRATION:
            self.baseline_probes += 1
            self.baseline_mismatches += check_probe(e1, e2, slot.prep_bit)
        else:
            self._prep.append(slot.prep_bit)
            self._e1.append(e1)
            self._e2.append(e2)
            self._actions.append(action)
            if u is not None:
                self._results[index] = u
        return u

    def decide(self, measured_mask: str) -> AliceDecision:
        """Classical post-processing once Bob reveals his choices.

        Validates the revealed mask against what actually happened (a
        mismatch means a corrupted or dishonest peer), runs the security
        check, and on acceptance produces the rectification signals.
        """
        cfg = self.config
        n = cfg.total_slots
        if self._phase != PHASE_MESSAGE or self._expect != self._phase_len or self._inflight:
            raise ProtocolViolation("message phase incomplete")
        if len(measured_mask) != n or measured_mask.strip("01") != "":
            raise ProtocolViolation("malformed measured-position string")
        if measured_mask.count("1") != cfg.s:
            raise ProtocolViolation(
                f"peer claims {measured_mask.count('1')} measured slots, expected {cfg.s}"
            )
        for k in range(n):
            claimed = BobAction.MEASURE if measured_mask[k] == "1" else BobAction.REFLECT
            if claimed is not self._actions[k]:
                raise ProtocolViolation(f"slot {k}: revealed choice contradicts the session")

        transcript = Transcript(
            prepared="".join(map(str, self._prep)),
            measured_mask=measured_mask,
            bell_first="".join(map(str, self._e1)),
            bell_second="".join(map(str, self._e2)),
            bob_results="".join(str(self._results[k]) for k in sorted(self._results)),
            inferred="",
            signals=[],
            probe_mismatches=0,
            baseline_probes=self.baseline_probes,
            baseline_mismatches=self.baseline_mismatches,
        )

        # Security check over the reflected slots.
        stats = None
        if cfg.mode == MODE_STRICT:
            for k in range(n):
                if measured_mask[k] == "0" and check_probe(self._e1[k], self._e2[k], self._prep[k]):
                    transcript.probe_mismatches = 1
                    return AliceDecision(SessionStatus.ABORTED_INSECURE, None, transcript, None)
        else:
            mismatches = 0
            for k in range(n):
                if measured_mask[k] == "0":
                    mismatches += check_probe(self._e1[k], self._e2[k], self._prep[k])
            transcript.probe_mismatches = mismatches
            if cfg.omega_known:
                stats = rate_test(mismatches, cfg.r, cfg.alpha, omega=cfg.omega)
            else:
                stats = rate_test(
                    mismatches, cfg.r, cfg.alpha,
                    baseline_mismatches=self.baseline_mismatches,
                    baseline_probes=self.baseline_probes,
                )
            if stats.rejected:
                return AliceDecision(SessionStatus.ABORTED_INSECURE, None, transcript, stats)

        # Inference and rectification over the measured slots.
        inferred = [
            infer_measured_bit(self._e1[k], self._e2[k], self._prep[k])
            for k in range(n)
            if measured_mask[k] == "1"
        ]
        transcript.inferred = "".join(map(str, inferred))
        transcript.signals = [
            rectify_signal(int(m), c) for m, c in zip(cfg.message or "", inferred)
        ]
        return AliceDecision(SessionStatus.DELIVERED, transcript.signals, transcript, stats)

    def ground_truth(self) -> tuple[bool, bool]:
        any_attack = any(rec.attacked for rec in self.records)
        any_dist = any(rec.disturbed for rec in self.records)
        return any_attack, any_dist


class BobEngine:
    """Bob's half of a session: choose, reveal, recover.

    Bob's only randomness is which slots to measure; an attacker who
    cannot predict the subset cannot target data slots.  His measurement
    results come back from the resolution step, since the simulated
    collapse runs where the ground-truth state lives.
    """

    def __init__(self, config: SessionConfig):
        self.config = config
        rng = StreamBank(config.seed).stream("bob")
        order = list(range(config.total_slots))
        rng.shuffle(order)
        self._measure_slots = frozenset(order[: config.s])
        self._results: dict[int, int] = {}

    def action(self, phase: str, index: int) -> BobAction:
        if phase == PHASE_CALIBRATION:
            return BobAction.REFLECT
        return BobAction.MEASURE if index in self._measure_slots else BobAction.REFLECT

    def record_result(self, index: int, u: int) -> None:
        self._results[index] = u

    def measured_mask(self) -> str:
        n = self.config.total_slots
        return "".join("1" if k in self._measure_slots else "0" for k in range(n))

    def recover(self, signals: list[Signal]) -> str:
        """Apply Alice's keep/flip signals to the measured bits, slot order."""
        if len(signals) != len(self._results):
            raise ProtocolViolation(
                f"got {len(signals)} signals for {len(self._results)} measured bits"
            )
        bits = [self._results[k] for k in sorted(self._results)]
        return "".join(str(apply_signal(sig, u)) for sig, u in zip(signals, bits))


def run_session(config: SessionConfig) -> SessionOutcome:
    """Run one complete session with both parties in this process."""
    alice = AliceEngine(config)
    bob = BobEngine(config)
    for phase, count in alice.phases():
        alice.begin_phase(phase)
        for k in range(count):
            alice.send_slot(k)
            action = bob.action(phase, k)
            u = alice.resolve_slot(k, action)
            if u is not None and phase == PHASE_MESSAGE:
                bob.record_result(k, u)
    decision = alice.decide(bob.measured_mask())
    any_attack, any_dist = alice.ground_truth()
    recovered = None
    if decision.status is SessionStatus.DELIVERED:
        recovered = bob.recover(decision.signals)
    return SessionOutcome(
        status=decision.status,
        recovered=recovered,
        stats=decision.stats,
        transcript=decision.transcript,
        any_attack=any_attack,
        any_disturbance=any_dist,
    )


def run_strict_session(config: SessionConfig) -> SessionOutcome:
    if config.mode != MODE_STRICT:
        raise ValueError("config is not strict-mode")
    return run_session(config)


def run_tolerant_session(config: SessionConfig) -> SessionOutcome:
    if config.mode != MODE_TOLERANT:
        raise ValueError("config is not tolerant-mode")
    return run_session(config)


@dataclass
class DetectionRounds:
    """Aggregate of n standalone probe rounds."""

    probes: int
    positives: int
    attacked: int
    disturbed: int

    @property
    def detected(self) -> bool:
        return self.positives > 0


def run_detection_rounds(n: int, channel: ChannelModel, bank: StreamBank) -> DetectionRounds:
    """n independent probe rounds over the given channel.

    Each round: create a pair, outbound transit, reflect, return
    transit, Bell-measure, consistency check.  Draws continue wherever
    the bank's streams currently stand, so successive calls on one bank
    behave like successive phases of one session.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    a = bank.stream("alice")
    eve = bank.stream("eve")
    env = bank.stream("env")
    meas = bank.stream("measure")
    bell = bank.stream("bell")
    out_leg = Direction.ALICE_TO_BOB
    back_leg = Direction.BOB_TO_ALICE
    reflect = BobAction.REFLECT
    positives = attacked = disturbed = 0
    for k in range(n):
        slot, q = alice_send(k, a)
        rec = channel_transit(q, channel, out_leg, eve, env)
        returned, _ = bob_handle(reflect, q, meas)
        channel_transit(returned, channel, back_leg, eve, env)
        e1, e2 = alice_measure(slot, returned, bell)
        if not (e1 == e2 == slot.prep_bit):
            positives += 1
        if rec.attacked:
            attacked += 1
        if rec.disturbed:
            disturbed += 1
    return DetectionRounds(n, positives, attacked, disturbed)


def run_single_bit_transfer(m: int, channel: ChannelModel, bank: StreamBank) -> int:
    """Transfer one message bit through one measured slot, end to end.

    The building block of a session, run standalone: Bob measures the
    travelling half, Alice Bell-measures, infers his result, and sends
    the keep/flip signal he applies.  Returns Bob's final bit, which on
    a clean channel always equals m.
    """
    if m not in (0, 1):
        raise ValueError("message bit must be 0 or 1")
    slot, q = alice_send(0, bank.stream("alice"))
    channel_transit(q, channel, Direction.ALICE_TO_BOB, bank.stream("eve"), bank.stream("env"))
    returned, u = bob_handle(BobAction.MEASURE, q, bank.stream("measure"))
    channel_transit(returned, channel, Direction.BOB_TO_ALICE, bank.stream("eve"), bank.stream("env"))
    e1, e2 = alice_measure(slot, returned, bank.stream("bell"))
    c = infer_measured_bit(e1, e2, slot.prep_bit)
    signal = rectify_signal(m, c)
    return apply_signal(signal, u)


def _config_dict(config: SessionConfig) -> dict:
    return {
        "s": config.s,
        "r": config.r,
        "mode": config.mode,
        "p": config.p,
        "omega": config.omega,
        "alpha": config.alpha,
        "omega_known": config.omega_known,
        "s_est": config.s_est,
        "seed": config.seed,
        "message": config.message,
    }


def outcome_record(config: SessionConfig, outcome: SessionOutcome) -> dict:
    """One-session audit record, serializable as a single JSON line.

    Re-running the configuration reproduces the transcript exactly, so
    the record doubles as a replay anchor.
    """
    return {
        "config": _config_dict(config),
        "status": outcome.status.value,
        "recovered": outcome.recovered,
        "any_attack": outcome.any_attack,
        "any_disturbance": outcome.any_disturbance,
        "transcript": outcome.transcript.to_dict() if outcome.transcript else None,
        "stats": outcome.stats.to_dict() if outcome.stats else None,
        "detail": outcome.detail,
    }


def replay_record(record: dict) -> SessionOutcome:
    """Re-run the session a record describes and check it reproduces.

    Raises ProtocolViolation if the stored transcript disagrees with the
    re-run, which would mean the record was edited or came from a
    different build of the simulator.
    """
    config = SessionConfig(**record["config"])
    outcome = run_session(config)
    stored = record.get("transcript")
    fresh = outcome.transcript.to_dict() if outcome.transcript else None
    if stored != fresh:
        raise ProtocolViolation("replay diverged from the recorded transcript")
    return outcome
