"""Monte Carlo sweeps over the protocol's parameter space.

Each sweep kind fixes one question: how does detection probability grow
with the probe count; how do the two error rates trade off against the
significance level; how many probes buy a target error rate; what does
the probe overhead cost in qubit efficiency.  Results go to a fixed CSV
schema (grid columns, then estimate, ci_lo, ci_hi, trials, theory) so
any plotting tool can consume them.

Work is split into blocks of trials per grid point, each block seeded
from (base seed, point index, block index).  Blocks merge by summing
counts, so the result is byte-identical no matter how many workers ran
them or in what order.
"""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

from .actors import ChannelModel
from .protocol import MODE_STRICT, MODE_TOLERANT, run_detection_rounds
from .rng import StreamBank, derive_seed
from .stats import detection_probability, rate_test, wilson_interval

KIND_DETECTION = "detection_vs_r"
KIND_ALPHA = "alpha_sweep"
KIND_ERRORS_UNKNOWN = "errors_vs_probes_unknown"
KIND_ERRORS_KNOWN = "errors_vs_probes_known"
KIND_EFFICIENCY = "efficiency"

ALL_KINDS = (KIND_DETECTION, KIND_ALPHA, KIND_ERRORS_UNKNOWN,
             KIND_ERRORS_KNOWN, KIND_EFFICIENCY)

# Trials per work unit: small enough to parallelize a 10^4-trial point,
# large enough that per-block overhead stays negligible.
BLOCK_TRIALS = 1000


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of one sweep.

    Which fields matter depends on ``kind``:

    - detection_vs_r: p_values x r_values grid, clean-channel detection.
    - alpha_sweep: alpha_values grid at fixed r, s_est, omega, p; both
      the known- and estimated-disturbance variants run per point.
    - errors_vs_probes_unknown: p_values x probes_values grid, where
      each probes value is used for both phases (r = s_est = probes).
    - errors_vs_probes_known: same grid, r = probes, no calibration.
    - efficiency: s_values x r_values grid of closed-form reports; uses
      mode, alpha, s_est; trials is ignored.
    """

    kind: str
    p_values: tuple[float, ...] = ()
    r_values: tuple[int, ...] = ()
    alpha_values: tuple[float, ...] = ()
    probes_values: tuple[int, ...] = ()
    s_values: tuple[int, ...] = ()
    omega: float = 0.0
    alpha: float = 0.05
    p: float = 0.0
    r: int = 0
    s_est: int = 0
    mode: str = MODE_STRICT
    trials: int = 10_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        need = {
            KIND_DETECTION: ("p_values", "r_values"),
            KIND_ALPHA: ("alpha_values",),
            KIND_ERRORS_UNKNOWN: ("p_values", "probes_values"),
            KIND_ERRORS_KNOWN: ("p_values", "probes_values"),
            KIND_EFFICIENCY: ("s_values", "r_values"),
        }[self.kind]
        for name in need:
            if not getattr(self, name):
                raise ValueError(f"{self.kind} needs a nonempty {name}")
        if self.kind == KIND_ALPHA and (self.r < 1 or self.s_est < 1):
            raise ValueError("alpha_sweep needs positive r and s_est")

    def to_json(self) -> str:
        return json.dumps({f.name: getattr(self, f.name) for f in fields(self)},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("sweep spec must be a JSON object")
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep spec fields: {sorted(unknown)}")
        for name in ("p_values", "r_values", "alpha_values", "probes_values", "s_values"):
            if name in data:
                data[name] = tuple(data[name])
        return cls(**data)


@dataclass(frozen=True)
class SweepRow:
    """One grid point (or one error kind at one grid point)."""

    params: tuple[tuple[str, object], ...]
    estimate: float
    ci_lo: float
    ci_hi: float
    trials: int
    theory: Optional[float]


@dataclass
class SweepResult:
    kind: str
    columns: tuple[str, ...]
    rows: list[SweepRow] = field(default_factory=list)


@dataclass(frozen=True)
class EfficiencyReport:
    """Qubit cost of delivering one message."""

    message_length: int
    qubits_sent: float
    eta: float
    restart_factor: float


def efficiency_report(s: int, r: int, alpha: float = 0.05,
                      mode: str = MODE_STRICT, s_est: int = 0) -> EfficiencyReport:
    """Expected qubit efficiency eta = message length / qubits sent.

    Strict mode never aborts on a clean channel, so the cost is exactly
    s+r.  Tolerant mode adds the calibration probes and pays a restart
    factor 1/(1-alpha): the rate test false-alarms with probability
    about alpha even with no attacker, forcing a rerun.
    """
    if s < 1:
        raise ValueError("message length must be >= 1")
    if r < 1:
        raise ValueError("r must be >= 1")
    if mode == MODE_STRICT:
        factor = 1.0
        qubits = float(s + r)
    elif mode == MODE_TOLERANT:
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must be in (0,1)")
        factor = 1.0 / (1.0 - alpha)
        qubits = (s + r + s_est) * factor
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return EfficiencyReport(s, qubits, s / qubits, factor)


# ---------------------------------------------------------------------------
# trial blocks


def _detection_block(p: float, r: int, trials: int, seed: int) -> tuple[int, ...]:
    bank = StreamBank(seed)
    channel = ChannelModel(p, 0.0)
    detected = 0
    for _ in range(trials):
        if run_detection_rounds(r, channel, bank).positives:
            detected += 1
    return (detected,)


def _rate_test_block(p: float, omega: float, alpha: float, r: int, s_est: int,
                     known: bool, trials: int, seed: int) -> tuple[int, ...]:
    """Counts (attacked, attacked+rejected, clean, clean+rejected)."""
    bank = StreamBank(seed)
    calibration = ChannelModel(0.0, omega)
    message = ChannelModel(p, omega)
    att = att_rej = clean = clean_rej = 0
    for _ in range(trials):
        if known:
            main = run_detection_rounds(r, message, bank)
            stats = rate_test(main.positives, r, alpha, omega=omega)
        else:
            base = run_detection_rounds(s_est, calibration, bank)
            main = run_detection_rounds(r, message, bank)
            stats = rate_test(main.positives, r, alpha,
                              baseline_mismatches=base.positives,
                              baseline_probes=s_est)
        if main.attacked:
            att += 1
            att_rej += stats.rejected
        else:
            clean += 1
            clean_rej += stats.rejected
    return (att, att_rej, clean, clean_rej)


def _run_task(task):
    kind, point_idx, block_idx, args = task
    if kind == KIND_DETECTION:
        counts = _detection_block(*args)
    else:
        counts = _rate_test_block(*args)
    return point_idx, block_idx, counts


def _blocks(trials: int):
    done = 0
    idx = 0
    while done < trials:
        n = min(BLOCK_TRIALS, trials - done)
        yield idx, n
        done += n
        idx += 1


def _run_tasks(spec: SweepSpec, tasks: list) -> dict[int, tuple[int, ...]]:
    """Run blocks, possibly in worker processes, and merge counts per point."""
    merged: dict[int, tuple[int, ...]] = {}
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = pool.map(_run_task, tasks, chunksize=4)
    else:
        results = map(_run_task, tasks)
    for point_idx, _, counts in results:
        old = merged.get(point_idx)
        merged[point_idx] = counts if old is None else tuple(
            a + b for a, b in zip(old, counts)
        )
    return merged


def _error_rows(params: list[tuple[str, object]], counts: tuple[int, ...],
                confidence: float = 0.95) -> list[SweepRow]:
    """Missed-attack and false-alarm rows from one point's counters.

    Each rate conditions on its own population (attacked or clean
    trials), so a row disappears when its population is empty -- a
    missed-attack rate is undefined when no trial contained an attack.
    """
    att, att_rej, clean, clean_rej = counts
    rows = []
    if att > 0:
        missed = att - att_rej
        lo, hi = wilson_interval(missed, att, confidence)
        rows.append(SweepRow(tuple(params + [("error_type", "missed_attack")]),
                             missed / att, lo, hi, att, None))
    if clean > 0:
        lo, hi = wilson_interval(clean_rej, clean, confidence)
        rows.append(SweepRow(tuple(params + [("error_type", "false_alarm")]),
                             clean_rej / clean, lo, hi, clean, None))
    return rows


# ---------------------------------------------------------------------------
# sweep kinds


def sweep_detection(spec: SweepSpec) -> SweepResult:
    """Any-mismatch detection rate per (attack rate, probe count) point."""
    if spec.kind != KIND_DETECTION:
        raise ValueError(f"expected kind {KIND_DETECTION}, got {spec.kind}")
    points = [(p, r) for p in spec.p_values for r in spec.r_values]
    tasks = []
    for idx, (p, r) in enumerate(points):
        for block_idx, n in _blocks(spec.trials):
            tasks.append((spec.kind, idx, block_idx,
                          (p, r, n, derive_seed(spec.seed, spec.kind, idx, block_idx))))
    merged = _run_tasks(spec, tasks)
    result = SweepResult(spec.kind, ("p", "r", "estimate", "ci_lo", "ci_hi",
                                     "trials", "theory"))
    for idx, (p, r) in enumerate(points):
        detected = merged[idx][0]
        lo, hi = wilson_interval(detected, spec.trials)
        result.rows.append(SweepRow(
            (("p", p), ("r", r)),
            detected / spec.trials, lo, hi, spec.trials,
            detection_probability(p, r),
        ))
    return result


def sweep_alpha(spec: SweepSpec) -> SweepResult:
    """Error rates vs. significance level, in both disturbance modes."""
    if spec.kind != KIND_ALPHA:
        raise ValueError(f"expected kind {KIND_ALPHA}, got {spec.kind}")
    points = [(alpha, known) for alpha in spec.alpha_values for known in (False, True)]
    tasks = []
    for idx, (alpha, known) in enumerate(points):
        for block_idx, n in _blocks(spec.trials):
            tasks.append((spec.kind, idx, block_idx,
                          (spec.p, spec.omega, alpha, spec.r, spec.s_est, known,
                           n, derive_seed(spec.seed, spec.kind, idx, block_idx))))
    merged = _run_tasks(spec, tasks)
    result = SweepResult(spec.kind, ("alpha", "disturbance_mode", "error_type",
                                     "estimate", "ci_lo", "ci_hi", "trials", "theory"))
    for idx, (alpha, known) in enumerate(points):
        params = [("alpha", alpha),
                  ("disturbance_mode", "known" if known else "estimated")]
        result.rows.extend(_error_rows(params, merged[idx]))
    return result


def sweep_errors(spec: SweepSpec, known_omega: bool) -> SweepResult:
    """Error rates vs. probe count per attack rate."""
    expected = KIND_ERRORS_KNOWN if known_omega else KIND_ERRORS_UNKNOWN
    if spec.kind != expected:
        raise ValueError(f"expected kind {expected}, got {spec.kind}")
    points = [(p, n) for p in spec.p_values for n in spec.probes_values]
    tasks = []
    for idx, (p, probes) in enumerate(points):
        s_est = 0 if known_omega else probes
        for block_idx, n in _blocks(spec.trials):
            tasks.append((spec.kind, idx, block_idx,
                          (p, spec.omega, spec.alpha, probes, s_est, known_omega,
                           n, derive_seed(spec.seed, spec.kind, idx, block_idx))))
    merged = _run_tasks(spec, tasks)
    result = SweepResult(spec.kind, ("p", "probes", "error_type", "estimate",
                                     "ci_lo", "ci_hi", "trials", "theory"))
    for idx, (p, probes) in enumerate(points):
        params = [("p", p), ("probes", probes)]
        result.rows.extend(_error_rows(params, merged[idx]))
    return result


def sweep_efficiency(spec: SweepSpec) -> SweepResult:
    """Closed-form efficiency over (message length, probe count)."""
    if spec.kind != KIND_EFFICIENCY:
        raise ValueError(f"expected kind {KIND_EFFICIENCY}, got {spec.kind}")
    result = SweepResult(spec.kind, ("mode", "s", "r", "s_est", "alpha",
                                     "estimate", "ci_lo", "ci_hi", "trials", "theory"))
    for s in spec.s_values:
        for r in spec.r_values:
            rep = efficiency_report(s, r, spec.alpha, spec.mode, spec.s_est)
            result.rows.append(SweepRow(
                (("mode", spec.mode), ("s", s), ("r", r),
                 ("s_est", spec.s_est), ("alpha", spec.alpha)),
                rep.eta, rep.eta, rep.eta, 0, rep.eta,
            ))
    return result


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Dispatch a spec to its sweep kind."""
    if spec.kind == KIND_DETECTION:
        return sweep_detection(spec)
    if spec.kind == KIND_ALPHA:
        return sweep_alpha(spec)
    if spec.kind == KIND_ERRORS_UNKNOWN:
        return sweep_errors(spec, known_omega=False)
    if spec.kind == KIND_ERRORS_KNOWN:
        return sweep_errors(spec, known_omega=True)
    return sweep_efficiency(spec)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(result: SweepResult, destination) -> None:
    """Write a result in the fixed schema to a path or text file object."""
    if not result.rows:
        raise ValueError("refusing to emit an empty result")
    own = isinstance(destination, (str, os.PathLike))
    out = open(destination, "w", newline="") if own else destination
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            cells = [_format_cell(v) for _, v in row.params]
            cells += [_format_cell(row.estimate), _format_cell(row.ci_lo),
                      _format_cell(row.ci_hi), _format_cell(row.trials),
                      _format_cell(row.theory)]
            writer.writerow(cells)
    finally:
        if own:
            out.close()


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    emit_csv(result, buf)
    return buf.getvalue()
