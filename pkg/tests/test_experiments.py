"""Sweep harness: spec validation, grid mechanics, CSV, reproducibility."""

import csv
import io
import json

import pytest

from sqdc.experiments import (
    KIND_ALPHA,
    KIND_DETECTION,
    KIND_EFFICIENCY,
    KIND_ERRORS_KNOWN,
    KIND_ERRORS_UNKNOWN,
    SweepSpec,
    csv_text,
    efficiency_report,
    emit_csv,
    run_sweep,
    sweep_alpha,
    sweep_detection,
    sweep_errors,
)
from sqdc.protocol import MODE_TOLERANT
from sqdc.stats import detection_probability


def detection_spec(**kwargs):
    base = dict(kind=KIND_DETECTION, p_values=(1.0,), r_values=(1, 3),
                trials=400, seed=5)
    base.update(kwargs)
    return SweepSpec(**base)


class TestSweepSpec:
    def test_json_round_trip(self):
        spec = detection_spec()
        again = SweepSpec.from_json(spec.to_json())
        assert again == spec

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            SweepSpec(kind="nope", trials=1)

    def test_missing_grid(self):
        with pytest.raises(ValueError):
            SweepSpec(kind=KIND_DETECTION, trials=10)

    def test_unknown_field_in_json(self):
        with pytest.raises(ValueError):
            SweepSpec.from_json('{"kind": "detection_vs_r", "bogus": 1}')

    def test_non_object_json(self):
        with pytest.raises(ValueError):
            SweepSpec.from_json('[1, 2]')

    def test_alpha_sweep_needs_fixed_probe_counts(self):
        with pytest.raises(ValueError):
            SweepSpec(kind=KIND_ALPHA, alpha_values=(0.05,), trials=10)

    def test_trials_and_workers_bounds(self):
        with pytest.raises(ValueError):
            detection_spec(trials=0)
        with pytest.raises(ValueError):
            detection_spec(workers=0)


class TestDetectionSweep:
    def test_estimates_and_theory(self):
        result = sweep_detection(detection_spec(trials=2000))
        assert [dict(r.params)["r"] for r in result.rows] == [1, 3]
        for row in result.rows:
            p, r = dict(row.params)["p"], dict(row.params)["r"]
            assert row.theory == pytest.approx(detection_probability(p, r))
            assert row.ci_lo <= row.estimate <= row.ci_hi
            assert abs(row.estimate - row.theory) < 0.05
            assert row.trials == 2000

    def test_kind_checked(self):
        with pytest.raises(ValueError):
            sweep_detection(SweepSpec(kind=KIND_EFFICIENCY, s_values=(10,),
                                      r_values=(1,), trials=1))

    def test_estimate_monotone_in_r(self):
        spec = detection_spec(p_values=(0.5,), r_values=(1, 4, 16), trials=2000)
        rows = sweep_detection(spec).rows
        estimates = [row.estimate for row in rows]
        assert estimates == sorted(estimates)


class TestErrorSweeps:
    def test_row_structure_unknown(self):
        spec = SweepSpec(kind=KIND_ERRORS_UNKNOWN, p_values=(0.6,),
                         probes_values=(40,), omega=0.05, alpha=0.05,
                         trials=300, seed=2)
        rows = sweep_errors(spec, known_omega=False).rows
        kinds = {dict(r.params)["error_type"] for r in rows}
        assert "missed_attack" in kinds  # p=0.6, r=40: attacks essentially certain

    def test_no_attack_point_omits_missed_attack_row(self):
        spec = SweepSpec(kind=KIND_ERRORS_KNOWN, p_values=(0.0,),
                         probes_values=(30,), omega=0.05, alpha=0.05,
                         trials=200, seed=3)
        rows = sweep_errors(spec, known_omega=True).rows
        assert {dict(r.params)["error_type"] for r in rows} == {"false_alarm"}

    def test_flag_must_match_kind(self):
        spec = SweepSpec(kind=KIND_ERRORS_UNKNOWN, p_values=(0.1,),
                         probes_values=(10,), trials=10)
        with pytest.raises(ValueError):
            sweep_errors(spec, known_omega=True)

    def test_alpha_sweep_covers_both_modes_and_errors(self):
        spec = SweepSpec(kind=KIND_ALPHA, alpha_values=(0.05,), r=30, s_est=30,
                         omega=0.1, p=0.5, trials=300, seed=7)
        rows = sweep_alpha(spec).rows
        combos = {(dict(r.params)["disturbance_mode"], dict(r.params)["error_type"])
                  for r in rows}
        assert ("known", "false_alarm") in combos or ("known", "missed_attack") in combos
        assert ("estimated", "false_alarm") in combos or ("estimated", "missed_attack") in combos


class TestEfficiency:
    def test_strict_closed_form(self):
        rep = efficiency_report(10 ** 6, 15)
        assert rep.eta == pytest.approx(10 ** 6 / (10 ** 6 + 15))
        assert rep.restart_factor == 1.0
        assert rep.qubits_sent == 10 ** 6 + 15

    def test_tolerant_includes_restart_overhead(self):
        rep = efficiency_report(10 ** 6, 40, alpha=0.01, mode=MODE_TOLERANT, s_est=0)
        assert rep.restart_factor == pytest.approx(1 / 0.99)
        assert rep.eta == pytest.approx(0.99 * 10 ** 6 / (10 ** 6 + 40))

    def test_calibration_probes_count_as_cost(self):
        with_est = efficiency_report(1000, 60, alpha=0.05, mode=MODE_TOLERANT, s_est=60)
        without = efficiency_report(1000, 60, alpha=0.05, mode=MODE_TOLERANT, s_est=0)
        assert with_est.eta < without.eta

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            efficiency_report(0, 10)
        with pytest.raises(ValueError):
            efficiency_report(10, 0)
        with pytest.raises(ValueError):
            efficiency_report(10, 5, mode="bogus")
        with pytest.raises(ValueError):
            efficiency_report(10, 5, alpha=1.0, mode=MODE_TOLERANT)

    def test_efficiency_sweep_rows(self):
        spec = SweepSpec(kind=KIND_EFFICIENCY, s_values=(100, 1000), r_values=(15,),
                         mode=MODE_TOLERANT, alpha=0.05, s_est=15, trials=1)
        result = run_sweep(spec)
        assert len(result.rows) == 2
        for row in result.rows:
            assert row.estimate == row.theory == row.ci_lo == row.ci_hi


class TestCsvEmission:
    def test_schema_and_content(self):
        result = sweep_detection(detection_spec(trials=300))
        text = csv_text(result)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["p", "r", "estimate", "ci_lo", "ci_hi", "trials", "theory"]
        assert len(rows) == 1 + len(result.rows)
        # floats survive a parse round trip exactly (repr formatting)
        assert float(rows[1][2]) == result.rows[0].estimate

    def test_empty_theory_cell(self):
        spec = SweepSpec(kind=KIND_ERRORS_KNOWN, p_values=(0.5,), probes_values=(20,),
                         omega=0.05, trials=200, seed=1)
        text = csv_text(sweep_errors(spec, known_omega=True))
        rows = list(csv.reader(io.StringIO(text)))
        assert all(row[-1] == "" for row in rows[1:])

    def test_refuses_empty_result(self):
        from sqdc.experiments import SweepResult
        with pytest.raises(ValueError):
            emit_csv(SweepResult("detection_vs_r", ("a",)), io.StringIO())

    def test_writes_to_path(self, tmp_path):
        result = sweep_detection(detection_spec(trials=200))
        dest = tmp_path / "out.csv"
        emit_csv(result, dest)
        assert dest.read_text() == csv_text(result)


class TestReproducibility:
    def test_worker_count_does_not_change_the_csv(self):
        spec = detection_spec(trials=1500)  # 2 blocks: 1000 + 500
        serial = csv_text(run_sweep(spec))
        parallel = csv_text(run_sweep(SweepSpec.from_json(
            json.dumps({**json.loads(spec.to_json()), "workers": 2}))))
        assert serial == parallel

    def test_same_seed_same_csv(self):
        spec = detection_spec(trials=500)
        assert csv_text(run_sweep(spec)) == csv_text(run_sweep(spec))

    def test_different_seed_different_estimates(self):
        a = run_sweep(detection_spec(p_values=(0.4,), r_values=(2,), trials=800, seed=1))
        b = run_sweep(detection_spec(p_values=(0.4,), r_values=(2,), trials=800, seed=2))
        assert a.rows[0].estimate != b.rows[0].estimate
