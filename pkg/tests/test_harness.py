import math
import statistics

import pytest

from gert.aloha import ProbeConfig, SimSeed, fm_probe
from gert.errors import DomainError
from gert.estimator import AccuracySpec
from gert.harness import (
    GERT,
    RECORD_COLUMNS,
    SUMMARY_COLUMNS,
    WAEC,
    ExperimentSpec,
    all_saturated,
    emit_csv,
    emit_summary_csv,
    run_experiment,
    run_trial,
    summarize,
)

SPEC = AccuracySpec(0.95, 0.05)
SEED = SimSeed(77)


def test_zero_population_trial():
    rec = run_trial(0, SPEC, GERT, SEED, 0)
    assert rec.t_hat == 0.0 and rec.within_beta
    assert rec.z_bar == -1.0


def test_trial_is_deterministic():
    assert run_trial(1200, SPEC, GERT, SEED, 3) == run_trial(1200, SPEC, GERT, SEED, 3)


def test_trial_cost_accounting():
    probe = ProbeConfig()
    rec = run_trial(1200, SPEC, GERT, SEED, 5, probe_cfg=probe)
    assert rec.slots == pytest.approx(probe.probe_slots + (rec.f + 3.33) * rec.n, rel=1e-12)
    assert rec.t_m == max(400, fm_probe(1200, probe, SEED, 5))
    fixed = run_trial(1200, SPEC, GERT, SEED, 5, tm_override=1500)
    assert fixed.t_m == 1500
    assert fixed.slots == pytest.approx((fixed.f + 3.33) * fixed.n, rel=1e-12)


def test_within_beta_flag_consistent():
    recs, _ = run_experiment(ExperimentSpec((800, 3000), SPEC, trials=30, seed=SEED))
    for rec in recs:
        assert rec.within_beta == (abs(rec.t_hat - rec.t) <= SPEC.beta * rec.t)
        assert rec.slots > 0


def test_saturated_trial_counts_as_failure():
    rec = run_trial(100_000, SPEC, GERT, SEED, 0, tm_override=400)
    assert math.isnan(rec.t_hat) and rec.z_bar == 1.0 and not rec.within_beta
    assert all_saturated([rec])


def test_single_trial_summary_equals_record():
    recs, summ = run_experiment(ExperimentSpec((1200,), SPEC, trials=1, seed=SEED))
    (rec,), (row,) = recs, summ
    assert row.t == rec.t and row.trials == 1
    assert row.slots_mean == rec.slots and row.slots_std == 0.0
    assert row.reliability == (1.0 if rec.within_beta else 0.0)


def test_summary_recomputes_from_records():
    recs, summ = run_experiment(ExperimentSpec((400, 2400), SPEC, trials=40, seed=SEED))
    assert [(r.t, r.trial) for r in recs] == sorted((r.t, r.trial) for r in recs)
    for row in summ:
        mine = [r for r in recs if r.t == row.t]
        slots = [r.slots for r in mine]
        assert row.slots_mean == pytest.approx(statistics.fmean(slots), rel=1e-12)
        assert row.slots_std == pytest.approx(statistics.pstdev(slots), rel=1e-9, abs=1e-9)
        assert row.reliability == sum(r.within_beta for r in mine) / len(mine)
    assert summarize(recs) == summ


def test_waec_never_costs_more_on_shared_seeds():
    g_recs, _ = run_experiment(ExperimentSpec((1200,), SPEC, trials=25, seed=SEED, mode=GERT))
    w_recs, _ = run_experiment(ExperimentSpec((1200,), SPEC, trials=25, seed=SEED, mode=WAEC))
    for a, b in zip(g_recs, w_recs):
        assert a.t_m == b.t_m
        assert b.slots <= a.slots
        assert b.epsilon == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [dict(trials=0), dict(t_values=()), dict(t_values=(-1,)), dict(mode="EZB"), dict(tm_override=0)],
)
def test_experiment_spec_validation(kwargs):
    base = dict(t_values=(100,), spec=SPEC)
    base.update(kwargs)
    with pytest.raises(DomainError):
        ExperimentSpec(**base)


# -- CSV --------------------------------------------------------------------------


def test_csv_header_only_for_empty(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_bytes() == (",".join(RECORD_COLUMNS) + "\n").encode()
    assert ",".join(RECORD_COLUMNS) == "t,trial,tm,r,f,p,n,epsilon,t_hat,z_bar,slots,within_beta"


def test_csv_records_and_summary(tmp_path):
    recs, summ = run_experiment(ExperimentSpec((1200,), SPEC, trials=2, seed=SEED))
    path = tmp_path / "recs.csv"
    emit_csv(recs, path)
    data = path.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert len(lines) == 3
    fields = lines[1].split(",")
    assert len(fields) == len(RECORD_COLUMNS)
    assert float(fields[10]) == pytest.approx(recs[0].slots, rel=1e-10)

    spath = tmp_path / "summary.csv"
    emit_summary_csv(summ, spath)
    assert spath.read_text().splitlines()[0] == ",".join(SUMMARY_COLUMNS) == "t,reliability,slots_mean,slots_std,trials"
    emit_csv(summ, tmp_path / "summary2.csv")
    assert (tmp_path / "summary2.csv").read_bytes() == spath.read_bytes()


def test_csv_rerun_byte_identical(tmp_path):
    for name in ("a.csv", "b.csv"):
        recs, _ = run_experiment(ExperimentSpec((400, 1200), SPEC, trials=5, seed=SEED))
        emit_csv(recs, tmp_path / name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_io_error_mentions_path(tmp_path):
    bad = tmp_path / "missing-dir" / "out.csv"
    with pytest.raises(OSError, match="missing-dir"):
        emit_csv([], bad)


def test_float_format_ten_significant_digits(tmp_path):
    recs, _ = run_experiment(ExperimentSpec((1200,), SPEC, trials=1, seed=SEED))
    emit_csv(recs, tmp_path / "x.csv")
    t_hat = (tmp_path / "x.csv").read_text().splitlines()[1].split(",")[8]
    assert t_hat == f"{recs[0].t_hat:.10g}"
