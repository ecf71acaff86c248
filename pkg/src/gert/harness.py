"""Monte Carlo harness: probe -> plan -> simulate -> estimate, repeated over trials.

Trials are keyed by ``(master_seed, trial)`` so every record can be regenerated
on its own; the output order is always sorted by ``(t, trial)``.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from gert.aloha import ProbeConfig, SimSeed, fm_probe, run_rounds
from gert.errors import DomainError
from gert.estimator import AccuracySpec, estimate
from gert.planner import FramePlan, PlannerConfig, min_planning_population, plan

GERT = "GERT"
WAEC = "GERT-WAEC"
MODES = (GERT, WAEC)

RECORD_COLUMNS = ("t", "trial", "tm", "r", "f", "p", "n", "epsilon", "t_hat", "z_bar", "slots", "within_beta")
SUMMARY_COLUMNS = ("t", "reliability", "slots_mean", "slots_std", "trials")


@dataclass(frozen=True)
class ExperimentSpec:
    t_values: tuple
    spec: AccuracySpec
    trials: int = 500
    seed: SimSeed = SimSeed(0)
    mode: str = GERT
    tm_override: Optional[int] = None
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)

    def __post_init__(self):
        object.__setattr__(self, "t_values", tuple(int(t) for t in self.t_values))
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not self.t_values or min(self.t_values) < 0:
            raise DomainError("t_values must be non-empty and non-negative")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.tm_override is not None and self.tm_override < 1:
            raise DomainError("tm_override must be >= 1")


@dataclass(frozen=True)
class ExperimentRecord:
    t: int
    trial: int
    t_m: int
    r: float
    f: int
    p: float
    n: int
    epsilon: float
    t_hat: float  # nan when the frames saturated
    z_bar: float
    slots: float
    within_beta: bool

    def row(self) -> list[str]:
        return [
            str(self.t),
            str(self.trial),
            str(self.t_m),
            _g10(self.r),
            str(self.f),
            _g10(self.p),
            str(self.n),
            _g10(self.epsilon),
            _g10(self.t_hat),
            _g10(self.z_bar),
            _g10(self.slots),
            "1" if self.within_beta else "0",
        ]


@dataclass(frozen=True)
class SummaryRow:
    t: int
    reliability: float
    slots_mean: float
    slots_std: float
    trials: int

    def row(self) -> list[str]:
        return [str(self.t), _g10(self.reliability), _g10(self.slots_mean), _g10(self.slots_std), str(self.trials)]


def _g10(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{float(x):.10g}"


@functools.lru_cache(maxsize=4096)
def cached_plan(t_m: int, spec: AccuracySpec, cfg: PlannerConfig, waec: bool) -> FramePlan:
    return plan(t_m, spec, cfg, waec=waec)


def planning_bound(t: int, spec: AccuracySpec, seed: SimSeed, trial: int,
                   probe_cfg: ProbeConfig, tm_override: Optional[int] = None) -> tuple[int, float]:
    """``(t_m, probe_cost)``: the probed (or given) bound, lifted to the smallest
    population the planner can serve."""
    if tm_override is not None:
        t_m, probe_cost = int(tm_override), 0.0
    else:
        t_m, probe_cost = fm_probe(t, probe_cfg, seed, trial), float(probe_cfg.probe_slots)
    return max(t_m, min_planning_population(spec)), probe_cost


def run_trial(
    t: int,
    spec: AccuracySpec,
    mode: str,
    seed: SimSeed,
    trial: int,
    *,
    probe_cfg: Optional[ProbeConfig] = None,
    planner_cfg: Optional[PlannerConfig] = None,
    tm_override: Optional[int] = None,
) -> ExperimentRecord:
    probe_cfg = probe_cfg or ProbeConfig()
    planner_cfg = planner_cfg or PlannerConfig()
    t_m, probe_cost = planning_bound(t, spec, seed, trial, probe_cfg, tm_override)
    fp = cached_plan(t_m, spec, planner_cfg, mode == WAEC)
    frames = run_rounds(t, fp, seed, trial)
    result = estimate(frames, fp.channel)
    if result.saturated:
        t_hat, ok = math.nan, False
    else:
        t_hat = result.t_hat
        ok = abs(t_hat - t) <= spec.beta * t
    return ExperimentRecord(
        t=t,
        trial=trial,
        t_m=t_m,
        r=fp.r,
        f=fp.f,
        p=fp.p,
        n=fp.n,
        epsilon=fp.epsilon,
        t_hat=t_hat,
        z_bar=result.z_bar,
        slots=probe_cost + fp.cost,
        within_beta=ok,
    )


def summarize(records: Iterable[ExperimentRecord]) -> list[SummaryRow]:
    by_t: dict[int, list[ExperimentRecord]] = {}
    for rec in records:
        by_t.setdefault(rec.t, []).append(rec)
    rows = []
    for t in sorted(by_t):
        recs = by_t[t]
        slots = np.array([r.slots for r in recs], dtype=np.float64)
        rows.append(
            SummaryRow(
                t=t,
                reliability=sum(r.within_beta for r in recs) / len(recs),
                slots_mean=float(slots.mean()),
                slots_std=float(slots.std()),
                trials=len(recs),
            )
        )
    return rows


def run_experiment(xs: ExperimentSpec) -> tuple[list[ExperimentRecord], list[SummaryRow]]:
    records = [
        run_trial(
            t,
            xs.spec,
            xs.mode,
            xs.seed,
            trial,
            probe_cfg=xs.probe,
            planner_cfg=xs.planner,
            tm_override=xs.tm_override,
        )
        for t in sorted(set(xs.t_values))
        for trial in range(xs.trials)
    ]
    return records, summarize(records)


def all_saturated(records: Sequence[ExperimentRecord]) -> bool:
    return bool(records) and all(math.isnan(r.t_hat) for r in records)


def _write(path, header: Sequence[str], rows: Iterable[list[str]]) -> None:
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def emit_csv(rows: Sequence, path) -> None:
    """Write experiment records or summary rows. An empty list writes the record header."""
    if rows and isinstance(rows[0], SummaryRow):
        _write(path, SUMMARY_COLUMNS, (r.row() for r in rows))
    else:
        _write(path, RECORD_COLUMNS, (r.row() for r in rows))


def emit_summary_csv(rows: Sequence[SummaryRow], path) -> None:
    _write(path, SUMMARY_COLUMNS, (r.row() for r in rows))
