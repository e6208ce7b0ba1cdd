"""Seeded Monte Carlo sweeps over delta, relay count, warden count or path-loss exponent.

Trial ``t`` places nodes with seed ``base_seed + t`` at every axis value, so
all curves are computed on the same placements.  Relays and wardens come
from separate substreams, which makes the relay (warden) set at a smaller
count a prefix of the set at a larger count.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .allocation import ALL_REGIMES, InfeasibleLinkError, Regime
from .covertness import CovertBudget, exposure_matrix
from .routing import NoRouteError, route
from .scenario import generate_random

AXES = ("delta", "n_nodes", "n_wardens", "alpha")
COUNT_AXES = ("n_nodes", "n_wardens")

RAW_HEADER = [
    "axis", "axis_value", "regime", "trial", "seed",
    "rate_coeff", "delay_coeff", "path_len", "path_cost",
]
SUMMARY_HEADER = [
    "axis", "axis_value", "regime", "mean_rate_coeff", "mean_delay_coeff",
    "stderr_rate", "stderr_delay", "trials",
]


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    trials: int = 100
    base_seed: int = 0
    regimes: tuple[Regime, ...] = ALL_REGIMES
    delta: float = 0.05
    n_nodes: int = 30
    n_wardens: int = 30
    alpha: float = 3.0
    dimension: float = 100.0
    node_noise: float = 1.0
    warden_noise: float = 1.0
    #: False draws an independent placement per count value instead of nested sets
    nested: bool = True

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {', '.join(AXES)}, got {self.axis!r}")
        values = tuple(self.values)
        if not values:
            raise ValueError("axis values must be non-empty")
        if self.axis in COUNT_AXES:
            if any(int(v) != v or v < 0 for v in values):
                raise ValueError(f"{self.axis} values must be non-negative integers")
            values = tuple(int(v) for v in values)
        else:
            values = tuple(float(v) for v in values)
        if list(values) != sorted(values):
            raise ValueError("axis values must be sorted")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.base_seed < 0:
            raise ValueError("base seed must be non-negative")
        if not self.regimes:
            raise ValueError("at least one regime is required")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "regimes", tuple(Regime(r) for r in self.regimes))

    def point(self, value) -> dict:
        """Parameters at one axis value."""
        params = {
            "delta": self.delta, "n_nodes": self.n_nodes,
            "n_wardens": self.n_wardens, "alpha": self.alpha,
        }
        params[self.axis] = value
        return params


@dataclass(frozen=True)
class TrialRecord:
    axis_value: float | int
    regime: Regime
    trial: int
    seed: int
    rate_coeff: float | None
    delay_coeff: float | None
    path_len: int | None
    path_cost: float | None
    error: str | None = None


@dataclass
class ExperimentResult:
    spec: SweepSpec
    records: list[TrialRecord] = field(default_factory=list)

    def raw(self, axis_value, regime, field_name: str = "rate_coeff") -> list[float]:
        """Per-trial values (in trial order) for one cell, failed trials excluded."""
        regime = Regime(regime)
        return [
            getattr(r, field_name)
            for r in self.records
            if r.axis_value == axis_value and r.regime is regime and r.error is None
            and getattr(r, field_name) is not None
        ]

    def mean(self, axis_value, regime, field_name: str = "rate_coeff") -> float:
        vals = self.raw(axis_value, regime, field_name)
        return math.fsum(vals) / len(vals) if vals else math.nan

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if r.error is not None)

    def seeds(self) -> list[int]:
        return sorted({r.seed for r in self.records})


def _trial_seed(spec: SweepSpec, trial: int, value_index: int) -> int:
    seed = spec.base_seed + trial
    if spec.nested or spec.axis not in COUNT_AXES:
        return seed
    # independent placements per count value, still a pure function of the sweep settings
    ss = np.random.SeedSequence([seed, value_index + 1])
    return int(ss.generate_state(1, np.uint32)[0])


def _run_trial(spec: SweepSpec, trial: int) -> list[TrialRecord]:
    out = []
    for vi, value in enumerate(spec.values):
        p = spec.point(value)
        seed = _trial_seed(spec, trial, vi)
        scenario = generate_random(
            seed, p["n_nodes"], p["n_wardens"], spec.dimension, p["alpha"],
            spec.node_noise, spec.warden_noise,
        )
        budget = CovertBudget(p["delta"])
        omega = exposure_matrix(scenario)
        for regime in spec.regimes:
            try:
                res = route(scenario, budget, regime, omega)
            except (NoRouteError, InfeasibleLinkError) as exc:
                out.append(TrialRecord(value, regime, trial, seed, None, None, None, None, str(exc)))
                continue
            out.append(
                TrialRecord(
                    value, regime, trial, seed, res.rate_coeff, res.delay_coeff,
                    res.path.hop_count, res.path_cost,
                )
            )
    return out


def _run_chunk(args):
    spec, trials = args
    return [_run_trial(spec, t) for t in trials]


def default_jobs() -> int:
    env = os.environ.get("COVERT_ROUTE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"COVERT_ROUTE_JOBS must be an integer, got {env!r}") from None
    return 1


def run_sweep(spec: SweepSpec, jobs: int | None = None) -> ExperimentResult:
    """Run every trial at every axis value and regime.

    Each trial depends only on ``(spec, trial)``, and records are put back in
    (axis value, regime, trial) order, so the result does not depend on
    ``jobs``.
    """
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    trials = list(range(spec.trials))
    if jobs == 1 or spec.trials == 1:
        per_trial = [_run_trial(spec, t) for t in trials]
    else:
        chunks = [trials[i::jobs] for i in range(jobs) if trials[i::jobs]]
        per_trial = [None] * spec.trials
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            for chunk, result in zip(chunks, pool.map(_run_chunk, [(spec, c) for c in chunks])):
                for t, recs in zip(chunk, result):
                    per_trial[t] = recs
    value_rank = {v: i for i, v in enumerate(spec.values)}
    regime_rank = {r: i for i, r in enumerate(spec.regimes)}
    records = [r for recs in per_trial for r in recs]
    records.sort(key=lambda r: (value_rank[r.axis_value], regime_rank[r.regime], r.trial))
    return ExperimentResult(spec, records)


# -- aggregation ------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    axis: str
    axis_value: float | int
    regime: Regime
    mean_rate_coeff: float
    mean_delay_coeff: float
    stderr_rate: float
    stderr_delay: float
    trials: int


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and standard error (sample std / sqrt(k)); a single value has stderr 0."""
    k = len(values)
    if k == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / k
    if k == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var) / math.sqrt(k)


def summarize(result: ExperimentResult) -> list[SummaryRow]:
    rows = []
    spec = result.spec
    for value in spec.values:
        for regime in spec.regimes:
            ok = [
                r for r in result.records
                if r.axis_value == value and r.regime is regime and r.error is None
            ]
            rates = [r.rate_coeff for r in ok if r.rate_coeff is not None]
            delays = [r.delay_coeff for r in ok]
            mr, sr = mean_stderr(rates)
            md, sd = mean_stderr(delays)
            rows.append(SummaryRow(spec.axis, value, regime, mr, md, sr, sd, len(ok)))
    return rows


# -- CSV -------------------------------------------------------------------


def fmt(value) -> str:
    """CSV cell: integers verbatim, floats with 17 significant digits, ``None`` empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return "%.17g" % v


def _write(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def raw_csv(result: ExperimentResult) -> str:
    axis = result.spec.axis
    return _write(
        (
            (axis, r.axis_value, r.regime.value, r.trial, r.seed, r.rate_coeff,
             r.delay_coeff, r.path_len, r.path_cost)
            for r in result.records
        ),
        RAW_HEADER,
    )


def summary_csv(rows: Sequence[SummaryRow]) -> str:
    return _write(
        (
            (r.axis, r.axis_value, r.regime.value, r.mean_rate_coeff, r.mean_delay_coeff,
             r.stderr_rate, r.stderr_delay, r.trials)
            for r in rows
        ),
        SUMMARY_HEADER,
    )


def summary_path(raw_path: str) -> str:
    root, ext = os.path.splitext(raw_path)
    return root + ".summary.csv" if ext.lower() == ".csv" else raw_path + ".summary.csv"


def write_csv(result: ExperimentResult, path: str) -> tuple[str, str]:
    """Write the raw and summary CSV files; returns both paths."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(raw_csv(result))
    spath = summary_path(path)
    with open(spath, "w", encoding="utf-8", newline="") as fh:
        fh.write(summary_csv(summarize(result)))
    return path, spath


def with_axis(spec: SweepSpec, axis: str, values) -> SweepSpec:
    return replace(spec, axis=axis, values=tuple(values))
