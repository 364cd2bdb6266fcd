"""Replication harness for the simulation experiments.

An experiment is a list of cells (one fully-specified generator each) run
for a common number of replications.  Replication r of cell c always draws
from the stream seeded by derive_seed(master_seed, c, r), so results are
independent of execution order and degree of parallelism, and extending
the replication count never reseeds the existing replications.

Each cell tabulates the distribution of the detected change-point count
and, conditional on replications that detected exactly the true number of
breaks, the median and median absolute deviation (unscaled, about the
median) of each estimated break fraction.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from .errors import CorrsegError
from .lrv import DEFAULT_MIN_SEGMENT, HacConfig
from .segmentation import SegmentationConfig, detect
from .simulate import BreakSchedule, DccSpec, Var1Spec, derive_seed, simulate_dcc, simulate_var1


@dataclass(frozen=True)
class ExperimentCell:
    """One parameter point: a generator spec whose seed the harness derives."""

    label: str
    spec: Var1Spec | DccSpec


@dataclass(frozen=True)
class Experiment:
    name: str
    cells: tuple[ExperimentCell, ...]
    replications: int
    alpha0: float = 0.05
    n_min: int = DEFAULT_MIN_SEGMENT
    hac: HacConfig = field(default_factory=HacConfig)
    master_seed: int = 271828
    max_exact_count: int = 2  # tabulate counts 0..k exactly, then ">=k+1"

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.max_exact_count < 0:
            raise ValueError("max_exact_count must be non-negative")
        if isinstance(self.cells, list):
            object.__setattr__(self, "cells", tuple(self.cells))

    @property
    def count_categories(self) -> tuple[str, ...]:
        exact = tuple(str(c) for c in range(self.max_exact_count + 1))
        return exact + (f">={self.max_exact_count + 1}",)

    def segmentation_config(self) -> SegmentationConfig:
        return SegmentationConfig(alpha0=self.alpha0, n_min=self.n_min, hac=self.hac)


def sweep(base: Var1Spec | DccSpec, **value_lists) -> tuple[ExperimentCell, ...]:
    """Cartesian product of spec-field value lists, as labelled cells.

    ``sweep(var1_base, phi=[-0.5, 0.0, 0.8], T=[200, 500])`` yields six
    cells labelled ``phi=-0.5,T=200`` and so on, each a copy of ``base``
    with those fields replaced.  Schedule sweeps pass BreakSchedule values
    and are labelled by their levels.
    """
    cells = [("", base)]
    for field_name, values in value_lists.items():
        expanded = []
        for label, spec in cells:
            for v in values:
                if isinstance(v, BreakSchedule):
                    tag = f"{field_name}=" + "/".join(f"{lv:g}" for lv in v.levels)
                elif isinstance(v, (tuple, list)):
                    tag = f"{field_name}=" + "/".join(f"{lv:g}" for lv in v)
                else:
                    tag = f"{field_name}={v:g}" if isinstance(v, float) else f"{field_name}={v}"
                expanded.append(
                    (f"{label},{tag}" if label else tag, dataclasses.replace(spec, **{field_name: v}))
                )
        cells = expanded
    return tuple(ExperimentCell(label=label, spec=spec) for label, spec in cells)


@dataclass(frozen=True)
class CellSummary:
    label: str
    true_breaks: tuple[float, ...]
    replications: int
    frequencies: dict[str, float]
    frequency_bands: dict[str, float]  # two-sigma binomial half-widths
    failures: int
    n_conditioned: int  # replications with detected count == true count
    location_medians: tuple[float, ...] | None
    location_mads: tuple[float, ...] | None


@dataclass(frozen=True)
class ExperimentSummary:
    name: str
    replications: int
    master_seed: int
    cells: tuple[CellSummary, ...]
    wall_time: float


def _simulate(spec):
    if isinstance(spec, Var1Spec):
        return simulate_var1(spec)
    return simulate_dcc(spec)


def _run_replication(task):
    spec, config = task
    pair = _simulate(spec)
    try:
        report = detect(pair, config)
    except CorrsegError:
        return None
    return len(report.changepoints), report.fractions


def _summarize_cell(exp: Experiment, cell: ExperimentCell, results) -> CellSummary:
    ok = [r for r in results if r is not None]
    failures = len(results) - len(ok)
    denom = max(1, len(ok))

    counts = [c for c, _ in ok]
    freqs: dict[str, float] = {}
    bands: dict[str, float] = {}
    for cat in exp.count_categories:
        if cat.startswith(">="):
            hits = sum(1 for c in counts if c >= int(cat[2:]))
        else:
            hits = sum(1 for c in counts if c == int(cat))
        p = hits / denom
        freqs[cat] = p
        bands[cat] = 2.0 * np.sqrt(p * (1.0 - p) / denom)

    true_breaks = cell.spec.schedule.breaks
    true_count = len(true_breaks)
    conditioned = [fr for c, fr in ok if c == true_count and c > 0]
    medians = mads = None
    if conditioned:
        cols = list(zip(*conditioned))  # one tuple per break position
        medians = tuple(float(median(col)) for col in cols)
        mads = tuple(
            float(median(abs(v - m) for v in col)) for col, m in zip(cols, medians)
        )
    return CellSummary(
        label=cell.label,
        true_breaks=true_breaks,
        replications=len(results),
        frequencies=freqs,
        frequency_bands=bands,
        failures=failures,
        n_conditioned=len(conditioned),
        location_medians=medians,
        location_mads=mads,
    )


def run_experiment(exp: Experiment, jobs: int = 1) -> ExperimentSummary:
    """Run every cell for the experiment's replication count.

    ``jobs`` > 1 distributes replications over worker processes; the
    summary is identical either way.  Per-replication detection failures
    are counted per cell, never fatal.
    """
    started = time.perf_counter()
    config = exp.segmentation_config()
    tasks = []
    for ci, cell in enumerate(exp.cells):
        for r in range(exp.replications):
            spec = dataclasses.replace(cell.spec, seed=derive_seed(exp.master_seed, ci, r))
            tasks.append((spec, config))

    if jobs > 1:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_replication, tasks, chunksize=chunk))
    else:
        results = [_run_replication(t) for t in tasks]

    cells = []
    for ci, cell in enumerate(exp.cells):
        chunk = results[ci * exp.replications : (ci + 1) * exp.replications]
        cells.append(_summarize_cell(exp, cell, chunk))
    return ExperimentSummary(
        name=exp.name,
        replications=exp.replications,
        master_seed=exp.master_seed,
        cells=tuple(cells),
        wall_time=time.perf_counter() - started,
    )


def summary_to_csv(summary: ExperimentSummary) -> str:
    """One row per cell; frequencies paired with their tolerance bands."""
    if not summary.cells:
        return "experiment,cell\r\n"
    cats = list(summary.cells[0].frequencies)
    head = ["experiment", "cell", "replications", "failures"]
    for cat in cats:
        tag = cat.replace(">=", "ge") if cat.startswith(">=") else cat
        head += [f"freq_{tag}", f"band_{tag}"]
    head += ["true_breaks", "n_conditioned", "location_medians", "location_mads"]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(head)
    for cell in summary.cells:
        row = [summary.name, cell.label, cell.replications, cell.failures]
        for cat in cats:
            row += [f"{cell.frequencies[cat]:.6g}", f"{cell.frequency_bands[cat]:.6g}"]
        row.append(";".join(f"{z:g}" for z in cell.true_breaks))
        row.append(cell.n_conditioned)
        row.append(";".join(f"{v:.6g}" for v in cell.location_medians or ()))
        row.append(";".join(f"{v:.6g}" for v in cell.location_mads or ()))
        writer.writerow(row)
    return buf.getvalue()


def summary_to_dict(summary: ExperimentSummary) -> dict:
    return {
        "name": summary.name,
        "replications": summary.replications,
        "master_seed": summary.master_seed,
        "wall_time": summary.wall_time,
        "cells": [
            {
                "label": c.label,
                "true_breaks": list(c.true_breaks),
                "replications": c.replications,
                "failures": c.failures,
                "frequencies": c.frequencies,
                "frequency_bands": c.frequency_bands,
                "n_conditioned": c.n_conditioned,
                "location_medians": list(c.location_medians) if c.location_medians else None,
                "location_mads": list(c.location_mads) if c.location_mads else None,
            }
            for c in summary.cells
        ],
    }
