"""Repeated-trial experiments, theory validation and (n, r) sweeps.

Trial ``t`` of cell ``(n, r)`` runs on ``RngStream.from_key(master_seed, n, r, t)``,
so a cell's numbers do not depend on which other cells are run, on the
number of workers, or on execution order.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from . import __version__
from .onemax import Genome, RngStream
from .rmhc import PolicyConfig, run_noisy
from .theory import expected_evaluations

CSV_COLUMNS = (
    "n",
    "r",
    "sigma",
    "store_statistic",
    "trials",
    "success_count",
    "mean_evaluations",
    "std_error",
    "truncated",
)

TABLE_R = (1, 2, 3, 4, 5, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    n_list: tuple[int, ...] = (10,)
    r_list: tuple[int, ...] = (1,)
    sigma: float = 1.0
    trials: int = 100
    budget: int = 10_000_000
    store_statistic: bool = False
    master_seed: int = 0
    init_policy: Literal["all-zeros", "uniform-random"] = "all-zeros"
    censored: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "r_list", tuple(int(r) for r in self.r_list))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if any(n < 1 for n in self.n_list):
            raise ValueError("every n must be >= 1")
        if any(r < 1 for r in self.r_list):
            raise ValueError("every r must be >= 1")
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.init_policy not in ("all-zeros", "uniform-random"):
            raise ValueError(f"unknown init_policy {self.init_policy!r}")

    def policy(self, r: int) -> PolicyConfig:
        return PolicyConfig(r=r, store_statistic=self.store_statistic, budget=self.budget, sigma=self.sigma)


@dataclass(frozen=True)
class CellRecord:
    """Aggregate of one ``(n, r)`` cell.

    ``mean_evaluations`` and ``std_error`` are over solved trials and are
    ``None`` when the cell is truncated (some trial hit the budget), unless
    the config asked for censored means. ``std_error`` is also ``None`` with
    fewer than two contributing trials.
    """

    n: int
    r: int
    sigma: float
    store_statistic: bool
    trials: int
    success_count: int
    mean_evaluations: float | None
    std_error: float | None
    truncated: bool


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    cells: list[CellRecord] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def master_seed(self) -> int:
        return self.config.master_seed

    def cell(self, n: int, r: int) -> CellRecord:
        for c in self.cells:
            if c.n == n and c.r == r:
                return c
        raise KeyError((n, r))

    def argmin_r(self) -> dict[int, int | None]:
        """Empirically best ``r`` per ``n`` among non-truncated cells."""
        out: dict[int, int | None] = {}
        for n in dict.fromkeys(c.n for c in self.cells):
            usable = [c for c in self.cells if c.n == n and c.mean_evaluations is not None and not c.truncated]
            out[n] = min(usable, key=lambda c: (c.mean_evaluations, c.r)).r if usable else None
        return out


def _trial_evaluations(n: int, r: int, cfg: ExperimentConfig, trials: Sequence[int]) -> list[tuple[bool, int]]:
    policy = cfg.policy(r)
    out = []
    for t in trials:
        rng = RngStream.from_key(cfg.master_seed, n, r, t)
        init = Genome.random(n, rng) if cfg.init_policy == "uniform-random" else Genome.zeros(n)
        res = run_noisy(n, init, policy, rng)
        out.append((res.solved, res.evaluations_used))
    return out


def _run_trials(n: int, r: int, cfg: ExperimentConfig, workers: int | None) -> list[tuple[bool, int]]:
    if not workers or workers <= 1 or cfg.trials < 2:
        return _trial_evaluations(n, r, cfg, range(cfg.trials))
    chunks = [list(c) for c in np.array_split(np.arange(cfg.trials), min(workers * 4, cfg.trials)) if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_trial_evaluations, [n] * len(chunks), [r] * len(chunks), [cfg] * len(chunks),
                         [[int(t) for t in c] for c in chunks])
        # map preserves chunk order, so the join is in trial-index order
        return [item for part in parts for item in part]


def aggregate(n: int, r: int, cfg: ExperimentConfig, outcomes: Sequence[tuple[bool, int]]) -> CellRecord:
    solved = [ev for ok, ev in outcomes if ok]
    truncated = len(solved) < len(outcomes)
    sample = [ev for _, ev in outcomes] if cfg.censored else solved
    mean = se = None
    if sample and (cfg.censored or not truncated):
        arr = np.asarray(sample, dtype=float)
        mean = float(arr.mean())
        if arr.size >= 2:
            se = float(arr.std(ddof=1) / math.sqrt(arr.size))
    return CellRecord(
        n=n,
        r=r,
        sigma=float(cfg.sigma),
        store_statistic=cfg.store_statistic,
        trials=len(outcomes),
        success_count=len(solved),
        mean_evaluations=mean,
        std_error=se,
        truncated=truncated,
    )


def run_cell(n: int, r: int, cfg: ExperimentConfig, workers: int | None = None) -> CellRecord:
    """Run ``cfg.trials`` independent noisy RMHC runs at ``(n, r)`` and aggregate."""
    return aggregate(n, r, cfg, _run_trials(n, r, cfg, workers))


def sweep(cfg: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Every cell of ``n_list x r_list``, in that order."""
    t0 = time.perf_counter()
    cells = [run_cell(n, r, cfg, workers) for n in cfg.n_list for r in cfg.r_list]
    return ExperimentReport(config=cfg, cells=cells, wall_time=time.perf_counter() - t0)


@dataclass(frozen=True)
class ValidationRow:
    r: int
    theory: float
    empirical: float | None
    std_error: float | None
    rel_error: float | None
    within_tolerance: bool


@dataclass(frozen=True)
class ValidationTable:
    n: int
    sigma: float
    trials: int
    tolerance: float
    rows: tuple[ValidationRow, ...]

    @property
    def ok(self) -> bool:
        return all(row.within_tolerance for row in self.rows)

    def format(self) -> str:
        lines = [f"{'r':>3}  {'theory':>12}  {'empirical':>12}  {'std_err':>8}  {'rel_err':>8}  ok"]
        for row in self.rows:
            emp = f"{row.empirical:12.4f}" if row.empirical is not None else f"{'-':>12}"
            se = f"{row.std_error:8.4f}" if row.std_error is not None else f"{'-':>8}"
            rel = f"{row.rel_error:8.4%}" if row.rel_error is not None else f"{'-':>8}"
            lines.append(f"{row.r:>3}  {row.theory:12.4f}  {emp}  {se}  {rel}  {'yes' if row.within_tolerance else 'NO'}")
        return "\n".join(lines)


def table_config(trials: int = 10_000, master_seed: int = 0, budget: int = 10_000_000) -> ExperimentConfig:
    """Default Table-I style config: n = 10, sigma = 1, no stored statistic."""
    return ExperimentConfig(
        n_list=(10,), r_list=TABLE_R, sigma=1.0, trials=trials, budget=budget,
        store_statistic=False, master_seed=master_seed,
    )


def validate_table(cfg: ExperimentConfig | None = None, tolerance: float = 0.02,
                   workers: int | None = None) -> ValidationTable:
    """Compare empirical mean evaluations with the exact expectation per ``r``.

    Only meaningful without a stored statistic, where the theory applies.
    """
    cfg = cfg or table_config()
    if cfg.store_statistic:
        raise ValueError("theory covers only runs without a stored statistic")
    if cfg.sigma <= 0:
        raise ValueError("validation needs sigma > 0")
    if len(cfg.n_list) != 1:
        raise ValueError("validation uses a single dimension")
    n = cfg.n_list[0]
    rows = []
    for r in cfg.r_list:
        theory = expected_evaluations(n, r, cfg.sigma).expected_evaluations
        cell = run_cell(n, r, cfg, workers)
        emp = cell.mean_evaluations
        rel = None if emp is None else abs(emp - theory) / theory
        rows.append(ValidationRow(r, theory, emp, cell.std_error, rel, rel is not None and rel <= tolerance))
    return ValidationTable(n=n, sigma=cfg.sigma, trials=cfg.trials, tolerance=tolerance, rows=tuple(rows))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def report_csv(report: ExperimentReport) -> str:
    """CSV text, one row per cell; truncated cells leave the mean empty."""
    lines = [",".join(CSV_COLUMNS)]
    for c in report.cells:
        lines.append(",".join(_fmt(getattr(c, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def persist_report(report: ExperimentReport, path) -> tuple[Path, Path]:
    """Write ``<path>.csv`` and ``<path>.json`` and return both paths.

    The JSON embeds the full config (including the master seed), so a sweep
    can be replayed from it with :func:`load_report`.
    """
    base = Path(path)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    csv_path, json_path = base.with_suffix(".csv"), base.with_suffix(".json")
    doc = {
        "tool": "noisyonemax",
        "version": report.version,
        "config": asdict(report.config),
        "cells": [asdict(c) for c in report.cells],
        "argmin_r": {str(n): r for n, r in report.argmin_r().items()},
        "wall_time": report.wall_time,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    try:
        base.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(report_csv(report), encoding="utf-8")
        json_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {base}: {exc}") from exc
    return csv_path, json_path


def load_report(path) -> ExperimentReport:
    """Inverse of :func:`persist_report`; reads the JSON document."""
    p = Path(path)
    if p.suffix != ".json":
        p = p.with_suffix(".json")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"cannot read report {p}: {exc}") from exc
    return ExperimentReport(
        config=ExperimentConfig(**doc["config"]),
        cells=[CellRecord(**c) for c in doc["cells"]],
        wall_time=doc["wall_time"],
        version=doc["version"],
    )


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_gnuplot(report: ExperimentReport, directory) -> list[Path]:
    """One whitespace-separated ``r mean std_error`` file per ``n``.

    Missing means are written as ``NaN`` so gnuplot leaves a gap.
    """
    out_dir = Path(directory)
    paths = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for n in dict.fromkeys(c.n for c in report.cells):
            p = out_dir / f"sweep_n{n}.dat"
            rows = ["# r mean_evaluations std_error"]
            for c in report.cells:
                if c.n != n:
                    continue
                mean = "NaN" if c.mean_evaluations is None else repr(c.mean_evaluations)
                se = "NaN" if c.std_error is None else repr(c.std_error)
                rows.append(f"{c.r} {mean} {se}")
            p.write_text("\n".join(rows) + "\n", encoding="utf-8")
            paths.append(p)
    except OSError as exc:
        raise OSError(f"cannot write gnuplot data under {out_dir}: {exc}") from exc
    return paths
