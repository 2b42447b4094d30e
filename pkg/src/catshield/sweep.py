"""Parameter sweeps over transmittance, environment variance and asymmetry."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .channel import CompositeSpec, LossyStage, composite_channel, lossy_channel
from .core import CatState, Parity, db_to_nats, nats_to_db
from .distance import hs_distance
from .optimize import optimize_composite, optimize_presqueeze_cn, optimize_presqueeze_hs
from .oracle import distance_numeric, wigner_numeric

__all__ = [
    "SCENARIOS",
    "SecondStage",
    "SweepConfig",
    "scenario_config",
    "sweep_rows",
    "columns_for",
    "format_csv",
    "format_json",
    "thread_limit",
]


@dataclass(frozen=True)
class SecondStage:
    """Environment of the second loss in a two-stage chain (same transmittance as the first)."""

    v: float = 2.0
    gamma_t_db: float = 1.0


@dataclass
class SweepConfig:
    scenario: str = "custom"
    x0: float = 3.0
    p0: float = 0.0
    parity: str = "odd"
    eta_grid: list[float] = field(default_factory=lambda: _grid(0.5, 1.0, 26))
    v_values: list[float] = field(default_factory=lambda: [0.5])
    gamma_t_db: list[float] = field(default_factory=lambda: [0.0])
    objective: str = "cn"
    second_stage: SecondStage | None = None
    output_path: str | None = None
    format: str = "csv"
    oracle_check: bool = False

    def __post_init__(self):
        if isinstance(self.second_stage, dict):
            self.second_stage = SecondStage(**self.second_stage)
        self.eta_grid = [float(e) for e in self.eta_grid]
        self.v_values = [float(v) for v in self.v_values]
        self.gamma_t_db = [float(g) for g in self.gamma_t_db]
        self.parity = Parity.parse(self.parity).value
        self.validate()

    def validate(self) -> None:
        if self.scenario not in SCENARIOS and self.scenario != "custom":
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.objective not in ("cn", "hs"):
            raise ValueError(f"objective must be 'cn' or 'hs', got {self.objective!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.format!r}")
        for name in ("eta_grid", "v_values", "gamma_t_db"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        diffs = np.diff(self.eta_grid)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("eta grid must be strictly monotone")
        if any(not 0.0 < e <= 1.0 for e in self.eta_grid):
            raise ValueError("transmittances must lie in (0, 1]")
        if any(v < 0.5 for v in self.v_values):
            raise ValueError("thermal variances must be at least 0.5")
        if self.objective == "cn" and self.parity != "odd":
            raise ValueError("the central-negativity objective needs an odd cat")
        if self.objective == "hs" and self.second_stage is not None:
            raise ValueError("the distance objective is only defined for single-stage channels")
        CatState(self.x0, self.p0, self.parity)

    @property
    def state(self) -> CatState:
        return CatState(self.x0, self.p0, self.parity)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        return cls.from_dict(json.loads(text))


def _grid(lo: float, hi: float, steps: int) -> list[float]:
    # Rounded so grids are reproducible text in configs and CSV.
    return [round(float(e), 12) for e in np.linspace(lo, hi, steps)]


SCENARIOS = {
    "fig2": dict(v_values=[1.0], gamma_t_db=[0.0, 1.0, 3.0, 5.0, 6.0], objective="cn"),
    "fig3": dict(v_values=[0.5, 1.0, 1.5, 2.0], gamma_t_db=[0.0], objective="cn"),
    "fig4": dict(
        v_values=[1.0],
        gamma_t_db=[-2.0, -1.0, 1.0, 2.0],
        objective="cn",
        second_stage=SecondStage(2.0, 1.0),
        eta_grid=_grid(0.8, 1.0, 21),
    ),
    "fig5": dict(v_values=[0.5, 1.0, 1.5, 2.0], gamma_t_db=[0.0], objective="hs", eta_grid=_grid(0.05, 1.0, 20)),
}


def scenario_config(name: str, **overrides) -> SweepConfig:
    """Preset parameter sweep by name (odd cat with ``x0 = 3``)."""
    if name == "custom":
        return SweepConfig(**overrides)
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}")
    settings = dict(SCENARIOS[name], scenario=name)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**settings)


def columns_for(config: SweepConfig) -> list[str]:
    cols = ["eta", "v", "gamma_t_db"]
    if config.second_stage is not None:
        cols += ["v2", "gamma_t2_db"]
    cols.append("feasible")
    if config.objective == "cn":
        cols += ["cn_unprotected", "cn_optimal", "gamma_opt_nats", "gamma_opt_db"]
        if config.second_stage is not None:
            cols += ["gamma_mid_opt_nats", "gamma_mid_opt_db"]
        if config.oracle_check:
            cols += ["cn_oracle", "oracle_abs_err"]
    else:
        cols += ["hs_unprotected", "hs_optimal", "gamma_opt_nats", "gamma_opt_db"]
        if config.oracle_check:
            cols += ["hs_oracle", "oracle_abs_err"]
    return cols


def _points(config: SweepConfig):
    for v in config.v_values:
        for gt_db in config.gamma_t_db:
            for eta in config.eta_grid:
                yield (config, eta, v, gt_db)


def _evaluate(args) -> dict:
    config, eta, v, gt_db = args
    state = config.state
    gamma_t = db_to_nats(gt_db)
    row = {"eta": eta, "v": v, "gamma_t_db": gt_db}
    if config.objective == "hs":
        return _evaluate_hs(row, config, state, eta, v, gamma_t)
    if config.second_stage is None:
        result = optimize_presqueeze_cn(state, eta, v, gamma_t)
        channel = lossy_channel(LossyStage(eta, result.gamma_opt, v, gamma_t))
    else:
        second = config.second_stage
        row.update(v2=second.v, gamma_t2_db=second.gamma_t_db)
        spec = CompositeSpec([LossyStage(eta, 0.0, v, gamma_t), LossyStage(eta, 0.0, second.v, db_to_nats(second.gamma_t_db))])
        result = optimize_composite(state, spec)
        channel = composite_channel(spec.with_gammas(result.gamma_opt, result.gamma_mid_opt or 0.0))
    row["feasible"] = result.feasible
    row["cn_unprotected"] = result.baseline
    if result.feasible:
        row["cn_optimal"] = result.objective
        row["gamma_opt_nats"] = result.gamma_opt
        row["gamma_opt_db"] = nats_to_db(result.gamma_opt)
        if config.second_stage is not None:
            row["gamma_mid_opt_nats"] = result.gamma_mid_opt
            row["gamma_mid_opt_db"] = nats_to_db(result.gamma_mid_opt)
        if config.oracle_check and channel.sigma_x > 0 and channel.sigma_p > 0:
            numeric = wigner_numeric(state, channel, 0.0, 0.0)
            row["cn_oracle"] = numeric
            row["oracle_abs_err"] = abs(numeric - result.objective)
    return row


def _evaluate_hs(row, config, state, eta, v, gamma_t) -> dict:
    amplitude = (state.x0, state.p0)
    # Asymmetry is absorbed by extra pre-squeezing equal to gamma_t.
    result = optimize_presqueeze_hs(amplitude, eta, v)
    gamma_opt = result.gamma_opt + gamma_t
    row["feasible"] = True
    row["hs_unprotected"] = hs_distance(amplitude, lossy_channel(LossyStage(eta, 0.0, v, gamma_t))).distance
    row["hs_optimal"] = result.objective
    row["gamma_opt_nats"] = gamma_opt
    row["gamma_opt_db"] = nats_to_db(gamma_opt)
    if config.oracle_check:
        numeric = distance_numeric(amplitude, lossy_channel(LossyStage(eta, gamma_opt, v, gamma_t)))
        row["hs_oracle"] = numeric
        row["oracle_abs_err"] = abs(numeric - result.objective)
    return row


def thread_limit() -> int:
    """Worker cap from ``CATSHIELD_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("CATSHIELD_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"CATSHIELD_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def sweep_rows(config: SweepConfig, workers: int | None = None) -> list[dict]:
    """Evaluate every grid point; rows come back in grid order."""
    points = list(_points(config))
    workers = thread_limit() if workers is None else max(1, workers)
    if workers == 1 or len(points) < 2:
        rows = [_evaluate(pt) for pt in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate, points, chunksize=max(1, len(points) // (4 * workers))))
    for row in rows:
        for key, value in row.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise FloatingPointError(f"non-finite {key} at eta={row['eta']}, v={row['v']}")
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        text = format(value, ".12g")
        return "0" if text == "-0" else text
    return str(value)


def format_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def format_json(rows: list[dict], columns: list[str], config: SweepConfig) -> str:
    records = [{c: row.get(c) for c in columns} for row in rows]
    return json.dumps({"config": config.to_dict(), "columns": columns, "rows": records}, indent=2) + "\n"
