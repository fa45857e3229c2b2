"""Trajectory CSV schema, writer/reader and run summaries."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..dynamics import RigidBodyState
from ..integrator import TrajectorySample
from ..task import TaskSpec

COLUMNS = (
    ["t", "p_x", "p_y", "p_z"]
    + [f"R_{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
    + ["v_x", "v_y", "v_z", "O_1", "O_2", "O_3"]
    + ["f", "tau_2", "tau_3", "mu_z", "mu_O3", "mu_O2", "e_pt", "e_z", "s3", "rho"]
)

ARC_COLUMNS = (
    ["theta_deg", "p_x", "p_y", "p_z"]
    + [f"R_{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
    + ["e_pt", "e_z", "s3", "rho"]
)


def fmt(x: float) -> str:
    # 17 significant digits round-trip every double exactly
    return format(float(x), ".17g")


def sample_row(x: TrajectorySample) -> list[float]:
    s = x.state
    return [
        x.t,
        *s.p,
        *s.R.reshape(9),
        *s.v,
        *s.omega,
        x.input.f,
        x.input.tau2,
        x.input.tau3,
        x.residuals.mu_z,
        x.residuals.mu_O3,
        x.residuals.mu_O2,
        x.errors.e_pt,
        x.errors.e_z,
        x.regularity.s3,
        x.regularity.rho,
    ]


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_trajectory_csv(samples: Sequence[TrajectorySample], path: Path) -> Path:
    return write_rows(path, COLUMNS, (sample_row(x) for x in samples))


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader], dtype=float)
    if data.size == 0:
        data = np.zeros((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def state_from_columns(cols: dict[str, np.ndarray], i: int) -> RigidBodyState:
    R = np.array([[cols[f"R_{a}{b}"][i] for b in (1, 2, 3)] for a in (1, 2, 3)])
    p = [cols[k][i] for k in ("p_x", "p_y", "p_z")]
    v = [cols[k][i] for k in ("v_x", "v_y", "v_z")]
    om = [cols[k][i] for k in ("O_1", "O_2", "O_3")]
    return RigidBodyState(R, p, v, om)


@dataclass(frozen=True)
class RunSummary:
    n_samples: int
    t_final: float
    max_e_pt: float
    max_e_z: float
    final_mu_z: float
    final_mu_O3: float
    final_mu_O2: float
    min_abs_s3: float
    min_rho: float
    feasible: bool

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(cols: dict[str, np.ndarray], spec: TaskSpec) -> RunSummary:
    """Summary of a trajectory given its CSV columns."""
    if len(cols["t"]) == 0:
        raise ValueError("empty trajectory")
    abs_s3 = np.abs(cols["s3"])
    min_s3 = float(abs_s3.min())
    min_rho = float(cols["rho"].min())
    return RunSummary(
        n_samples=int(len(cols["t"])),
        t_final=float(cols["t"][-1]),
        max_e_pt=float(cols["e_pt"].max()),
        max_e_z=float(cols["e_z"].max()),
        final_mu_z=float(cols["mu_z"][-1]),
        final_mu_O3=float(cols["mu_O3"][-1]),
        final_mu_O2=float(cols["mu_O2"][-1]),
        min_abs_s3=min_s3,
        min_rho=min_rho,
        feasible=bool(min_s3 >= spec.eps_s and min_rho >= spec.eps_rho),
    )


def sample_columns(samples: Sequence[TrajectorySample]) -> dict[str, np.ndarray]:
    data = np.array([sample_row(x) for x in samples], dtype=float).reshape(-1, len(COLUMNS))
    return {name: data[:, i] for i, name in enumerate(COLUMNS)}


def write_summary(path: Path, payload: dict) -> Path:
    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return repr(o)
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        return o

    path = Path(path)
    path.write_text(json.dumps(clean(payload), indent=2, sort_keys=True) + "\n", encoding="ascii")
    return path
