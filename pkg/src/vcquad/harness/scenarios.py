"""Named scenarios: build, run, and write CSV/SVG/summary artifacts."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from ..control import Gains, invariance_policy, stabilized_policy
from ..dynamics import RigidBodyState, VehicleParams
from ..errors import ConfigError, InfeasibleEncountered
from ..integrator import SimConfig, TrajectorySample, simulate
from ..task import (
    TaskSpec,
    on_manifold_init,
    orbit_speed,
    perturb_vertical,
    pointing_frame,
    regularity,
    task_errors,
)
from . import config as cfgmod
from .csvlog import (
    ARC_COLUMNS,
    RunSummary,
    read_csv_columns,
    sample_columns,
    summarize,
    write_rows,
    write_summary,
    write_trajectory_csv,
)
from .svg import HLine, Plot, Series, arrow_segments, write_plot

log = logging.getLogger(__name__)

SCENARIOS = (
    "geometry-arc",
    "invariance-on-manifold",
    "vertical-residual-compare",
    "regularity-monitor",
    "torque-trace",
)

DESCRIPTIONS = {
    "geometry-arc": "pointing frames along a horizontal arc around the target (CSV + 2D projections)",
    "invariance-on-manifold": "invariance law from an on-manifold orbit; pointing and altitude error",
    "vertical-residual-compare": "vertical-velocity kick with and without residual damping",
    "regularity-monitor": "|e3^T b3| and target distance against the regularity thresholds",
    "torque-trace": "pitch and yaw torques for the damped vertical-kick run",
}

LAWS = ("invariance", "stabilized")


@dataclass(frozen=True)
class InitSpec:
    theta_deg: float = 20.0
    r: float = 0.9
    speed: Optional[float] = None  # None selects the steady orbit speed
    delta: float = 0.0


@dataclass(frozen=True)
class ArcSpec:
    r: float = 0.9
    theta_min_deg: float = 20.0
    theta_max_deg: float = 150.0
    n: int = 14


@dataclass(frozen=True)
class Variant:
    label: str
    gains: Gains


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    params: VehicleParams = field(default_factory=VehicleParams)
    task: TaskSpec = field(default_factory=TaskSpec)
    variants: tuple[Variant, ...] = ()
    sim: SimConfig = field(default_factory=SimConfig)
    init: InitSpec = field(default_factory=InitSpec)
    law: str = "stabilized"
    arc: ArcSpec = field(default_factory=ArcSpec)

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.name!r}; choose from {', '.join(SCENARIOS)}")
        if self.law not in LAWS:
            raise ConfigError(f"control.law must be one of {LAWS}, got {self.law!r}")
        if self.name != "geometry-arc" and not self.variants:
            raise ConfigError(f"scenario {self.name} needs at least one variant")

    def initial_state(self) -> RigidBodyState:
        ini = self.init
        speed = orbit_speed(self.task, self.params) if ini.speed is None else ini.speed
        s = on_manifold_init(math.radians(ini.theta_deg), ini.r, self.task, speed)
        return perturb_vertical(s, ini.delta)


@dataclass
class RunArtifact:
    scenario: str
    out_dir: Path
    csv_paths: dict[str, Path]
    svg_paths: list[Path]
    summaries: dict[str, dict]
    summary_path: Path

    @property
    def csv_path(self) -> Path:
        return next(iter(self.csv_paths.values()))

    @property
    def summary(self) -> dict:
        return next(iter(self.summaries.values()))


# -- configuration ---------------------------------------------------------


_VARIANTS = {
    "geometry-arc": (),
    "invariance-on-manifold": (("invariance", Gains()),),
    "vertical-residual-compare": (("undamped", Gains()), ("damped", Gains(k_z=5.0))),
    "regularity-monitor": (("undamped", Gains()), ("damped", Gains(k_z=5.0))),
    "torque-trace": (("damped", Gains(k_z=5.0)),),
}


def default_config(name: str) -> dict[str, str]:
    """Flat key/value defaults of scenario ``name``."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    vertical = name in ("vertical-residual-compare", "regularity-monitor", "torque-trace")
    p, t = VehicleParams(), TaskSpec()
    cfg = {
        "vehicle.m": p.m,
        "vehicle.g": p.g,
        "vehicle.J1": p.J1,
        "vehicle.J2": p.J2,
        "vehicle.J3": p.J3,
        "task.target_x": 0.0,
        "task.target_y": 0.0,
        "task.target_z": 0.0,
        "task.z0": t.z0,
        "task.eps_s": t.eps_s,
        "task.eps_rho": t.eps_rho,
        "sim.h": 1e-3,
        # the undamped kick leaves the regular set a little after 3 s
        "sim.T": 3.0 if vertical else 10.0,
        "sim.reorthonormalize_every": 1,
        "sim.abort_on_infeasible": "true",
        "init.theta_deg": 20.0,
        "init.r": 0.9,
        "init.speed": "orbit",
        "init.delta": 0.1 if vertical else 0.0,
        "control.law": "invariance" if name == "invariance-on-manifold" else "stabilized",
    }
    if name == "geometry-arc":
        cfg.update({"arc.r": 0.9, "arc.theta_min_deg": 20.0, "arc.theta_max_deg": 150.0, "arc.n": 14})
    for label, g in _VARIANTS[name]:
        cfg.update({f"gains.{label}.k_z": g.k_z, f"gains.{label}.k_O3": g.k_O3, f"gains.{label}.k_O2": g.k_O2})
    return {k: str(v) for k, v in cfg.items()}


def _alias_gains(name: str, layer: Mapping[str, str]) -> dict[str, str]:
    """Map the short ``gains.k_z`` form onto the last (damped or only) variant."""
    labels = [lab for lab, _ in _VARIANTS.get(name, ())]
    out = {}
    for k, v in layer.items():
        parts = k.split(".")
        if len(parts) == 2 and parts[0] == "gains" and labels:
            k = f"gains.{labels[-1]}.{parts[1]}"
        out[k] = v
    return out


def resolve_config(
    name: str, file_values: Mapping[str, str] = (), overrides: Mapping[str, str] = ()
) -> dict[str, str]:
    base = default_config(name)
    return cfgmod.merge(base, _alias_gains(name, dict(file_values)), _alias_gains(name, dict(overrides)))


def build_spec(name: str, cfg: Mapping[str, str]) -> ScenarioSpec:
    """Validate a resolved flat config into a :class:`ScenarioSpec`."""
    f = lambda k: cfgmod.as_float(cfg, k)  # noqa: E731
    try:
        params = VehicleParams(f("vehicle.m"), f("vehicle.g"), f("vehicle.J1"), f("vehicle.J2"), f("vehicle.J3"))
        task = TaskSpec(
            target=np.array([f("task.target_x"), f("task.target_y"), f("task.target_z")]),
            z0=f("task.z0"),
            eps_s=f("task.eps_s"),
            eps_rho=f("task.eps_rho"),
        )
        sim = SimConfig(
            h=f("sim.h"),
            T=f("sim.T"),
            reorthonormalize_every=cfgmod.as_int(cfg, "sim.reorthonormalize_every"),
            abort_on_infeasible=cfgmod.as_bool(cfg, "sim.abort_on_infeasible"),
        )
        speed_text = cfg["init.speed"].strip().lower()
        init = InitSpec(
            theta_deg=f("init.theta_deg"),
            r=f("init.r"),
            speed=None if speed_text == "orbit" else f("init.speed"),
            delta=f("init.delta"),
        )
        variants = tuple(
            Variant(label, Gains(f(f"gains.{label}.k_z"), f(f"gains.{label}.k_O3"), f(f"gains.{label}.k_O2")))
            for label, _ in _VARIANTS[name]
        )
        arc = ArcSpec()
        if name == "geometry-arc":
            arc = ArcSpec(f("arc.r"), f("arc.theta_min_deg"), f("arc.theta_max_deg"), cfgmod.as_int(cfg, "arc.n"))
        return ScenarioSpec(name, params, task, variants, sim, init, cfg["control.law"], arc)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_spec(name: str, config_file: Optional[str | Path] = None, overrides: Mapping[str, str] = ()) -> ScenarioSpec:
    file_values = cfgmod.load_file(config_file) if config_file else {}
    return build_spec(name, resolve_config(name, file_values, overrides))


def default_spec(name: str) -> ScenarioSpec:
    return build_spec(name, default_config(name))


# -- geometry arc ------------------------------------------------------------


@dataclass(frozen=True)
class ArcFrame:
    theta: float
    p: np.ndarray
    R: np.ndarray
    e_pt: float
    e_z: float
    s3: float
    rho: float

    @property
    def b1(self) -> np.ndarray:
        return self.R[:, 0]

    @property
    def b2(self) -> np.ndarray:
        return self.R[:, 1]

    @property
    def b3(self) -> np.ndarray:
        return self.R[:, 2]


def emit_arc_frames(r: float, theta_min: float, theta_max: float, n: int, spec: TaskSpec) -> list[ArcFrame]:
    """``n`` equally spaced pointing frames on the arc at radius ``r`` and altitude ``z0``.

    Angles are in radians.  Raises ``InfeasibleGeometry`` if any frame on
    the arc is too close to vertical.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"need at least two arc samples, got {n}")
    if not r > 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    frames = []
    for th in np.linspace(theta_min, theta_max, int(n)):
        th = float(th)
        p = spec.target + np.array([r * math.cos(th), r * math.sin(th), 0.0])
        p[2] = spec.z0
        R = pointing_frame(p, spec)
        s = RigidBodyState(R, p, np.zeros(3), np.zeros(3))
        err = task_errors(s, spec)
        reg = regularity(s, spec)
        frames.append(ArcFrame(th, p, R, err.e_pt, err.e_z, reg.s3, reg.rho))
    return frames


def arc_rows(frames: list[ArcFrame]) -> list[list[float]]:
    return [
        [math.degrees(fr.theta), *fr.p, *fr.R.reshape(9), fr.e_pt, fr.e_z, fr.s3, fr.rho]
        for fr in frames
    ]


def _run_arc(spec: ScenarioSpec, out: Path) -> RunArtifact:
    a = spec.arc
    frames = emit_arc_frames(a.r, math.radians(a.theta_min_deg), math.radians(a.theta_max_deg), a.n, spec.task)
    csv_path = write_rows(out / "arc_frames.csv", ARC_COLUMNS, arc_rows(frames))

    P = np.array([fr.p for fr in frames])
    scale = 0.25 * a.r
    svgs = []
    for fname, (i, j), (xl, yl), title in (
        ("arc_top.svg", (0, 1), ("x [m]", "y [m]"), "Pointing frames along the arc, top view"),
        ("arc_side.svg", (0, 2), ("x [m]", "z [m]"), "Pointing frames along the arc, side view"),
    ):
        proj = lambda vs: [np.array([v[i], v[j]]) for v in vs]  # noqa: E731
        series = [Series("path", P[:, i], P[:, j], color="#000000")]
        for k, axis in enumerate((0, 1, 2)):
            x, y = arrow_segments(proj(P), proj([fr.R[:, axis] for fr in frames]), scale)
            series.append(Series(f"b{axis + 1}", x, y, color=("#d62728", "#2ca02c", "#1f77b4")[k]))
        tgt = spec.task.target
        series.append(Series("target", np.array([tgt[i]]).repeat(2), np.array([tgt[j]]).repeat(2), color="#000000"))
        svgs.append(write_plot(Plot(title, xl, yl, series, equal_aspect=True), out / fname))

    summary = {
        "n_samples": len(frames),
        "max_e_pt": max(fr.e_pt for fr in frames),
        "max_e_z": max(fr.e_z for fr in frames),
        "min_abs_s3": min(abs(fr.s3) for fr in frames),
        "min_rho": min(fr.rho for fr in frames),
    }
    summary["feasible"] = bool(summary["min_abs_s3"] >= spec.task.eps_s and summary["min_rho"] >= spec.task.eps_rho)
    summaries = {"arc": summary}
    sp = write_summary(out / "summary.json", {"scenario": spec.name, "files": {"arc": csv_path.name}, "variants": summaries})
    return RunArtifact(spec.name, out, {"arc": csv_path}, svgs, summaries, sp)


# -- trajectory scenarios ---------------------------------------------------------


def _policy(spec: ScenarioSpec, v: Variant):
    if spec.law == "invariance":
        return invariance_policy(spec.params, spec.task)
    return stabilized_policy(spec.params, spec.task, v.gains)


def _plots(spec: ScenarioSpec, cols: dict[str, dict[str, np.ndarray]]) -> list[Plot]:
    def series(key, dashed_labels=()):
        return [Series(lab, c["t"], c[key], dashed=lab in dashed_labels) for lab, c in cols.items()]

    mg = spec.params.weight
    name = spec.name
    if name == "invariance-on-manifold":
        return [
            Plot("Pointing error", "t [s]", "e_pt", series("e_pt"), logy=True),
            Plot("Altitude error", "t [s]", "e_z [m]", series("e_z")),
        ]
    if name == "vertical-residual-compare":
        return [
            Plot("Altitude error after a vertical kick", "t [s]", "e_z [m]", series("e_z")),
            Plot("Vertical velocity residual", "t [s]", "|mu_z| [m/s]", series("mu_z"), logy=True),
            Plot("Collective thrust", "t [s]", "f [N]", series("f"), hlines=[HLine(mg, "m g")]),
        ]
    if name == "regularity-monitor":
        s3 = [Series(lab, c["t"], np.abs(c["s3"])) for lab, c in cols.items()]
        return [
            Plot("Thrust-axis vertical component", "t [s]", "|e3^T b3|", s3,
                 hlines=[HLine(spec.task.eps_s, "eps_s")]),
            Plot("Distance to target", "t [s]", "rho [m]", series("rho"),
                 hlines=[HLine(spec.task.eps_rho, "eps_rho")]),
        ]
    if name == "torque-trace":
        out = []
        for lab, c in cols.items():
            out.append(
                Plot(f"Pitch and yaw torques ({lab})", "t [s]", "torque [N m]",
                     [Series("tau_2", c["t"], c["tau_2"]), Series("tau_3", c["t"], c["tau_3"])])
            )
        return out
    return []


_PLOT_FILES = {
    "invariance-on-manifold": ("pointing_error.svg", "altitude_error.svg"),
    "vertical-residual-compare": ("altitude_error.svg", "vertical_residual.svg", "thrust.svg"),
    "regularity-monitor": ("thrust_axis.svg", "distance.svg"),
    "torque-trace": ("torques.svg",),
}


def run_scenario(spec: ScenarioSpec, out_dir: str | Path) -> RunArtifact:
    """Run every variant of ``spec`` and write artifacts into ``out_dir``.

    Each variant gets ``<label>.csv``.  On a regularity abort the partial
    trajectory is still written, the summary records the abort, and
    :class:`InfeasibleEncountered` propagates.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if spec.name == "geometry-arc":
        return _run_arc(spec, out)

    init = spec.initial_state()
    csv_paths: dict[str, Path] = {}
    cols: dict[str, dict[str, np.ndarray]] = {}
    summaries: dict[str, dict] = {}
    for v in spec.variants:
        log.info("running %s/%s", spec.name, v.label)
        try:
            samples: list[TrajectorySample] = simulate(init, _policy(spec, v), spec.params, spec.task, spec.sim)
        except InfeasibleEncountered as exc:
            path = out / f"{v.label}.csv"
            write_trajectory_csv(exc.samples, path)
            summaries[v.label] = {"aborted": str(exc)}
            if exc.samples:
                summaries[v.label].update(summarize(sample_columns(exc.samples), spec.task).to_dict())
            write_summary(
                out / "summary.json",
                {"scenario": spec.name, "files": {v.label: path.name}, "variants": summaries},
            )
            raise
        path = write_trajectory_csv(samples, out / f"{v.label}.csv")
        csv_paths[v.label] = path
        cols[v.label] = sample_columns(samples)
        summaries[v.label] = summarize(cols[v.label], spec.task).to_dict()

    svgs = [write_plot(p, out / fname) for p, fname in zip(_plots(spec, cols), _PLOT_FILES[spec.name])]
    sp = write_summary(
        out / "summary.json",
        {
            "scenario": spec.name,
            "files": {lab: p.name for lab, p in csv_paths.items()},
            "variants": summaries,
        },
    )
    return RunArtifact(spec.name, out, csv_paths, svgs, summaries, sp)


def summary_from_csv(path: str | Path, spec: TaskSpec) -> RunSummary:
    return summarize(read_csv_columns(path), spec)
