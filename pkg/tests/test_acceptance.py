"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists a
PASS/FAIL line for every criterion.
"""

import math
import time

import numpy as np
import pytest

from helpers import compatible_state, random_feasible_state
from vcquad.control import (
    Gains,
    control_invariance,
    control_stabilized,
    invariance_policy,
    solve_invariance_generic,
    stabilized_policy,
    task_constraint_set,
    transversality_matrix,
)
from vcquad.dynamics import RigidBodyState, VehicleParams
from vcquad.errors import SingularSystem
from vcquad.harness.csvlog import read_csv_columns
from vcquad.harness.scenarios import SCENARIOS, default_spec, emit_arc_frames, run_scenario
from vcquad.integrator import SimConfig, simulate, state_arrays
from vcquad.se3 import rot_x, rot_z
from vcquad.task import TaskSpec, on_manifold_init, orbit_speed, perturb_vertical

CRITERIA = {
    "test_hover_equilibrium": "hover equilibrium is exact and persists for 10 s",
    "test_exponential_residual_decay": "vertical residual decays as delta exp(-k t)",
    "test_zero_gain_residual_freeze": "vertical residual stays frozen with zero gains",
    "test_altitude_invariance": "altitude error stays at numerical zero on the manifold",
    "test_pointing_drift_is_numerical": "pointing drift shrinks monotonically with the step",
    "test_oracle_equivalence": "generic solver matches both closed-form laws",
    "test_transversality_determinant": "determinant identity and singular-system guard",
    "test_damping_benefit": "damping reduces altitude drift with bounded thrust",
    "test_regularity_maintenance": "shipped scenarios stay regular, confirmed from CSV",
    "test_geometry_arc": "arc frames point at the target and are proper rotations",
}

P = VehicleParams()
SPEC = TaskSpec()


def kicked_orbit(delta=0.1):
    return perturb_vertical(on_manifold_init(math.radians(20), 0.9, SPEC, orbit_speed(SPEC, P)), delta)


@pytest.fixture(scope="module")
def shipped(tmp_path_factory):
    root = tmp_path_factory.mktemp("scenarios")
    return {name: run_scenario(default_spec(name), root / name) for name in SCENARIOS}


def test_hover_equilibrium(record_property):
    spec = TaskSpec(z0=0.0)
    s = RigidBodyState(rot_z(math.pi), [1.0, 0.0, 0.0], np.zeros(3), np.zeros(3))
    u = control_invariance(s, P, spec)
    assert abs(u.f - 9.8) <= 1e-12 and abs(u.tau2) <= 1e-12 and abs(u.tau3) <= 1e-12

    t0 = time.perf_counter()
    samples = simulate(s, invariance_policy(P, spec), P, spec, SimConfig(h=1e-3, T=10.0))
    elapsed = time.perf_counter() - t0
    a = state_arrays(samples)
    record_property("detail", f"max e_pt {a['e_pt'].max():.1e}, max e_z {a['e_z'].max():.1e}, {elapsed:.2f} s")
    assert a["e_pt"].max() <= 1e-9 and a["e_z"].max() <= 1e-9
    assert elapsed < 1.0


def test_exponential_residual_decay(record_property):
    cfg = SimConfig(h=1e-3, T=2.0)
    a = state_arrays(simulate(kicked_orbit(), stabilized_policy(P, SPEC, Gains(k_z=5.0)), P, SPEC, cfg))
    rel = np.abs(a["mu_z"] / (0.1 * np.exp(-5.0 * a["t"])) - 1.0)
    rates = {}
    for k in (1.0, 10.0):
        b = state_arrays(simulate(kicked_orbit(), stabilized_policy(P, SPEC, Gains(k_z=k)), P, SPEC, cfg))
        rates[k] = -np.polyfit(b["t"], np.log(b["mu_z"]), 1)[0]
    record_property("detail", f"max rel err {rel.max():.1e}; fitted rates {rates[1.0]:.6f}, {rates[10.0]:.6f}")
    assert rel.max() <= 1e-6
    for k, r in rates.items():
        assert abs(r - k) <= 0.01 * k


def test_zero_gain_residual_freeze(record_property):
    cfg = SimConfig(h=1e-3, T=2.0)
    a = state_arrays(simulate(kicked_orbit(), stabilized_policy(P, SPEC, Gains()), P, SPEC, cfg))
    dev = np.abs(a["mu_z"] - 0.1).max()
    record_property("detail", f"max |mu_z - 0.1| = {dev:.1e}")
    assert dev <= 1e-9


def test_altitude_invariance(record_property):
    s = on_manifold_init(math.radians(20), 0.9, SPEC, orbit_speed(SPEC, P))
    a = state_arrays(simulate(s, invariance_policy(P, SPEC), P, SPEC, SimConfig(h=1e-3, T=10.0)))
    record_property("detail", f"max e_z {a['e_z'].max():.1e}")
    assert a["e_z"].max() <= 1e-9


def test_pointing_drift_is_numerical(record_property):
    s = on_manifold_init(math.radians(20), 0.9, SPEC, orbit_speed(SPEC, P))
    final = []
    for h in (4e-3, 2e-3, 1e-3):
        samples = simulate(s, invariance_policy(P, SPEC), P, SPEC, SimConfig(h=h, T=10.0))
        assert samples[-1].t == pytest.approx(10.0)
        final.append(samples[-1].errors.e_pt)
    record_property("detail", "e_pt(10) = " + ", ".join(f"{e:.2e}" for e in final))
    assert final[0] > final[1] > final[2]


def test_oracle_equivalence(record_property):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst_inv = worst_stab = 0.0
    for _ in range(100):
        s, spec = compatible_state(rng)
        g = solve_invariance_generic(s, P, task_constraint_set(spec)).as_array()
        worst_inv = max(worst_inv, np.abs(g - control_invariance(s, P, spec).as_array()).max())
    gains = Gains(5.0, 3.0, 3.0)
    for _ in range(100):
        s = random_feasible_state(rng)
        g = solve_invariance_generic(s, P, task_constraint_set(SPEC), gains.as_array()).as_array()
        worst_stab = max(worst_stab, np.abs(g - control_stabilized(s, P, SPEC, gains).as_array()).max())
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max diff {worst_inv:.1e} / {worst_stab:.1e}, {elapsed:.2f} s")
    assert worst_inv <= 1e-8 and worst_stab <= 1e-8
    assert elapsed < 5.0


def test_transversality_determinant(record_property):
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(1000):
        s = random_feasible_state(rng, min_s3=0.0)
        det = transversality_matrix(s, P, SPEC).det
        worst = max(worst, abs(det + s.R[2, 2] / (P.m * P.J2 * P.J3)))
    assert worst <= 1e-12
    raised = 0
    for s3 in np.concatenate([rng.uniform(-1e-5, 1e-5, 50), [0.0, 1e-6, -1e-6]]):
        R = rot_z(rng.uniform(0, 2 * math.pi)) @ rot_x(math.acos(s3)) @ rot_z(rng.uniform(0, 2 * math.pi))
        p = rng.normal(size=3)
        p *= rng.uniform(0.5, 3.0) / np.linalg.norm(p)
        s = RigidBodyState(R, p, rng.normal(size=3), rng.normal(size=3))
        with pytest.raises(SingularSystem):
            solve_invariance_generic(s, P, task_constraint_set(SPEC))
        raised += 1
    record_property("detail", f"max det error {worst:.1e}; SingularSystem raised {raised}/{raised}")


def test_damping_benefit(shipped, record_property):
    art = shipped["vertical-residual-compare"]
    und = read_csv_columns(art.csv_paths["undamped"])
    dam = read_csv_columns(art.csv_paths["damped"])
    mg = P.m * P.g
    f_lo = min(und["f"].min(), dam["f"].min())
    f_hi = max(und["f"].max(), dam["f"].max())
    record_property(
        "detail",
        f"final e_z {dam['e_z'][-1]:.4f} vs {und['e_z'][-1]:.4f}; f in [{f_lo:.2f}, {f_hi:.2f}]",
    )
    assert dam["e_z"][-1] < und["e_z"][-1]
    assert 0.5 * mg <= f_lo and f_hi <= 2.0 * mg


def test_regularity_maintenance(shipped, record_property):
    worst_s3, worst_rho = math.inf, math.inf
    for art in shipped.values():
        for path in art.csv_paths.values():
            cols = read_csv_columns(path)
            worst_s3 = min(worst_s3, np.abs(cols["s3"]).min())
            worst_rho = min(worst_rho, cols["rho"].min())
    record_property("detail", f"min |s3| {worst_s3:.3f}, min rho {worst_rho:.3f}")
    assert worst_s3 >= 0.1 and worst_rho >= 0.1


def test_geometry_arc(record_property):
    frames = emit_arc_frames(0.9, math.radians(20), math.radians(150), 14, SPEC)
    worst = max(fr.e_pt for fr in frames)
    ortho = max(np.linalg.norm(fr.R.T @ fr.R - np.eye(3)) for fr in frames)
    record_property("detail", f"max e_pt {worst:.1e}, max |R^T R - I| {ortho:.1e}")
    assert worst <= 1e-12
    for fr in frames:
        assert ortho <= 1e-12
        assert abs(np.linalg.det(fr.R) - 1.0) <= 1e-12
        assert np.allclose(np.cross(fr.b1, fr.b2), fr.b3, atol=1e-12)
        assert fr.b3[2] > 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
