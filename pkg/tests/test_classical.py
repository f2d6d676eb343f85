import numpy as np
import pytest
from scipy.spatial.transform import Rotation
from scipy.stats import kstest

from rotorbath.classical import (
    ClassicalState,
    Ensemble,
    ensemble_moments,
    linear_rotor_ensemble,
    sde_step,
    simulate_ensemble,
)
from rotorbath.tensors import Particle, RotorGeometry, TensorTriple


def linear_tensors(d_perp=0.5, inertia=1.0, kT=1.0):
    return TensorTriple.from_diffusion_eigenvalues(
        [d_perp, d_perp, 0.0], [inertia, inertia, 0.0], kT=kT
    )


def spherical_tensors(d=0.5, inertia=1.0, kT=1.0):
    return TensorTriple.from_diffusion_eigenvalues(
        [d, d, d], [inertia, inertia, inertia], kT=kT
    )


def test_state_validation():
    with pytest.raises(ValueError):
        ClassicalState(np.array([0.0, 0.0, 2.0]), np.zeros(3))
    with pytest.raises(ValueError):
        ClassicalState(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0]))
    s = ClassicalState(np.eye(3), np.array([1.0, 2.0, 3.0]))
    assert not s.is_linear


def test_sde_step_oracle():
    # one Euler-Maruyama step recomputed independently (rotation via scipy)
    tensors = linear_tensors(d_perp=0.5, inertia=1.0, kT=1.0)  # Gamma = 0.5
    state = ClassicalState(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.5, 0.0]))
    dt, g = 0.01, np.array([0.3, -0.2, 0.5])
    out = sde_step(state, tensors, dt, g)

    kick = np.sqrt(2 * 0.5 * dt) * (g - g[2] * np.array([0, 0, 1.0]))
    j_mid = np.array([1.0, 0.5, 0.0]) * (1 - 0.5 * dt) + kick
    assert j_mid[:2] == pytest.approx([1.025, 0.4775], abs=1e-12)
    omega = np.array([1.0, 0.5, 0.0])  # I = 1
    axis = Rotation.from_rotvec(omega * dt).apply(np.array([0.0, 0.0, 1.0]))
    j_expect = j_mid - (j_mid @ axis) * axis
    assert out.orientation == pytest.approx(axis, abs=1e-12)
    assert out.J == pytest.approx(j_expect, abs=1e-12)
    assert np.linalg.norm(out.orientation) == pytest.approx(1.0, abs=1e-12)
    assert abs(out.J @ out.orientation) <= 1e-12


def test_free_rotation_conserves_momentum():
    tensors = TensorTriple.from_diffusion_eigenvalues(
        [0.0, 0.0, 0.0], [1.0, 1.0, 0.0], kT=1.0
    )
    state = ClassicalState(np.array([0.0, 0.0, 1.0]), np.array([0.8, -0.3, 0.0]))
    j0 = np.linalg.norm(state.J)
    for _ in range(200):
        state = sde_step(state, tensors, 1e-2, np.zeros(3))
    assert np.linalg.norm(state.J) == pytest.approx(j0, abs=1e-9)
    assert abs(state.J @ state.orientation) <= 1e-10


def test_spherical_rotor_momentum_decay():
    # vanishing diffusion at fixed friction is the zero-temperature limit
    # (D = Gamma kT I); the spherical rotor then decays as J e^{-Gamma t}
    gamma, kT = 0.7, 1e-14
    tensors = TensorTriple.from_diffusion_eigenvalues(
        [gamma * kT] * 3, [1.0, 1.0, 1.0], kT=kT
    )
    assert tensors.friction_matrix() == pytest.approx(gamma * np.eye(3), rel=1e-10)
    state = ClassicalState(np.eye(3), np.array([0.5, -0.2, 0.9]))
    j0 = state.J.copy()
    dt, n = 1e-3, 1000
    rng = np.random.default_rng(1)
    for _ in range(n):
        state = sde_step(state, tensors, dt, rng.normal(size=3))
    assert state.J == pytest.approx(np.exp(-gamma * n * dt) * j0, rel=2e-3)
    rot = state.orientation
    assert rot.T @ rot == pytest.approx(np.eye(3), abs=1e-9)


def test_ensemble_initial_moments_exact():
    ens = linear_rotor_ensemble(500, j_magnitude=2.0, seed=1)
    rec = ensemble_moments(ens)
    assert rec.time == 0.0
    assert rec.j_squared == pytest.approx(4.0, abs=1e-12)
    assert np.trace(rec.j_outer) == pytest.approx(4.0, abs=1e-12)
    assert rec.j_squared_se <= 1e-12  # the magnitude is sharp by construction


def test_ensemble_reproducibility():
    a = simulate_ensemble(linear_rotor_ensemble(50, 1.0, seed=9), 4.0, 1.0, 1e-2, [0.5])
    b = simulate_ensemble(linear_rotor_ensemble(50, 1.0, seed=9), 4.0, 1.0, 1e-2, [0.5])
    assert a.records[0].j_squared == b.records[0].j_squared
    assert a.records[0].j_mean == pytest.approx(b.records[0].j_mean, abs=0.0)


def test_ensemble_relaxation_matches_theory():
    xi, gamma = 6.0, 1.0
    ens = linear_rotor_ensemble(8000, j_magnitude=1.0, seed=3)
    times = [0.5, 2.0, 5.0]
    series = simulate_ensemble(ens, xi, gamma, 1e-3, times)
    for t, rec in zip(times, series.records):
        theory = np.exp(-2 * gamma * t) * 1.0 + xi * (1 - np.exp(-2 * gamma * t))
        assert abs(rec.j_squared - theory) <= 3.0 * rec.j_squared_se


def test_stationary_equipartition_and_gaussianity():
    xi, gamma = 4.0, 1.0
    ens = linear_rotor_ensemble(10000, j_magnitude=np.sqrt(xi), seed=17)
    series = simulate_ensemble(ens, xi, gamma, 1e-3, [5.0])
    rec = series.records[0]
    # <J^2> = 2 I kT, <H> = kT (f = 2)
    assert abs(rec.j_squared - xi) <= 3.0 * rec.j_squared_se
    assert abs(rec.energy - 0.5 * xi) <= 3.0 * rec.energy_se
    # per-component marginals in the plane perpendicular to the axis are
    # Gaussian with variance I kT
    e1 = np.cross(ens.axes, np.tile([1.0, 0.0, 0.0], (len(ens), 1)))
    bad = np.linalg.norm(e1, axis=1) < 1e-6
    e1[bad] = np.cross(ens.axes[bad], np.tile([0.0, 1.0, 0.0], (bad.sum(), 1)))
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(ens.axes, e1)
    samples = np.concatenate([np.sum(ens.J * e1, axis=1), np.sum(ens.J * e2, axis=1)])
    stat = kstest(samples, "norm", args=(0.0, np.sqrt(0.5 * xi)))
    assert stat.pvalue > 0.01


def test_second_moment_rate_finite_difference():
    # d<J (x) J>/dt at t = 0 vs the moment equation for the linear rotor:
    # -2 Gamma <J (x) J> + 2 <D(Omega)> with D(Omega) = D (1 - m (x) m);
    # common random numbers (one ensemble stepped in place) keep the
    # finite-difference noise at the per-trajectory increment level
    xi, gamma = 4.0, 1.0
    d_perp = 0.5 * xi * gamma
    n = 400_000
    ens = linear_rotor_ensemble(n, j_magnitude=1.5, seed=23)
    outer0 = ensemble_moments(ens).j_outer
    d_avg = d_perp * (np.eye(3) - (ens.axes[:, :, None] * ens.axes[:, None, :]).mean(axis=0))
    rhs = -2 * gamma * outer0 + 2 * d_avg
    dt = 5e-3
    series = simulate_ensemble(ens, xi, gamma, dt, [dt])
    lhs = (series.records[0].j_outer - outer0) / dt
    assert lhs == pytest.approx(rhs, abs=0.35)


def test_dt_convergence():
    xi, gamma = 5.0, 1.0
    vals = {}
    for dt in (2e-3, 1e-3):
        ens = linear_rotor_ensemble(10000, j_magnitude=1.0, seed=29)
        vals[dt] = simulate_ensemble(ens, xi, gamma, dt, [1.0]).records[0]
    assert abs(vals[2e-3].j_squared - vals[1e-3].j_squared) <= 3.0 * vals[1e-3].j_squared_se


def test_moment_series_csv(tmp_path):
    ens = linear_rotor_ensemble(100, 1.0, seed=5)
    series = simulate_ensemble(ens, 3.0, 1.0, 1e-2, [0.0, 0.2])
    path = tmp_path / "moments.csv"
    series.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("time,J1,J2,J3,")
    assert len(lines) == 3
