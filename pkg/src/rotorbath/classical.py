"""Classical rotational Brownian motion as a stochastic-ensemble reference.

States carry an orientation (rotation matrix for a general rotor, unit
axis vector for the linear rotor) and an angular momentum vector J.  The
dynamics is the damped-kicked rotation

    dJ = -Gamma(Omega) J dt + sqrt(2 D(Omega)) dW,
    orientation advanced by the exact rotation generated by I^-1(Omega) J,

integrated with Euler-Maruyama for J (the noise is additive at fixed
orientation, so weak order 1 is enough for moment comparisons) and the
exact exponential map for the orientation.  Trajectories are vectorized
over the ensemble; the generator is seeded so runs reproduce bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .tensors import Orientation, RotorGeometry, TensorTriple, rotation_from_axis_angle, tensors_from_geometry

__all__ = [
    "ClassicalState",
    "Ensemble",
    "MomentSeries",
    "sde_step",
    "ensemble_moments",
    "simulate_ensemble",
    "linear_rotor_ensemble",
    "diffusion_from_particles",
]


@dataclass(frozen=True)
class ClassicalState:
    """Orientation (3x3 rotation or unit axis vector) plus angular momentum.

    For the linear rotor (vector orientation) J is kept perpendicular to
    the axis.
    """

    orientation: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.orientation, dtype=float)
        j = np.asarray(self.J, dtype=float)
        if o.shape == (3, 3):
            Orientation(o)  # validates
        elif o.shape == (3,):
            if abs(np.linalg.norm(o) - 1.0) > 1e-10:
                raise ValueError("axis vector must have unit norm")
            if abs(np.dot(o, j)) > 1e-10 * max(1.0, np.linalg.norm(j)):
                raise ValueError("linear-rotor J must be perpendicular to the axis")
        else:
            raise ValueError("orientation must be a 3x3 matrix or a 3-vector")
        object.__setattr__(self, "orientation", o)
        object.__setattr__(self, "J", j)

    @property
    def is_linear(self) -> bool:
        return self.orientation.shape == (3,)


def _linear_tensors(tensors: TensorTriple):
    """(I, Gamma, D_perp) scalars of a linear rotor from its tensor triple."""
    d_eigs = np.sort(tensors.diffusion_eigenvalues)
    i_eigs = np.sort(tensors.inertia_eigenvalues)
    inertia = i_eigs[-1]
    d_perp = d_eigs[-1]
    gamma = d_perp / (tensors.kT * inertia) if inertia > 0 else 0.0
    return inertia, gamma, d_perp


def sde_step(state: ClassicalState, tensors: TensorTriple, dt: float,
             noise: np.ndarray) -> ClassicalState:
    """One Euler-Maruyama step; `noise` is a standard-normal 3-vector.

    J receives -Gamma(Omega) J dt plus sqrt(2 D(Omega) dt) applied to the
    noise in the body eigenframe; the orientation rotates exactly by
    exp([omega]_x dt) with omega = I^-1(Omega) J, then is renormalized.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = np.asarray(noise, dtype=float)
    if state.is_linear:
        axis = state.orientation
        inertia, gamma, d_perp = _linear_tensors(tensors)
        kick = np.sqrt(2.0 * d_perp * dt) * (g - np.dot(g, axis) * axis)
        j_new = state.J - gamma * state.J * dt + kick
        omega = state.J / inertia
        rot = rotation_from_axis_angle(omega, np.linalg.norm(omega) * dt)
        axis_new = rot @ axis
        axis_new /= np.linalg.norm(axis_new)
        j_new = j_new - np.dot(j_new, axis_new) * axis_new
        return ClassicalState(axis_new, j_new)
    r = state.orientation
    i_rot = r @ tensors.inertia @ r.T
    gamma_rot = r @ tensors.friction_matrix() @ r.T
    axes_rot = r @ tensors.axes
    kick = axes_rot @ (np.sqrt(2.0 * tensors.diffusion_eigenvalues * dt) * (axes_rot.T @ g))
    j_new = state.J - gamma_rot @ state.J * dt + kick
    omega = np.linalg.pinv(i_rot, rcond=1e-10) @ state.J
    rot = rotation_from_axis_angle(omega, np.linalg.norm(omega) * dt)
    r_new = rot @ r
    u, _, vt = np.linalg.svd(r_new)
    return ClassicalState(u @ vt, j_new)


@dataclass
class Ensemble:
    """Vectorized trajectory ensemble (linear rotor: axes (n,3), J (n,3))."""

    axes: np.ndarray
    J: np.ndarray
    time: float
    seed: int
    rng: np.random.Generator = field(repr=False, default=None)

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng(self.seed)
        if len(self.axes) != len(self.J) or len(self.axes) < 1:
            raise ValueError("ensemble needs matching, nonempty state arrays")

    def __len__(self) -> int:
        return len(self.J)

    def __getitem__(self, k: int) -> ClassicalState:
        return ClassicalState(self.axes[k], self.J[k])


def linear_rotor_ensemble(size: int, j_magnitude: float, seed: int = 0) -> Ensemble:
    """Uniformly oriented linear rotors with |J| fixed, J uniform in the
    plane perpendicular to the axis."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(size, 3))
    axes = z / np.linalg.norm(z, axis=1, keepdims=True)
    raw = rng.normal(size=(size, 3))
    raw -= np.sum(raw * axes, axis=1, keepdims=True) * axes
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return Ensemble(axes, j_magnitude * raw, 0.0, seed, rng)


def _ensemble_step(ens: Ensemble, inertia: float, gamma: float, d_perp: float,
                   dt: float) -> None:
    g = ens.rng.normal(size=ens.J.shape)
    proj = np.sum(g * ens.axes, axis=1, keepdims=True)
    kick = np.sqrt(2.0 * d_perp * dt) * (g - proj * ens.axes)
    ens.J += -gamma * ens.J * dt + kick
    omega = ens.J / inertia
    angle = np.linalg.norm(omega, axis=1, keepdims=True) * dt
    with np.errstate(invalid="ignore"):
        n = np.where(angle > 0, omega * dt / angle, 0.0)
    c, s = np.cos(angle), np.sin(angle)
    dot = np.sum(n * ens.axes, axis=1, keepdims=True)
    cross = np.cross(n, ens.axes)
    ens.axes = c * ens.axes + s * cross + (1.0 - c) * dot * n
    ens.axes /= np.linalg.norm(ens.axes, axis=1, keepdims=True)
    ens.J -= np.sum(ens.J * ens.axes, axis=1, keepdims=True) * ens.axes
    ens.time += dt


@dataclass(frozen=True)
class MomentRecord:
    time: float
    j_mean: np.ndarray
    j_mean_se: np.ndarray
    j_squared: float
    j_squared_se: float
    j_outer: np.ndarray
    energy: float
    energy_se: float


@dataclass
class MomentSeries:
    records: list

    @property
    def times(self) -> np.ndarray:
        return np.array([r.time for r in self.records])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def to_csv(self, path) -> None:
        header = ("time,J1,J2,J3,J1_se,J2_se,J3_se,J2tot,J2tot_se,energy,energy_se,"
                  "Jxx,Jxy,Jxz,Jyy,Jyz,Jzz")
        lines = [header]
        for r in self.records:
            o = r.j_outer
            row = [r.time, *r.j_mean, *r.j_mean_se, r.j_squared, r.j_squared_se,
                   r.energy, r.energy_se,
                   o[0, 0], o[0, 1], o[0, 2], o[1, 1], o[1, 2], o[2, 2]]
            lines.append(",".join(repr(float(x)) for x in row))
        Path(path).write_text("\n".join(lines) + "\n")


def ensemble_moments(ens: Ensemble, inertia: float = 1.0) -> MomentRecord:
    """Sample moments of the ensemble with standard errors."""
    n = len(ens)
    j = ens.J
    j2 = np.sum(j * j, axis=1)
    energy = 0.5 * j2 / inertia
    return MomentRecord(
        time=ens.time,
        j_mean=j.mean(axis=0),
        j_mean_se=j.std(axis=0, ddof=1) / np.sqrt(n),
        j_squared=float(j2.mean()),
        j_squared_se=float(j2.std(ddof=1) / np.sqrt(n)),
        j_outer=(j[:, :, None] * j[:, None, :]).mean(axis=0),
        energy=float(energy.mean()),
        energy_se=float(energy.std(ddof=1) / np.sqrt(n)),
    )


def simulate_ensemble(ens: Ensemble, xi: float, gamma: float, dt: float,
                      record_times, inertia: float = 1.0) -> MomentSeries:
    """Run the linear-rotor ensemble and record moments at the given times.

    Natural units: D_perp = k_B T Gamma I = xi Gamma / 2.
    """
    d_perp = 0.5 * xi * gamma * inertia
    records = []
    for t in record_times:
        while ens.time < t - 0.5 * dt:
            _ensemble_step(ens, inertia, gamma, d_perp, dt)
        records.append(ensemble_moments(ens, inertia))
    return MomentSeries(records)


def diffusion_from_particles(geom: RotorGeometry, kT: float) -> TensorTriple:
    """Tensor triple of a point-particle rotor, with the
    fluctuation-dissipation identity D = kT Gamma I verified on the
    rank-f subspace."""
    triple = tensors_from_geometry(geom, kT)
    d = triple.diffusion_matrix()
    check = kT * triple.friction_matrix() @ triple.inertia
    scale = max(1.0, np.abs(d).max())
    if np.max(np.abs(d - check)) > 1e-10 * scale:
        raise AssertionError("fluctuation-dissipation identity violated")
    return triple
