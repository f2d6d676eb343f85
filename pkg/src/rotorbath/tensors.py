"""Inertia, friction and diffusion tensors of a rigid rotor.

Builds the body-frame tensors from a point-particle geometry or directly
from prescribed diffusion eigenvalues, derives the dissipator weights
D~_k = (D_i + D_j - D_k)/2, and checks complete positivity.

Natural units: k_B = 1; temperatures are energies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Particle",
    "RotorGeometry",
    "TensorTriple",
    "Orientation",
    "CompletePositivityWarning",
    "lindblad_weights",
    "tensors_from_geometry",
    "rotate_tensor",
    "load_geometry",
]

COM_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-10
RANK_TOL = 1e-12


class CompletePositivityWarning(UserWarning):
    """Some dissipator weight is negative; the generator is not completely positive.

    Carries the offending weight indices in `indices`.
    """

    def __init__(self, weights, indices):
        self.weights = tuple(float(w) for w in weights)
        self.indices = tuple(int(i) for i in indices)
        super().__init__(
            f"negative dissipator weight(s) {self.weights} at index(es) {self.indices}"
        )


@dataclass(frozen=True)
class Particle:
    mass: float
    gamma: float
    position: tuple[float, float, float]
    direction: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("particle mass must be positive")
        if self.gamma <= 0:
            raise ValueError("particle damping rate must be positive")
        if self.direction is not None:
            n = np.asarray(self.direction, dtype=float)
            nrm = np.linalg.norm(n)
            if nrm == 0:
                raise ValueError("diffusion direction must be a nonzero vector")
            object.__setattr__(self, "direction", tuple(n / nrm))


@dataclass(frozen=True)
class RotorGeometry:
    """Rigidly connected point particles with the center of mass at the origin."""

    particles: tuple[Particle, ...]

    def __post_init__(self):
        if not self.particles:
            raise ValueError("geometry needs at least one particle")
        com = self.center_of_mass()
        scale = max(1.0, max(np.linalg.norm(p.position) for p in self.particles))
        if np.linalg.norm(com) > COM_TOL * scale:
            raise ValueError(
                f"center of mass {com} is not at the origin; use RotorGeometry.centered"
            )

    def center_of_mass(self) -> np.ndarray:
        masses = np.array([p.mass for p in self.particles])
        pos = np.array([p.position for p in self.particles])
        return masses @ pos / masses.sum()

    @classmethod
    def centered(cls, particles) -> "RotorGeometry":
        particles = tuple(particles)
        masses = np.array([p.mass for p in particles])
        pos = np.array([p.position for p in particles])
        com = masses @ pos / masses.sum()
        shifted = tuple(
            Particle(p.mass, p.gamma, tuple(np.asarray(p.position) - com), p.direction)
            for p in particles
        )
        return cls(shifted)


def load_geometry(path) -> RotorGeometry:
    """Read a geometry file: one particle per line.

    Fields are mass, gamma, x, y, z and optionally nx, ny, nz, separated by
    whitespace or commas; '#' starts a comment.
    """
    particles = []
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f for f in line.replace(",", " ").split() if f]
        if len(fields) not in (5, 8):
            raise ValueError(f"{path}:{ln}: expected 5 or 8 fields, got {len(fields)}")
        try:
            vals = [float(f) for f in fields]
        except ValueError as exc:
            raise ValueError(f"{path}:{ln}: non-numeric field") from exc
        direction = tuple(vals[5:8]) if len(vals) == 8 else None
        particles.append(Particle(vals[0], vals[1], tuple(vals[2:5]), direction))
    if not particles:
        raise ValueError(f"{path}: no particle records found")
    return RotorGeometry(tuple(particles))


@dataclass(frozen=True)
class Orientation:
    """Proper orthogonal 3x3 rotation matrix."""

    rotation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        if r.shape != (3, 3):
            raise ValueError("rotation must be a 3x3 matrix")
        if np.max(np.abs(r.T @ r - np.eye(3))) > ORTHOGONALITY_TOL:
            raise ValueError("matrix is not orthogonal")
        if np.linalg.det(r) < 0:
            raise ValueError("matrix is a reflection, not a rotation")
        r = r.copy()
        r.flags.writeable = False
        object.__setattr__(self, "rotation", r)

    @classmethod
    def identity(cls) -> "Orientation":
        return cls(np.eye(3))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "Orientation":
        return cls(rotation_from_axis_angle(np.asarray(axis, dtype=float), angle))

    def renormalized(self) -> "Orientation":
        u, _, vt = np.linalg.svd(self.rotation)
        return Orientation(u @ vt)


def rotation_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix; `axis` need not be normalized."""
    nrm = np.linalg.norm(axis)
    if nrm == 0:
        return np.eye(3)
    n = axis / nrm
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def lindblad_weights(d1: float, d2: float, d3: float) -> np.ndarray:
    """Dissipator weights from diffusion eigenvalues: D~_k = (D_i + D_j - D_k)/2.

    All weights are nonnegative exactly when D_i + D_j >= D_k for every
    permutation; a violation emits a CompletePositivityWarning (the
    generator remains constructible for study) rather than raising.
    """
    d = np.array([d1, d2, d3], dtype=float)
    if np.any(d < 0):
        raise ValueError("diffusion eigenvalues must be nonnegative")
    weights = 0.5 * (d.sum() - 2.0 * d)
    bad = np.nonzero(weights < 0)[0]
    if bad.size:
        warnings.warn(CompletePositivityWarning(weights[bad], bad), stacklevel=2)
    return weights


def _canonical_eigh(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """eigh with a deterministic sign fix: ascending eigenvalues, each
    eigenvector flipped so its first component of largest magnitude is
    positive (lexicographic tie-break for reproducibility)."""
    vals, vecs = np.linalg.eigh(t)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        lead = np.argmax(np.abs(col) > 1e-12) if np.any(np.abs(col) > 1e-12) else 0
        if col[lead] < 0:
            vecs[:, k] = -col
    return vals, vecs


@dataclass(frozen=True)
class TensorTriple:
    """Body-frame inertia, diffusion and derived dissipator data.

    `axes` holds the diffusion eigenvectors as columns (these are the
    directions entering the dissipator); `inertia` is kept as a full matrix
    because its eigenframe coincides with `axes` only for symmetric enough
    geometries.  `f` is the number of rotational degrees of freedom,
    rank(I).
    """

    axes: np.ndarray
    diffusion_eigenvalues: np.ndarray
    weights: np.ndarray
    inertia: np.ndarray
    inertia_eigenvalues: np.ndarray
    kT: float
    f: int

    def __post_init__(self):
        for name in ("axes", "diffusion_eigenvalues", "weights", "inertia",
                     "inertia_eigenvalues"):
            a = np.ascontiguousarray(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @classmethod
    def from_diffusion_eigenvalues(cls, diffusion_eigenvalues, inertia_eigenvalues,
                                   kT: float, axes=None) -> "TensorTriple":
        d = np.asarray(diffusion_eigenvalues, dtype=float)
        i_eigs = np.asarray(inertia_eigenvalues, dtype=float)
        axes = np.eye(3) if axes is None else np.asarray(axes, dtype=float)
        inertia = axes @ np.diag(i_eigs) @ axes.T
        f = int(np.sum(i_eigs > RANK_TOL * max(1.0, i_eigs.max(initial=0.0))))
        return cls(axes, d, lindblad_weights(*d), inertia, i_eigs, float(kT), f)

    def diffusion_matrix(self) -> np.ndarray:
        return self.axes @ np.diag(self.diffusion_eigenvalues) @ self.axes.T

    def inertia_matrix(self) -> np.ndarray:
        return np.array(self.inertia)

    def friction_matrix(self) -> np.ndarray:
        """Gamma = D I^+ / kT; the zero-inertia eigenvalue is excluded
        from the inversion (pseudo-inverse on the rank-f subspace)."""
        i_inv = np.linalg.pinv(self.inertia, rcond=1e-10)
        return self.diffusion_matrix() @ i_inv / self.kT

    def friction_eigenvalues(self) -> np.ndarray:
        g = self.friction_matrix()
        return np.sort(np.linalg.eigvals(g).real)

    def rotated(self, orientation: Orientation) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(I, Gamma, D) at the given orientation."""
        r = orientation.rotation
        return (
            r @ self.inertia @ r.T,
            r @ self.friction_matrix() @ r.T,
            r @ self.diffusion_matrix() @ r.T,
        )

    @property
    def completely_positive(self) -> bool:
        return bool(np.all(self.weights >= 0))


def tensors_from_geometry(geom: RotorGeometry, kT: float) -> TensorTriple:
    """Body-frame tensors of a rigid point-particle rotor at temperature kT.

    The diffusion tensor is kT * sum m_n gamma_n (r_n^2 1 - r_n (x) r_n) for
    isotropic damping; particles carrying a diffusion direction n contribute
    the directed form kT m_n gamma_n (n x r) (x) (n x r) instead.  Inertia
    follows from the mass distribution, friction from D = kT Gamma I on the
    rank-f subspace.
    """
    if kT <= 0:
        raise ValueError("temperature must be positive")
    axis_tensor = np.zeros((3, 3))
    directed = np.zeros((3, 3))
    inertia = np.zeros((3, 3))
    any_directed = False
    for p in geom.particles:
        r = np.asarray(p.position, dtype=float)
        inertia += p.mass * (np.dot(r, r) * np.eye(3) - np.outer(r, r))
        if p.direction is None:
            axis_tensor += kT * p.mass * p.gamma * np.outer(r, r)
        else:
            any_directed = True
            cx = np.cross(np.asarray(p.direction), r)
            directed += kT * p.mass * p.gamma * np.outer(cx, cx)
    if any_directed:
        diff = np.trace(axis_tensor) * np.eye(3) - axis_tensor + directed
        d_eigs, axes = _canonical_eigh(diff)
        d_eigs = np.clip(d_eigs, 0.0, None)
        weights = lindblad_weights(*d_eigs)
    else:
        # isotropic damping: the dissipator weights are the eigenvalues of
        # the (positive semidefinite) axis tensor itself, so complete
        # positivity holds structurally rather than up to eigenvalue roundoff
        weights, axes = _canonical_eigh(axis_tensor)
        weights = np.clip(weights, 0.0, None)
        d_eigs = weights.sum() - weights
    i_scale = max(1.0, float(np.abs(inertia).max()))
    f = int(np.sum(np.linalg.eigvalsh(inertia) > RANK_TOL * i_scale))
    i_eigs, _ = _canonical_eigh(inertia)
    return TensorTriple(axes, d_eigs, weights, inertia,
                        np.clip(i_eigs, 0.0, None), float(kT), f)


def rotate_tensor(t: np.ndarray, orientation: Orientation | np.ndarray) -> np.ndarray:
    """Similarity transform R T R^T of a symmetric tensor."""
    t = np.asarray(t, dtype=float)
    if np.max(np.abs(t - t.T)) > 1e-10 * max(1.0, np.abs(t).max()):
        raise ValueError("tensor is not symmetric")
    if not isinstance(orientation, Orientation):
        orientation = Orientation(orientation)
    r = orientation.rotation
    return r @ t @ r.T
