import numpy as np
import pytest

from rotorbath.classical import diffusion_from_particles
from rotorbath.tensors import (
    CompletePositivityWarning,
    Orientation,
    Particle,
    RotorGeometry,
    lindblad_weights,
    load_geometry,
    rotate_tensor,
    tensors_from_geometry,
)


def brute_force_diffusion(geom, kT):
    """Direct summation over the particle list (the oracle route goes
    through the axis tensor D~ and its eigenvalue pairing)."""
    dtilde = np.zeros((3, 3))
    directed = np.zeros((3, 3))
    any_directed = any(p.direction is not None for p in geom.particles)
    for p in geom.particles:
        r = np.array(p.position)
        if p.direction is None:
            dtilde += kT * p.mass * p.gamma * np.outer(r, r)
        else:
            c = np.cross(np.array(p.direction), r)
            directed += kT * p.mass * p.gamma * np.outer(c, c)
    if any_directed:
        return np.sort(np.linalg.eigvalsh(directed))
    w = np.sort(np.linalg.eigvalsh(dtilde))[::-1]
    # D_k = D~_i + D~_j for (i, j, k) permutations
    d = np.array([w[1] + w[2], w[0] + w[2], w[0] + w[1]])
    return np.sort(d)


def test_dumbbell():
    geom = RotorGeometry((
        Particle(1.0, 0.5, (0.0, 0.0, 1.0)),
        Particle(1.0, 0.5, (0.0, 0.0, -1.0)),
    ))
    t = tensors_from_geometry(geom, kT=2.0)
    d = np.sort(t.diffusion_eigenvalues)
    assert d[0] == pytest.approx(0.0, abs=1e-14)
    assert d[1] == pytest.approx(d[2])
    # zero eigenvector along the symmetry axis
    idx = int(np.argmin(t.diffusion_eigenvalues))
    assert np.abs(t.axes[:, idx]) == pytest.approx([0, 0, 1], abs=1e-12)
    assert t.f == 2
    assert np.linalg.matrix_rank(t.inertia, tol=1e-10) == 2


def test_tetrahedron_isotropic():
    v = np.array([
        [1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]
    ], dtype=float) / np.sqrt(3)
    geom = RotorGeometry(tuple(Particle(1.0, 1.0, tuple(r)) for r in v))
    t = tensors_from_geometry(geom, kT=1.0)
    d = t.diffusion_eigenvalues
    assert d == pytest.approx(np.full(3, d.mean()), rel=1e-12)


def test_three_masses_against_brute_force():
    geom = RotorGeometry.centered([
        Particle(1.0, 0.3, (1.0, 0.0, 0.0)),
        Particle(2.0, 0.3, (0.0, 0.7, 0.0)),
        Particle(3.0, 0.3, (0.0, 0.0, 0.4)),
    ])
    t = tensors_from_geometry(geom, kT=1.5)
    assert np.sort(t.diffusion_eigenvalues) == pytest.approx(
        brute_force_diffusion(geom, 1.5), rel=1e-12
    )


def test_lindblad_weights_examples():
    assert lindblad_weights(2, 2, 2) == pytest.approx([1, 1, 1])
    assert lindblad_weights(1, 1, 2) == pytest.approx([1, 1, 0])
    with pytest.warns(CompletePositivityWarning) as record:
        w = lindblad_weights(1, 1, 3)
    assert w == pytest.approx([1.5, 1.5, -0.5])
    assert record[0].message.indices == (2,)
    with pytest.raises(ValueError):
        lindblad_weights(-1, 1, 1)


def test_rotate_tensor():
    t = np.diag([1.0, 2.0, 3.0])
    assert rotate_tensor(t, Orientation.identity()) == pytest.approx(t)
    rng = np.random.default_rng(0)
    for _ in range(20):
        axis = rng.normal(size=3)
        rot = Orientation.from_axis_angle(axis, rng.uniform(0, np.pi))
        rotated = rotate_tensor(t, rot)
        assert np.sort(np.linalg.eigvalsh(rotated)) == pytest.approx(
            [1.0, 2.0, 3.0], abs=1e-12
        )
    with pytest.raises(ValueError):
        rotate_tensor(np.array([[1.0, 2.0, 0], [0, 1, 0], [0, 0, 1]]),
                      Orientation.identity())
    with pytest.raises(ValueError):
        Orientation(np.diag([1.0, 1.0, 2.0]))


def test_dumbbell_rotation_moves_zero_axis():
    geom = RotorGeometry((
        Particle(1.0, 1.0, (0.0, 0.0, 1.0)),
        Particle(1.0, 1.0, (0.0, 0.0, -1.0)),
    ))
    t = tensors_from_geometry(geom, kT=1.0)
    rot = Orientation.from_axis_angle([1.0, 0.0, 0.0], np.pi / 2)
    d_rot = rotate_tensor(t.diffusion_matrix(), rot)
    vals, vecs = np.linalg.eigh(d_rot)
    axis = vecs[:, np.argmin(vals)]
    assert np.abs(axis) == pytest.approx([0, 1, 0], abs=1e-12)


def test_trace_rotation_invariance():
    rng = np.random.default_rng(7)
    geom = RotorGeometry.centered([
        Particle(float(m), float(g), tuple(r))
        for m, g, r in zip(rng.uniform(0.5, 2, 4), rng.uniform(0.1, 1, 4),
                           rng.normal(size=(4, 3)))
    ])
    t = tensors_from_geometry(geom, kT=1.0)
    d0 = t.diffusion_matrix()
    for _ in range(10):
        rot = Orientation.from_axis_angle(rng.normal(size=3), rng.uniform(0, np.pi))
        assert np.trace(rotate_tensor(d0, rot)) == pytest.approx(np.trace(d0), rel=1e-12)


def test_isotropic_damping_satisfies_cp_inequality():
    rng = np.random.default_rng(21)
    for _ in range(200):
        n = rng.integers(2, 6)
        geom = RotorGeometry.centered([
            Particle(float(m), float(g), tuple(r))
            for m, g, r in zip(rng.uniform(0.2, 3, n), rng.uniform(0.05, 2, n),
                               rng.normal(size=(n, 3)))
        ])
        t = tensors_from_geometry(geom, kT=1.0)
        d = t.diffusion_eigenvalues
        assert d.sum() >= 2 * d.max() - 1e-10 * max(d.max(), 1.0)
        assert t.completely_positive


def test_directed_diffusion():
    # direction parallel to the position: no angular momentum diffusion at all
    geom = RotorGeometry((
        Particle(1.0, 1.0, (0.0, 0.0, 1.0), direction=(0.0, 0.0, 1.0)),
        Particle(1.0, 1.0, (0.0, 0.0, -1.0), direction=(0.0, 0.0, 1.0)),
    ))
    t = tensors_from_geometry(geom, kT=1.0)
    assert np.max(np.abs(t.diffusion_matrix())) <= 1e-14

    # a single transverse direction concentrates diffusion on one axis and
    # violates D_i + D_j >= D_k
    geom2 = RotorGeometry((
        Particle(1.0, 1.0, (0.0, 0.0, 1.0), direction=(1.0, 0.0, 0.0)),
        Particle(1.0, 1.0, (0.0, 0.0, -1.0), direction=(1.0, 0.0, 0.0)),
    ))
    with pytest.warns(CompletePositivityWarning):
        t2 = tensors_from_geometry(geom2, kT=1.0)
    assert not t2.completely_positive
    assert np.min(t2.weights) < 0


def test_center_of_mass_enforced():
    with pytest.raises(ValueError):
        RotorGeometry((Particle(1.0, 1.0, (0.0, 0.0, 1.0)),))
    geom = RotorGeometry.centered([Particle(1.0, 1.0, (0.0, 0.0, 1.0)),
                                   Particle(3.0, 1.0, (0.0, 0.0, -1.0))])
    assert geom.center_of_mass() == pytest.approx([0, 0, 0], abs=1e-14)


def test_geometry_file_loading(tmp_path):
    path = tmp_path / "rotor.txt"
    path.write_text(
        "# mass gamma x y z [nx ny nz]\n"
        "1.0 0.5  0 0  1\n"
        "1.0, 0.5, 0, 0, -1\n"
    )
    geom = load_geometry(path)
    assert len(geom.particles) == 2
    assert geom.particles[0].direction is None

    directed = tmp_path / "directed.txt"
    directed.write_text("1 1 0 0 1 2 0 0\n1 1 0 0 -1 2 0 0\n")
    geom2 = load_geometry(directed)
    assert geom2.particles[0].direction == pytest.approx((1.0, 0.0, 0.0))

    bad = tmp_path / "bad.txt"
    bad.write_text("1 1 0 0\n")
    with pytest.raises(ValueError):
        load_geometry(bad)


def test_fluctuation_dissipation_identity():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = rng.integers(2, 5)
        geom = RotorGeometry.centered([
            Particle(float(m), float(g), tuple(r))
            for m, g, r in zip(rng.uniform(0.2, 3, n), rng.uniform(0.05, 2, n),
                               rng.normal(size=(n, 3)))
        ])
        t = diffusion_from_particles(geom, kT=0.7)
        d = t.diffusion_matrix()
        assert np.max(np.abs(d - 0.7 * t.friction_matrix() @ t.inertia)) <= 1e-10 * max(
            1.0, np.abs(d).max()
        )
