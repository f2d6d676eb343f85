import itertools

import numpy as np
import pytest
from scipy.special import sph_harm_y

from rotorbath.angular import (
    LinearBasis,
    j_component_matrices,
    ladder_coefficients,
    orientation_vector_matrices,
    wigner3j,
)

# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def _ladder_factor(j, m):
    return np.sqrt(j * (j + 1) - m * (m + 1))


def cg_recursion(j1, j2, j3, m1, m2):
    """Clebsch-Gordan coefficient <j1 m1 j2 m2 | j3, m1+m2> built from the
    angular-momentum algebra alone: the stretched state is fixed by the
    kernel of the total raising operator, lower states follow by applying
    the total lowering operator.  Independent of any closed-form sum."""
    if abs(m1) > j1 or abs(m2) > j2 or not (abs(j1 - j2) <= j3 <= j1 + j2):
        return 0.0
    m3 = m1 + m2
    if abs(m3) > j3:
        return 0.0
    # stretched state |j3 j3> = sum_a c_a |a, j3 - a>
    a_vals = [a for a in range(-j1, j1 + 1) if abs(j3 - a) <= j2]
    c = {a_vals[-1]: 1.0}
    for a in reversed(a_vals[:-1]):
        # J_+ |j3 j3> = 0 forces c_a f1(a) + c_{a+1} f2(j3 - a - 1) = 0
        c[a] = -c[a + 1] * _ladder_factor(j2, j3 - a - 1) / _ladder_factor(j1, a)
    norm = np.sqrt(sum(v * v for v in c.values()))
    sign = 1.0 if c[a_vals[-1]] > 0 else -1.0  # Condon-Shortley: top weight positive
    state = {(a, j3 - a): sign * v / norm for a, v in c.items()}
    mm = j3
    while mm > m3:
        new = {}
        denom = _ladder_factor(j3, mm - 1)
        for (a, b), v in state.items():
            if a > -j1:
                new[(a - 1, b)] = new.get((a - 1, b), 0.0) + v * _ladder_factor(j1, a - 1) / denom
            if b > -j2:
                new[(a, b - 1)] = new.get((a, b - 1), 0.0) + v * _ladder_factor(j2, b - 1) / denom
        state = new
        mm -= 1
    return state.get((m1, m2), 0.0)


def threej_oracle(l1, l2, l3, m1, m2, m3):
    if m1 + m2 + m3 != 0:
        return 0.0
    phase = -1.0 if (l1 - l2 - m3) % 2 else 1.0
    return phase * cg_recursion(l1, l2, l3, m1, m2) / np.sqrt(2 * l3 + 1)


# ---------------------------------------------------------------------------
# Wigner 3-j
# ---------------------------------------------------------------------------


def test_wigner3j_examples():
    assert wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / np.sqrt(3), abs=1e-15)
    # odd l1+l2+l3 with all m = 0 vanishes by symmetry
    assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0
    assert wigner3j(2, 1, 1, -1, 1, 0) == pytest.approx(
        threej_oracle(2, 1, 1, -1, 1, 0), abs=1e-12
    )


def test_wigner3j_against_recursion_oracle():
    for l1, l2, l3 in itertools.product(range(5), repeat=3):
        if not abs(l1 - l2) <= l3 <= l1 + l2:
            continue
        for m1 in range(-l1, l1 + 1):
            for m2 in range(-l2, l2 + 1):
                m3 = -(m1 + m2)
                if abs(m3) > l3:
                    continue
                assert wigner3j(l1, l2, l3, m1, m2, m3) == pytest.approx(
                    threej_oracle(l1, l2, l3, m1, m2, m3), abs=1e-11
                )


def test_wigner3j_selection_rules_and_errors():
    assert wigner3j(2, 1, 5, 0, 0, 0) == 0.0  # triangle violated
    assert wigner3j(2, 2, 2, 1, 1, 1) == 0.0  # m sum nonzero
    assert wigner3j(2, 2, 2, 3, -3, 0) == 0.0  # |m| > l
    with pytest.raises(ValueError):
        wigner3j(-1, 1, 1, 0, 0, 0)


def test_wigner3j_permutation_and_reflection_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(200):
        l1, l2, l3 = rng.integers(0, 7, size=3)
        if not abs(l1 - l2) <= l3 <= l1 + l2:
            continue
        m1 = rng.integers(-l1, l1 + 1)
        m2 = rng.integers(-l2, l2 + 1)
        m3 = -(m1 + m2)
        if abs(m3) > l3:
            continue
        base = wigner3j(l1, l2, l3, m1, m2, m3)
        sign = (-1.0) ** (l1 + l2 + l3)
        # even (cyclic) permutation
        assert wigner3j(l2, l3, l1, m2, m3, m1) == pytest.approx(base, abs=1e-13)
        # odd permutation and m reflection
        assert wigner3j(l2, l1, l3, m2, m1, m3) == pytest.approx(sign * base, abs=1e-13)
        assert wigner3j(l1, l2, l3, -m1, -m2, -m3) == pytest.approx(sign * base, abs=1e-13)


def test_wigner3j_orthogonality():
    # sum over m1 (m2 = -m3 - m1 forced) of (2 l3 + 1) 3j^2 is 1 per fixed m3
    for l1, l2 in itertools.product(range(7), repeat=2):
        for l3 in range(abs(l1 - l2), l1 + l2 + 1):
            for m3 in range(-l3, l3 + 1):
                total = 0.0
                for m1 in range(-l1, l1 + 1):
                    m2 = -m3 - m1
                    if abs(m2) > l2:
                        continue
                    total += (2 * l3 + 1) * wigner3j(l1, l2, l3, m1, m2, m3) ** 2
                assert total == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# Ladder coefficients
# ---------------------------------------------------------------------------


def ladder_oracle(l, m, direction):
    """c_plus/c_minus from the differential ladder operators acting on Y_lm."""
    theta, phi = 1.1, 0.7
    h = 1e-5

    def y(l_, m_, th, ph):
        return sph_harm_y(l_, m_, th, ph)

    dth = (y(l, m, theta + h, phi) - y(l, m, theta - h, phi)) / (2 * h)
    dph = (y(l, m, theta, phi + h) - y(l, m, theta, phi - h)) / (2 * h)
    if direction > 0:
        shifted = np.exp(1j * phi) * (dth + 1j * dph / np.tan(theta))
        return (shifted / y(l, m + 1, theta, phi)).real
    shifted = np.exp(-1j * phi) * (-dth + 1j * dph / np.tan(theta))
    return (shifted / y(l, m - 1, theta, phi)).real


def test_ladder_coefficients():
    assert ladder_coefficients(1, 0) == pytest.approx((np.sqrt(2), np.sqrt(2)))
    c_plus, c_minus = ladder_coefficients(4, 4)
    assert c_plus == 0.0
    assert c_minus == pytest.approx(np.sqrt(8))
    # (5, -3): c_plus = sqrt(30 - 6) = sqrt(24), c_minus = sqrt(30 - 12) = sqrt(18),
    # both confirmed by the differential-operator oracle
    assert ladder_coefficients(5, -3) == pytest.approx((np.sqrt(24), np.sqrt(18)))
    assert ladder_coefficients(5, -3)[0] == pytest.approx(ladder_oracle(5, -3, +1), rel=1e-6)
    assert ladder_coefficients(5, -3)[1] == pytest.approx(ladder_oracle(5, -3, -1), rel=1e-6)
    assert ladder_coefficients(2, 1)[0] == pytest.approx(ladder_oracle(2, 1, +1), rel=1e-6)
    with pytest.raises(ValueError):
        ladder_coefficients(2, 3)


# ---------------------------------------------------------------------------
# Basis bookkeeping
# ---------------------------------------------------------------------------


def test_basis_index_roundtrip():
    basis = LinearBasis(9)
    for idx in range(basis.dimension):
        l, m = basis.quantum_numbers(idx)
        assert basis.index(l, m) == idx
    assert basis.dimension == 100
    with pytest.raises(ValueError):
        LinearBasis(-1)
    with pytest.raises(ValueError):
        basis.index(2, 3)


# ---------------------------------------------------------------------------
# Angular momentum matrices
# ---------------------------------------------------------------------------


def test_j_matrix_elements():
    basis = LinearBasis(3)
    j1, _, j3 = j_component_matrices(basis)
    assert j3.entries[basis.index(1, 1), basis.index(1, 1)] == pytest.approx(1.0)
    assert j1.entries[basis.index(1, 1), basis.index(1, 0)] == pytest.approx(np.sqrt(2) / 2)


def test_j_commutators_and_hermiticity():
    basis = LinearBasis(8)
    mats = [o.entries for o in j_component_matrices(basis)]
    eye = np.eye(basis.dimension)
    for (a, b, c) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        comm = mats[a] @ mats[b] - mats[b] @ mats[a]
        assert np.max(np.abs(comm - 1j * mats[c])) <= 1e-12
    for m in mats:
        assert np.max(np.abs(m - m.conj().T)) <= 1e-14
    # basis mismatch guard
    other = j_component_matrices(LinearBasis(4))[0]
    with pytest.raises(ValueError):
        _ = other @ j_component_matrices(basis)[0]


def quadrature_element(component, lp, mp, l, m, n_theta=40):
    """<l' m'|f|l m> by Gauss-Legendre x trapezoid quadrature, with f one of
    the Cartesian unit-vector components; independent of any 3-j symbol."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    n_phi = 64
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    f = {
        "x": np.sin(th) * np.cos(ph),
        "y": np.sin(th) * np.sin(ph),
        "z": np.cos(th),
    }[component]
    integrand = np.conj(sph_harm_y(lp, mp, th, ph)) * f * sph_harm_y(l, m, th, ph)
    return (w[:, None] * integrand).sum() * (2 * np.pi / n_phi)


def test_orientation_matrices_against_quadrature():
    basis = LinearBasis(4)
    mats = orientation_vector_matrices(basis)
    for comp, mat in zip(("x", "y", "z"), mats):
        for lp, l in ((0, 1), (2, 1), (3, 4), (2, 3)):
            for mp in range(-lp, lp + 1):
                for m in range(-l, l + 1):
                    i, j = basis.index(lp, mp), basis.index(l, m)
                    assert mat.entries[i, j] == pytest.approx(
                        quadrature_element(comp, lp, mp, l, m), abs=1e-12
                    )


def test_orientation_matrix_examples_and_selection_rules():
    basis = LinearBasis(5)
    _, _, m3 = orientation_vector_matrices(basis)
    assert m3.entries[basis.index(0, 0), basis.index(1, 0)] == pytest.approx(
        1 / np.sqrt(3), abs=1e-14
    )
    for l in range(basis.l_max + 1):
        for m in range(-l, l + 1):
            assert m3.entries[basis.index(l, m), basis.index(l, m)] == 0.0


def test_orientation_unit_norm_and_commutators():
    basis = LinearBasis(8)
    m_ops = [o.entries for o in orientation_vector_matrices(basis)]
    j_ops = [o.entries for o in j_component_matrices(basis)]
    lv = basis.l_values()
    interior = np.diag((lv <= basis.l_max - 1).astype(float))
    total = sum(m @ m for m in m_ops)
    assert np.max(np.abs(interior @ (total - np.eye(basis.dimension)) @ interior)) <= 1e-12
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    for k in range(3):
        for j in range(3):
            comm = j_ops[k] @ m_ops[j] - m_ops[j] @ j_ops[k]
            rhs = sum(1j * eps[k, j, l] * m_ops[l] for l in range(3))
            assert np.max(np.abs(interior @ (comm - rhs) @ interior)) <= 1e-12
    for m in m_ops:
        assert np.max(np.abs(m - m.conj().T)) <= 1e-14
