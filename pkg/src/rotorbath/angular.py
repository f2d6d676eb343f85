"""Exact angular-momentum kinematics in the truncated |l m> basis.

Provides Wigner 3-j symbols (exact big-integer Racah sum), ladder
coefficients, the matrices of the angular-momentum components J1, J2, J3
and of the orientation unit-vector components, all in the basis
|l m>, l = 0..l_max, m = -l..l, ordered l-major with m ascending.

Units: hbar = 1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt, sqrt
from typing import NamedTuple

import numpy as np

from .operators import OperatorMatrix

__all__ = [
    "LinearBasis",
    "ThreeJArgs",
    "wigner3j",
    "ladder_coefficients",
    "j_component_matrices",
    "orientation_vector_matrices",
]


@dataclass(frozen=True)
class LinearBasis:
    """Truncated total-angular-momentum basis |l m>, l <= l_max.

    States are ordered l-major with m ascending, so state (l, m) sits at
    index l*l + l + m.  This ordering is fixed; snapshot files rely on it.
    """

    l_max: int

    def __post_init__(self):
        if self.l_max < 0:
            raise ValueError("l_max must be >= 0")

    @property
    def dimension(self) -> int:
        return (self.l_max + 1) ** 2

    def index(self, l: int, m: int) -> int:
        if not (0 <= l <= self.l_max and -l <= m <= l):
            raise ValueError(f"state (l={l}, m={m}) outside basis")
        return l * l + l + m

    def quantum_numbers(self, index: int) -> tuple[int, int]:
        if not (0 <= index < self.dimension):
            raise ValueError(f"index {index} outside basis")
        l = isqrt(index)
        return l, index - l * l - l

    def l_values(self) -> np.ndarray:
        return np.repeat(np.arange(self.l_max + 1), 2 * np.arange(self.l_max + 1) + 1)

    def m_values(self) -> np.ndarray:
        return np.concatenate([np.arange(-l, l + 1) for l in range(self.l_max + 1)])

    def extended(self, extra: int = 2) -> "LinearBasis":
        return LinearBasis(self.l_max + extra)

    def project_from(self, entries: np.ndarray, source: "LinearBasis") -> np.ndarray:
        """Restrict a matrix built on a larger basis to this one."""
        if source.l_max < self.l_max:
            raise ValueError("source basis smaller than target")
        d = self.dimension
        return entries[:d, :d]


class ThreeJArgs(NamedTuple):
    l1: int
    l2: int
    l3: int
    m1: int
    m2: int
    m3: int


def _selection_rules_ok(l1, l2, l3, m1, m2, m3) -> bool:
    if abs(m1) > l1 or abs(m2) > l2 or abs(m3) > l3:
        return False
    if m1 + m2 + m3 != 0:
        return False
    return abs(l1 - l2) <= l3 <= l1 + l2


@lru_cache(maxsize=None)
def _wigner3j_cached(l1: int, l2: int, l3: int, m1: int, m2: int, m3: int) -> float:
    # Racah single-sum formula, evaluated with exact rational arithmetic and
    # converted to float at the very end.  The alternating sum is where
    # floating evaluation would cancel catastrophically; Fraction keeps it
    # exact for l well beyond the bases used here.
    t_min = max(0, l2 - l3 - m1, l1 - l3 + m2)
    t_max = min(l1 + l2 - l3, l1 - m1, l2 + m2)
    total = Fraction(0)
    for t in range(t_min, t_max + 1):
        den = (
            factorial(t)
            * factorial(l3 - l2 + t + m1)
            * factorial(l3 - l1 + t - m2)
            * factorial(l1 + l2 - l3 - t)
            * factorial(l1 - t - m1)
            * factorial(l2 - t + m2)
        )
        total += Fraction(-1 if t % 2 else 1, den)
    if total == 0:
        return 0.0
    square = Fraction(
        factorial(l1 + l2 - l3)
        * factorial(l1 - l2 + l3)
        * factorial(-l1 + l2 + l3)
        * factorial(l1 + m1)
        * factorial(l1 - m1)
        * factorial(l2 + m2)
        * factorial(l2 - m2)
        * factorial(l3 + m3)
        * factorial(l3 - m3),
        factorial(l1 + l2 + l3 + 1),
    )
    sign = -1 if (l1 - l2 - m3) % 2 else 1
    magnitude = abs(total) * _fraction_sqrt(square)
    return float(sign * (1 if total > 0 else -1) * magnitude)


def _fraction_sqrt(x: Fraction) -> float:
    # sqrt of an exact nonnegative rational, split to avoid overflow for
    # the factorial ratios that appear at large l.
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return rn / rd
    return sqrt(float(Fraction(num, den)))


def wigner3j(l1: int, l2: int, l3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3-j symbol for integer angular momenta.

    Returns 0 when any selection rule fails.  Values are cached; the cache
    is safe for concurrent reads with single-writer insertion.
    """
    args = (l1, l2, l3, m1, m2, m3)
    if any(a != int(a) for a in args):
        raise ValueError("half-integer angular momenta are not supported")
    l1, l2, l3, m1, m2, m3 = (int(a) for a in args)
    if min(l1, l2, l3) < 0:
        raise ValueError("negative angular momentum")
    if not _selection_rules_ok(l1, l2, l3, m1, m2, m3):
        return 0.0
    return _wigner3j_cached(l1, l2, l3, m1, m2, m3)


def ladder_coefficients(l: int, m: int) -> tuple[float, float]:
    """Raising/lowering coefficients c_plus, c_minus = sqrt(l(l+1) - m(m+-1))."""
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds l = {l}")
    c_plus = sqrt(l * (l + 1) - m * (m + 1)) if m < l else 0.0
    c_minus = sqrt(l * (l + 1) - m * (m - 1)) if m > -l else 0.0
    return c_plus, c_minus


@lru_cache(maxsize=32)
def _j_matrices_raw(l_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    basis = LinearBasis(l_max)
    d = basis.dimension
    j_plus = np.zeros((d, d), dtype=complex)
    j3 = np.zeros((d, d), dtype=complex)
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            i = basis.index(l, m)
            j3[i, i] = m
            if m < l:
                c_plus, _ = ladder_coefficients(l, m)
                j_plus[basis.index(l, m + 1), i] = c_plus
    j_minus = j_plus.conj().T
    j1 = 0.5 * (j_plus + j_minus)
    j2 = -0.5j * (j_plus - j_minus)
    for a in (j1, j2, j3):
        a.flags.writeable = False
    return j1, j2, j3


def j_component_matrices(basis: LinearBasis) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Space-fixed angular momentum components J1, J2, J3 (hbar = 1).

    J3 is diagonal; J1, J2 follow from the ladder action within each l
    block, so the matrices are exactly Hermitian and obey
    [J_j, J_k] = i eps_jkl J_l block by block.
    """
    return tuple(OperatorMatrix(basis, a) for a in _j_matrices_raw(basis.l_max))


def _gaunt_rank1(lp: int, mp: int, mu: int, l: int, m: int) -> float:
    """<l' m'| Y_{1 mu} |l m> for the multiplication operator Y_{1 mu}."""
    if mp != m + mu or abs(lp - l) != 1:
        return 0.0
    pref = sqrt(3.0 * (2 * lp + 1) * (2 * l + 1) / (4.0 * np.pi))
    sign = -1.0 if mp % 2 else 1.0
    return (
        sign
        * pref
        * wigner3j(lp, 1, l, 0, 0, 0)
        * wigner3j(lp, 1, l, -mp, mu, m)
    )


@lru_cache(maxsize=32)
def _orientation_matrices_raw(l_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    basis = LinearBasis(l_max)
    d = basis.dimension
    y = {mu: np.zeros((d, d), dtype=complex) for mu in (-1, 0, 1)}
    for l in range(l_max + 1):
        for lp in (l - 1, l + 1):
            if not 0 <= lp <= l_max:
                continue
            for m in range(-l, l + 1):
                for mu in (-1, 0, 1):
                    mp = m + mu
                    if abs(mp) > lp:
                        continue
                    val = _gaunt_rank1(lp, mp, mu, l, m)
                    if val != 0.0:
                        y[mu][basis.index(lp, mp), basis.index(l, m)] = val
    # Unit-vector components from the three rank-1 spherical harmonics.
    mx = sqrt(2.0 * np.pi / 3.0) * (y[-1] - y[1])
    my = 1j * sqrt(2.0 * np.pi / 3.0) * (y[-1] + y[1])
    mz = sqrt(4.0 * np.pi / 3.0) * y[0]
    for a in (mx, my, mz):
        a.flags.writeable = False
    return mx, my, mz


def orientation_vector_matrices(basis: LinearBasis) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Matrices of the orientation unit-vector components (m_x, m_y, m_z).

    Each component couples only l <-> l+-1 with m' = m, m+-1.  The identity
    M1^2 + M2^2 + M3^2 = 1 holds exactly on the subspace l <= l_max - 1;
    truncation leaks only at the boundary shell.
    """
    return tuple(OperatorMatrix(basis, a) for a in _orientation_matrices_raw(basis.l_max))
