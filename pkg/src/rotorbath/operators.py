"""Matrix representations of operators on a truncated rotor basis.

Every quantum operator in this package is stored as a dense complex matrix
together with the basis it acts on.  Matrices are frozen after construction
and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["OperatorMatrix", "DensityMatrix", "trace_distance"]

# Validation tolerances for density matrices.
TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class OperatorMatrix:
    """Complex matrix in a labeled, truncated basis."""

    basis: Any
    entries: np.ndarray

    def __post_init__(self):
        entries = _freeze(self.entries)
        dim = self.basis.dimension
        if entries.shape != (dim, dim):
            raise ValueError(
                f"entries shape {entries.shape} does not match basis dimension {dim}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.entries))

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        a, b = self.entries, other.entries
        return OperatorMatrix(self.basis, a @ b - b @ a)

    def _check_compatible(self, other: "OperatorMatrix") -> None:
        if self.basis != other.basis:
            raise ValueError("operators live on different bases")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.basis, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.basis, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.basis, self.entries - other.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, -self.entries)


@dataclass(frozen=True)
class DensityMatrix(OperatorMatrix):
    """Hermitian, unit-trace, positive-semidefinite operator carrying the state.

    Validation can be skipped for matrices produced by trusted numerical
    paths; `validate()` may always be called explicitly.
    """

    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        super().__post_init__()
        if self.check:
            self.validate()

    def validate(self, trace_tol: float = TRACE_TOL,
                 positivity_tol: float = POSITIVITY_TOL) -> None:
        m = self.entries
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"state not Hermitian: max asymmetry {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"state trace {tr!r} deviates from 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -positivity_tol:
            raise ValueError(f"state has negative eigenvalue {lo:.3e}")

    @classmethod
    def from_pure(cls, basis, amplitudes: np.ndarray, check: bool = True) -> "DensityMatrix":
        v = np.asarray(amplitudes, dtype=complex).ravel()
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("zero state vector")
        v = v / nrm
        return cls(basis, np.outer(v, v.conj()), check=check)

    @classmethod
    def maximally_mixed(cls, basis) -> "DensityMatrix":
        d = basis.dimension
        return cls(basis, np.eye(d, dtype=complex) / d, check=False)

    @classmethod
    def from_populations(cls, basis, populations: np.ndarray,
                         check: bool = True) -> "DensityMatrix":
        p = np.asarray(populations, dtype=float)
        if p.shape != (basis.dimension,):
            raise ValueError("population vector does not match basis dimension")
        return cls(basis, np.diag(p.astype(complex)), check=check)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def purity(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)

    def clipped(self) -> "DensityMatrix":
        """Reporting-only copy with negative eigenvalues zeroed and trace renormalized."""
        w, v = np.linalg.eigh(self.entries)
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        return DensityMatrix(self.basis, (v * w) @ v.conj().T, check=False)


def trace_distance(rho: DensityMatrix | np.ndarray, sigma: DensityMatrix | np.ndarray) -> float:
    """Half the trace norm of the difference of two states."""
    a = rho.entries if isinstance(rho, OperatorMatrix) else np.asarray(rho)
    b = sigma.entries if isinstance(sigma, OperatorMatrix) else np.asarray(sigma)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a - b)).sum())
