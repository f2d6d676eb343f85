"""Dissipative dynamics of the planar rotor (one angle, integer momenta).

Natural units as in the linear module: hbar = I = k_B = 1, k_B T = xi/2,
D = xi Gamma / 2.  The orientation couples through cos/sin of the angle
(shift operators in the momentum basis); the inversion-symmetric variant
couples through the double angle, which reproduces the substitution
Gamma -> Gamma/2, D -> D/4, m +- 1 -> m +- 2 in the phase-space dynamics.

Phase space uses a discrete Wigner function on the cylinder: an integer-m
grid carrying the even coherence differences and a companion half-integer
grid carrying the odd ones, so the transform is invertible and both
marginals are exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import expm
from scipy.special import binom, iv

from .lindblad import GeneratorMap, ObservableSeries, propagate
from .operators import DensityMatrix, OperatorMatrix

__all__ = [
    "PlanarBasis",
    "WignerField",
    "BoundaryMassWarning",
    "build_planar_generator",
    "stationary_planar",
    "planar_gibbs_state",
    "wigner_transform",
    "inverse_wigner",
    "evolve_wigner_fp",
    "planar_superposition_state",
    "boundary_band_mass",
    "fig3_experiment",
    "Fig3Result",
]


class BoundaryMassWarning(UserWarning):
    """Probability is reaching the momentum cutoff; results are truncated."""


@dataclass(frozen=True)
class PlanarBasis:
    """Momentum basis |m>, m = -m_max..m_max; p|m> = m|m>."""

    m_max: int

    def __post_init__(self):
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")

    @property
    def dimension(self) -> int:
        return 2 * self.m_max + 1

    def index(self, m: int) -> int:
        if abs(m) > self.m_max:
            raise ValueError(f"m = {m} outside basis")
        return m + self.m_max

    def m_values(self) -> np.ndarray:
        return np.arange(-self.m_max, self.m_max + 1)


def _planar_operators(m_max: int):
    """Shift and momentum matrices, products built on an extended internal
    basis and cut back so every element is exact on |m| <= m_max."""
    ext = 2 * (m_max + 2) + 1
    up = np.zeros((ext, ext), dtype=complex)
    for i in range(ext - 1):
        up[i + 1, i] = 1.0
    mv = np.arange(-(m_max + 2), m_max + 3).astype(complex)
    p = np.diag(mv)
    lo = 2
    hi = ext - 2

    def cut(x):
        return x[lo:hi, lo:hi]

    return cut, up, up.conj().T, p


def build_planar_generator(xi: float, gamma: float, m_max: int,
                           include_1overT_terms: bool = True,
                           inversion_symmetric: bool = False,
                           decoherence_only: bool = False) -> GeneratorMap:
    """Planar-rotor generator: H = p^2/2 plus the angular dissipator.

    The standard vectorial coupling is A = (cos a - (i/2 xi) sin a p,
    sin a + (i/2 xi) cos a p), assembled here in the equivalent shift form
    e^{+-i a}(1 -+ p/2 xi)/sqrt(2); the inversion-symmetric variant uses the
    orientation-quadratic tensor coupling (double-angle shifts).  With
    include_1overT_terms=False the O(1/T) part is dropped: dephasing with
    weight 2D plus the friction cross term with weight Gamma/2.
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if m_max < 4:
        raise ValueError("m_max must be at least 4")
    basis = PlanarBasis(m_max)
    mv = basis.m_values()
    ham = OperatorMatrix(basis, np.diag(0.5 * mv.astype(complex) ** 2))
    charge = mv
    diffusion = 0.5 * xi * gamma
    if diffusion == 0.0:
        return GeneratorMap(ham, charge=charge)
    cut, up, down, p = _planar_operators(m_max)
    root2 = np.sqrt(2.0)
    if not inversion_symmetric:
        lam = 1.0 / (2.0 * xi)
        weight = 2.0 * diffusion
        e_ops = (cut(up) / root2, cut(down) / root2)
        if include_1overT_terms and not decoherence_only:
            a_ops = (cut(up @ (np.eye(p.shape[0]) - lam * p)) / root2,
                     cut(down @ (np.eye(p.shape[0]) + lam * p)) / root2)
            return GeneratorMap(ham, lindblad_terms=((weight, a_ops),), charge=charge)
        cross = ()
        if not decoherence_only:
            f_ops = (1j * cut(up @ p) / root2, -1j * cut(down @ p) / root2)
            cross = ((weight * lam, f_ops, e_ops),)
        return GeneratorMap(ham, lindblad_terms=((weight, e_ops),),
                            cross_terms=cross, charge=charge)
    # Orientation-quadratic tensor coupling; both tensor slots recombined
    # into shift-homogeneous components (any unitary recombination of the
    # slots leaves the double contraction invariant).
    mu = 1.0 / xi
    weight = diffusion
    er = (up / root2, down / root2)            # e_r components (+, -)
    ephi = (1j * up / root2, -1j * down / root2)  # e_phi components (+, -)
    b0, grad = [], []
    for a in range(2):
        for b in range(2):
            b0.append(cut(er[a] @ er[b]))
            grad.append(cut(er[a] @ ephi[b] @ p))
    if include_1overT_terms and not decoherence_only:
        ops = tuple(b0[k] + 1j * mu * grad[k] for k in range(4))
        return GeneratorMap(ham, lindblad_terms=((weight, ops),), charge=charge)
    cross = ()
    if not decoherence_only:
        cross = ((weight * mu, tuple(grad), tuple(b0)),)
    return GeneratorMap(ham, lindblad_terms=((weight, tuple(b0)),),
                        cross_terms=cross, charge=charge)


# -- stationary states ---------------------------------------------------------


def stationary_planar(xi: float, m_max: int, variant: str = "full",
                      tail_tol: float = 1e-10) -> DensityMatrix:
    """Diagonal stationary state of the planar rotor.

    variant="full": weights [C(2 xi, |m|) / C(2 xi + |m|, |m|)]^2, the
    stationary state of the complete dissipator; variant="high_T": binomial
    weights C(2 xi, xi + m) / 2^(2 xi), stationary once the O(1/T) part is
    dropped.  Non-integer 2 xi uses the Gamma continuation.
    """
    basis = PlanarBasis(m_max)
    mv = basis.m_values()

    if variant == "full":
        def w(m):
            return float(binom(2.0 * xi, abs(m)) / binom(2.0 * xi + abs(m), abs(m))) ** 2
    elif variant == "high_T":
        def w(m):
            return float(binom(2.0 * xi, xi + m)) / 4.0**xi
    else:
        raise ValueError(f"unknown variant {variant!r}")

    weights = np.array([w(m) for m in mv])
    z_main = weights.sum()
    tail = 0.0
    for m in range(m_max + 1, m_max + 400):
        term = w(m) + w(-m)
        tail += term
        if term < 1e-18 * max(z_main, 1e-300) and m > m_max + 10:
            break
    if tail / (z_main + tail) > tail_tol:
        raise ValueError(
            f"stationary tail {tail / (z_main + tail):.2e} beyond m_max={m_max} "
            f"exceeds {tail_tol:.1e}"
        )
    return DensityMatrix.from_populations(basis, weights / z_main, check=False)


def planar_gibbs_state(basis: PlanarBasis, xi: float) -> DensityMatrix:
    mv = basis.m_values()
    w = np.exp(-mv.astype(float) ** 2 / xi)
    return DensityMatrix.from_populations(basis, w / w.sum(), check=False)


# -- discrete Wigner representation --------------------------------------------


@dataclass
class WignerField:
    """w_m(alpha) on the doubled momentum grid.

    Rows are labeled by twice the momentum (integers -2 m_max .. 2 m_max);
    even rows are the physical integer-m Wigner rows, odd rows carry the
    odd coherence differences.  Columns sample alpha uniformly on [0, 2 pi).
    """

    m_max: int
    alpha: np.ndarray
    values: np.ndarray  # (4 m_max + 1, n_alpha), real

    @property
    def twice_m(self) -> np.ndarray:
        return np.arange(-2 * self.m_max, 2 * self.m_max + 1)

    @property
    def m_grid(self) -> np.ndarray:
        return self.twice_m / 2.0

    def integer_rows(self) -> np.ndarray:
        return self.values[::2]

    def momentum_marginal(self) -> np.ndarray:
        """p_m = integral over alpha of the integer rows."""
        dalpha = 2.0 * np.pi / self.alpha.size
        return self.integer_rows().sum(axis=1) * dalpha

    def angular_marginal(self) -> np.ndarray:
        """<alpha|rho|alpha>, summing both row families."""
        return self.values.sum(axis=0)

    def total(self) -> float:
        return float(self.momentum_marginal().sum())

    def fringe_amplitude(self, m: int = 0) -> float:
        """Half the peak-to-peak oscillation of the integer row m."""
        row = self.values[2 * (m + self.m_max)]
        return 0.5 * float(row.max() - row.min())

    def to_csv(self, path) -> None:
        lines = ["m,alpha,w"]
        mg = self.m_grid
        for i, m in enumerate(mg):
            for j, a in enumerate(self.alpha):
                lines.append(f"{float(m)!r},{float(a)!r},{float(self.values[i, j])!r}")
        Path(path).write_text("\n".join(lines) + "\n")


def wigner_transform(rho: DensityMatrix, n_alpha: int | None = None) -> WignerField:
    """Discrete Wigner function of a planar-rotor state.

    Kernel: w at row 2m collects the anti-diagonal rho_{m+k, m-k} with
    phases e^{2 i k alpha} (forward streaming convention), normalized so the
    alpha-integral of the integer rows returns the momentum populations.
    Requires n_alpha > 4 m_max so the transform is invertible.
    """
    basis = rho.basis
    m_max = basis.m_max
    if n_alpha is None:
        n_alpha = 4 * m_max + 1
    if n_alpha <= 4 * m_max:
        raise ValueError("n_alpha must exceed 4*m_max for an alias-free transform")
    alpha = 2.0 * np.pi * np.arange(n_alpha) / n_alpha
    rows = np.zeros((4 * m_max + 1, n_alpha))
    r = rho.entries
    for tm in range(-2 * m_max, 2 * m_max + 1):
        a_lo = max(-m_max, tm - m_max)
        a_hi = min(m_max, tm + m_max)
        avals = np.arange(a_lo, a_hi + 1)
        coh = r[avals + m_max, (tm - avals) + m_max]
        k = avals - tm / 2.0
        phases = np.exp(2j * np.outer(k, alpha))
        row = (coh[:, None] * phases).sum(axis=0) / (2.0 * np.pi)
        if np.max(np.abs(row.imag)) > 1e-12:
            raise AssertionError("Wigner row acquired an imaginary part")
        rows[tm + 2 * m_max] = row.real
    return WignerField(m_max, alpha, rows)


def inverse_wigner(field: WignerField, basis: PlanarBasis | None = None) -> DensityMatrix:
    """Reconstruct the density matrix from a Wigner field (exact on the
    represented coherence set)."""
    m_max = field.m_max
    basis = basis or PlanarBasis(m_max)
    n_alpha = field.alpha.size
    r = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    for tm in range(-2 * m_max, 2 * m_max + 1):
        row = field.values[tm + 2 * m_max]
        a_lo = max(-m_max, tm - m_max)
        a_hi = min(m_max, tm + m_max)
        avals = np.arange(a_lo, a_hi + 1)
        k = avals - tm / 2.0
        phases = np.exp(-2j * np.outer(k, field.alpha))
        coh = (phases @ row) * (2.0 * np.pi / n_alpha)
        r[avals + m_max, (tm - avals) + m_max] = coh
    return DensityMatrix(basis, r, check=False)


def evolve_wigner_fp(field: WignerField, gamma: float, xi: float, t: float,
                     inversion_symmetric: bool = False,
                     boundary_tol: float = 1e-10) -> WignerField:
    """Phase-space propagation: exact free streaming plus the friction and
    diffusion stencil

        dw_m/dt = Gamma/2 [(m+1) w_{m+1} - (m-1) w_{m-1}]
                  + D [w_{m+1} - 2 w_m + w_{m-1}]   (D = xi Gamma / 2),

    applied on both row families (the inversion-symmetric variant uses
    Gamma/2, D/4 and m +- 2 shifts).  Each angular Fourier mode evolves
    under an independent small matrix exponential, so no splitting error is
    introduced.  Warns when probability reaches the momentum boundary.
    """
    d = 0.5 * xi * gamma
    n_rows, n_alpha = field.values.shape
    m_grid = field.m_grid
    step = 4 if inversion_symmetric else 2  # in half-unit row indices
    g_eff = 0.5 * gamma if inversion_symmetric else gamma
    d_eff = 0.25 * d if inversion_symmetric else d

    drift = np.zeros((n_rows, n_rows))
    for i in range(n_rows):
        if i + step < n_rows:
            m_up = m_grid[i + step]
            drift[i, i + step] += 0.5 * g_eff * m_up + d_eff
        if i - step >= 0:
            m_dn = m_grid[i - step]
            drift[i, i - step] += -0.5 * g_eff * m_dn + d_eff
        drift[i, i] += -2.0 * d_eff

    spectrum = np.fft.fft(field.values, axis=1)
    freqs = np.rint(np.fft.fftfreq(n_alpha) * n_alpha).astype(int)
    out = np.empty_like(spectrum)
    for col, kappa in enumerate(freqs):
        gen = drift.astype(complex)
        gen[np.diag_indices(n_rows)] += -1j * kappa * m_grid
        out[:, col] = expm(gen * t) @ spectrum[:, col]
    values = np.fft.ifft(out, axis=1).real
    evolved = WignerField(field.m_max, field.alpha.copy(), values)
    dalpha = 2.0 * np.pi / n_alpha
    edge = np.abs(evolved.values[[0, 1, -2, -1]]).sum() * dalpha
    if edge > boundary_tol:
        warnings.warn(BoundaryMassWarning(
            f"boundary rows carry mass {edge:.2e} > {boundary_tol:.1e}"))
    return evolved


# -- initial states and the bundled experiment ----------------------------------


def planar_superposition_state(basis: PlanarBasis, m0: int, sigma: float) -> DensityMatrix:
    """Normalized superposition of two angular wave packets
    psi(alpha) ~ exp(+- i m0 alpha + cos(alpha)/4 sigma^2).

    The momentum amplitudes of each packet are modified Bessel functions
    I_{m - m0}(1/(4 sigma^2)); normalization is numerical.
    """
    z = 1.0 / (4.0 * sigma**2)
    mv = basis.m_values()
    amp = iv(mv - m0, z) + iv(mv + m0, z)
    return DensityMatrix.from_pure(basis, amp.astype(complex))


def boundary_band_mass(rho: DensityMatrix, band: int = 4) -> float:
    """Population within `band` shells of the momentum cutoff."""
    basis = rho.basis
    mv = np.abs(basis.m_values())
    diag = np.diag(rho.entries).real
    return float(diag[mv >= basis.m_max - band + 1].sum())


@dataclass
class Fig3Result:
    xi: float
    gamma: float
    m0: int
    sigma: float
    m_max: int
    snapshot_times: list
    snapshots: list
    wigner_fields: list
    marginals: list
    series: ObservableSeries
    stationary_full: DensityMatrix
    stationary_high_t: DensityMatrix
    boundary_mass: float

    def fringe_amplitudes(self) -> list:
        return [w.fringe_amplitude(0) for w in self.wigner_fields]

    def write(self, outdir) -> list:
        from .lindblad import save_snapshot

        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        self.series.to_csv(outdir / "observables.csv")
        written.append(outdir / "observables.csv")
        mv = PlanarBasis(self.m_max).m_values()
        stat_full = np.diag(self.stationary_full.entries).real
        stat_high = np.diag(self.stationary_high_t.entries).real
        lines = ["m,p_stationary,p_high_T"]
        for i, m in enumerate(mv):
            lines.append(f"{m},{float(stat_full[i])!r},{float(stat_high[i])!r}")
        (outdir / "stationary_pm.csv").write_text("\n".join(lines) + "\n")
        written.append(outdir / "stationary_pm.csv")
        for k, (field, marg, snap) in enumerate(
            zip(self.wigner_fields, self.marginals, self.snapshots)
        ):
            field.to_csv(outdir / f"wigner_t{k}.csv")
            written.append(outdir / f"wigner_t{k}.csv")
            lines = ["m,p"] + [f"{m},{float(marg[i])!r}" for i, m in enumerate(mv)]
            (outdir / f"marginal_t{k}.csv").write_text("\n".join(lines) + "\n")
            written.append(outdir / f"marginal_t{k}.csv")
            save_snapshot(outdir / f"snapshot_t{k}.rbsnap", snap)
            written.append(outdir / f"snapshot_t{k}.rbsnap")
        lines = ["index,time"] + [f"{k},{t!r}" for k, t in enumerate(self.snapshot_times)]
        (outdir / "snapshot_times.csv").write_text("\n".join(lines) + "\n")
        written.append(outdir / "snapshot_times.csv")
        return written


def fig3_experiment(xi: float = 20.0, gamma: float = 1.0 / np.pi, m0: int = 25,
                    sigma: float = 0.2, m_max: int = 60,
                    snapshot_times=None, n_alpha: int | None = None,
                    boundary_tol: float = 1e-10) -> Fig3Result:
    """Decoherence and thermalization of a two-packet momentum superposition.

    Defaults: xi = 20, Gamma = 1/pi, packets at m0 = +-25 with sigma = 0.2,
    snapshots at t = 0, 0.4 pi and 4 pi.  Emits Wigner fields and momentum
    marginals per snapshot; warns when the momentum cutoff carries more
    than boundary_tol of probability at any snapshot.
    """
    if m_max < 40:
        raise ValueError("experiment requires m_max >= 40")
    if snapshot_times is None:
        snapshot_times = (0.0, 0.4 * np.pi, 4.0 * np.pi)
    basis = PlanarBasis(m_max)
    rho0 = planar_superposition_state(basis, m0, sigma)
    gen = build_planar_generator(xi, gamma, m_max)
    t_max = max(snapshot_times)
    times = np.unique(np.concatenate([
        np.linspace(0.0, t_max, 41), np.asarray(snapshot_times, dtype=float)
    ]))
    states = propagate(gen, rho0, t_max, times)
    mv = basis.m_values()
    ham = OperatorMatrix(basis, np.diag(0.5 * mv.astype(complex) ** 2))
    series = ObservableSeries.from_states(
        times, states, ham, rho_ref=planar_gibbs_state(basis, xi)
    )
    snap_idx = [int(np.argmin(np.abs(times - t))) for t in snapshot_times]
    snapshots = [states[i] for i in snap_idx]
    fields = [wigner_transform(s, n_alpha) for s in snapshots]
    marginals = [np.diag(s.entries).real for s in snapshots]
    band = max(boundary_band_mass(s) for s in states)
    if band > boundary_tol:
        warnings.warn(BoundaryMassWarning(
            f"momentum boundary band carries mass {band:.2e} > {boundary_tol:.1e}; "
            f"increase m_max"))
    return Fig3Result(
        xi=xi, gamma=gamma, m0=m0, sigma=sigma, m_max=m_max,
        snapshot_times=[float(t) for t in snapshot_times],
        snapshots=snapshots, wigner_fields=fields, marginals=marginals,
        series=series,
        stationary_full=stationary_planar(xi, m_max, "full"),
        stationary_high_t=stationary_planar(xi, m_max, "high_T"),
        boundary_mass=band,
    )
