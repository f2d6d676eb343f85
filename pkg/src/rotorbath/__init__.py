"""Quantum Brownian rotation of planar and linear rigid rotors.

Markovian friction-diffusion generators, stationary states, phase-space
dynamics and classical reference ensembles, in natural units
hbar = I = k_B = 1 with the dimensionless temperature xi = 2 I k_B T/hbar^2.
"""

from .angular import (
    LinearBasis,
    ThreeJArgs,
    j_component_matrices,
    ladder_coefficients,
    orientation_vector_matrices,
    wigner3j,
)
from .classical import (
    ClassicalState,
    Ensemble,
    diffusion_from_particles,
    ensemble_moments,
    linear_rotor_ensemble,
    sde_step,
    simulate_ensemble,
)
from .lindblad import (
    GeneratorMap,
    KernelMultiplicityError,
    ObservableSeries,
    PropagationError,
    apply_generator,
    choi_matrix,
    load_snapshot,
    load_snapshot_json,
    observables,
    propagate,
    relative_entropy,
    save_snapshot,
    save_snapshot_json,
    stationary_nullspace,
    von_neumann_entropy,
)
from .linear import (
    LinearRotorParams,
    OrientationGrid,
    build_inversion_symmetric_generator,
    build_linear_generator,
    ehrenfest_friction_residual,
    fig2_experiment,
    gibbs_residual_scaling,
    gibbs_state,
    initial_updown_state,
    localization_rate,
    stationary_closed_form,
    stationary_iterative,
)
from .operators import DensityMatrix, OperatorMatrix, trace_distance
from .planar import (
    PlanarBasis,
    WignerField,
    build_planar_generator,
    evolve_wigner_fp,
    fig3_experiment,
    inverse_wigner,
    planar_gibbs_state,
    planar_superposition_state,
    stationary_planar,
    wigner_transform,
)
from .tensors import (
    CompletePositivityWarning,
    Orientation,
    Particle,
    RotorGeometry,
    TensorTriple,
    lindblad_weights,
    load_geometry,
    rotate_tensor,
    tensors_from_geometry,
)

__version__ = "0.1.0"
