"""Currents, quantum potentials and trajectories in the position and momentum representations.

Units have hbar = 1 throughout.
"""

from .algebra import (
    DensityOperator,
    LadderBasis,
    PolynomialHamiltonian,
    anticommutator,
    commutator,
    density_from_state,
    evolve_density_series,
    heisenberg_evolve,
    liouville_rhs,
    operator_derivatives,
    operator_liouville_residual,
)
from .config import CATALOGUE, ConfigError, ScenarioConfig, default_config, load_config, parse_config
from .currents import (
    CurrentField,
    QuantumPotentialField,
    continuity_residual,
    cubic_current_report,
    current_p,
    current_x,
    energy_from_phase,
    phase_equation_residual,
    quantum_potential,
)
from .gauge import (
    ParameterLoop,
    PathSpec,
    ab_scalar_phase,
    ab_vector_phase,
    ac_phase,
    berry_phase,
    stokes_flux,
    wrap_phase,
)
from .grids import Grid1D, PolarField, WaveField, local_beable, polar_decompose, polar_series, to_conjugate
from .propagator import EvolutionResult, PotentialSpec, split_step_evolve
from .report import RunReport, run
from .trajectories import TrajectoryBundle, VelocityField, integrate, shadow_phase_space, velocity_field

__version__ = "0.1.0"
