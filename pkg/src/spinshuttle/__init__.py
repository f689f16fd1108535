"""Fast transport and spin control of spin-orbit-coupled condensates in
moving harmonic traps: inverse-engineered control protocols, the exact
analytic solution, a split-operator propagator (linear and mean-field),
observables, and a batch CLI."""

from .core import (PhysicalScales, SimulationGrid, SpinorField, build_grid,
                   harmonic_eigenstate, initial_state, inner_product, norm)
from .dynamics import AuxiliaryTrace, exact_state, integrate_auxiliary
from .kernels import backend_name
from .observables import (ObservableRecord, ObservableRecorder,
                          SpinDensityMatrix, bloch_length, com, density_matrix,
                          density_profiles, fidelity, make_target,
                          momentum_expectation, spin_expectations,
                          velocity_expectation)
from .propagator import EvolutionConfig, evolve, step
from .protocols import (AdiabaticProtocol, ControlTrace, QuadratureError,
                        SingularDesignError, StaProtocol,
                        adiabatic_design_report, phase_sigma, sample_controls,
                        spin_flip_length, spin_flip_time, sta_design_report,
                        validate)

__version__ = "0.1.0"
