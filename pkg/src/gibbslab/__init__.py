"""Desk-scale laboratory for the entropy of mixing and its quantum footing.

Three pillars: an event-driven two-species ideal gas whose selective
membranes turn the entropy of mixing into measured heat, exact and
asymptotic state counting that produces the same entropy combinatorially,
and one-dimensional wave packets whose exchange symmetry and reduced
density operators say when "which particle" is a meaningful question.
"""
from .errors import (ConfigurationError, DomainError, GibbsLabError,
                     SimulationError, StateError, ThermostatError, ZeroStateError)
from .counting import (CountingModel, EntropyValue, FactorialMethod, MixingFactor,
                       OccupancyStatistics, count_occupancies, entropy,
                       log_factorial, mixing_permutation_factor,
                       reversible_mixing_delta_s, statistics_reduction_ratio,
                       volume_doubling_delta)
from .kinetics import (BoxGeometry, Membrane, MixingMode, Origin, ProcessLedger,
                       Selectivity, SimState, Species, advance, init_gas,
                       kinetic_energy, left_fraction, measure_pressure,
                       remove_partition, run_reversible_mixing, run_unmixing,
                       thermostat)
from .quantum import (DecompositionResult, DensityOperator, ExchangeCharacter,
                      Grid, HamiltonianSpec, ManyBodyState, OrthogonalityReport,
                      Symmetry, WaveFunction, detect_particle_decomposition,
                      ehrenfest_residual, ehrenfest_trace, evolve,
                      gaussian_packet, overlap, permutation_check,
                      reduced_density, support_overlap, symmetrize,
                      unitarity_orthogonality_check)
from .harness import (REGISTRY, RunReport, load_config, resolve_parameters,
                      run_experiment)

__version__ = "0.1.0"
