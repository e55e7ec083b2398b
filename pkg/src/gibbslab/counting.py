"""Microstate counting for ideal-gas entropy bookkeeping.

Everything here works in log space: the entropy of a macrostate with W
microstates is S = k ln W (k = 1 throughout), and W itself overflows long
before N reaches laboratory sizes.  The module exposes the handful of
counting results that drive the mixing-entropy arguments:

* doubling the one-particle state count X at fixed N raises S by N ln 2,
  with or without the 1/N! indistinguishability correction;
* doubling X and N together, in the corrected count W = X**N / N!, squares
  W in the simple Stirling approximation, i.e. the entropy exactly doubles;
* merging two N-particle populations contributes a permutation factor
  (2N)! / (N! N!), whose log approaches 2N ln 2 from below as N grows;
* mode-occupancy counts for distinguishable, corrected-distinguishable,
  symmetric and antisymmetric statistics collapse onto each other once the
  number of modes m dwarfs the occupancy n.

Counts that fit comfortably in exact integer arithmetic are computed
exactly and logged afterwards, so ratios quoted to 1e-9 do not inherit
cancellation noise from lgamma differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import ConfigurationError

__all__ = [
    "FactorialMethod",
    "OccupancyStatistics",
    "CountingModel",
    "EntropyValue",
    "MixingFactor",
    "log_factorial",
    "entropy",
    "volume_doubling_delta",
    "mixing_permutation_factor",
    "count_occupancies",
    "statistics_reduction_ratio",
    "reversible_mixing_delta_s",
]


class FactorialMethod(Enum):
    EXACT = "exact"
    STIRLING_SIMPLE = "stirling-simple"
    STIRLING_CORRECTED = "stirling-corrected"


class OccupancyStatistics(Enum):
    MB = "maxwell-boltzmann"
    MB_CORRECTED = "maxwell-boltzmann-corrected"
    BE = "bose-einstein"
    FD = "fermi-dirac"


@dataclass(frozen=True)
class CountingModel:
    """Macrostate with per_particle_states available states per particle.

    corrected selects W = X**N / N! instead of the raw product X**N.
    """

    per_particle_states: float
    n_particles: int
    corrected: bool

    def __post_init__(self) -> None:
        if self.per_particle_states <= 0:
            raise ConfigurationError("per-particle state count must be positive")
        if self.n_particles < 0:
            raise ConfigurationError("particle count must be nonnegative")


@dataclass(frozen=True)
class EntropyValue:
    value: float
    exactness: FactorialMethod


@dataclass(frozen=True)
class MixingFactor:
    log_m: float
    delta_s: float
    # exact integer count, only materialized while it is cheap to hold
    m: int | None


def log_factorial(n: int, method: FactorialMethod = FactorialMethod.EXACT) -> float:
    """Return ln n! under the requested approximation.

    EXACT delegates to lgamma, which agrees with a literal sum of logs to
    machine precision.  STIRLING_SIMPLE is n ln n - n (0 at n = 0 by
    convention, where the asymptotic form loses meaning; at n = 1 it
    honestly returns -1).  STIRLING_CORRECTED adds the 0.5 ln(2 pi n)
    term and is within 1/(12 n) of the exact value for every n >= 1.
    """
    if n < 0:
        raise ConfigurationError("factorial argument must be nonnegative")
    if method is FactorialMethod.EXACT:
        return math.lgamma(n + 1)
    if method is FactorialMethod.STIRLING_SIMPLE:
        if n == 0:
            return 0.0
        return n * math.log(n) - n
    if method is FactorialMethod.STIRLING_CORRECTED:
        if n == 0:
            return 0.0
        return n * math.log(n) - n + 0.5 * math.log(2.0 * math.pi * n)
    raise ConfigurationError(f"unknown factorial method {method!r}")


def entropy(model: CountingModel,
            method: FactorialMethod = FactorialMethod.EXACT) -> EntropyValue:
    """S = N ln X, minus ln N! when the model divides out permutations."""
    s = model.n_particles * math.log(model.per_particle_states)
    if model.corrected:
        s -= log_factorial(model.n_particles, method)
    return EntropyValue(value=s, exactness=method)


def volume_doubling_delta(n_particles: int,
                          double_n_too: bool,
                          corrected: bool,
                          method: FactorialMethod = FactorialMethod.EXACT,
                          per_particle_states: float = 1.0) -> float:
    """Entropy change when the available one-particle states double.

    With the particle number held fixed the answer is N ln 2 regardless of
    the correction, because the ln N! term cancels between the before and
    after counts.  With double_n_too the second population is merged in as
    well: X -> 2X and N -> 2N.  In the corrected count evaluated with
    STIRLING_SIMPLE that move squares W, so the returned delta equals the
    original entropy exactly.

    per_particle_states drops out of the fixed-N delta; it only anchors the
    absolute scale of the doubled-N comparison.
    """
    if n_particles <= 0:
        raise ConfigurationError("particle count must be positive")
    before = entropy(CountingModel(per_particle_states, n_particles, corrected), method)
    after_n = 2 * n_particles if double_n_too else n_particles
    after = entropy(CountingModel(2.0 * per_particle_states, after_n, corrected), method)
    return after.value - before.value


# above this the exact binomial integer is large enough that materializing
# it buys nothing; callers get the log alone
_EXACT_COUNT_LIMIT = 4000


def mixing_permutation_factor(n_per_side: int) -> MixingFactor:
    """Number of ways to split 2N labeled particles into two halves.

    log M = ln (2N)! - 2 ln N!; delta_s = log M is the entropy this factor
    contributes.  The ratio log M / (2N ln 2) increases toward 1, the
    shortfall being the 0.5 ln(pi N) subleading term.
    """
    if n_per_side <= 0:
        raise ConfigurationError("particle count must be positive")
    log_m = (log_factorial(2 * n_per_side)
             - 2.0 * log_factorial(n_per_side))
    exact = math.comb(2 * n_per_side, n_per_side) if n_per_side <= _EXACT_COUNT_LIMIT else None
    return MixingFactor(log_m=log_m, delta_s=log_m, m=exact)


def _log_exact_int(value: int) -> float:
    # math.log accepts arbitrary precision ints without rounding them first
    return math.log(value)


def count_occupancies(n_modes: int, n_particles: int,
                      statistics: OccupancyStatistics) -> float:
    """Log of the number of ways to place n particles in m modes.

    MB counts ordered assignments m**n; MB_CORRECTED divides by n!;
    BE counts multisets C(m+n-1, n); FD counts subsets C(m, n) and requires
    n <= m.  BE and FD are computed from exact integer binomials before
    taking the log.
    """
    if n_modes < 1:
        raise ConfigurationError("mode count must be at least 1")
    if n_particles < 0:
        raise ConfigurationError("occupancy must be nonnegative")
    if statistics is OccupancyStatistics.MB:
        return n_particles * math.log(n_modes)
    if statistics is OccupancyStatistics.MB_CORRECTED:
        return n_particles * math.log(n_modes) - log_factorial(n_particles)
    if statistics is OccupancyStatistics.BE:
        return _log_exact_int(math.comb(n_modes + n_particles - 1, n_particles))
    if statistics is OccupancyStatistics.FD:
        if n_particles > n_modes:
            raise ConfigurationError(
                f"antisymmetric occupancy needs n <= m, got n={n_particles} m={n_modes}")
        return _log_exact_int(math.comb(n_modes, n_particles))
    raise ConfigurationError(f"unknown statistics {statistics!r}")


def statistics_reduction_ratio(n_modes: int, n_particles: int,
                               statistics: OccupancyStatistics) -> float:
    """Quantum-to-corrected-classical count ratio, exact to the last bit.

    ratio = W_statistics / (m**n / n!), evaluated in rational arithmetic so
    the dilute limit m >> n (ratio -> 1 from either side) is resolved far
    below 1e-9.
    """
    if statistics is OccupancyStatistics.BE:
        numerator = math.comb(n_modes + n_particles - 1, n_particles)
    elif statistics is OccupancyStatistics.FD:
        if n_particles > n_modes:
            raise ConfigurationError(
                f"antisymmetric occupancy needs n <= m, got n={n_particles} m={n_modes}")
        numerator = math.comb(n_modes, n_particles)
    elif statistics in (OccupancyStatistics.MB, OccupancyStatistics.MB_CORRECTED):
        # the corrected count compared against itself
        return 1.0
    else:
        raise ConfigurationError(f"unknown statistics {statistics!r}")
    if n_modes < 1 or n_particles < 0:
        raise ConfigurationError("need m >= 1 and n >= 0")
    ratio = Fraction(numerator * math.factorial(n_particles), n_modes ** n_particles)
    return float(ratio)


def reversible_mixing_delta_s(n_per_side: int, distinct: bool) -> float:
    """Entropy of mixing two equal ideal-gas populations, in units of k.

    Each population expands from half the box into the whole of it, which
    is the fixed-N volume doubling N ln 2, hence 2 N ln 2 in total.  For
    identical populations the selective-membrane process degenerates to no
    process at all and the change is zero, written here as the difference
    of two equal expansion terms to keep the provenance uniform.
    """
    one_side = volume_doubling_delta(n_per_side, double_n_too=False, corrected=True)
    if distinct:
        return 2.0 * one_side
    return one_side - one_side
