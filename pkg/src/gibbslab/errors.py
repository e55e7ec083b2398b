"""Exception hierarchy shared by all gibbslab components.

The split mirrors how the command line reports failures: configuration
problems (bad arguments, malformed config files) exit with code 1, while
runtime failures of a well-formed experiment exit with code 2.
"""
from __future__ import annotations


class GibbsLabError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(GibbsLabError):
    """Invalid user input: bad counts, temperatures, unknown keys or names."""


class StateError(GibbsLabError):
    """Operation applied to a state that does not satisfy its precondition."""


class SimulationError(GibbsLabError):
    """A run started from a valid state but entered an inconsistent regime."""


class ThermostatError(SimulationError):
    """Velocity rescaling is undefined, e.g. at zero total kinetic energy."""


class DomainError(GibbsLabError):
    """Grid-domain violation: packet tails touching an edge, grid mismatch."""


class ZeroStateError(GibbsLabError):
    """Antisymmetrization of linearly dependent packets annihilates the state."""
