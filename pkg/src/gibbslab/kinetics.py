"""Event-driven ideal gas in a 2D box with selective moving membranes.

The model is the one behind the classic mixing-entropy argument: a unit-width
box holds two non-interacting ideal-gas populations at temperature T
(k = m = 1, so thermal speed is sqrt(T) per component).  A vertical partition
can be removed, and vertical membranes can sweep across the box at a
prescribed slow speed.  Each membrane carries a selectivity rule: particles
the rule passes cross as if nothing were there, particles it blocks reflect
specularly in the membrane frame,

    vx' = 2 u - vx,

which for a receding membrane (u pointing away from the incoming particle)
lowers the particle's kinetic energy.  That energy loss, accumulated over
many reflections, is the work the gas does pushing the membrane; a velocity
rescaling thermostat replaces it as heat, and the heat ledger divided by T
is the entropy change of the quasi-static isothermal process.  Two opposed
membranes released from the center recover dS = 2 k N ln 2 for the mixing of
two N-particle populations; driven back from the walls they recover the
negative of it.

Because the particles do not collide with one another, every trajectory is
an independent sequence of straight flights and analytic reflection events.
advance() exploits that: it computes, for all particles at once, the exact
time of each particle's next event (wall, partition, or membrane, in that
fixed priority order for simultaneous events) and applies reflections in
rounds until every particle has used up the requested duration.  No
time-step discretization error enters anywhere.  All reductions into the
ledgers run in a fixed array order, so a given (config, seed) reproduces
bit-identical output on any machine; parallelism is the SIMD kind inside
numpy, which does not reorder the bookkeeping.

Floating-point tie-breaking: a particle sitting exactly on a reflecting
line is moved one representable float toward the side it belongs to
(direction of its relative velocity after reflection; at creation time,
direction of its velocity).  This keeps the "which side am I on" predicate
exact without epsilon tolerances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum, Enum

import numpy as np

from .errors import ConfigurationError, SimulationError, StateError, ThermostatError

__all__ = [
    "Species",
    "Origin",
    "Selectivity",
    "Membrane",
    "BoxGeometry",
    "Particle",
    "SimState",
    "ProcessLedger",
    "MixingMode",
    "DEFAULT_QUASI_STATIC_RATIO",
    "init_gas",
    "remove_partition",
    "advance",
    "thermostat",
    "measure_pressure",
    "run_reversible_mixing",
    "run_unmixing",
    "kinetic_energy",
    "left_fraction",
]

# membranes slower than this fraction of the thermal speed count as quasi-static
DEFAULT_QUASI_STATIC_RATIO = 0.01

_WALL_SURFACES = ("left", "right", "bottom", "top")


class Species(IntEnum):
    A = 0
    B = 1


class Origin(IntEnum):
    UNTAGGED = 0
    LEFT = 1
    RIGHT = 2


@dataclass(frozen=True)
class Selectivity:
    """Pass rule of a membrane.

    kind is one of 'transparent', 'opaque', 'species', 'origin'.  Species
    rules pass a fixed set of species tags; origin rules pass one origin
    side.  blocks() returns the per-particle mask of particles that reflect.
    """

    kind: str
    pass_species: frozenset = frozenset()
    pass_origin: int | None = None

    @staticmethod
    def transparent() -> "Selectivity":
        return Selectivity("transparent")

    @staticmethod
    def opaque() -> "Selectivity":
        return Selectivity("opaque")

    @staticmethod
    def by_species(passes) -> "Selectivity":
        return Selectivity("species", pass_species=frozenset(int(s) for s in passes))

    @staticmethod
    def by_origin(side: Origin) -> "Selectivity":
        return Selectivity("origin", pass_origin=int(side))

    def blocks(self, species: np.ndarray, origin: np.ndarray) -> np.ndarray:
        if self.kind == "transparent":
            return np.zeros(species.shape, dtype=bool)
        if self.kind == "opaque":
            return np.ones(species.shape, dtype=bool)
        if self.kind == "species":
            passed = np.isin(species, list(self.pass_species))
            return ~passed
        if self.kind == "origin":
            return origin != self.pass_origin
        raise ConfigurationError(f"unknown selectivity kind {self.kind!r}")


@dataclass
class Membrane:
    """Vertical line sweeping the box at constant speed.

    Position is always computed from the anchor pair (x_anchor, t_anchor),
    never accumulated, so long runs do not drift.
    """

    membrane_id: str
    x_anchor: float
    t_anchor: float
    speed: float
    selectivity: Selectivity

    def position(self, time: float) -> float:
        return self.x_anchor + self.speed * (time - self.t_anchor)


@dataclass
class BoxGeometry:
    width: float = 1.0
    height: float = 1.0
    partition_x: float | None = None

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ConfigurationError("box dimensions must be positive")
        if self.partition_x is not None and not (0.0 < self.partition_x < self.width):
            raise ConfigurationError("partition must lie strictly inside the box")


@dataclass(frozen=True)
class Particle:
    """Read-only record view of one particle (the state itself is columnar)."""

    position: tuple
    velocity: tuple
    species: Species
    origin: Origin


@dataclass
class ProcessLedger:
    """Heat and work bookkeeping for one membrane process.

    work_on_membranes is the energy the gas hands to the membranes (positive
    for expansion); heat_injected is the thermostat's total compensation.
    The two agree for an isothermal quasi-static run because the thermostat
    pins the kinetic energy at both ends, and delta_s = heat / T.
    """

    work_on_membranes: float = 0.0
    heat_injected: float = 0.0
    # rows (time, membrane_id, pressure, work_cum, heat_cum), one per
    # membrane per thermostat chunk, totals taken after that chunk's rescale
    pressure_samples: list = field(default_factory=list)
    delta_s: float = 0.0
    annotations: list = field(default_factory=list)

    def finalize(self, temperature: float) -> "ProcessLedger":
        self.delta_s = self.heat_injected / temperature
        return self


@dataclass
class SimState:
    """Full gas state: columnar particle data plus geometry and membranes.

    positions and velocities are (N, 2) float64 arrays; species and origin
    are int8 tag columns.  impulses accumulates |momentum transfer| per
    surface id for pressure estimates.
    """

    positions: np.ndarray
    velocities: np.ndarray
    species: np.ndarray
    origin: np.ndarray
    geometry: BoxGeometry
    membranes: list
    time: float
    rng: np.random.Generator
    target_temperature: float
    impulses: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.target_temperature <= 0:
            raise ConfigurationError("temperature must be positive")

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]

    def particle(self, i: int) -> Particle:
        return Particle(
            position=tuple(self.positions[i]),
            velocity=tuple(self.velocities[i]),
            species=Species(int(self.species[i])),
            origin=Origin(int(self.origin[i])),
        )

    def copy(self) -> "SimState":
        cp_rng = np.random.default_rng()
        cp_rng.bit_generator.state = self.rng.bit_generator.state
        return SimState(
            positions=self.positions.copy(),
            velocities=self.velocities.copy(),
            species=self.species.copy(),
            origin=self.origin.copy(),
            geometry=BoxGeometry(self.geometry.width, self.geometry.height,
                                 self.geometry.partition_x),
            membranes=[Membrane(m.membrane_id, m.x_anchor, m.t_anchor, m.speed,
                                m.selectivity) for m in self.membranes],
            time=self.time,
            rng=cp_rng,
            target_temperature=self.target_temperature,
            impulses=dict(self.impulses),
        )

    def surface_ids(self) -> list:
        ids = list(_WALL_SURFACES)
        if self.geometry.partition_x is not None:
            ids.append("partition")
        ids.extend(m.membrane_id for m in self.membranes)
        return ids


class MixingMode(Enum):
    DIFFERENT_GASES_BY_SPECIES = "DifferentGases-BySpecies"
    SAME_GAS_BY_ORIGIN = "SameGas-ByOrigin"
    SAME_GAS_BY_SPECIES = "SameGas-BySpecies"

    @staticmethod
    def parse(text) -> "MixingMode":
        if isinstance(text, MixingMode):
            return text
        for mode in MixingMode:
            if mode.value.lower() == str(text).lower():
                return mode
        names = ", ".join(m.value for m in MixingMode)
        raise ConfigurationError(f"unknown mixing mode {text!r}; expected one of {names}")


def init_gas(n_left: int, n_right: int, species_left: Species, species_right: Species,
             temperature: float, seed: int,
             width: float = 1.0, height: float = 1.0) -> SimState:
    """Fill the two halves of a partitioned box with thermal ideal gas.

    Positions are uniform within each half; velocity components are
    independent normals of variance kT/m = T.  Draw order is fixed and part
    of the determinism contract: left positions (one (n,2) block), right
    positions, then all velocities.  Origin tags start UNTAGGED; they are
    assigned only when the partition is removed.
    """
    if n_left <= 0 or n_right <= 0:
        raise ConfigurationError("both halves need a positive particle count")
    if temperature <= 0:
        raise ConfigurationError("temperature must be positive")
    geometry = BoxGeometry(width=width, height=height, partition_x=width / 2.0)
    rng = np.random.default_rng(seed)
    px = geometry.partition_x

    left = rng.random((n_left, 2))
    left[:, 0] *= px
    left[:, 1] *= height
    right = rng.random((n_right, 2))
    right[:, 0] = px + right[:, 0] * (width - px)
    right[:, 1] *= height
    # a unit draw of exactly 0.0 would sit on the partition line; push it off
    on_line = right[:, 0] == px
    right[on_line, 0] = np.nextafter(px, width)
    positions = np.vstack([left, right])

    n = n_left + n_right
    velocities = rng.normal(0.0, math.sqrt(temperature), size=(n, 2))
    species = np.concatenate([
        np.full(n_left, int(species_left), dtype=np.int8),
        np.full(n_right, int(species_right), dtype=np.int8),
    ])
    origin = np.full(n, int(Origin.UNTAGGED), dtype=np.int8)
    return SimState(
        positions=positions, velocities=velocities, species=species, origin=origin,
        geometry=geometry, membranes=[], time=0.0, rng=rng,
        target_temperature=float(temperature),
    )


def remove_partition(state: SimState) -> SimState:
    """Drop the partition, stamping each particle with its side of origin.

    Tags are stored, never recomputed from positions, and no later operation
    rewrites them.  A particle exactly on the line (possible only by
    construction) counts as RIGHT, matching the strict x < partition test.
    """
    if state.geometry.partition_x is None:
        raise StateError("partition already absent")
    px = state.geometry.partition_x
    state.origin = np.where(state.positions[:, 0] < px,
                            np.int8(Origin.LEFT), np.int8(Origin.RIGHT))
    state.geometry.partition_x = None
    return state


def kinetic_energy(state: SimState) -> float:
    return 0.5 * float(np.sum(state.velocities * state.velocities))


def left_fraction(state: SimState, species: Species | None = None,
                  origin: Origin | None = None) -> float:
    """Fraction of the selected particles currently in the left half."""
    mask = np.ones(state.n_particles, dtype=bool)
    if species is not None:
        mask &= state.species == int(species)
    if origin is not None:
        mask &= state.origin == int(origin)
    total = int(np.count_nonzero(mask))
    if total == 0:
        raise StateError("no particles match the requested tags")
    half = state.geometry.width / 2.0
    return float(np.count_nonzero(state.positions[mask, 0] < half)) / total


# obstacle bookkeeping shared by advance(); hard cap on reflection rounds so
# a membrane crushing particles against a wall fails loudly instead of spinning
_MAX_ROUNDS = 100_000


def advance(state: SimState, duration: float, ledger: ProcessLedger | None = None) -> SimState:
    """Advance every particle through `duration` with exact event handling.

    Walls and the partition reflect elastically (energy change exactly zero
    per event); membranes that block a particle reflect it in the membrane
    frame and, when a ledger is supplied, log the kinetic-energy transfer as
    work on the membrane.  |momentum| transfer per surface accumulates into
    state.impulses regardless.  Raises SimulationError if a membrane leaves
    the box interior by more than a relative 1e-9.
    """
    if duration < 0:
        raise ConfigurationError("duration must be nonnegative")
    if duration == 0.0:
        return state

    geo = state.geometry
    width, height = geo.width, geo.height
    px = geo.partition_x
    pos = state.positions
    vel = state.velocities
    n = state.n_particles
    t_start = state.time

    membranes = state.membranes
    m_x0 = np.array([m.position(t_start) for m in membranes], dtype=float)
    m_u = np.array([m.speed for m in membranes], dtype=float)
    m_block = [m.selectivity.blocks(state.species, state.origin) for m in membranes]

    for surface in state.surface_ids():
        state.impulses.setdefault(surface, 0.0)

    t_loc = np.zeros(n)
    active = np.ones(n, dtype=bool)
    inf = np.inf

    n_static = 4 + (1 if px is not None else 0)
    rounds = 0
    while True:
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        rounds += 1
        if rounds > _MAX_ROUNDS:
            raise SimulationError("reflection cascade did not terminate; "
                                  "geometry is squeezing particles")
        x = pos[idx, 0]
        y = pos[idx, 1]
        vx = vel[idx, 0]
        vy = vel[idx, 1]
        tl = t_loc[idx]
        rem = duration - tl

        safe_vx = np.where(vx == 0.0, 1.0, vx)
        safe_vy = np.where(vy == 0.0, 1.0, vy)
        rows = [
            np.where(vx < 0.0, (0.0 - x) / safe_vx, inf),
            np.where(vx > 0.0, (width - x) / safe_vx, inf),
            np.where(vy < 0.0, (0.0 - y) / safe_vy, inf),
            np.where(vy > 0.0, (height - y) / safe_vy, inf),
        ]
        if px is not None:
            toward = ((x < px) & (vx > 0.0)) | ((x > px) & (vx < 0.0)) \
                | ((x == px) & (vx != 0.0))
            rows.append(np.where(toward, (px - x) / safe_vx, inf))
        for j in range(len(membranes)):
            xm = m_x0[j] + m_u[j] * tl
            rel = vx - m_u[j]
            safe_rel = np.where(rel == 0.0, 1.0, rel)
            toward = (((x < xm) & (rel > 0.0)) | ((x > xm) & (rel < 0.0))
                      | ((x == xm) & (rel != 0.0))) & m_block[j][idx]
            rows.append(np.where(toward, (xm - x) / safe_rel, inf))

        dts = np.vstack(rows)
        dts = np.where(dts >= 0.0, dts, inf)  # roundoff guard; approach tests gate signs
        winner = np.argmin(dts, axis=0)  # ties resolve to the first obstacle listed
        dt_evt = dts[winner, np.arange(idx.size)]
        hit = dt_evt <= rem
        step = np.where(hit, dt_evt, rem)

        pos[idx, 0] = x + vx * step
        pos[idx, 1] = y + vy * step
        new_tl = tl + step
        t_loc[idx] = new_tl
        active[idx] = hit

        # reflections, fixed obstacle order for deterministic ledger sums
        for o in range(n_static + len(membranes)):
            mo = hit & (winner == o)
            if not np.any(mo):
                continue
            sub = idx[mo]
            if o == 0:
                state.impulses["left"] += float(np.sum(2.0 * np.abs(vel[sub, 0])))
                pos[sub, 0] = 0.0
                vel[sub, 0] = -vel[sub, 0]
            elif o == 1:
                state.impulses["right"] += float(np.sum(2.0 * np.abs(vel[sub, 0])))
                pos[sub, 0] = width
                vel[sub, 0] = -vel[sub, 0]
            elif o == 2:
                state.impulses["bottom"] += float(np.sum(2.0 * np.abs(vel[sub, 1])))
                pos[sub, 1] = 0.0
                vel[sub, 1] = -vel[sub, 1]
            elif o == 3:
                state.impulses["top"] += float(np.sum(2.0 * np.abs(vel[sub, 1])))
                pos[sub, 1] = height
                vel[sub, 1] = -vel[sub, 1]
            elif px is not None and o == 4:
                state.impulses["partition"] += float(np.sum(2.0 * np.abs(vel[sub, 0])))
                vx_new = -vel[sub, 0]
                vel[sub, 0] = vx_new
                line = np.full(sub.size, px)
                target = np.where(vx_new < 0.0, -inf, inf)
                pos[sub, 0] = np.nextafter(line, target)
            else:
                j = o - n_static
                u = m_u[j]
                xm_hit = m_x0[j] + u * t_loc[sub]
                vx_old = vel[sub, 0]
                vx_new = 2.0 * u - vx_old
                if ledger is not None:
                    ledger.work_on_membranes += float(
                        np.sum(0.5 * (vx_old * vx_old - vx_new * vx_new)))
                state.impulses[membranes[j].membrane_id] += float(
                    np.sum(np.abs(vx_new - vx_old)))
                vel[sub, 0] = vx_new
                rel_new = vx_new - u
                target = np.where(rel_new < 0.0, -inf, inf)
                pos[sub, 0] = np.nextafter(xm_hit, target)

    state.time = t_start + duration
    tol = 1e-9 * width
    for m in membranes:
        xm = m.position(state.time)
        if xm < -tol or xm > width + tol:
            raise SimulationError(
                f"membrane {m.membrane_id!r} left the box interior (x = {xm!r})")
    return state


def thermostat(state: SimState, ledger: ProcessLedger) -> SimState:
    """Rescale velocities to total KE = N k T exactly, logging the heat.

    One common factor per velocity component pins each translational energy
    pool at N k T / 2.  The per-axis form matters: these particles never
    collide with each other, so nothing in the dynamics repopulates a
    drained component.  A moving membrane drains x-motion specifically, and
    a single global factor would refill mostly y-motion, letting the x
    temperature fall adiabatically (KE_x scales like 1/L^2 as the confined
    length L grows, independent of how slow the membrane is) and the
    measured mixing heat land far below the isothermal value.  Enforcing
    equipartition axis by axis is the minimal bath whose fixed point is the
    Maxwell state, and the heat entry stays one exact scalar:
    N k T - KE_before.
    """
    half_target = 0.5 * state.n_particles * state.target_temperature
    ke_x = 0.5 * float(np.sum(state.velocities[:, 0] ** 2))
    ke_y = 0.5 * float(np.sum(state.velocities[:, 1] ** 2))
    if ke_x == 0.0 or ke_y == 0.0:
        raise ThermostatError(
            "a translational component has zero kinetic energy; rescaling undefined")
    state.velocities[:, 0] *= math.sqrt(half_target / ke_x)
    state.velocities[:, 1] *= math.sqrt(half_target / ke_y)
    ledger.heat_injected += 2.0 * half_target - ke_x - ke_y
    return state


def measure_pressure(state: SimState, surface: str, window: float) -> float:
    """Time-averaged momentum transfer per unit length on one surface.

    The measurement advances a private copy of the state, so the caller's
    trajectory is untouched.
    """
    if window <= 0:
        raise ConfigurationError("averaging window must be positive")
    known = state.surface_ids()
    if surface not in known:
        raise ConfigurationError(
            f"unknown surface {surface!r}; available: {', '.join(known)}")
    probe = state.copy()
    before = probe.impulses.get(surface, 0.0)
    advance(probe, window)
    transferred = probe.impulses[surface] - before
    if surface in ("bottom", "top"):
        length = state.geometry.width
    else:
        length = state.geometry.height
    return transferred / (window * length)


def _species_of_side(state: SimState, side: Origin) -> int:
    tags = np.unique(state.species[state.origin == int(side)])
    if tags.size != 1:
        raise StateError(
            f"population tagged {side.name} is not a single species; "
            "species-selective membranes are ambiguous")
    return int(tags[0])


def _perturb_off_line(state: SimState, x_line: float,
                      direction: float | None = None) -> None:
    # documented tie-break: on-line particles move one float toward their
    # velocity direction (stationary ones toward +x); a membrane anchored at
    # a wall instead forces the nudge into the box, since the velocity rule
    # would park an outward mover beyond the wall where no event can reach it
    on = state.positions[:, 0] == x_line
    if np.any(on):
        if direction is None:
            vx = state.velocities[on, 0]
            target = np.where(vx < 0.0, -np.inf, np.inf)
        else:
            target = math.copysign(math.inf, direction)
        state.positions[on, 0] = np.nextafter(x_line, target)


def _check_quasi_static(speed: float, state: SimState, ratio: float) -> None:
    thermal = math.sqrt(state.target_temperature)
    if not (0.0 < speed <= ratio * thermal):
        raise ConfigurationError(
            f"membrane speed {speed!r} outside the quasi-static window "
            f"(0, {ratio * thermal!r}] for T = {state.target_temperature!r}")


def _require_tagged(state: SimState) -> None:
    if state.geometry.partition_x is not None:
        raise StateError("remove the partition before running a membrane process")
    if np.any(state.origin == int(Origin.UNTAGGED)):
        raise StateError("origin tags missing; remove_partition assigns them")


def _driven_process(state: SimState, ledger: ProcessLedger, duration: float,
                    interval: float) -> None:
    """Advance in thermostat intervals, sampling membrane pressures per chunk."""
    height = state.geometry.height
    ids = [m.membrane_id for m in state.membranes]
    # equilibrate to the exact target temperature before the ledger starts;
    # the initial O(sqrt N) sampling offset is not process heat
    scratch = ProcessLedger()
    thermostat(state, scratch)

    n_full = int(duration // interval)
    leftovers = duration - n_full * interval
    chunks = [interval] * n_full
    if leftovers > 1e-12 * duration:
        chunks.append(leftovers)
    for chunk in chunks:
        marks = {mid: state.impulses.get(mid, 0.0) for mid in ids}
        advance(state, chunk, ledger)
        thermostat(state, ledger)
        for mid in ids:
            transferred = state.impulses[mid] - marks[mid]
            ledger.pressure_samples.append(
                (state.time, mid, transferred / (chunk * height),
                 ledger.work_on_membranes, ledger.heat_injected))


def run_reversible_mixing(state: SimState, mode, membrane_speed: float | None = None,
                          thermostat_interval: float | None = None,
                          quasi_static_ratio: float = DEFAULT_QUASI_STATIC_RATIO) -> ProcessLedger:
    """Mix the two tagged populations with a pair of selective membranes.

    Two membranes start at the center and creep to opposite walls.  The
    left-moving one passes the left population and blocks the right one, and
    vice versa, so each population expands isothermally into the full box
    while the other's membrane slides through it untouched.  The ledger's
    delta_s lands near 2 k N ln 2 for distinguishable populations (species
    or origin selective alike) and near zero for the degenerate case where
    both membranes pass everything.

    Parameters
    ----------
    state : SimState
        Tagged, partition-free state fresh from remove_partition.
    mode : MixingMode or str
        Which tag the membranes read, and whether the gases are expected to
        differ.  With species-selective membranes and a single species both
        membranes are transparent; that run is annotated, not rejected.
    membrane_speed : float, optional
        Magnitude of each membrane's velocity; defaults to the quasi-static
        ratio times the thermal speed.
    thermostat_interval : float, optional
        Time between velocity rescalings; defaults to 0.1 box-crossing times.
    """
    mode = MixingMode.parse(mode)
    _require_tagged(state)
    temperature = state.target_temperature
    if membrane_speed is None:
        membrane_speed = quasi_static_ratio * math.sqrt(temperature)
    if thermostat_interval is None:
        thermostat_interval = 0.1 * state.geometry.width / math.sqrt(temperature)
    _check_quasi_static(membrane_speed, state, quasi_static_ratio)

    ledger = ProcessLedger()
    if mode is MixingMode.SAME_GAS_BY_ORIGIN:
        sel_left = Selectivity.by_origin(Origin.LEFT)
        sel_right = Selectivity.by_origin(Origin.RIGHT)
    else:
        sp_left = _species_of_side(state, Origin.LEFT)
        sp_right = _species_of_side(state, Origin.RIGHT)
        sel_left = Selectivity.by_species([sp_left])
        sel_right = Selectivity.by_species([sp_right])
        if sp_left == sp_right:
            ledger.annotations.append(
                "identical species on both sides: both membranes pass everything, "
                "the process does no work and delta_s should vanish")

    center = state.geometry.width / 2.0
    _perturb_off_line(state, center)
    state.membranes.append(Membrane("mix_left", center, state.time,
                                    -membrane_speed, sel_left))
    state.membranes.append(Membrane("mix_right", center, state.time,
                                    +membrane_speed, sel_right))
    try:
        duration = center / membrane_speed
        _driven_process(state, ledger, duration, thermostat_interval)
    finally:
        state.membranes = [m for m in state.membranes
                           if m.membrane_id not in ("mix_left", "mix_right")]
    return ledger.finalize(temperature)


def run_unmixing(state: SimState, membrane_speed: float | None = None,
                 thermostat_interval: float | None = None,
                 quasi_static_ratio: float = DEFAULT_QUASI_STATIC_RATIO) -> ProcessLedger:
    """Drive origin-selective membranes from the walls back to the center.

    The membrane leaving the left wall passes LEFT-origin particles and
    sweeps RIGHT-origin ones ahead of it; its mirror image does the same
    with the tags swapped.  Each population is compressed isothermally into
    its original half, the thermostat withdraws the compression work as
    heat, and delta_s lands near -2 k N ln 2.  On completion every blocked
    particle is strictly inside its own half, so at least 99 percent (in
    fact all) of the LEFT-origin population ends left of center.
    """
    _require_tagged(state)
    temperature = state.target_temperature
    if membrane_speed is None:
        membrane_speed = quasi_static_ratio * math.sqrt(temperature)
    if thermostat_interval is None:
        thermostat_interval = 0.1 * state.geometry.width / math.sqrt(temperature)
    _check_quasi_static(membrane_speed, state, quasi_static_ratio)

    width = state.geometry.width
    ledger = ProcessLedger()
    _perturb_off_line(state, 0.0, direction=+1.0)
    _perturb_off_line(state, width, direction=-1.0)
    state.membranes.append(Membrane("unmix_left", 0.0, state.time,
                                    +membrane_speed, Selectivity.by_origin(Origin.LEFT)))
    state.membranes.append(Membrane("unmix_right", width, state.time,
                                    -membrane_speed, Selectivity.by_origin(Origin.RIGHT)))
    try:
        duration = (width / 2.0) / membrane_speed
        _driven_process(state, ledger, duration, thermostat_interval)
    finally:
        state.membranes = [m for m in state.membranes
                           if m.membrane_id not in ("unmix_left", "unmix_right")]
    return ledger.finalize(temperature)
