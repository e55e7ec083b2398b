"""Experiment registry, config resolution, and delimited output writing.

Every experiment resolves its parameters the same way: registry defaults,
then the JSON config file, then command-line flags, with later layers
winning and unknown keys rejected.  A run writes resolved_config.json (the
exact parameter set after merging), the experiment's delimited tables, a
summary.json, and optionally PNG figures rendered from the emitted tables,
never from in-memory state, so the delimited files stay the authoritative
data boundary.

Determinism contract: identical resolved parameters produce byte-identical
delimited and JSON outputs.  Floats are written with repr, which is exact
round-trip precision; derived random streams are split from the master seed
with SeedSequence([seed, component]) where component 0 is the gas
initializer and component 1 the decomposition optimizer jitter.  Wall-clock
timing is printed to stdout only and never written to an output file.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .counting import (mixing_permutation_factor, reversible_mixing_delta_s,
                       statistics_reduction_ratio, OccupancyStatistics)
from .errors import ConfigurationError, SimulationError
from .kinetics import (MixingMode, Origin, Species, advance, init_gas,
                       left_fraction, remove_partition, run_reversible_mixing,
                       run_unmixing)
from .quantum import (Grid, HamiltonianSpec, Symmetry, detect_particle_decomposition,
                      ehrenfest_trace, evolve, gaussian_packet, overlap,
                      support_overlap, symmetrize, unitarity_orthogonality_check)

LEDGER_HEADER = "time,membrane_id,pressure,work_cum,heat_cum"
COUNT_HEADER = "N,delta_S_exact,delta_S_asymptotic,ratio"
STATISTICS_HEADER = "m,n,be_ratio,fd_ratio"
EHRENFEST_HEADER = "t,x_mean,p_mean,F_mean,residual"

# summary.json always carries these keys; null marks not-applicable
_CORE_SUMMARY_FIELDS = ("delta_S", "delta_S_theory", "relative_error", "n",
                        "temperature", "membrane_speed", "seed")


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"cannot read {text!r} as a boolean")


def _parse_int_list(text: str) -> list:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_opt_float(text: str):
    if text.strip().lower() in ("none", "auto"):
        return None
    return float(text)


def _parse_opt_int(text: str):
    if text.strip().lower() in ("none", "auto"):
        return None
    return int(text)


def _check_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"parameter {name!r} needs an integer, got {value!r}")
    return value


def _check_float(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"parameter {name!r} needs a number, got {value!r}")
    return float(value)


def _check_str(value, name: str) -> str:
    if not isinstance(value, str):
        raise ConfigurationError(f"parameter {name!r} needs a string, got {value!r}")
    return value


def _check_bool(value, name: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigurationError(f"parameter {name!r} needs true or false, got {value!r}")
    return value


def _check_int_list(value, name: str) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"parameter {name!r} needs a nonempty list of integers")
    return [_check_int(v, name) for v in value]


def _check_opt_float(value, name: str):
    return None if value is None else _check_float(value, name)


def _check_opt_int(value, name: str):
    return None if value is None else _check_int(value, name)


@dataclass(frozen=True)
class ParamDef:
    """One experiment parameter: default, CLI parser, config checker, help."""

    default: object
    parse: object
    check: object
    help: str


def _pd_int(default, help_text):
    return ParamDef(default, int, _check_int, help_text)


def _pd_float(default, help_text):
    return ParamDef(default, float, _check_float, help_text)


def _pd_str(default, help_text):
    return ParamDef(default, str, _check_str, help_text)


def _pd_bool(default, help_text):
    return ParamDef(default, _parse_bool, _check_bool, help_text)


def _pd_int_list(default, help_text):
    return ParamDef(default, _parse_int_list, _check_int_list, help_text)


def _pd_opt_float(default, help_text):
    return ParamDef(default, _parse_opt_float, _check_opt_float, help_text)


def _pd_opt_int(default, help_text):
    return ParamDef(default, _parse_opt_int, _check_opt_int, help_text)


def _fmt(value) -> str:
    # repr round-trips doubles exactly; cast first so numpy scalars
    # (float subclasses) do not leak their wrapper into the file
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(header + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _ledger_rows(ledger):
    return [(t, mid, p, w, q) for (t, mid, p, w, q) in ledger.pressure_samples]


def _auto_interval(temperature: float, width: float = 1.0) -> float:
    return 0.1 * width / math.sqrt(temperature)


def _resolved_drive(p: dict) -> tuple:
    speed = p["membrane_speed"]
    if speed is None:
        speed = p["quasi_static_ratio"] * math.sqrt(p["temperature"])
    interval = p["thermostat_interval"]
    if interval is None:
        interval = _auto_interval(p["temperature"])
    return speed, interval


def _species_pair(mode: MixingMode):
    if mode is MixingMode.DIFFERENT_GASES_BY_SPECIES:
        return Species.A, Species.B
    return Species.A, Species.A


def _run_mix_reversible(p: dict, out: Path) -> dict:
    mode = MixingMode.parse(p["mode"])
    left, right = _species_pair(mode)
    state = init_gas(p["n"], p["n"], left, right, p["temperature"],
                     seed=np.random.SeedSequence([p["seed"], 0]))
    remove_partition(state)
    ledger = run_reversible_mixing(state, mode,
                                   membrane_speed=p["membrane_speed"],
                                   thermostat_interval=p["thermostat_interval"],
                                   quasi_static_ratio=p["quasi_static_ratio"])
    _write_csv(out / "ledger.csv", LEDGER_HEADER, _ledger_rows(ledger))
    distinct = mode is not MixingMode.SAME_GAS_BY_SPECIES
    theory = reversible_mixing_delta_s(p["n"], distinct)
    scale = reversible_mixing_delta_s(p["n"], True)
    speed, interval = _resolved_drive(p)
    return {
        "delta_S": ledger.delta_s,
        "delta_S_theory": theory,
        "relative_error": (ledger.delta_s - theory) / scale,
        "n": p["n"],
        "temperature": p["temperature"],
        "membrane_speed": speed,
        "seed": p["seed"],
        "mode": mode.value,
        "thermostat_interval": interval,
        "quasi_static_ratio": p["quasi_static_ratio"],
        "work_on_membranes": ledger.work_on_membranes,
        "heat_injected": ledger.heat_injected,
        "annotations": list(ledger.annotations),
        "theory_provenance": {
            "statement": "each tagged population doubles its accessible area "
                         "isothermally; identical untagged gases change nothing",
            "formula": "2 N k ln 2 if populations are distinguishable else 0",
            "boltzmann_constant": 1.0,
        },
    }


def _run_unmix(p: dict, out: Path) -> dict:
    state = init_gas(p["n"], p["n"], Species.A, Species.A, p["temperature"],
                     seed=np.random.SeedSequence([p["seed"], 0]))
    remove_partition(state)
    mixing = run_reversible_mixing(state, MixingMode.SAME_GAS_BY_ORIGIN,
                                   membrane_speed=p["membrane_speed"],
                                   thermostat_interval=p["thermostat_interval"],
                                   quasi_static_ratio=p["quasi_static_ratio"])
    unmixing = run_unmixing(state,
                            membrane_speed=p["membrane_speed"],
                            thermostat_interval=p["thermostat_interval"],
                            quasi_static_ratio=p["quasi_static_ratio"])
    _write_csv(out / "mixing_ledger.csv", LEDGER_HEADER, _ledger_rows(mixing))
    _write_csv(out / "unmixing_ledger.csv", LEDGER_HEADER, _ledger_rows(unmixing))
    scale = reversible_mixing_delta_s(p["n"], True)
    speed, interval = _resolved_drive(p)
    left_restored = left_fraction(state, origin=Origin.LEFT)
    right_restored = 1.0 - left_fraction(state, origin=Origin.RIGHT)
    return {
        "delta_S": unmixing.delta_s,
        "delta_S_theory": -scale,
        "relative_error": (unmixing.delta_s + scale) / scale,
        "n": p["n"],
        "temperature": p["temperature"],
        "membrane_speed": speed,
        "thermostat_interval": interval,
        "seed": p["seed"],
        "delta_S_mixing": mixing.delta_s,
        "cycle_net_delta_S": mixing.delta_s + unmixing.delta_s,
        "cycle_net_relative": (mixing.delta_s + unmixing.delta_s) / scale,
        "left_population_restored_fraction": left_restored,
        "right_population_restored_fraction": right_restored,
        "theory_provenance": {
            "statement": "origin-selective membranes compress each population "
                         "back into its starting half, withdrawing the mixing "
                         "entropy as heat",
            "formula": "-2 N k ln 2 for the unmixing leg",
            "boltzmann_constant": 1.0,
        },
    }


def _run_mix_irreversible(p: dict, out: Path) -> dict:
    if p["species"] not in ("different", "same"):
        raise ConfigurationError("species must be 'different' or 'same'")
    different = p["species"] == "different"
    right = Species.B if different else Species.A
    state = init_gas(p["n"], p["n"], Species.A, right, p["temperature"],
                     seed=np.random.SeedSequence([p["seed"], 0]))
    remove_partition(state)
    tracked = [Species.A, Species.B] if different else [Species.A]
    rows = []
    tol = p["occupancy_tol"]
    settle_time = None
    while state.time < p["max_time"]:
        advance(state, p["occupancy_window"])
        fracs = [left_fraction(state, species=s) for s in tracked]
        rows.append((state.time, *fracs))
        if all(abs(f - 0.5) <= tol for f in fracs):
            settle_time = state.time
            break
    header = "time," + ",".join(f"fraction_left_{s.name}" for s in tracked)
    _write_csv(out / "occupancy.csv", header, rows)
    if settle_time is None:
        raise SimulationError(
            f"occupancy fractions failed to settle within {p['occupancy_tol']!r} "
            f"of one half by t = {p['max_time']!r}")
    delta = reversible_mixing_delta_s(p["n"], different)
    scale = reversible_mixing_delta_s(p["n"], True)
    factor = mixing_permutation_factor(p["n"])
    return {
        "delta_S": delta,
        "delta_S_theory": delta,
        "relative_error": 0.0,
        "n": p["n"],
        "temperature": p["temperature"],
        "membrane_speed": None,
        "seed": p["seed"],
        "species": p["species"],
        "heat_injected": 0.0,
        "work_on_membranes": 0.0,
        "equilibration_time": settle_time,
        "final_fractions_left": list(rows[-1][1:]),
        "finite_count_log_factor": factor.log_m,
        "finite_count_ratio": factor.log_m / scale,
        "theory_provenance": {
            "statement": "free mixing moves no heat; the entropy change is a "
                         "counting statement about distinguishable arrangements",
            "formula": "2 N k ln 2 if species differ else 0 with corrected counting",
            "boltzmann_constant": 1.0,
        },
    }


def _run_count_sweep(p: dict, out: Path) -> dict:
    rows = []
    for n in p["n_values"]:
        factor = mixing_permutation_factor(n)
        asym = reversible_mixing_delta_s(n, True)
        rows.append((n, factor.log_m, asym, factor.log_m / asym))
    _write_csv(out / "count_sweep.csv", COUNT_HEADER, rows)
    return {
        "seed": None,
        "n_values": list(p["n_values"]),
        "largest_n_ratio": rows[-1][3],
        "theory_provenance": {
            "statement": "log of the arrangement multiplicity (2N choose N) "
                         "approaches 2 N ln 2 from below",
            "formula": "ln((2N)! / (N!)^2) / (2 N ln 2)",
        },
    }


def _run_statistics_sweep(p: dict, out: Path) -> dict:
    rows = []
    for m in p["m_values"]:
        be = statistics_reduction_ratio(m, p["n"], OccupancyStatistics.BE)
        fd = statistics_reduction_ratio(m, p["n"], OccupancyStatistics.FD)
        rows.append((m, p["n"], be, fd))
    _write_csv(out / "statistics_sweep.csv", STATISTICS_HEADER, rows)
    return {
        "seed": None,
        "n": p["n"],
        "m_values": list(p["m_values"]),
        "largest_m_be_ratio": rows[-1][2],
        "largest_m_fd_ratio": rows[-1][3],
        "theory_provenance": {
            "statement": "scarce occupancy makes quantum statistics converge on "
                         "corrected classical counting",
            "formula": "count(m, n, statistic) * n! / m^n -> 1 as m grows",
        },
    }


def _run_ehrenfest(p: dict, out: Path) -> dict:
    grid = Grid(p["x_min"], p["x_max"], p["points"])
    packet = gaussian_packet(grid, p["x0"], p["p0"], p["sigma"])
    ham = HamiltonianSpec(p["hamiltonian"], p["omega"])
    steps = p["steps_per_sample"]
    times, x_mean, p_mean, f_mean, residual = ehrenfest_trace(
        ham, packet, p["t_max"], p["samples"], steps)
    _write_csv(out / "ehrenfest.csv", EHRENFEST_HEADER,
               zip(times, x_mean, p_mean, f_mean, residual))
    if ham.kind == "harmonic":
        w = ham.omega
        exact = p["x0"] * np.cos(w * times) + (p["p0"] / w) * np.sin(w * times)
    else:
        exact = p["x0"] + p["p0"] * times
    dt = p["t_max"] / (p["samples"] - 1)
    return {
        "seed": None,
        "hamiltonian": ham.kind,
        "omega": ham.omega if ham.kind == "harmonic" else None,
        "samples": p["samples"],
        "steps_per_sample": steps if steps is not None else ham.auto_steps(dt),
        "max_residual": float(np.nanmax(residual)),
        "trajectory_error": float(np.max(np.abs(x_mean - exact))),
        "theory_provenance": {
            "statement": "the packet's mean position obeys the classical "
                         "equation of motion for these potentials",
            "formula": "d^2<x>/dt^2 = <F> with m = 1",
        },
    }


def _symmetry_from_name(name: str) -> Symmetry:
    try:
        return Symmetry(name.lower())
    except ValueError:
        raise ConfigurationError(
            f"unknown symmetry {name!r}; choose 'bose' or 'fermi'") from None


def _run_decompose(p: dict, out: Path) -> dict:
    grid = Grid(p["x_min"], p["x_max"], p["points"])
    half = 0.5 * p["separation_sigmas"] * p["sigma"]
    half_p = 0.5 * p["momentum_delta"]
    first = gaussian_packet(grid, -half, +half_p, p["sigma"])
    second = gaussian_packet(grid, +half, -half_p, p["sigma"])
    symmetry = _symmetry_from_name(p["symmetry"])
    state = symmetrize([first, second], symmetry)
    rng = np.random.default_rng(np.random.SeedSequence([p["seed"], 1]))
    result = detect_particle_decomposition(
        state,
        epsilon_support=p["epsilon_support"],
        epsilon_reconstruct=p["epsilon_reconstruct"],
        degeneracy_tol=p["degeneracy_tol"],
        optimizer_rng=rng)
    if result.packets is None:
        payload = {
            "decomposition": None,
            "degenerate_occupation": result.degenerate_occupation,
            "max_pairwise_support": result.max_pairwise_support,
        }
        found = 0
    else:
        seen: list = []
        for packet in result.packets:
            if not any(packet is q for q in seen):
                seen.append(packet)
        described = []
        for packet, occ in zip(seen, result.occupations):
            ideal = gaussian_packet(grid, packet.position_mean(),
                                    packet.momentum_mean(),
                                    packet.position_spread())
            described.append({
                "center": packet.position_mean(),
                "width": packet.position_spread(),
                "momentum": packet.momentum_mean(),
                "occupation": occ,
                "gaussian_fidelity": abs(overlap(ideal, packet)),
            })
        payload = {
            "decomposition": {
                "packets": described,
                "reconstruction_error": result.reconstruction_error,
                "max_pairwise_support": result.max_pairwise_support,
            },
            "degenerate_occupation": result.degenerate_occupation,
        }
        found = len(seen)
    _write_json(out / "decomposition.json", payload)
    return {
        "seed": p["seed"],
        "n": state.n_particles,
        "symmetry": symmetry.value,
        "separation_sigmas": p["separation_sigmas"],
        "packets_found": found,
        "reconstruction_error": result.reconstruction_error,
        "max_pairwise_support": result.max_pairwise_support,
        "degenerate_occupation": result.degenerate_occupation,
        "theory_provenance": {
            "statement": "well separated packets admit a unique localized "
                         "decomposition; strongly overlapping ones admit none",
        },
    }


def _run_orthogonality(p: dict, out: Path) -> dict:
    grid = Grid(p["x_min"], p["x_max"], p["points"])
    half = 0.5 * p["separation"]
    first = gaussian_packet(grid, -half, +p["momentum"], p["sigma"])
    second = gaussian_packet(grid, +half, -p["momentum"], p["sigma"])
    ham = HamiltonianSpec(p["hamiltonian"], p["omega"])
    report = unitarity_orthogonality_check(first, second, ham, p["t"], p["steps"])
    rows = []
    max_support = 0.0
    trace_points = 36
    for j in range(trace_points + 1):
        tj = p["t"] * j / trace_points
        a_t = evolve(first, ham, tj, p["steps"])
        b_t = evolve(second, ham, tj, p["steps"])
        shared = support_overlap(a_t, b_t)
        max_support = max(max_support, shared)
        rows.append((tj, abs(overlap(a_t, b_t)), shared,
                     a_t.position_mean(), b_t.position_mean()))
    _write_csv(out / "overlap_trace.csv",
               "t,overlap_abs,support_overlap,x_mean_a,x_mean_b", rows)
    return {
        "seed": None,
        "temperature": None,
        "separation": p["separation"],
        "momentum": p["momentum"],
        "evolution_time": p["t"],
        "overlap_before_abs": abs(report.before),
        "overlap_after_abs": abs(report.after),
        "overlap_deviation": report.deviation,
        "max_support_overlap": max_support,
        "packets_crossed": max_support >= 0.5,
        "theory_provenance": {
            "statement": "unitary evolution preserves inner products, so packets "
                         "that pass through each other keep their distinguishability",
        },
    }


@dataclass(frozen=True)
class ExperimentSpec:
    """Registry row: parameter schema plus the function that runs it."""

    name: str
    description: str
    params: dict
    runner: object


REGISTRY = {
    spec.name: spec for spec in [
        ExperimentSpec(
            "mix-reversible",
            "quasi-static selective-membrane mixing with a heat ledger",
            {
                "n": _pd_int(1000, "particles per side"),
                "temperature": _pd_float(1.0, "thermostat temperature"),
                "membrane_speed": _pd_opt_float(0.01, "membrane speed (auto: ratio * sqrt(T))"),
                "mode": _pd_str("DifferentGases-BySpecies",
                                "DifferentGases-BySpecies, SameGas-ByOrigin, or SameGas-BySpecies"),
                "thermostat_interval": _pd_opt_float(None, "time between rescalings (auto)"),
                "quasi_static_ratio": _pd_float(0.01, "max membrane speed over thermal speed"),
                "seed": _pd_int(12345, "master seed"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_mix_reversible),
        ExperimentSpec(
            "unmix",
            "mix by origin, then drive the membranes back and restore the halves",
            {
                "n": _pd_int(1000, "particles per side"),
                "temperature": _pd_float(1.0, "thermostat temperature"),
                "membrane_speed": _pd_opt_float(0.01, "membrane speed (auto: ratio * sqrt(T))"),
                "thermostat_interval": _pd_opt_float(None, "time between rescalings (auto)"),
                "quasi_static_ratio": _pd_float(0.01, "max membrane speed over thermal speed"),
                "seed": _pd_int(12345, "master seed"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_unmix),
        ExperimentSpec(
            "mix-irreversible",
            "pull the partition and let the gases mix freely; no heat moves",
            {
                "n": _pd_int(1000, "particles per side"),
                "temperature": _pd_float(1.0, "initial temperature"),
                "species": _pd_str("different", "'different' or 'same'"),
                "occupancy_window": _pd_float(10.0, "time between occupancy checks"),
                "occupancy_tol": _pd_float(0.02, "band around one half that counts as settled"),
                "max_time": _pd_float(200.0, "give up if not settled by this time"),
                "seed": _pd_int(12345, "master seed"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_mix_irreversible),
        ExperimentSpec(
            "count-sweep",
            "arrangement-count entropy versus the asymptotic 2 N ln 2",
            {
                "n_values": _pd_int_list([1, 2, 5, 10, 20, 50, 100, 200, 500, 1000,
                                          2000, 5000],
                                         "per-side particle counts to tabulate"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_count_sweep),
        ExperimentSpec(
            "statistics-sweep",
            "Bose and Fermi state counts against corrected classical counting",
            {
                "m_values": _pd_int_list([4, 10, 100, 10000, 1000000],
                                         "one-particle state counts to tabulate"),
                "n": _pd_int(2, "particle count"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_statistics_sweep),
        ExperimentSpec(
            "ehrenfest",
            "mean-position trajectory of a packet against the classical force law",
            {
                "hamiltonian": _pd_str("harmonic", "'free' or 'harmonic'"),
                "omega": _pd_float(1.0, "harmonic frequency"),
                "x0": _pd_float(2.0, "initial packet center"),
                "p0": _pd_float(0.0, "initial packet momentum"),
                "sigma": _pd_float(0.5, "initial packet width"),
                "t_max": _pd_float(2.0 * math.pi, "trajectory length"),
                "samples": _pd_int(361, "trajectory samples (at least 5)"),
                "x_min": _pd_float(-12.0, "domain lower edge"),
                "x_max": _pd_float(12.0, "domain upper edge"),
                "points": _pd_int(1024, "grid points, power of two"),
                "steps_per_sample": _pd_opt_int(None, "integrator steps per sample (auto)"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_ehrenfest),
        ExperimentSpec(
            "decompose",
            "recover localized packets from a symmetrized two-particle state",
            {
                "separation_sigmas": _pd_float(12.0, "packet separation in widths"),
                "sigma": _pd_float(1.0, "packet width"),
                "momentum_delta": _pd_float(0.0, "relative momentum of the pair"),
                "symmetry": _pd_str("bose", "'bose' or 'fermi'"),
                "epsilon_support": _pd_float(1e-6, "max allowed pairwise support overlap"),
                "epsilon_reconstruct": _pd_float(1e-6, "max allowed reconstruction error"),
                "degeneracy_tol": _pd_float(1e-6, "eigenvalue gap treated as degenerate"),
                "x_min": _pd_float(-30.0, "domain lower edge"),
                "x_max": _pd_float(30.0, "domain upper edge"),
                "points": _pd_int(1024, "grid points, power of two"),
                "seed": _pd_int(777, "optimizer jitter seed"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_decompose),
        ExperimentSpec(
            "orthogonality",
            "inner-product preservation while two packets fly through each other",
            {
                "separation": _pd_float(14.0, "initial center separation"),
                "momentum": _pd_float(2.0, "speed of each packet toward the other"),
                "sigma": _pd_float(1.0, "packet width"),
                "t": _pd_float(3.5, "evolution time"),
                "hamiltonian": _pd_str("free", "'free' or 'harmonic'"),
                "omega": _pd_float(1.0, "harmonic frequency if used"),
                "steps": _pd_opt_int(None, "integrator steps (auto)"),
                "x_min": _pd_float(-40.0, "domain lower edge"),
                "x_max": _pd_float(40.0, "domain upper edge"),
                "points": _pd_int(2048, "grid points, power of two"),
                "figures": _pd_bool(True, "render PNG figures from the emitted tables"),
            },
            _run_orthogonality),
    ]
}


@dataclass
class RunReport:
    """What a finished run produced and where."""

    experiment: str
    output_dir: Path
    summary: dict
    files: list


def load_config(path) -> tuple:
    """Read a JSON config {experiment, parameters, output_dir}; all optional."""
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a JSON object")
    unknown = sorted(set(raw) - {"experiment", "parameters", "output_dir"})
    if unknown:
        raise ConfigurationError(
            f"unknown config keys {unknown}; valid keys are "
            "['experiment', 'output_dir', 'parameters']")
    params = raw.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigurationError("config 'parameters' must be an object")
    return raw.get("experiment"), params, raw.get("output_dir")


def resolve_parameters(experiment: str, file_params: dict | None = None,
                       cli_params: dict | None = None) -> dict:
    """Defaults, then file values, then CLI values; unknown keys rejected."""
    if experiment not in REGISTRY:
        raise ConfigurationError(
            f"unknown experiment {experiment!r}; available: {sorted(REGISTRY)}")
    spec = REGISTRY[experiment]
    resolved = {name: definition.default for name, definition in spec.params.items()}
    for layer in (file_params or {}, cli_params or {}):
        unknown = sorted(set(layer) - set(spec.params))
        if unknown:
            raise ConfigurationError(
                f"experiment {experiment!r} does not take parameters {unknown}; "
                f"valid parameters: {sorted(spec.params)}")
        for name, value in layer.items():
            resolved[name] = spec.params[name].check(value, name)
    return resolved


def run_experiment(experiment: str, params: dict, output_dir) -> RunReport:
    """Run one experiment into output_dir and return what was written."""
    spec = REGISTRY[experiment] if experiment in REGISTRY else None
    if spec is None:
        raise ConfigurationError(
            f"unknown experiment {experiment!r}; available: {sorted(REGISTRY)}")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    # the destination directory is deliberately not recorded: outputs of a
    # given parameter set must not depend on where they are written
    _write_json(out / "resolved_config.json",
                {"experiment": experiment, "parameters": params})
    started = time.perf_counter()
    extras = spec.runner(params, out)
    elapsed = time.perf_counter() - started
    summary = {field: None for field in _CORE_SUMMARY_FIELDS}
    summary.update(extras)
    summary["experiment"] = experiment
    _write_json(out / "summary.json", summary)
    if params.get("figures", False):
        from . import plots
        plots.render_experiment_figures(experiment, out)
    files = sorted(str(f.relative_to(out)) for f in out.iterdir() if f.is_file())
    print(f"experiment {experiment}: wrote {len(files)} files to {out}")
    for name in files:
        print(f"  {name}")
    if summary.get("delta_S") is not None:
        print(f"  delta_S = {summary['delta_S']!r} "
              f"(theory {summary['delta_S_theory']!r}, "
              f"relative error {summary['relative_error']!r})")
    print(f"  wall time {elapsed:.2f} s (stdout only, never written to files)")
    return RunReport(experiment=experiment, output_dir=out, summary=summary,
                     files=files)
