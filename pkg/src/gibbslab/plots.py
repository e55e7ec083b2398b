"""Figure rendering for finished runs.

Every renderer reads the delimited or JSON files a run emitted and never
touches simulation objects, so a figure can always be reproduced later from
the run directory alone.  Rendering is optional and sits strictly downstream
of the data files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

plt.rcParams.update({
    "figure.dpi": 110,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
})

_SAVE = {"dpi": 150, "bbox_inches": "tight"}


def _read_columns(path: Path) -> dict:
    """Load a delimited table as named columns, floats where possible."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        raw = list(zip(*reader))
    columns = {}
    for name, values in zip(header, raw):
        try:
            columns[name] = np.array([float(v) for v in values])
        except ValueError:
            columns[name] = list(values)
    return columns


def render_ledger(csv_path: Path, png_path: Path) -> None:
    cols = _read_columns(csv_path)
    ids = sorted(set(cols["membrane_id"]))
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    mask0 = None
    for mid in ids:
        mask = np.array([m == mid for m in cols["membrane_id"]])
        if mask0 is None:
            mask0 = mask
        top.plot(cols["time"][mask], cols["pressure"][mask], label=mid, lw=0.9)
    top.set_ylabel("pressure on membrane")
    top.legend(loc="best", fontsize=8)
    bottom.plot(cols["time"][mask0], cols["work_cum"][mask0], label="work on membranes")
    bottom.plot(cols["time"][mask0], cols["heat_cum"][mask0], "--", label="heat injected")
    bottom.set_xlabel("time")
    bottom.set_ylabel("cumulative energy")
    bottom.legend(loc="best", fontsize=8)
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


def render_count_sweep(csv_path: Path, png_path: Path) -> None:
    cols = _read_columns(csv_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.semilogx(cols["N"], cols["ratio"], "o-", ms=4)
    ax.axhline(1.0, color="k", lw=0.8, ls=":")
    ax.set_xlabel("particles per side")
    ax.set_ylabel("exact count entropy / 2 N ln 2")
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


def render_statistics_sweep(csv_path: Path, png_path: Path) -> None:
    cols = _read_columns(csv_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.semilogx(cols["m"], cols["be_ratio"], "o-", ms=4, label="symmetric count ratio")
    ax.semilogx(cols["m"], cols["fd_ratio"], "s-", ms=4, label="exclusive count ratio")
    ax.axhline(1.0, color="k", lw=0.8, ls=":")
    ax.set_xlabel("one-particle states m")
    ax.set_ylabel("count * n! / m^n")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


def render_occupancy(csv_path: Path, png_path: Path) -> None:
    cols = _read_columns(csv_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for name in cols:
        if name.startswith("fraction_left_"):
            ax.plot(cols["time"], cols[name], label=name.replace("fraction_left_", "species "))
    ax.axhspan(0.48, 0.52, color="tab:green", alpha=0.15, label="settled band")
    ax.set_xlabel("time")
    ax.set_ylabel("fraction in left half")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


def render_ehrenfest(csv_path: Path, png_path: Path) -> None:
    cols = _read_columns(csv_path)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    top.plot(cols["t"], cols["x_mean"], label="mean position")
    top.plot(cols["t"], cols["p_mean"], "--", label="mean momentum")
    top.set_ylabel("expectation value")
    top.legend(loc="best", fontsize=8)
    resid = cols["residual"]
    good = ~np.isnan(resid)
    positive = good & (resid > 0)
    if np.any(positive):
        bottom.semilogy(cols["t"][positive], resid[positive], ".", ms=3)
    bottom.set_xlabel("time")
    bottom.set_ylabel("|acceleration - force|")
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


def render_decomposition(json_path: Path, png_path: Path) -> None:
    with open(json_path) as handle:
        payload = json.load(handle)
    config_path = json_path.with_name("resolved_config.json")
    x_lo, x_hi = -30.0, 30.0
    if config_path.exists():
        with open(config_path) as handle:
            config = json.load(handle)
        x_lo = config["parameters"].get("x_min", x_lo)
        x_hi = config["parameters"].get("x_max", x_hi)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    x = np.linspace(x_lo, x_hi, 800)
    decomposition = payload.get("decomposition")
    if decomposition is None:
        ax.text(0.5, 0.5, "no localized decomposition found",
                ha="center", va="center", transform=ax.transAxes)
    else:
        for i, packet in enumerate(decomposition["packets"]):
            c, w = packet["center"], packet["width"]
            density = np.exp(-((x - c) ** 2) / (2.0 * w ** 2))
            density /= np.sqrt(2.0 * np.pi) * w
            label = f"packet {i} (occupation {packet['occupation']})"
            ax.plot(x, density, label=label)
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("position")
    ax.set_ylabel("recovered packet density")
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


def render_overlap_trace(csv_path: Path, png_path: Path) -> None:
    cols = _read_columns(csv_path)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    overlap_abs = np.maximum(cols["overlap_abs"], 1e-18)
    top.semilogy(cols["t"], overlap_abs, "o-", ms=3, label="|inner product|")
    top.semilogy(cols["t"], np.maximum(cols["support_overlap"], 1e-18),
                 "s--", ms=3, label="support overlap")
    top.set_ylabel("overlap measures")
    top.legend(loc="best", fontsize=8)
    bottom.plot(cols["t"], cols["x_mean_a"], label="packet a")
    bottom.plot(cols["t"], cols["x_mean_b"], "--", label="packet b")
    bottom.set_xlabel("time")
    bottom.set_ylabel("mean position")
    bottom.legend(loc="best", fontsize=8)
    fig.savefig(png_path, **_SAVE)
    plt.close(fig)


_FIGURE_PLAN = {
    "mix-reversible": [("ledger.csv", render_ledger, "ledger.png")],
    "unmix": [("mixing_ledger.csv", render_ledger, "mixing_ledger.png"),
              ("unmixing_ledger.csv", render_ledger, "unmixing_ledger.png")],
    "mix-irreversible": [("occupancy.csv", render_occupancy, "occupancy.png")],
    "count-sweep": [("count_sweep.csv", render_count_sweep, "count_sweep.png")],
    "statistics-sweep": [("statistics_sweep.csv", render_statistics_sweep,
                          "statistics_sweep.png")],
    "ehrenfest": [("ehrenfest.csv", render_ehrenfest, "ehrenfest.png")],
    "decompose": [("decomposition.json", render_decomposition, "decomposition.png")],
    "orthogonality": [("overlap_trace.csv", render_overlap_trace, "overlap_trace.png")],
}


def render_experiment_figures(experiment: str, out_dir) -> list:
    """Render the figures an experiment defines; returns the files written."""
    out = Path(out_dir)
    written = []
    for source, renderer, target in _FIGURE_PLAN.get(experiment, []):
        src = out / source
        if not src.exists():
            continue
        renderer(src, out / target)
        written.append(out / target)
    return written
