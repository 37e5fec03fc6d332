"""Point solves, design-space sweeps and oracle comparisons.

A sweep walks (w/w0, d0/d, N) over a grid or along the diagonal
w/w0 = 2 d0/d, solves the mode at each point and tabulates gap, frequency
and coupling (plus the two-qubit exchange when enabled).  Points are
independent and may be evaluated by a process pool; rows are aggregated in
grid order, so the output is identical for any worker count.  Per-point
failures are collected in an error list and never abort the sweep.

CSV export carries the documented column sets:

    coupling:  w_over_w0, d0_over_d, N, j1, omega_r_over_omega0,
               delta_over_sqrt2, g_over_hbar_omega0
    two_qubit: w_over_w0, d0_over_d, omega_r_over_omega0, Delta_over_omega0,
               g_over_hbar_omega0, J_over_hbar_omega0, sign_label

The reported delta/g of a row belong to the strongest switched-on site
(all sites are equivalent for the symmetric layouts swept here); per-site
values are kept in the JSON rows.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import config as cfgmod
from .coupling import site_coupling
from .errors import ConfigError, FluxlineError
from .fd_oracle import build_grid, convergence_orders, fd_gap, fd_modes
from .mode_solver import find_mode
from .two_qubit import analyze_pair

COUPLING_COLUMNS = [
    "w_over_w0", "d0_over_d", "N", "j1", "omega_r_over_omega0",
    "delta_over_sqrt2", "g_over_hbar_omega0",
]
TWO_QUBIT_COLUMNS = [
    "w_over_w0", "d0_over_d", "omega_r_over_omega0", "Delta_over_omega0",
    "g_over_hbar_omega0", "J_over_hbar_omega0", "sign_label",
]

SOLVER_TOLERANCES = {"root_rtol": 1e-12, "sigma_min_rtol": 1e-10}


# ----------------------------------------------------------------------
# sweep specification
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: a named, ordered list of ratio values (all >= 1)."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise ConfigError(f"axis {self.name} needs at least 2 points")
        if min(self.values) < 1.0:
            raise ConfigError(f"axis {self.name} has values < 1 (untested territory)")

    @classmethod
    def from_range(cls, name: str, lo: float, hi: float, steps: int) -> "AxisSpec":
        if steps < 2:
            raise ConfigError(f"axis {name} needs steps >= 2, got {steps}")
        return cls(name, tuple(np.linspace(lo, hi, steps).tolist()))


@dataclass(frozen=True)
class SweepSpec:
    """Grid or diagonal sweep over the design ratios for several N."""

    base_config: dict
    axis1: AxisSpec | None            # w_over_w0
    axis2: AxisSpec | None            # d0_over_d
    diagonal: bool
    qubit_counts: tuple[int, ...]
    two_qubit: bool

    def __post_init__(self):
        if self.axis1 is None and self.axis2 is None:
            raise ConfigError(
                "sweep needs at least one active axis; use a point run instead"
            )
        if self.diagonal and self.axis1 is None:
            raise ConfigError("diagonal sweep needs the w_over_w0 axis")
        if not self.qubit_counts:
            raise ConfigError("qubit_counts must not be empty")
        if self.two_qubit:
            if any(n != 2 for n in self.qubit_counts):
                raise ConfigError("two-qubit sweeps require exactly two qubits (N=2)")
            if self.base_config.get("fa_GHz") is None:
                raise ConfigError("two-qubit sweeps need fa_GHz (qubit frequency)")

    @classmethod
    def from_config(cls, cfg: dict, two_qubit: bool | None = None) -> "SweepSpec":
        axis1 = _axis_from_config(cfg, "w_over_w0")
        diagonal = cfg.get("diagonal", False)
        axis2 = None if diagonal else _axis_from_config(cfg, "d0_over_d")
        counts = tuple(cfg.get("qubit_counts") or [cfg["N"]])
        tq = cfg.get("two_qubit", False) if two_qubit is None else two_qubit
        return cls(base_config=dict(cfg), axis1=axis1, axis2=axis2,
                   diagonal=diagonal, qubit_counts=counts, two_qubit=tq)

    def points(self) -> list[dict]:
        """Effective flat configs, one per grid point, in output order."""
        a1 = list(self.axis1.values) if self.axis1 else [self.base_config["w_over_w0"]]
        if self.diagonal:
            combos = [(w, w / 2.0) for w in a1]
        else:
            a2 = list(self.axis2.values) if self.axis2 else [self.base_config["d0_over_d"]]
            combos = [(w, d) for w in a1 for d in a2]
        pts = []
        for n in self.qubit_counts:
            for w, d in combos:
                pc = dict(self.base_config)
                pc.update(w_over_w0=w, d0_over_d=d, N=int(n))
                pc.pop("switches", None)      # sweeps run with all switches on
                pts.append(pc)
        return pts


def _axis_from_config(cfg: dict, name: str) -> AxisSpec | None:
    values = cfg.get(f"{name}_values")
    if values is not None:
        return AxisSpec(name, tuple(values))
    steps = cfg.get(f"{name}_steps")
    if steps is None:
        return None
    return AxisSpec.from_range(name, cfg[f"{name}_min"], cfg[f"{name}_max"], steps)


# ----------------------------------------------------------------------
# point evaluation
# ----------------------------------------------------------------------

def run_point(cfg: dict, want_two_qubit: bool | None = None, mode=None) -> dict:
    """Solve one configuration: mode, per-site couplings, optional pair data.

    A presolved ModeSolution for the same config may be passed to avoid a
    second solve.
    """
    omega0 = cfgmod.omega0_from_config(cfg)
    omega_a = cfgmod.omega_a_from_config(cfg)
    if mode is None:
        mode = find_mode(cfgmod.layout_from_config(cfg), cfg.get("harmonic"))
    layout = mode.layout

    sites = []
    for i in range(layout.qubit_count):
        res = site_coupling(mode, i, Z=cfg["Z_ohm"], omega0=omega0,
                            L=cfg["length_L"], omega_a=omega_a)
        sites.append({
            "index": i,
            "center": layout.qubit_sites[i].center,
            "switched_on": layout.qubit_sites[i].switched_on,
            "delta": float(mode.gaps_delta[i]),
            "g_over_hbar_omega0": res.g_over_hbar_omega0,
            "bias_current_I0_A": res.bias_current_I0,
            "chi_rad_s": res.chi,
            "regime": res.regime,
        })

    if want_two_qubit is None:
        want_two_qubit = cfg.get("two_qubit", False)
    pair = None
    if want_two_qubit or (layout.qubit_count == 2 and omega_a is not None):
        pair = _pair_section(cfg, layout, mode, sites, omega0, omega_a)

    on_sites = [s for s in sites if s["switched_on"]] or sites
    best = max(on_sites, key=lambda s: s["delta"])
    return {
        "config_hash": cfgmod.config_hash(cfg),
        "point": {"w_over_w0": cfg["w_over_w0"], "d0_over_d": cfg["d0_over_d"],
                  "N": layout.qubit_count},
        "mode": {
            "j1": mode.j1, "j2": mode.j2,
            "omega_r_over_omega0": mode.omega_r_over_omega0,
            "mu": mode.mu, "kappa": mode.kappa, "parity": mode.parity,
            "harmonic": mode.harmonic,
            "gaps_delta": mode.gaps_delta.tolist(),
        },
        "sites": sites,
        "best_site": best["index"],
        "two_qubit": pair,
    }


def _pair_section(cfg, layout, mode, sites, omega0, omega_a):
    if layout.qubit_count != 2:
        raise ConfigError("two-qubit analysis requires exactly two qubits")
    if omega_a is None:
        raise ConfigError("two-qubit analysis needs fa_GHz")
    delta_norm = omega_a / omega0 - mode.omega_r_over_omega0
    if not all(s["switched_on"] for s in sites):
        return {"Delta_over_omega0": delta_norm, "g_over_hbar_omega0": 0.0,
                "J_over_hbar_omega0": 0.0, "phi": 0.0,
                "sign_label": "decoupled", "regime": "perturbative"}
    g = sites[0]["g_over_hbar_omega0"]
    res = analyze_pair(delta_norm, g)
    return {
        "Delta_over_omega0": res.Delta,
        "g_over_hbar_omega0": res.g,
        "J_over_hbar_omega0": res.J,
        "phi": res.phi,
        "sign_label": res.sign_label,
        "regime": res.regime,
    }


def _row_from_report(report: dict, two_qubit: bool) -> dict:
    point = report["point"]
    mode = report["mode"]
    best = report["sites"][report["best_site"]]
    row = {
        "w_over_w0": point["w_over_w0"],
        "d0_over_d": point["d0_over_d"],
        "N": point["N"],
        "j1": mode["j1"],
        "omega_r_over_omega0": mode["omega_r_over_omega0"],
        "delta_over_sqrt2": best["delta"] / math.sqrt(2.0),
        "g_over_hbar_omega0": best["g_over_hbar_omega0"],
        "parity": mode["parity"],
        "gaps_delta": mode["gaps_delta"],
        "site_g": [s["g_over_hbar_omega0"] for s in report["sites"]],
    }
    if two_qubit:
        pair = report["two_qubit"]
        row.update({
            "Delta_over_omega0": pair["Delta_over_omega0"],
            "J_over_hbar_omega0": pair["J_over_hbar_omega0"],
            "g_over_hbar_omega0": pair["g_over_hbar_omega0"],
            "sign_label": pair["sign_label"],
            "phi": pair["phi"],
        })
    return row


def _sweep_task(task):
    index, point_cfg, two_qubit = task
    try:
        report = run_point(point_cfg, want_two_qubit=two_qubit)
        return index, _row_from_report(report, two_qubit), None
    except Exception as exc:  # collected, never aborts the sweep
        return index, None, {
            "index": index,
            "w_over_w0": point_cfg.get("w_over_w0"),
            "d0_over_d": point_cfg.get("d0_over_d"),
            "N": point_cfg.get("N"),
            "error": f"{type(exc).__name__}: {exc}",
        }


# ----------------------------------------------------------------------
# sweep table
# ----------------------------------------------------------------------

@dataclass
class SweepTable:
    """Sweep output: full rows, per-point errors, and run metadata."""

    kind: str                      # 'coupling' | 'two_qubit'
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        return TWO_QUBIT_COLUMNS if self.kind == "two_qubit" else COUPLING_COLUMNS

    def argmax(self, column: str, absolute: bool = False):
        """(index, row) of the maximal column value over the rows."""
        if not self.rows:
            return None
        key = (lambda r: abs(r[column])) if absolute else (lambda r: r[column])
        idx = max(range(len(self.rows)), key=lambda i: key(self.rows[i]))
        return idx, self.rows[idx]


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """Evaluate every grid point; aggregation order is fixed by grid index."""
    points = spec.points()
    tasks = [(i, pc, spec.two_qubit) for i, pc in enumerate(points)]
    if workers is None:
        workers = int(spec.base_config.get("workers", 1))

    results = [None] * len(tasks)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, row, err in pool.map(_sweep_task, tasks, chunksize=4):
                results[index] = (row, err)
    else:
        for task in tasks:
            index, row, err = _sweep_task(task)
            results[index] = (row, err)

    table = SweepTable(kind="two_qubit" if spec.two_qubit else "coupling")
    for row, err in results:
        if err is not None:
            table.errors.append(err)
        else:
            table.rows.append(row)

    meta = {
        "config_hash": cfgmod.config_hash(spec.base_config),
        "tolerances": dict(SOLVER_TOLERANCES),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "points_total": len(points),
        "points_failed": len(table.errors),
    }
    gm = table.argmax("g_over_hbar_omega0")
    if gm is not None:
        meta["argmax_g"] = {"row_index": gm[0], **_point_key(gm[1])}
    if spec.two_qubit:
        jm = table.argmax("J_over_hbar_omega0", absolute=True)
        if jm is not None:
            meta["argmax_abs_J"] = {"row_index": jm[0], **_point_key(jm[1])}
    table.metadata = meta
    return table


def _point_key(row: dict) -> dict:
    return {k: row[k] for k in ("w_over_w0", "d0_over_d", "N") if k in row}


# ----------------------------------------------------------------------
# export
# ----------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export(table: SweepTable, fmt: str, path: str) -> None:
    """Write the table; CSV carries the documented columns, JSON everything."""
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(table.columns) + "\n")
            for row in table.rows:
                fh.write(",".join(_format_cell(row[c]) for c in table.columns) + "\n")
    elif fmt == "json":
        payload = {
            "kind": table.kind,
            "columns": table.columns,
            "rows": table.rows,
            "errors": table.errors,
            "metadata": table.metadata,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown export format {fmt!r} (use csv or json)")


def load_table(path: str) -> SweepTable:
    """Rebuild a SweepTable from its JSON export."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return SweepTable(kind=payload["kind"], rows=payload["rows"],
                      errors=payload["errors"], metadata=payload["metadata"])


def read_csv_rows(path: str) -> list[dict]:
    """Typed rows back from a CSV export (floats where possible)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            row = {}
            for key, val in rec.items():
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
            rows.append(row)
    return rows


# ----------------------------------------------------------------------
# oracle comparison
# ----------------------------------------------------------------------

def run_oracle_check(cfg: dict, grid_points: int | None = None,
                     tol_omega: float = 1e-3, tol_delta: float = 1e-2,
                     refine: bool = False) -> dict:
    """Compare the analytic mode against the finite-difference solver.

    Reports relative frequency and per-site gap errors plus pass/fail
    against the tolerances; optionally a grid-refinement order estimate.
    """
    layout = cfgmod.layout_from_config(cfg)
    harmonic = cfg.get("harmonic") or (layout.qubit_count + 1)
    mode = find_mode(layout, harmonic)
    points = grid_points or cfg.get("grid_points", 2 ** 17 + 1)

    count = harmonic + 2
    fd = fd_modes(layout, points=points, count=count)
    freqs = np.array([m.omega_over_omega0 for m in fd])
    k = int(np.argmin(np.abs(freqs - mode.omega_r_over_omega0)))
    omega_err = abs(freqs[k] - mode.omega_r_over_omega0) / mode.omega_r_over_omega0

    delta_errs = []
    for site in range(layout.qubit_count):
        ref = mode.gaps_delta[site]
        got = fd_gap(fd[k], layout, site)
        delta_errs.append(abs(got - ref) / ref if ref != 0.0 else abs(got))

    report = {
        "harmonic": harmonic,
        "omega_analytic": mode.omega_r_over_omega0,
        "omega_fd": float(freqs[k]),
        "omega_rel_err": float(omega_err),
        "delta_rel_errs": [float(e) for e in delta_errs],
        "grid_points": fd[k].grid.points,
        "tol_omega": tol_omega,
        "tol_delta": tol_delta,
        "passed": bool(omega_err < tol_omega
                       and all(e < tol_delta for e in delta_errs)),
    }
    if refine:
        base = max(4001, (points - 1) // 16 + 1)
        report["refinement_orders"] = convergence_orders(
            layout, base_points=base, count=min(count, harmonic + 1), levels=2)
    return report


def dump_fd_profile(cfg: dict, mode_index: int, path: str,
                    grid_points: int | None = None) -> None:
    """CSV of (x, X(x)) for one finite-difference eigenmode."""
    layout = cfgmod.layout_from_config(cfg)
    points = grid_points or cfg.get("grid_points", 2 ** 17 + 1)
    modes = fd_modes(layout, points=points, count=mode_index + 1)
    m = modes[mode_index]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x,current\n")
        for xi, vi in zip(m.grid.x, m.profile):
            fh.write(f"{xi!r},{vi!r}\n")
