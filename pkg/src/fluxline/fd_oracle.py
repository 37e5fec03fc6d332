"""Finite-difference eigensolver for the loaded line, used as an
independent cross-check of the piecewise-analytic mode solver.

Within each sector -X'' = (omega/omega0)^2 pi^2 (c_i/c) X (lengths in units
of L); at density jumps the electric potential, i.e. (1/c_i) X', must stay
continuous.  A flux-conservative control-volume stencil with cell fluxes
F = (c/c_i) dX/dx enforces that interface condition naturally, whereas a
plain second-difference stencil would silently impose continuity of X'
itself.  Every sector boundary is placed on a grid node so no cell
straddles a jump.

The discrete problem is A X = nu M X with A symmetric tridiagonal and M
the diagonal lumped mass; a symmetric diagonal scaling turns it into a
standard tridiagonal eigenproblem solved by bisection + inverse iteration.
Eigenvalue convergence is second order in the grid spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import OracleConvergenceError
from .geometry import SectorLayout

MIN_POINTS = 1001
DEFAULT_POINTS = 2 ** 17 + 1


@dataclass(frozen=True, eq=False)
class FdGrid:
    """Composite grid with sector boundaries on nodes.

    points:          node count (>= requested target)
    spacing:         nominal spacing L/(points-1) (m)
    x_over_L:        node positions in units of L
    density_samples: c(x)/c per node (jump nodes take the right-side cell)
    cell_ratio:      c/c per cell, length points-1
    """

    points: int
    spacing: float
    length_L: float
    x_over_L: np.ndarray
    density_samples: np.ndarray
    cell_ratio: np.ndarray

    @property
    def x(self) -> np.ndarray:
        """Node positions in meters."""
        return self.x_over_L * self.length_L

    def cell_counts_key(self) -> tuple:
        """Per-sector interval counts; identifies the grid for diagnostics."""
        changes = np.nonzero(np.diff(self.cell_ratio))[0]
        return tuple(np.diff(np.concatenate([[0], changes + 1, [self.cell_ratio.size]])))


def build_grid(layout: SectorLayout, points: int = DEFAULT_POINTS) -> FdGrid:
    """Distribute ~points nodes over the sectors, boundaries on nodes.

    Each sector gets at least two intervals, so the actual node count can
    slightly exceed the target for very thin sectors.
    """
    if points < MIN_POINTS:
        raise ValueError(f"points must be >= {MIN_POINTS}, got {points}")
    nodes = [-0.5]
    cell_ratio = []
    L = layout.length_L
    for sec in layout.sectors:
        xl, xr = sec.x_left / L, sec.x_right / L
        n = max(2, int(round((xr - xl) * (points - 1))))
        nodes.extend(np.linspace(xl, xr, n + 1)[1:].tolist())
        cell_ratio.extend([sec.density_ratio] * n)
    x = np.asarray(nodes)
    cells = np.asarray(cell_ratio)
    dens = np.concatenate([cells, cells[-1:]])
    return FdGrid(
        points=x.size,
        spacing=L / (x.size - 1),
        length_L=L,
        x_over_L=x,
        density_samples=dens,
        cell_ratio=cells,
    )


def refine_grid(grid: FdGrid, factor: int) -> FdGrid:
    """Split every cell into `factor` equal cells (nested refinement)."""
    if factor < 2:
        return grid
    x = grid.x_over_L
    xs = [x[0]]
    cells = []
    for i in range(grid.cell_ratio.size):
        xs.extend(np.linspace(x[i], x[i + 1], factor + 1)[1:].tolist())
        cells.extend([grid.cell_ratio[i]] * factor)
    xn = np.asarray(xs)
    cn = np.asarray(cells)
    return FdGrid(
        points=xn.size,
        spacing=grid.length_L / (xn.size - 1),
        length_L=grid.length_L,
        x_over_L=xn,
        density_samples=np.concatenate([cn, cn[-1:]]),
        cell_ratio=cn,
    )


@dataclass(frozen=True, eq=False)
class FdMode:
    """One discrete eigenmode: frequency in units of omega0 and the
    normalized current profile X/sqrt(2 mu) sampled on the grid nodes."""

    omega_over_omega0: float
    profile: np.ndarray
    grid: FdGrid


def fd_modes(layout: SectorLayout, points: int = DEFAULT_POINTS,
             count: int = 1, grid: FdGrid | None = None) -> list[FdMode]:
    """Lowest `count` eigenmodes of the loaded line, X(+-L/2) = 0.

    Profiles are normalized so that the mean square of X/sqrt(2 mu) over
    the line is 1/2, matching the analytic solver's convention.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if grid is None:
        grid = build_grid(layout, points)
    h = np.diff(grid.x_over_L)
    p = 1.0 / grid.cell_ratio          # flux coefficient c/c_i per cell
    pih = p / h
    diag = pih[:-1] + pih[1:]
    off = -pih[1:-1]
    mass = 0.5 * (h[:-1] + h[1:])
    sm = 1.0 / np.sqrt(mass)
    try:
        vals, vecs = eigh_tridiagonal(
            diag * sm * sm, off * sm[:-1] * sm[1:],
            select='i', select_range=(0, count - 1),
        )
    except Exception as exc:  # LAPACK failure
        raise OracleConvergenceError(
            f"tridiagonal eigensolver failed: {exc}",
            grid_info={"points": grid.points,
                       "cells_per_sector": grid.cell_counts_key()},
        ) from exc
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        raise OracleConvergenceError(
            "nonpositive or nonfinite eigenvalue from the grid solve",
            grid_info={"points": grid.points, "eigenvalues": vals.tolist()},
        )
    modes = []
    for k in range(count):
        omega = math.sqrt(vals[k]) / math.pi
        X = np.zeros(grid.points)
        X[1:-1] = vecs[:, k] * sm
        mu = float(X[1:-1] @ (mass * X[1:-1]))   # integral of X^2 over x/L
        prof = X / math.sqrt(2.0 * mu)
        # same sign convention as the analytic solver: X' > 0 at -L/2
        if prof[1] < 0.0:
            prof = -prof
        modes.append(FdMode(omega_over_omega0=omega, profile=prof, grid=grid))
    return modes


def fd_gap(mode: FdMode, layout: SectorLayout, site: int) -> float:
    """Gap functional on the discrete profile, |P(x_k+w/2) - P(x_k-w/2)|.

    The edges x_k +- w/2 are grid nodes by construction; interpolation is
    therefore exact there.
    """
    if not 0 <= site < layout.qubit_count:
        raise IndexError(f"site {site} out of range")
    L = layout.length_L
    xc = layout.qubit_sites[site].center / L
    wt = layout.cap_line_width / L
    xq = np.array([xc + wt / 2.0, xc - wt / 2.0])
    vals = np.interp(xq, mode.grid.x_over_L, mode.profile)
    return float(abs(vals[0] - vals[1]))


def convergence_orders(layout: SectorLayout, base_points: int = 4001,
                       count: int = 2, levels: int = 3):
    """Richardson-estimated convergence orders of the top eigenfrequency.

    Solves on `levels+1` grids obtained by nested cell doubling and returns
    the list of log2 ratios of successive eigenvalue differences; second
    order convergence gives values near 2.
    """
    grid = build_grid(layout, base_points)
    freqs = []
    for _ in range(levels + 1):
        freqs.append(fd_modes(layout, count=count, grid=grid)[count - 1].omega_over_omega0)
        grid = refine_grid(grid, 2)
    diffs = np.diff(np.asarray(freqs))
    return [float(np.log2(abs(diffs[i] / diffs[i + 1]))) for i in range(len(diffs) - 1)]
