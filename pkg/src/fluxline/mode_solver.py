"""Standing-wave modes of the piecewise-loaded transmission line.

The field factorizes as theta(x, t) = X(x) phi(t); within each sector the
spatial part obeys X'' + (l c_i) omega^2 X = 0, so X is a sine/cosine of
local wavenumber j_i * pi / L with j_i = (omega/omega0) * sqrt(c_i/c), where
omega0 is the first harmonic of the uniform line.  Matching X and the
electric potential (1/c_i) X' at every sector boundary, plus X(+-L/2) = 0,
gives a homogeneous linear system; its determinant vanishes exactly at the
mode indices j1.

All solver internals work in normalized units: lengths in units of L,
frequencies in units of omega0 (so j1 IS omega_r/omega0).  A real
sine/cosine basis is used per sector, which keeps the boundary matrices
real so determinant sign changes bracket the roots.

Mirror symmetry of the layout splits the solutions into odd and even
parity.  For odd qubit counts the solver works on the half line [0, L/2]
with X(0) = 0 (odd) or X'(0) = 0 (even); for even qubit counts it solves
the full unreduced system and classifies the parity afterwards.  The
physical branch is selected by homotopy: the loading ratio is swept from 1
to its target and the root is tracked from the uniform harmonic.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeWarning, RootNotFoundError, UnsupportedLayoutError
from .geometry import SectorLayout

#: reported roots keep the smallest singular value below this times the norm
SIGMA_MIN_RTOL = 1e-10


# ----------------------------------------------------------------------
# normalized piecewise line
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class _Line:
    """Sector arrays in units of L: boundaries in [-1/2, 1/2], c_i/c ratios."""

    xl: np.ndarray
    xr: np.ndarray
    ratio: np.ndarray

    @property
    def nsec(self) -> int:
        return self.xl.size

    def with_ratio(self, ratio: np.ndarray) -> "_Line":
        return _Line(self.xl, self.xr, ratio)

    def half(self) -> "_Line":
        """Clip to [0, 1/2]; assumes mirror symmetry about x = 0."""
        keep = self.xr > 0.0
        xl = np.maximum(self.xl[keep], 0.0)
        return _Line(xl, self.xr[keep], self.ratio[keep])


def _line_from_layout(layout: SectorLayout) -> _Line:
    L = layout.length_L
    xl = np.array([s.x_left for s in layout.sectors]) / L
    xr = np.array([s.x_right for s in layout.sectors]) / L
    ratio = np.array([s.density_ratio for s in layout.sectors])
    return _Line(xl, xr, ratio)


# ----------------------------------------------------------------------
# boundary matrices
# ----------------------------------------------------------------------

def _assemble(line: _Line, j1s, system: str) -> np.ndarray:
    """Stack of boundary matrices, shape (len(j1s), m, m).

    system: 'odd' / 'even' for the half-line reduced sets, 'full' for the
    unreduced system on the whole line.  Rows are the center (or left-end)
    condition, continuity of X and of (c/c_i) X' at each internal boundary,
    and X at the right end.  Derivative rows are scaled by (c/c_i)(j_i/j1)
    = 1/sqrt(c_i/c), which keeps every entry in [-1, 1] for ratios >= 1.
    """
    j1s = np.atleast_1d(np.asarray(j1s, dtype=float))
    ns = line.nsec
    m = 2 * ns
    out = np.zeros((j1s.size, m, m))
    qf = np.sqrt(line.ratio)          # j_i / j1 per sector
    wgt = 1.0 / qf                    # derivative-row weight (c/c_i)(j_i/j1)
    q = np.pi * j1s[:, None] * qf[None, :]   # (K, ns) wavenumbers

    if system == 'odd':
        out[:, 0, 1] = 1.0            # X(0) = 0  ->  b_0 = 0
    elif system == 'even':
        out[:, 0, 0] = 1.0            # X'(0) = 0 ->  a_0 = 0
    elif system == 'full':
        x0 = line.xl[0]
        out[:, 0, 0] = np.sin(q[:, 0] * x0)
        out[:, 0, 1] = np.cos(q[:, 0] * x0)
    else:
        raise ValueError(f"unknown system {system!r}")

    row = 1
    for s in range(ns - 1):
        xb = line.xr[s]
        sl, cl = np.sin(q[:, s] * xb), np.cos(q[:, s] * xb)
        sr, cr = np.sin(q[:, s + 1] * xb), np.cos(q[:, s + 1] * xb)
        out[:, row, 2 * s] = sl
        out[:, row, 2 * s + 1] = cl
        out[:, row, 2 * s + 2] = -sr
        out[:, row, 2 * s + 3] = -cr
        row += 1
        out[:, row, 2 * s] = wgt[s] * cl
        out[:, row, 2 * s + 1] = -wgt[s] * sl
        out[:, row, 2 * s + 2] = -wgt[s + 1] * cr
        out[:, row, 2 * s + 3] = wgt[s + 1] * sr
        row += 1

    out[:, row, m - 2] = np.sin(q[:, -1] * 0.5)
    out[:, row, m - 1] = np.cos(q[:, -1] * 0.5)
    return out


def boundary_matrix(layout: SectorLayout, j1: float, parity: str | None = 'odd') -> np.ndarray:
    """Homogeneous boundary-condition matrix at trial mode index j1.

    parity 'odd' or 'even' selects the mirror-reduced set on the half
    line; None assembles the full unreduced system.  The determinant
    vanishes exactly at the mode indices of that symmetry class.
    """
    if j1 <= 0:
        raise ValueError("j1 must be positive")
    line = _line_from_layout(layout)
    if parity is None:
        return _assemble(line, [j1], 'full')[0]
    if parity not in ('odd', 'even'):
        raise ValueError(f"parity must be 'odd', 'even' or None, got {parity!r}")
    return _assemble(line.half(), [j1], parity)[0]


def _det_signs(line: _Line, j1s, system: str):
    sign, logabs = np.linalg.slogdet(_assemble(line, j1s, system))
    return sign, logabs


def _sigma_extremes(line: _Line, j1: float, system: str):
    sv = np.linalg.svd(_assemble(line, [j1], system)[0], compute_uv=False)
    return sv[-1], sv[0]


def _null_vector(line: _Line, j1: float, system: str):
    mat = _assemble(line, [j1], system)[0]
    _, sv, vh = np.linalg.svd(mat)
    return vh[-1], sv[-1], sv[0]


# ----------------------------------------------------------------------
# root location
# ----------------------------------------------------------------------

def _bisect(line: _Line, a: float, b: float, system: str, rtol: float):
    """Bisection on the determinant sign; the bracket must change sign."""
    fa = _det_signs(line, [a], system)[0][0]
    for _ in range(110):
        c = 0.5 * (a + b)
        fc = _det_signs(line, [c], system)[0][0]
        if fc == fa:
            a = c
        elif fc == 0.0:
            return c
        else:
            b = c
        if (b - a) <= rtol * max(abs(a), abs(b)):
            break
    return 0.5 * (a + b)


def _golden_min_sigma(line: _Line, a: float, b: float, system: str, rtol: float):
    """Golden-section minimization of the smallest singular value."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _sigma_extremes(line, c, system)[0]
    fd = _sigma_extremes(line, d, system)[0]
    while (b - a) > rtol * max(abs(a), abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _sigma_extremes(line, c, system)[0]
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _sigma_extremes(line, d, system)[0]
    return 0.5 * (a + b)


def _coeffs_parity(line_full: _Line, coeffs: np.ndarray, j1: float, n_samples: int = 101):
    """Return (parity, odd_residual, even_residual) of a coefficient set."""
    xs = np.linspace(1e-3, 0.499, n_samples)
    xp = _eval_coeffs(line_full, coeffs, j1, xs)
    xm = _eval_coeffs(line_full, coeffs, j1, -xs)
    scale = max(np.max(np.abs(xp)), np.max(np.abs(xm)), 1e-300)
    odd_res = np.max(np.abs(xp + xm)) / scale
    even_res = np.max(np.abs(xp - xm)) / scale
    return ('odd' if odd_res <= even_res else 'even'), odd_res, even_res


def _track_step(line: _Line, system: str, j_prev: float, samples: int,
                rtol: float, want_parity: str | None, line_full: _Line | None):
    """Locate the root of det(j1) nearest j_prev inside a local window."""
    lo, hi = 0.70 * j_prev, 1.25 * j_prev
    trace = None
    for attempt in range(4):
        js = np.linspace(lo, hi, samples)
        sign, logabs = _det_signs(line, js, system)
        trace = (js, sign, logabs)
        idx = np.where(sign[:-1] * sign[1:] < 0)[0]
        candidates = [(js[k], js[k + 1]) for k in idx]
        # samples landing exactly on a root
        for k in np.where(sign == 0)[0]:
            candidates.append((js[k], js[k]))
        if candidates:
            candidates.sort(key=lambda ab: abs(0.5 * (ab[0] + ab[1]) - j_prev))
            for a, b in candidates[:6]:
                root = a if a == b else _bisect(line, a, b, system, rtol)
                if want_parity is not None and system == 'full':
                    vec, _, _ = _null_vector(line, root, system)
                    parity, _, _ = _coeffs_parity(line_full, vec.reshape(-1, 2), root)
                    if parity != want_parity:
                        continue
                return root, trace
        lo, hi = max(1e-9, lo * 0.6), hi * 1.5
    # no sign change anywhere: look for a determinant-magnitude minimum
    js, sign, logabs = trace
    k = int(np.argmin(logabs))
    a = js[max(0, k - 2)]
    b = js[min(samples - 1, k + 2)]
    root = _golden_min_sigma(line, a, b, system, rtol)
    smin, smax = _sigma_extremes(line, root, system)
    if smin < 1e-8 * smax:
        warnings.warn(
            f"no determinant sign change near j1={root:.6g}; accepted a "
            "singular-value minimum (possible double root)",
            DegenerateModeWarning,
        )
        return root, trace
    raise RootNotFoundError(
        f"no mode found near j1={j_prev:.6g} (window {js[0]:.6g}..{js[-1]:.6g})",
        scan_trace=list(zip(js.tolist(), sign.tolist(), logabs.tolist())),
    )


# ----------------------------------------------------------------------
# mode evaluation
# ----------------------------------------------------------------------

def _eval_coeffs(line: _Line, coeffs: np.ndarray, j1: float, x: np.ndarray):
    """Evaluate X(x) (raw amplitude) for per-sector [a, b] coefficients."""
    x = np.asarray(x, dtype=float)
    # boundary-inclusive sector lookup; interior boundaries belong to the left
    idx = np.clip(np.searchsorted(line.xr, x, side='left'), 0, line.nsec - 1)
    q = np.pi * j1 * np.sqrt(line.ratio[idx])
    a = coeffs[idx, 0]
    b = coeffs[idx, 1]
    return a * np.sin(q * x) + b * np.cos(q * x)


def _sector_integrals(q: float, u: float, v: float):
    """Exact integrals of sin^2, cos^2, sin*cos of (q x) over [u, v]."""
    s2 = (math.sin(2 * q * v) - math.sin(2 * q * u)) / (4.0 * q)
    half = 0.5 * (v - u)
    iss = half - s2
    icc = half + s2
    isc = (math.cos(2 * q * u) - math.cos(2 * q * v)) / (4.0 * q)
    return iss, icc, isc


def _mode_integrals(line: _Line, coeffs: np.ndarray, j1: float):
    """Closed-form (mu, kappa); kappa is normalized so omega/omega0 = sqrt(kappa/mu)."""
    mu = 0.0
    kappa = 0.0
    for s in range(line.nsec):
        q = math.pi * j1 * math.sqrt(line.ratio[s])
        iss, icc, isc = _sector_integrals(q, line.xl[s], line.xr[s])
        a, b = coeffs[s]
        mu += a * a * iss + b * b * icc + 2.0 * a * b * isc
        kappa += j1 * j1 * (a * a * icc + b * b * iss - 2.0 * a * b * isc)
    return mu, kappa


def _expand_half(layout: SectorLayout, half: _Line, vec: np.ndarray, parity: str):
    """Map half-line coefficients onto the full sector list."""
    nsec_full = len(layout.sectors)
    center = (nsec_full - 1) // 2
    ch = vec.reshape(half.nsec, 2)
    coeffs = np.zeros((nsec_full, 2))
    coeffs[center:] = ch
    for i in range(1, half.nsec):
        a, b = ch[i]
        coeffs[center - i] = (a, -b) if parity == 'odd' else (-a, b)
    return coeffs


@dataclass(frozen=True, eq=False)
class ModeSolution:
    """One standing-wave mode of the loaded line (normalized units).

    j1, j2:       mode indices of bare and loaded sectors, j2 = j1*sqrt(c'/c)
    omega_r_over_omega0: mode frequency in units of the uniform first harmonic
    coefficients: per-sector [sin, cos] amplitudes (raw solver scale)
    mu, kappa:    Lagrangian normalization constants; omega^2 = (kappa/mu) omega0^2
    parity:       'odd' or 'even' under x -> -x
    gaps_delta:   per-site normalized current gap |X(x_k+w/2)-X(x_k-w/2)|/sqrt(2 mu)
    sigma_min/sigma_max: smallest/largest singular value of the boundary
                  matrix at the root (root quality diagnostic)
    """

    j1: float
    j2: float
    omega_r_over_omega0: float
    coefficients: np.ndarray
    mu: float
    kappa: float
    parity: str
    gaps_delta: np.ndarray
    layout: SectorLayout
    harmonic: int
    sigma_min: float
    sigma_max: float

    @property
    def norm_factor(self) -> float:
        """sqrt(2 mu); X/norm_factor is the normalized current profile."""
        return math.sqrt(2.0 * self.mu)


@dataclass(frozen=True, eq=False)
class FieldAmplitude:
    """Sampled normalized current profile X(x)/sqrt(2 mu); x in meters."""

    x: np.ndarray
    values: np.ndarray


def find_mode(layout: SectorLayout, harmonic: int | None = None, *,
              samples: int = 2000, max_homotopy_steps: int = 50,
              rtol: float = 1e-12) -> ModeSolution:
    """Solve for the mode that continues the requested uniform harmonic.

    The loading ratio is ramped geometrically from 1 to its target in at
    most max_homotopy_steps steps while the determinant root nearest the
    previous step is tracked, so the returned branch is the one that
    connects to harmonic (default N+1) of the uniform resonator.  The
    parity is the one with nonzero current gaps at the qubit sites: odd
    for even harmonics, even for odd harmonics.
    """
    N = layout.qubit_count
    if harmonic is None:
        harmonic = N + 1
    if harmonic < 1 or int(harmonic) != harmonic:
        raise ValueError(f"harmonic must be a positive integer, got {harmonic!r}")
    harmonic = int(harmonic)

    expected_parity = 'odd' if harmonic % 2 == 0 else 'even'
    # odd N: mirror-reduced system; even N: full system, parity checked after
    reduced = (N % 2 == 1)
    system = expected_parity if reduced else 'full'

    full0 = _line_from_layout(layout)
    logr = np.log(full0.ratio)
    span = float(np.max(np.abs(logr)))
    n_steps = 1 if span == 0.0 else min(max_homotopy_steps,
                                        max(1, math.ceil(span / math.log(1.25))))
    j_prev = float(harmonic)
    for k in range(1, n_steps + 1):
        t = k / n_steps
        full_t = full0.with_ratio(np.exp(t * logr))
        line_t = full_t.half() if reduced else full_t
        step_rtol = rtol if k == n_steps else max(rtol, 1e-10)
        j_prev, _ = _track_step(line_t, system, j_prev, samples, step_rtol,
                                expected_parity if not reduced else None,
                                full_t if not reduced else None)

    line = full0.half() if reduced else full0
    vec, smin, smax = _null_vector(line, j_prev, system)
    if reduced:
        coeffs = _expand_half(layout, line, vec, expected_parity)
    else:
        coeffs = vec.reshape(full0.nsec, 2)

    # sign convention: X'(-L/2) > 0
    q0 = math.pi * j_prev * math.sqrt(full0.ratio[0])
    slope = q0 * (coeffs[0, 0] * math.cos(q0 * full0.xl[0])
                  - coeffs[0, 1] * math.sin(q0 * full0.xl[0]))
    if slope < 0.0:
        coeffs = -coeffs

    # scale so that mu = 1/2, i.e. X itself is the normalized current
    mu_raw, _ = _mode_integrals(full0, coeffs, j_prev)
    coeffs = coeffs / math.sqrt(2.0 * mu_raw)

    parity, odd_res, even_res = _coeffs_parity(full0, coeffs, j_prev)
    mu, kappa = _mode_integrals(full0, coeffs, j_prev)
    rho = layout.density_ratio
    wt = layout.cap_line_width / layout.length_L

    gaps = np.empty(N)
    norm = math.sqrt(2.0 * mu)
    for site in range(N):
        xc = layout.qubit_sites[site].center / layout.length_L
        edges = np.array([xc + wt / 2.0, xc - wt / 2.0])
        xp, xm = _eval_coeffs(full0, coeffs, j_prev, edges)
        gaps[site] = abs(xp - xm) / norm

    return ModeSolution(
        j1=j_prev,
        j2=j_prev * math.sqrt(rho),
        omega_r_over_omega0=j_prev,
        coefficients=coeffs,
        mu=mu,
        kappa=kappa,
        parity=parity,
        gaps_delta=gaps,
        layout=layout,
        harmonic=harmonic,
        sigma_min=smin,
        sigma_max=smax,
    )


# ----------------------------------------------------------------------
# derived quantities
# ----------------------------------------------------------------------

def current_profile(mode: ModeSolution, x):
    """Normalized current X(x)/sqrt(2 mu) at position x (meters).

    Accepts scalars or arrays; x must lie in [-L/2, L/2].
    """
    L = mode.layout.length_L
    xa = np.asarray(x, dtype=float)
    tol = 1e-12 * L
    if np.any(xa < -L / 2.0 - tol) or np.any(xa > L / 2.0 + tol):
        raise ValueError("x outside the resonator [-L/2, L/2]")
    line = _line_from_layout(mode.layout)
    vals = _eval_coeffs(line, mode.coefficients, mode.j1, xa / L) / mode.norm_factor
    return float(vals) if np.isscalar(x) else vals


def sample_profile(mode: ModeSolution, points: int = 4001) -> FieldAmplitude:
    """Uniformly sampled normalized current profile across the line."""
    L = mode.layout.length_L
    x = np.linspace(-L / 2.0, L / 2.0, points)
    return FieldAmplitude(x=x, values=current_profile(mode, x))


def normalization_constants(mode: ModeSolution):
    """(mu, kappa) recomputed from the coefficients in closed form."""
    line = _line_from_layout(mode.layout)
    return _mode_integrals(line, mode.coefficients, mode.j1)


def current_gap(mode: ModeSolution, site: int) -> float:
    """Normalized current gap across one qubit site.

    delta_k = |X(x_k + w/2) - X(x_k - w/2)| / sqrt(2 mu); the bias current
    amplitude through that qubit is sqrt(hbar omega_r / (L l)) * delta_k.
    """
    if not 0 <= site < mode.layout.qubit_count:
        raise IndexError(f"site {site} out of range")
    return float(mode.gaps_delta[site])


def mode_condition_single(layout: SectorLayout, j1: float, branch: str = 'minus') -> complex:
    """Closed-form determinant condition for the single-qubit line.

    Returns the complex residual LHS - RHS of the phase-matching condition
    for the odd-parity modes; it vanishes iff j1 is a mode index on the
    selected branch.  The 'minus' branch carries the second-harmonic family
    the qubit couples to; 'plus' holds the remaining odd-parity family.
    """
    if layout.qubit_count != 1:
        raise UnsupportedLayoutError("closed-form condition only covers N=1")
    if branch not in ('minus', 'plus'):
        raise ValueError("branch must be 'minus' or 'plus'")
    rho = layout.density_ratio
    wt = layout.cap_line_width / layout.length_L
    j2 = j1 * math.sqrt(rho)
    theta = (j2 * math.pi / 2.0) * wt
    lhs = cmath.exp(1j * j1 * math.pi / 2.0 * (1.0 - 2.0 * wt))
    num = j2 * math.cos(theta) - 1j * rho * j1 * math.sin(theta)
    den = j2 * math.cos(theta) + 1j * rho * j1 * math.sin(theta)
    rhs = num / den
    if branch == 'minus':
        rhs = -rhs
    return lhs - rhs


def analytic_coefficients_single(layout: SectorLayout, j1: float,
                                 j2: float | None = None) -> np.ndarray:
    """Closed-form sector coefficients for the single-qubit line.

    Builds the five [sin, cos] coefficient pairs from the explicit solution
    of the boundary conditions (fixing the right-end amplitude), rotated to
    a common real phase.  Arbitrary overall scale; serves as an oracle for
    the generic null-space solve.
    """
    if layout.qubit_count != 1:
        raise UnsupportedLayoutError("closed-form coefficients only cover N=1")
    rho = layout.density_ratio
    wt = layout.cap_line_width / layout.length_L
    if j2 is None:
        j2 = j1 * math.sqrt(rho)
    theta = (j2 * math.pi / 2.0) * wt

    a2 = 1.0 + 0.0j
    b2 = -cmath.exp(1j * j2 * math.pi) * a2
    a1 = (-1.0 / j1) * cmath.exp(1j * math.pi / 2.0 * (j2 - j1 * (1.0 - wt))) \
        * (-(j2 / rho) * math.cos(theta) + 1j * j1 * math.sin(theta)) * a2
    b1 = (-1.0 / j1) * cmath.exp(1j * math.pi / 2.0 * (j2 + j1 * (1.0 - wt))) \
        * ((j2 / rho) * math.cos(theta) + 1j * j1 * math.sin(theta)) * a2
    a0 = (rho * j1 / (2.0 * j2 * math.cos(theta))) \
        * (cmath.exp(1j * j1 * math.pi / 2.0 * wt) * a1
           - cmath.exp(-1j * j1 * math.pi / 2.0 * wt) * b1)
    b0 = -a0
    # mirror sectors: the antisymmetric relation maps (A_k, B_k) -> (-B_k, -A_k)
    pairs = [(-b2, -a2), (-b1, -a1), (a0, b0), (a1, b1), (a2, b2)]

    coeffs = np.empty((5, 2), dtype=complex)
    for i, (A, B) in enumerate(pairs):
        coeffs[i, 0] = 1j * (A - B)   # sin amplitude
        coeffs[i, 1] = A + B          # cos amplitude
    flat = coeffs.ravel()
    phase = flat[np.argmax(np.abs(flat))]
    coeffs = coeffs * (abs(phase) / phase)
    resid = np.max(np.abs(coeffs.imag))
    scale = np.max(np.abs(coeffs.real))
    if resid > 1e-8 * scale:
        raise RootNotFoundError(
            f"coefficients not real up to a phase (residual {resid:.2e}); "
            "j1 is probably not a mode index"
        )
    return coeffs.real


def mode_solution_to_dict(mode: ModeSolution, profile_points: int = 4001) -> dict:
    """JSON-friendly summary of a mode, including a sampled profile."""
    amp = sample_profile(mode, profile_points)
    return {
        "j1": mode.j1,
        "j2": mode.j2,
        "omega_r_over_omega0": mode.omega_r_over_omega0,
        "mu": mode.mu,
        "kappa": mode.kappa,
        "parity": mode.parity,
        "harmonic": mode.harmonic,
        "gaps_delta": mode.gaps_delta.tolist(),
        "sigma_min": mode.sigma_min,
        "sigma_max": mode.sigma_max,
        "profile": {
            "x": amp.x.tolist(),
            "current": amp.values.tolist(),
        },
        "sites": [
            {"center": s.center, "switched_on": s.switched_on}
            for s in mode.layout.qubit_sites
        ],
    }
