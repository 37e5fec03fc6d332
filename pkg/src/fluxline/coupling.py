"""Qubit-resonator couplings derived from the mode solution.

The resonator current jump across a qubit's capacitance line drives a bias
current of amplitude I0 = sqrt(hbar omega_r / (L l)) * delta through the
loop, and the qubit couples with strength g = (Phi0 / 2 pi) * alpha * I0.
Eliminating the inductance density via l = Z pi / (omega0 L) gives the
dimensionless form used throughout:

    g / (hbar omega0) = (1/3) * Phi0 / sqrt(h Z) * sqrt(omega_r/omega0) * delta/sqrt(2)

Both routes are implemented and must agree; tests hold them to 1e-10.

Frequencies are angular (rad/s) wherever physical units appear.  The
Jaynes-Cummings pieces (RWA blocks, dispersive shift, truncated-Fock
Hamiltonian) take frequencies in any consistent unit system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA, PhysicalConstants
from .geometry import SectorLayout
from .mode_solver import ModeSolution

#: conventional ultrastrong-coupling threshold, g >= this fraction of hbar*omega_a
ULTRASTRONG_FRACTION = 0.1
#: default stand-in for the loss scale in the strong-coupling test, as a
#: fraction of omega_a; real devices should pass their linewidth instead
DEFAULT_LOSS_FRACTION = 1e-3


def inductance_density(Z: float, omega0: float, L: float) -> float:
    """Inductance per unit length (H/m) from impedance and base frequency.

    Z = sqrt(l/c) and omega0 = pi / (sqrt(l c) L) combine to l = Z pi / (omega0 L).
    """
    return Z * math.pi / (omega0 * L)


def bias_current_from_gap(delta: float, omega_r: float, L: float, l: float,
                          constants: PhysicalConstants = CODATA) -> float:
    """Bias-current amplitude I0 = sqrt(hbar omega_r / (L l)) * delta, in A."""
    return math.sqrt(constants.hbar * omega_r / (L * l)) * delta


def g_from_gap(delta: float, omega_ratio: float, Z: float,
               constants: PhysicalConstants = CODATA) -> float:
    """Dimensionless coupling g / (hbar omega0) for a given current gap.

    omega_ratio is omega_r / omega0 of the solved mode.
    """
    return (constants.flux_quantum_Phi0 / (3.0 * math.sqrt(constants.planck_h * Z))
            * math.sqrt(omega_ratio) * delta / math.sqrt(2.0))


def bias_current_amplitude(mode: ModeSolution, site: int, *, L: float,
                           omega0: float, Z: float | None = None,
                           l: float | None = None,
                           constants: PhysicalConstants = CODATA) -> float:
    """Bias-current amplitude (A) through one qubit site.

    Supply the line inductance density l directly or let it be derived
    from (Z, omega0, L).  A switched-off site returns 0.
    """
    if l is None:
        if Z is None:
            raise ValueError("need either l or Z to fix the inductance density")
        l = inductance_density(Z, omega0, L)
    if not mode.layout.qubit_sites[site].switched_on:
        return 0.0
    delta = mode.gaps_delta[site]
    return bias_current_from_gap(delta, mode.omega_r_over_omega0 * omega0, L, l,
                                 constants)


def coupling_g(mode: ModeSolution, site: int, Z: float,
               constants: PhysicalConstants = CODATA) -> float:
    """g / (hbar omega0) for one qubit site; 0 if its switch is off."""
    if not mode.layout.qubit_sites[site].switched_on:
        return 0.0
    return g_from_gap(mode.gaps_delta[site], mode.omega_r_over_omega0, Z, constants)


def classify_regime(g: float, omega_a: float, loss_scale: float | None = None) -> str:
    """'weak' / 'strong' / 'ultrastrong' for coupling g (units of hbar*omega).

    Ultrastrong means g >= 0.1 hbar omega_a (community convention); strong
    means g exceeds the loss scale, which defaults to a placeholder
    fraction of omega_a when no linewidth is given.
    """
    if loss_scale is None:
        loss_scale = DEFAULT_LOSS_FRACTION * omega_a
    if g >= ULTRASTRONG_FRACTION * omega_a:
        return "ultrastrong"
    if g >= loss_scale:
        return "strong"
    return "weak"


@dataclass(frozen=True)
class CouplingResult:
    """Per-site coupling report (physical units where stated).

    bias_current_I0:     A (None when no physical scale was supplied)
    g_over_hbar_omega0:  dimensionless coupling
    chi:                 dispersive shift g^2/Delta (rad/s), None at Delta = 0
                         or when omega_a was not supplied
    regime:              'weak' | 'strong' | 'ultrastrong'
    """

    bias_current_I0: float | None
    g_over_hbar_omega0: float
    chi: float | None
    regime: str


def site_coupling(mode: ModeSolution, site: int, *, Z: float, omega0: float,
                  L: float, omega_a: float | None = None,
                  loss_scale: float | None = None,
                  constants: PhysicalConstants = CODATA) -> CouplingResult:
    """Assemble the full coupling report for one site."""
    g_norm = coupling_g(mode, site, Z, constants)
    i0 = bias_current_amplitude(mode, site, L=L, omega0=omega0, Z=Z,
                                constants=constants)
    chi = None
    regime = "weak"
    if omega_a is not None:
        g_phys = g_norm * omega0          # g / hbar, rad/s
        delta_ar = omega_a - mode.omega_r_over_omega0 * omega0
        if delta_ar != 0.0:
            chi = g_phys ** 2 / delta_ar
        regime = classify_regime(g_phys, omega_a, loss_scale)
    return CouplingResult(bias_current_I0=i0, g_over_hbar_omega0=g_norm,
                          chi=chi, regime=regime)


# ----------------------------------------------------------------------
# Jaynes-Cummings pieces
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JcBlock:
    """One photon-number block of the RWA Hamiltonian.

    Basis (|n+1, down>, |n, up>); Delta = omega_a - omega_r and Delta_r is
    the resonator-drive detuning (0 in the undriven frame).
    """

    n: int
    Delta: float
    g: float
    Delta_r: float
    matrix: np.ndarray

    def numeric_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def closed_form_eigenvalues(self) -> np.ndarray:
        """mean +- sqrt((Delta/2)^2 + (n+1) g^2), ascending."""
        mean = (2 * self.n + 1) * self.Delta_r / 2.0
        split = math.sqrt((self.Delta / 2.0) ** 2 + (self.n + 1) * self.g ** 2)
        return np.array([mean - split, mean + split])


def jc_block(n: int, Delta: float, g: float, Delta_r: float = 0.0) -> JcBlock:
    """RWA block coupling |n+1, down> and |n, up>."""
    if n < 0:
        raise ValueError("photon number n must be >= 0")
    root = math.sqrt(n + 1.0)
    delta_a = Delta + Delta_r
    mat = np.array([
        [(n + 1) * Delta_r - delta_a / 2.0, -1j * g * root],
        [1j * g * root, n * Delta_r + delta_a / 2.0],
    ])
    return JcBlock(n=n, Delta=Delta, g=g, Delta_r=Delta_r, matrix=mat)


def dispersive_shift(g: float, Delta: float) -> float:
    """chi = g^2 / Delta, valid in the dispersive regime |Delta| >> g."""
    if Delta == 0.0:
        raise ZeroDivisionError(
            "dispersive shift diverges at Delta = 0; diagonalize the exact "
            "block instead (jc_block)"
        )
    return g * g / Delta


def _destroy(n_levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_levels)), 1)


def full_jc_hamiltonian(n_max: int, omega_r: float, omega_a: float,
                        g: float) -> np.ndarray:
    """Truncated-Fock-space matrix of the current-mode coupling Hamiltonian.

    H = omega_r a+a + (omega_a/2) sigma_z + i g sigma_x (a - a+), hbar = 1,
    on photon numbers 0..n_max; dimension 2 (n_max + 1).  Unlike the RWA it
    keeps the counter-rotating terms.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2 for a meaningful truncation")
    n_levels = n_max + 1
    a = _destroy(n_levels)
    eye_ph = np.eye(n_levels)
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = (np.kron(omega_r * (a.conj().T @ a), np.eye(2))
         + np.kron(eye_ph, omega_a / 2.0 * sz)
         + 1j * g * np.kron(a - a.conj().T, sx))
    return h


@dataclass(frozen=True)
class DriveParams:
    """External drive parameters in the frame rotating at omega_d.

    drive_amplitude_eps: rad/s
    drive_freq_omega_d:  rad/s
    detuning_Delta_r:    omega_r - omega_d
    detuning_Delta_a:    omega_a - omega_d
    rabi_Omega_R:        rad/s, kept as a free input
    """

    drive_amplitude_eps: float
    drive_freq_omega_d: float
    detuning_Delta_r: float
    detuning_Delta_a: float
    rabi_Omega_R: float = 0.0

    @classmethod
    def from_frequencies(cls, eps: float, omega_d: float, omega_r: float,
                         omega_a: float, Omega_R: float = 0.0) -> "DriveParams":
        """Build with the detunings computed, never stored inconsistently."""
        return cls(
            drive_amplitude_eps=eps,
            drive_freq_omega_d=omega_d,
            detuning_Delta_r=omega_r - omega_d,
            detuning_Delta_a=omega_a - omega_d,
            rabi_Omega_R=Omega_R,
        )

    def check_consistent(self, omega_r: float, omega_a: float,
                         rtol: float = 1e-12) -> None:
        scale = max(abs(omega_r), abs(omega_a), abs(self.drive_freq_omega_d), 1.0)
        if abs(self.detuning_Delta_r - (omega_r - self.drive_freq_omega_d)) > rtol * scale:
            raise ValueError("detuning_Delta_r inconsistent with omega_r - omega_d")
        if abs(self.detuning_Delta_a - (omega_a - self.drive_freq_omega_d)) > rtol * scale:
            raise ValueError("detuning_Delta_a inconsistent with omega_a - omega_d")


def dispersive_driven_hamiltonian(params: DriveParams, chi: float,
                                  n_max: int) -> np.ndarray:
    """Matrix of the dispersive-limit driven-frame Hamiltonian.

    H = Delta_r a+a + (Delta_a/2) sigma_z + chi (a+a + 1/2) sigma_z
        + (Omega_R/2) sigma_y, truncated at n_max photons.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    n_levels = n_max + 1
    num = np.diag(np.arange(n_levels, dtype=float))
    eye_ph = np.eye(n_levels)
    sz = np.diag([1.0, -1.0])
    sy = np.array([[0.0, -1j], [1j, 0.0]])
    return (np.kron(params.detuning_Delta_r * num, np.eye(2))
            + np.kron(eye_ph, params.detuning_Delta_a / 2.0 * sz)
            + chi * np.kron(num + 0.5 * eye_ph, sz)
            + np.kron(eye_ph, params.rabi_Omega_R / 2.0 * sy))
