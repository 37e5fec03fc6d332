"""Exact two-qubit exchange coupling through the shared resonator mode.

For two nominally identical qubits (equal frequency and coupling) the
lowest excitation block, spanned by {|1 down down>, |0 up down>,
|0 down up>}, reads

        [ -Delta   -i g   -i g ]
        [   i g      0      0  ]
        [   i g      0      0  ]

with Delta = omega_a - omega_r and energies measured from the one-photon
state.  A one-parameter unitary rotation by the mixing angle phi solving
tan(2 phi) = 2 sqrt(2) g / Delta decouples the photon and leaves an
xy-type exchange J = (g/sqrt(2)) tan(phi) between the two single-excitation
qubit states, equivalently

        J = sign(Delta) g^2 / ( sqrt((Delta/2)^2 + 2 g^2) + |Delta|/2 ).

J > 0 is antiferromagnetic, J < 0 ferromagnetic; the sign flips with
Delta, and |J| -> g/sqrt(2) at resonance.  All operations here are pure
and unit-agnostic (Delta, g, J share whatever unit is supplied).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DispersiveLimitWarning

#: g/|Delta| below which the physics is perturbative, above 1/this saturated
PERTURBATIVE_RATIO = 0.1


@dataclass(frozen=True)
class TwoQubitResult:
    """Summary of the exact two-qubit analysis for one (Delta, g) point."""

    Delta: float
    g: float
    phi: float
    J: float
    regime: str        # 'perturbative' | 'resonant' | 'saturated'
    sign_label: str    # 'ferromagnetic' | 'antiferromagnetic' | 'resonant'


def two_qubit_block(Delta: float, g: float) -> np.ndarray:
    """Lowest single-excitation block for identical qubits.

    Basis (|1 down down>, |0 up down>, |0 down up>).  Identical qubit
    frequencies and couplings are assumed; distinct qubits are only served
    by the perturbative dispersive_j.
    """
    return np.array([
        [-Delta, -1j * g, -1j * g],
        [1j * g, 0.0, 0.0],
        [1j * g, 0.0, 0.0],
    ])


def transformation_u2(phi: float) -> np.ndarray:
    """Unitary decoupling rotation on the lowest block, angle phi."""
    c, s = math.cos(phi), math.sin(phi)
    ch2 = math.cos(phi / 2.0) ** 2
    sh2 = math.sin(phi / 2.0) ** 2
    off = -1j * s / math.sqrt(2.0)
    return np.array([
        [c, off, off],
        [off, ch2, -sh2],
        [off, -sh2, ch2],
    ])


def solve_phi(Delta: float, g: float) -> float:
    """Mixing angle: principal solution of tan(2 phi) = 2 sqrt(2) g / Delta.

    For g > 0 the branch is folded into (-pi/4, pi/4], so phi has the sign
    of Delta, phi -> sqrt(2) g / Delta for large |Delta|, and phi = pi/4
    exactly on resonance.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    if g == 0.0 and Delta == 0.0:
        raise ValueError("mixing angle undefined at g = 0, Delta = 0")
    phi = 0.5 * math.atan2(2.0 * math.sqrt(2.0) * g, Delta)
    if phi > math.pi / 4.0:
        phi -= math.pi / 2.0          # tan(2 phi) has period pi/2 in phi
    return phi


def transformed_block(Delta: float, g: float) -> np.ndarray:
    """Numerically conjugated block U2+ H U2 at the decoupling angle.

    The photon row/column off-diagonals vanish; the remaining qubit block
    is J (identity + sigma_x) with J = (g/sqrt(2)) tan(phi), and the photon
    entry is -Delta - sqrt(2) g tan(phi).
    """
    u = transformation_u2(solve_phi(Delta, g))
    h = two_qubit_block(Delta, g)
    return u.conj().T @ h @ u


def j_exact(Delta: float, g: float) -> float:
    """Exact xy exchange strength, valid at any g/Delta.

    J = sign(Delta) g^2 / (sqrt((Delta/2)^2 + 2 g^2) + |Delta|/2); equals
    (g/sqrt(2)) tan(phi).  On resonance (Delta = 0) the limit +g/sqrt(2)
    from Delta -> 0+ is returned.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    if g == 0.0:
        return 0.0
    denom = math.sqrt((Delta / 2.0) ** 2 + 2.0 * g * g) + abs(Delta) / 2.0
    mag = g * g / denom
    return mag if Delta >= 0.0 else -mag


def dispersive_j(g1: float, g2: float, Delta1: float, Delta2: float) -> float:
    """Perturbative exchange (1/2)(1/Delta1 + 1/Delta2) g1 g2.

    Serves non-identical qubits; only trustworthy for g_k << |Delta_k|.
    Emits a warning when either ratio exceeds 0.1.
    """
    if Delta1 == 0.0 or Delta2 == 0.0:
        raise ZeroDivisionError("dispersive exchange diverges at Delta = 0")
    worst = max(abs(g1 / Delta1), abs(g2 / Delta2))
    if worst > PERTURBATIVE_RATIO:
        warnings.warn(
            f"g/|Delta| = {worst:.3g} is outside the dispersive regime; "
            "use the exact j_exact",
            DispersiveLimitWarning,
        )
    return 0.5 * (1.0 / Delta1 + 1.0 / Delta2) * g1 * g2


def classify_interaction(J: float, Delta: float) -> str:
    """Sign label of the exchange: antiferromagnetic for J > 0,
    ferromagnetic for J < 0, 'resonant' on the Delta = 0 boundary."""
    if Delta == 0.0:
        return "resonant"
    return "antiferromagnetic" if J > 0.0 else "ferromagnetic"


def coupling_regime(Delta: float, g: float) -> str:
    """Coarse regime by g/|Delta|: perturbative below 0.1, saturated
    above 10, resonant in between (and at Delta = 0)."""
    if g == 0.0:
        return "perturbative"
    if Delta == 0.0:
        return "saturated"
    ratio = g / abs(Delta)
    if ratio <= PERTURBATIVE_RATIO:
        return "perturbative"
    if ratio >= 1.0 / PERTURBATIVE_RATIO:
        return "saturated"
    return "resonant"


def analyze_pair(Delta: float, g: float) -> TwoQubitResult:
    """Full exact analysis for one detuning/coupling point."""
    j = j_exact(Delta, g)
    phi = solve_phi(Delta, g) if (g > 0.0 or Delta != 0.0) else 0.0
    return TwoQubitResult(
        Delta=Delta,
        g=g,
        phi=phi,
        J=j,
        regime=coupling_regime(Delta, g),
        sign_label=classify_interaction(j, Delta),
    )
