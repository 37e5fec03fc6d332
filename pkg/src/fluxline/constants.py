"""Physical constants used to convert normalized couplings to lab units.

CODATA values are taken from scipy.constants.  The junction phase alpha is
fixed at pi/3: with three identical junctions and half a flux quantum
threading the loop, the phase differences are +-pi/3 and the two side
junctions cancel each other in the coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import scipy.constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants plus the fixed junction phase.

    planck_h:           J s
    electron_charge_e:  C
    flux_quantum_Phi0:  Wb, h / 2e
    junction_phase_alpha: rad
    """

    planck_h: float = _sc.h
    electron_charge_e: float = _sc.e
    flux_quantum_Phi0: float = field(default=_sc.h / (2.0 * _sc.e))
    junction_phase_alpha: float = math.pi / 3.0

    def __post_init__(self):
        expected = self.planck_h / (2.0 * self.electron_charge_e)
        if abs(self.flux_quantum_Phi0 - expected) > 1e-12 * expected:
            raise ValueError("flux_quantum_Phi0 must equal h/(2e)")
        if abs(self.junction_phase_alpha - math.pi / 3.0) > 1e-12:
            raise ValueError("junction_phase_alpha is fixed to pi/3")

    @property
    def hbar(self) -> float:
        return self.planck_h / (2.0 * math.pi)


CODATA = PhysicalConstants()
