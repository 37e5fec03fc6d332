"""Device geometry and the piecewise capacitance-density layout.

Conventions:
  - All lengths are in meters, the resonator occupies x in [-L/2, L/2].
  - The capacitance density to ground is c on bare stretches; underneath a
    capacitance line of width w it is c' = (w * d0) / (w0 * d) * c, the
    parallel-plate ratio of line width over loop width times gap shrinkage.
  - For N qubits the line carries N interior capacitance-line sectors of
    width w centered on the interior nodes of the (N+1)th harmonic,
    x_m = -L/2 + m * L/(N+1) for m = 1..N, plus a half-width (w/2) coupling
    capacitor at each end.  That tiles the line into 2N+3 sectors.

A switched-off qubit (dc-SQUID threaded by half a flux quantum) keeps its
capacitance line in the layout, so the mode is unchanged; only the bias
current into that loop, and with it the coupling, is suppressed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import GeometryError

#: Relative tolerance on the sector tiling of [-L/2, L/2].
TILING_RTOL = 1e-12


@dataclass(frozen=True)
class DeviceGeometry:
    """Physical design parameters of the loaded resonator.

    length_L:            resonator length (m)
    qubit_loop_width_w0: qubit loop width (m)
    ground_gap_d0:       resonator to ground-plane distance (m)
    cap_line_width_w:    capacitance line width (m)
    cap_line_gap_d:      capacitance line to resonator distance (m)
    qubit_count_N:       number of qubits (>= 1)
    impedance_Z:         resonator impedance sqrt(l/c) (ohm)
    base_mode_freq:      first harmonic of the uniform resonator (rad/s)
    """

    length_L: float
    qubit_loop_width_w0: float
    ground_gap_d0: float
    cap_line_width_w: float
    cap_line_gap_d: float
    qubit_count_N: int
    impedance_Z: float = 50.0
    base_mode_freq: float = 1.0

    def __post_init__(self):
        positive = {
            "length_L": self.length_L,
            "qubit_loop_width_w0": self.qubit_loop_width_w0,
            "ground_gap_d0": self.ground_gap_d0,
            "cap_line_width_w": self.cap_line_width_w,
            "cap_line_gap_d": self.cap_line_gap_d,
            "impedance_Z": self.impedance_Z,
            "base_mode_freq": self.base_mode_freq,
        }
        for name, value in positive.items():
            if not value > 0.0:
                raise GeometryError(f"{name} must be positive, got {value!r}")
        if int(self.qubit_count_N) != self.qubit_count_N or self.qubit_count_N < 1:
            raise GeometryError(
                f"qubit_count_N must be a positive integer, got {self.qubit_count_N!r}"
            )
        if (self.qubit_count_N + 1) * self.cap_line_width_w >= self.length_L:
            raise GeometryError(
                "capacitance-line sectors overlap: need (N+1)*w < L, got "
                f"(N+1)*w = {(self.qubit_count_N + 1) * self.cap_line_width_w:g} "
                f">= L = {self.length_L:g}"
            )

    @classmethod
    def from_ratios(cls, length_L, w0, d0, w_over_w0, d0_over_d,
                    qubit_count_N, impedance_Z=50.0, base_mode_freq=1.0):
        """Build from the design ratios w/w0 and d0/d used throughout."""
        return cls(
            length_L=length_L,
            qubit_loop_width_w0=w0,
            ground_gap_d0=d0,
            cap_line_width_w=w_over_w0 * w0,
            cap_line_gap_d=d0 / d0_over_d,
            qubit_count_N=int(qubit_count_N),
            impedance_Z=impedance_Z,
            base_mode_freq=base_mode_freq,
        )

    @property
    def density_ratio(self) -> float:
        """c'/c = (w * d0) / (w0 * d), parallel-plate model with no fringing."""
        return (self.cap_line_width_w * self.ground_gap_d0) / (
            self.qubit_loop_width_w0 * self.cap_line_gap_d
        )

    @property
    def w_over_w0(self) -> float:
        return self.cap_line_width_w / self.qubit_loop_width_w0

    @property
    def d0_over_d(self) -> float:
        return self.ground_gap_d0 / self.cap_line_gap_d


@dataclass(frozen=True)
class Sector:
    """One constant-density stretch of the line, x_left < x_right (m)."""

    x_left: float
    x_right: float
    density_ratio: float  # c_i / c

    @property
    def width(self) -> float:
        return self.x_right - self.x_left


@dataclass(frozen=True)
class QubitSite:
    """Qubit position (sector center, m) and its dc-SQUID switch state."""

    center: float
    switched_on: bool = True


@dataclass(frozen=True)
class SectorLayout:
    """Piecewise capacitance-density layout of the loaded resonator.

    sectors alternate bare (ratio 1) and loaded (ratio c'/c) stretches and
    tile [-L/2, L/2]; qubit_sites are the centers of the interior loaded
    sectors, ordered left to right.
    """

    sectors: tuple[Sector, ...]
    qubit_sites: tuple[QubitSite, ...]
    length_L: float

    def __post_init__(self):
        if not self.sectors:
            raise GeometryError("layout needs at least one sector")
        tol = TILING_RTOL * self.length_L
        if abs(self.sectors[0].x_left + self.length_L / 2.0) > tol:
            raise GeometryError("sectors must start at -L/2")
        if abs(self.sectors[-1].x_right - self.length_L / 2.0) > tol:
            raise GeometryError("sectors must end at +L/2")
        for left, right in zip(self.sectors, self.sectors[1:]):
            if abs(left.x_right - right.x_left) > tol:
                raise GeometryError("sectors must tile the line without gaps")
            if not right.x_right > right.x_left:
                raise GeometryError("sector boundaries must be strictly increasing")
        if not self.sectors[0].x_right > self.sectors[0].x_left:
            raise GeometryError("sector boundaries must be strictly increasing")

    @property
    def qubit_count(self) -> int:
        return len(self.qubit_sites)

    @property
    def density_ratio(self) -> float:
        """c'/c of the loaded sectors (1.0 for a uniform line)."""
        return max(s.density_ratio for s in self.sectors)

    @property
    def cap_line_width(self) -> float:
        """Width w of the interior capacitance-line sectors (m)."""
        # end sectors are half width by construction
        return 2.0 * self.sectors[0].width

    def site_sector_index(self, site: int) -> int:
        """Index into `sectors` of the loaded sector under qubit `site`."""
        if not 0 <= site < self.qubit_count:
            raise IndexError(f"site index {site} out of range for N={self.qubit_count}")
        return 2 * (site + 1)


def build_layout(geom: DeviceGeometry) -> SectorLayout:
    """Tile the resonator into 2N+3 alternating bare/loaded sectors.

    Qubits sit at the N interior nodes of the (N+1)th uniform harmonic,
    x_m = -L/2 + m*L/(N+1); each carries a width-w loaded sector, and a
    half-width loaded sector caps each end of the line.
    """
    L = geom.length_L
    w = geom.cap_line_width_w
    N = geom.qubit_count_N
    rho = geom.density_ratio
    period = L / (N + 1)

    sectors = [Sector(-L / 2.0, -L / 2.0 + w / 2.0, rho)]
    sites = []
    for m in range(1, N + 1):
        xm = -L / 2.0 + m * period
        sectors.append(Sector(sectors[-1].x_right, xm - w / 2.0, 1.0))
        sectors.append(Sector(xm - w / 2.0, xm + w / 2.0, rho))
        sites.append(QubitSite(center=xm, switched_on=True))
    sectors.append(Sector(sectors[-1].x_right, L / 2.0 - w / 2.0, 1.0))
    sectors.append(Sector(L / 2.0 - w / 2.0, L / 2.0, rho))

    return SectorLayout(sectors=tuple(sectors), qubit_sites=tuple(sites), length_L=L)


def set_switch(layout: SectorLayout, site_index: int, on: bool) -> SectorLayout:
    """Return a copy of the layout with one qubit's dc-SQUID switch set.

    The capacitive loading of the sector is retained, so the mode solution
    is unaffected; coupling computations report g = 0 for the off site.
    """
    if not 0 <= site_index < layout.qubit_count:
        raise IndexError(
            f"site index {site_index} out of range for N={layout.qubit_count}"
        )
    sites = list(layout.qubit_sites)
    sites[site_index] = replace(sites[site_index], switched_on=bool(on))
    return replace(layout, qubit_sites=tuple(sites))
