"""Device-level electronic structure.

Computes field-displaced single-particle ground states, direct Coulomb
integrals between carrier charge densities, ground-exciton energies, and
inter-dot biexcitonic shifts for a stack of quantum dots.

Model assumptions: parabolic in-plane confinement restricted to its ground
state, infinite-square-well confinement along the growth (z) axis, static
in-plane field along +x, direct Coulomb terms only.  Inter-dot barriers are
wide enough that single-particle tunneling is neglected, so z supports of
different dots never overlap.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx, j0

from . import units
from .errors import ConvergenceError, InvalidPairError, InvalidParameterError
from .model import ExcitonRegister


@dataclass(frozen=True)
class MaterialParams:
    """Bulk material constants; masses in units of the free-electron mass."""

    electron_effective_mass: float
    hole_effective_mass: float
    relative_permittivity: float
    band_gap_ev: float

    def __post_init__(self):
        if self.electron_effective_mass <= 0 or self.hole_effective_mass <= 0:
            raise InvalidParameterError("effective masses must be positive")
        if self.relative_permittivity < 1:
            raise InvalidParameterError("relative permittivity must be >= 1")
        if self.band_gap_ev <= 0:
            raise InvalidParameterError("band gap must be positive")


@dataclass(frozen=True)
class DotGeometry:
    """One dot: in-plane trap energies (meV) and its z square well (nm)."""

    confinement_energy_e_mev: float
    confinement_energy_h_mev: float
    well_width_nm: float
    z_center_nm: float

    def __post_init__(self):
        if self.confinement_energy_e_mev <= 0 or self.confinement_energy_h_mev <= 0:
            raise InvalidParameterError("confinement energies must be positive")
        if self.well_width_nm <= 0:
            raise InvalidParameterError("well width must be positive")


@dataclass(frozen=True)
class DeviceStructure:
    """Dot stack, inter-dot barriers, material, and applied in-plane field."""

    dots: tuple[DotGeometry, ...]
    barrier_widths_nm: tuple[float, ...]
    material: MaterialParams
    field_kv_cm: float

    def __post_init__(self):
        dots = tuple(self.dots)
        barriers = tuple(float(b) for b in self.barrier_widths_nm)
        object.__setattr__(self, "dots", dots)
        object.__setattr__(self, "barrier_widths_nm", barriers)
        if len(barriers) != max(len(dots) - 1, 0):
            raise InvalidParameterError(
                f"{len(dots)} dots require {len(dots) - 1} barrier widths"
            )
        if any(b <= 0 for b in barriers):
            raise InvalidParameterError("barrier widths must be positive")
        if self.field_kv_cm < 0:
            raise InvalidParameterError("field must be non-negative")
        for i in range(len(dots) - 1):
            lo, hi = dots[i], dots[i + 1]
            if hi.z_center_nm <= lo.z_center_nm:
                raise InvalidParameterError("dots must be ordered by z_center")
            spacing = hi.z_center_nm - lo.z_center_nm
            required = 0.5 * (lo.well_width_nm + hi.well_width_nm) + barriers[i]
            if spacing < required - 1e-9:
                raise InvalidParameterError(
                    f"dots {i} and {i + 1} overlap: spacing {spacing} nm < "
                    f"half-widths plus barrier {required} nm"
                )

    @property
    def n_dots(self) -> int:
        return len(self.dots)


@dataclass(frozen=True)
class ZProfile:
    """Analytic descriptor of a normalized 1-D probability density over z.

    kind 'infinite-well': ground state of an infinite square well, width_nm
    is the full well width.  kind 'gaussian': width_nm is the standard
    deviation (used for closed-form cross checks).
    """

    kind: str
    center_nm: float
    width_nm: float

    def __post_init__(self):
        if self.kind not in ("infinite-well", "gaussian"):
            raise InvalidParameterError(f"unknown z-profile kind {self.kind!r}")
        if self.width_nm <= 0:
            raise InvalidParameterError("z-profile width must be positive")

    def density(self, z) -> np.ndarray:
        """Probability density evaluated at z (nm)."""
        z = np.asarray(z, dtype=float)
        u = z - self.center_nm
        if self.kind == "gaussian":
            s = self.width_nm
            return np.exp(-0.5 * (u / s) ** 2) / (s * math.sqrt(2 * math.pi))
        w = self.width_nm
        inside = np.abs(u) <= w / 2
        return np.where(inside, (2.0 / w) * np.cos(math.pi * u / w) ** 2, 0.0)

    @property
    def support(self) -> tuple[float, float]:
        half = 4.0 * self.width_nm if self.kind == "gaussian" else 0.5 * self.width_nm
        return (self.center_nm - half, self.center_nm + half)


@dataclass(frozen=True)
class InPlaneGaussian:
    """Isotropic in-plane Gaussian density: center (nm) and per-axis std."""

    center_nm: tuple[float, float]
    std_nm: float

    def __post_init__(self):
        if self.std_nm <= 0:
            raise InvalidParameterError("in-plane std must be positive")


@dataclass(frozen=True)
class ChargeDensity:
    """Separable carrier density: in-plane Gaussian times a z profile."""

    charge: int
    inplane_center_nm: tuple[float, float]
    inplane_std_nm: float
    z_profile: ZProfile

    def __post_init__(self):
        if self.charge not in (-1, 1):
            raise InvalidParameterError("charge must be +1 or -1 (elementary units)")
        if self.inplane_std_nm <= 0:
            raise InvalidParameterError("in-plane std must be positive")
        object.__setattr__(
            self, "inplane_center_nm", tuple(float(c) for c in self.inplane_center_nm)
        )


def inplane_ground_state(
    material: MaterialParams,
    confinement_energy_mev: float,
    charge_sign: int,
    field_kv_cm: float,
) -> InPlaneGaussian:
    """Displaced harmonic ground state of a carrier in the in-plane trap.

    The static field (along +x) shifts the trap minimum by
    d = q e F / (m omega^2); holes (+1) move along +x, electrons (-1)
    opposite.  The returned std is the per-axis standard deviation of the
    ground-state probability density, sqrt(hbar / (2 m omega)).
    """
    if confinement_energy_mev <= 0:
        raise InvalidParameterError("confinement energy must be positive")
    if charge_sign not in (-1, 1):
        raise InvalidParameterError("charge sign must be +1 or -1")
    if field_kv_cm < 0:
        raise InvalidParameterError("field must be non-negative")
    mass = (
        material.hole_effective_mass
        if charge_sign > 0
        else material.electron_effective_mass
    )
    h2m = units.hbar_sq_over_m(mass)  # meV nm^2
    e_field = units.EFIELD_MEV_PER_NM_PER_KV_CM * field_kv_cm  # meV / nm
    displacement = charge_sign * e_field * h2m / confinement_energy_mev**2
    std = math.sqrt(h2m / (2.0 * confinement_energy_mev))
    return InPlaneGaussian(center_nm=(displacement, 0.0), std_nm=std)


def well_ground_state(geometry: DotGeometry) -> ZProfile:
    """Ground-state z density of the dot's infinite square well."""
    return ZProfile(
        kind="infinite-well",
        center_nm=geometry.z_center_nm,
        width_nm=geometry.well_width_nm,
    )


def carrier_density(
    structure: DeviceStructure, dot_index: int, species: str
) -> ChargeDensity:
    """Full 3-D density of the electron ('e') or hole ('h') in one dot."""
    if species not in ("e", "h"):
        raise InvalidParameterError(f"species must be 'e' or 'h', got {species!r}")
    dot = structure.dots[dot_index]
    charge = -1 if species == "e" else 1
    conf = (
        dot.confinement_energy_e_mev
        if species == "e"
        else dot.confinement_energy_h_mev
    )
    plane = inplane_ground_state(
        structure.material, conf, charge, structure.field_kv_cm
    )
    return ChargeDensity(
        charge=charge,
        inplane_center_nm=plane.center_nm,
        inplane_std_nm=plane.std_nm,
        z_profile=well_ground_state(dot),
    )


# ---------------------------------------------------------------------------
# Coulomb integrals
#
# For separable densities (in-plane Gaussian x z profile) the 6-D direct
# integral reduces to a single radial Fourier integral,
#
#   J = C q1 q2 / eps_r * int_0^inf dk exp(-k^2 sbar^2/2) J0(k s) Z(k),
#
# where sbar^2 is the summed in-plane variance, s the in-plane center offset
# and Z(k) = <exp(-k |z1 - z2|)> over the two z profiles, which is analytic
# for every pairing used here.
# ---------------------------------------------------------------------------


def _gaussian_pair_kernel(mu: float, var: float) -> Callable[[np.ndarray], np.ndarray]:
    """Z(k) for z1 - z2 ~ Normal(mu, var)."""
    amu = abs(mu)
    sq2v = math.sqrt(2.0 * var)

    def kernel(k):
        k = np.asarray(k, dtype=float)
        arg_minus = (k * var - amu) / sq2v
        arg_plus = (k * var + amu) / sq2v
        pref = math.exp(-amu * amu / (2.0 * var)) if amu * amu / (2 * var) < 700 else 0.0
        with np.errstate(over="ignore", invalid="ignore"):
            direct = 0.5 * pref * erfcx(arg_minus)
            # complementary form for strongly negative arguments, where
            # erfcx overflows: uses Phi(x) = 1 - Phi(-x)
            expo = np.where(arg_minus <= -20.0, 0.5 * k * k * var - k * amu, -np.inf)
            comp = np.exp(expo) - 0.5 * pref * erfcx(np.abs(arg_minus))
            plus_side = np.where(arg_minus <= -20.0, comp, direct)
        minus_side = 0.5 * pref * erfcx(arg_plus)
        return plus_side + minus_side

    return kernel


def _well_factor(k: np.ndarray, width: float) -> np.ndarray:
    """(1 - e^{-kW}) b^2 / (W k (k^2 + b^2)) with b = 2 pi / W; -> 1 at k=0."""
    b = 2.0 * math.pi / width
    with np.errstate(divide="ignore", invalid="ignore"):
        val = -np.expm1(-k * width) * b * b / (width * k * (k * k + b * b))
    return np.where(k == 0.0, 1.0, val)


def _disjoint_wells_kernel(
    w1: float, w2: float, dz: float
) -> Callable[[np.ndarray], np.ndarray]:
    """Z(k) for two non-overlapping wells with center distance dz."""
    gap = abs(dz) - 0.5 * (w1 + w2)

    def kernel(k):
        k = np.asarray(k, dtype=float)
        return np.exp(-k * gap) * _well_factor(k, w1) * _well_factor(k, w2)

    return kernel


def _identical_wells_kernel(width: float) -> Callable[[np.ndarray], np.ndarray]:
    """Z(k) for two carriers sharing the same well.

    Uses the closed-form autocorrelation of the cos^2 ground-state density,
    c(h) = [(W-h)(1 + cos(bh)/2) + 3 sin(bh)/(2b)] / W^2 on 0 <= h <= W.
    """
    w = width
    b = 2.0 * math.pi / w

    def kernel(k):
        k = np.asarray(k, dtype=float)
        core = k * w + np.expm1(-k * w)  # kW - 1 + e^{-kW}, stable near 0
        alpha = k - 1j * b
        i2 = np.real((core - 1j * b * w) / (alpha * alpha))
        i3 = 1.5 * (-np.expm1(-k * w)) / (k * k + b * b)
        with np.errstate(divide="ignore", invalid="ignore"):
            i1 = core / (k * k)
        i1 = np.where(k * w < 1e-6, w * w / 2.0 - k * w**3 / 6.0, i1)
        return (2.0 / (w * w)) * (i1 + 0.5 * i2 + i3)

    return kernel


def _z_pair_kernel(p1: ZProfile, p2: ZProfile) -> Callable[[np.ndarray], np.ndarray]:
    if p1.kind == "gaussian" and p2.kind == "gaussian":
        mu = p1.center_nm - p2.center_nm
        var = p1.width_nm**2 + p2.width_nm**2
        return _gaussian_pair_kernel(mu, var)
    if p1.kind == "infinite-well" and p2.kind == "infinite-well":
        dz = abs(p1.center_nm - p2.center_nm)
        if dz == 0.0 and p1.width_nm == p2.width_nm:
            return _identical_wells_kernel(p1.width_nm)
        if dz >= 0.5 * (p1.width_nm + p2.width_nm):
            return _disjoint_wells_kernel(p1.width_nm, p2.width_nm, dz)
        raise InvalidParameterError(
            "partially overlapping square wells are not supported; wells must "
            "either coincide or have disjoint supports"
        )
    raise InvalidParameterError(
        f"unsupported z-profile combination ({p1.kind}, {p2.kind})"
    )


DEFAULT_COULOMB_REL_TOL = 1e-6


def coulomb_integral(
    a: ChargeDensity,
    b: ChargeDensity,
    material: MaterialParams,
    rel_tol: float = DEFAULT_COULOMB_REL_TOL,
) -> float:
    """Direct Coulomb energy between two carrier densities, meV.

    Signed: repulsive for like charges, attractive for unlike.  Symmetric
    under argument exchange.  Raises ConvergenceError if the quadrature
    error estimate exceeds rel_tol.
    """
    sbar2 = a.inplane_std_nm**2 + b.inplane_std_nm**2
    dx = a.inplane_center_nm[0] - b.inplane_center_nm[0]
    dy = a.inplane_center_nm[1] - b.inplane_center_nm[1]
    s = math.hypot(dx, dy)
    zk = _z_pair_kernel(a.z_profile, b.z_profile)

    def integrand(k):
        return math.exp(-0.5 * k * k * sbar2) * j0(k * s) * float(zk(k))

    k_max = 9.6 / math.sqrt(sbar2)
    value, err_est = quad(integrand, 0.0, k_max, epsabs=0.0, epsrel=rel_tol, limit=400)
    if err_est > rel_tol * abs(value) + 1e-14:
        raise ConvergenceError(
            "Coulomb quadrature did not converge", achieved_tol=err_est / abs(value)
        )
    prefactor = (
        units.COULOMB_MEV_NM * a.charge * b.charge / material.relative_permittivity
    )
    return prefactor * value


def _well_ground_energy_mev(mass_rel: float, width_nm: float) -> float:
    """Infinite-well ground energy hbar^2 pi^2 / (2 m W^2), meV."""
    return units.hbar_sq_over_m(mass_rel) * math.pi**2 / (2.0 * width_nm**2)


def _stark_shift_mev(mass_rel: float, conf_mev: float, field_kv_cm: float) -> float:
    """Energy gain -(eF)^2 / (2 m omega^2) of the displaced oscillator, meV."""
    e_field = units.EFIELD_MEV_PER_NM_PER_KV_CM * field_kv_cm
    return -(e_field**2) * units.hbar_sq_over_m(mass_rel) / (2.0 * conf_mev**2)


def exciton_energy(
    structure: DeviceStructure,
    dot_index: int,
    rel_tol: float = DEFAULT_COULOMB_REL_TOL,
) -> float:
    """Ground-state exciton energy E_l of one dot at the current field, eV.

    Band gap + z-confinement of electron and hole + in-plane zero-point
    energies (hbar omega per particle for the two in-plane axes) + quadratic
    Stark terms + the intra-dot electron-hole Coulomb attraction.
    """
    dot = structure.dots[dot_index]
    mat = structure.material
    f = structure.field_kv_cm
    energy_mev = mat.band_gap_ev * units.MEV_PER_EV
    energy_mev += _well_ground_energy_mev(mat.electron_effective_mass, dot.well_width_nm)
    energy_mev += _well_ground_energy_mev(mat.hole_effective_mass, dot.well_width_nm)
    energy_mev += dot.confinement_energy_e_mev + _stark_shift_mev(
        mat.electron_effective_mass, dot.confinement_energy_e_mev, f
    )
    energy_mev += dot.confinement_energy_h_mev + _stark_shift_mev(
        mat.hole_effective_mass, dot.confinement_energy_h_mev, f
    )
    electron = carrier_density(structure, dot_index, "e")
    hole = carrier_density(structure, dot_index, "h")
    energy_mev += coulomb_integral(electron, hole, mat, rel_tol=rel_tol)
    return energy_mev * units.EV_PER_MEV


def biexcitonic_shift(
    structure: DeviceStructure,
    l: int,
    lp: int,
    rel_tol: float = DEFAULT_COULOMB_REL_TOL,
) -> float:
    """Biexcitonic shift dE_{ll'} between two occupied dots, meV.

    Sum of the four inter-dot direct Coulomb integrals: electron-electron
    and hole-hole repulsion plus the two electron-hole attractions.
    """
    if l == lp:
        raise InvalidPairError(f"biexcitonic shift requires two distinct dots, got {l}")
    l, lp = min(l, lp), max(l, lp)  # summation order fixed -> exact symmetry
    mat = structure.material
    e_l = carrier_density(structure, l, "e")
    h_l = carrier_density(structure, l, "h")
    e_lp = carrier_density(structure, lp, "e")
    h_lp = carrier_density(structure, lp, "h")
    return (
        coulomb_integral(e_l, e_lp, mat, rel_tol=rel_tol)
        + coulomb_integral(h_l, h_lp, mat, rel_tol=rel_tol)
        + coulomb_integral(e_l, h_lp, mat, rel_tol=rel_tol)
        + coulomb_integral(h_l, e_lp, mat, rel_tol=rel_tol)
    )


def shift_vs_field(
    structure: DeviceStructure,
    l: int,
    lp: int,
    field_grid_kv_cm: Sequence[float],
    rel_tol: float = DEFAULT_COULOMB_REL_TOL,
) -> list[tuple[float, float]]:
    """Biexcitonic shift evaluated on an ascending grid of field values."""
    grid = list(field_grid_kv_cm)
    if not grid:
        raise InvalidParameterError("field grid must be non-empty")
    if any(f < 0 for f in grid):
        raise InvalidParameterError("field values must be non-negative")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameterError("field grid must be strictly ascending")
    out = []
    for f in grid:
        swept = dataclasses.replace(structure, field_kv_cm=f)
        out.append((f, biexcitonic_shift(swept, l, lp, rel_tol=rel_tol)))
    return out


# ---------------------------------------------------------------------------
# Calibrated GaAs two-dot preset
#
# The free geometry below was tuned once so that at F = 30 kV/cm the two
# ground-exciton energies land on 1.70 and 1.71 eV and the biexcitonic
# shift falls in the few-meV range.  See demos/calibrate_preset.py for the
# tuning procedure.
# ---------------------------------------------------------------------------

GAAS_TWO_DOT_PRESET_NAME = "gaas-two-dot"

# frozen calibration: hw_h and w_b pin dE(30 kV/cm) = 4.5 meV and the
# 10 meV exciton splitting; the gap places E_a at 1.70 eV
_CALIB_WELL_A_NM = 5.0
_CALIB_WELL_B_NM = 4.909414070721328
_CALIB_BAND_GAP_EV = 1.4254423150708202
_CALIB_HW_E_MEV = 20.0
_CALIB_HW_H_MEV = 14.161926745558798
_CALIB_BARRIER_NM = 5.0


def gaas_two_dot(field_kv_cm: float = 30.0) -> DeviceStructure:
    """Calibrated GaAs double-dot structure used throughout the examples."""
    material = MaterialParams(
        electron_effective_mass=0.067,
        hole_effective_mass=0.34,
        relative_permittivity=12.9,
        band_gap_ev=_CALIB_BAND_GAP_EV,
    )
    w_a, w_b = _CALIB_WELL_A_NM, _CALIB_WELL_B_NM
    barrier = _CALIB_BARRIER_NM
    dot_a = DotGeometry(
        confinement_energy_e_mev=_CALIB_HW_E_MEV,
        confinement_energy_h_mev=_CALIB_HW_H_MEV,
        well_width_nm=w_a,
        z_center_nm=0.0,
    )
    dot_b = DotGeometry(
        confinement_energy_e_mev=_CALIB_HW_E_MEV,
        confinement_energy_h_mev=_CALIB_HW_H_MEV,
        well_width_nm=w_b,
        z_center_nm=0.5 * (w_a + w_b) + barrier,
    )
    return DeviceStructure(
        dots=(dot_a, dot_b),
        barrier_widths_nm=(barrier,),
        material=material,
        field_kv_cm=field_kv_cm,
    )


def build_register(
    structure: DeviceStructure,
    transition_dipoles: Sequence[float] | None = None,
    rel_tol: float = DEFAULT_COULOMB_REL_TOL,
) -> ExcitonRegister:
    """Exciton register derived from the device electronic structure."""
    n = structure.n_dots
    energies = np.array(
        [exciton_energy(structure, l, rel_tol=rel_tol) for l in range(n)]
    )
    shifts = np.zeros((n, n))
    for l in range(n):
        for lp in range(l + 1, n):
            val = biexcitonic_shift(structure, l, lp, rel_tol=rel_tol)
            shifts[l, lp] = val
            shifts[lp, l] = val
    dipoles = None if transition_dipoles is None else np.asarray(transition_dipoles)
    return ExcitonRegister(
        exciton_energies_ev=energies,
        shift_matrix_mev=shifts,
        transition_dipoles=dipoles,
    )
