"""Figures of merit and optical spectra.

State fidelity, two-qubit concurrence (Wootters construction), compiled
gate fidelity against an ideal unitary, and excitonic / biexcitonic stick
spectra with Lorentzian broadening.  Gate-level states are compared in the
interaction picture of the static register Hamiltonian, where free diagonal
phases are frozen and a fixed target state is meaningful at any final time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dynamics import (
    LindbladChannel,
    SimulationConfig,
    propagate,
    pure_state_density,
)
from .errors import (
    InvalidConditioningError,
    InvalidParameterError,
    UnsupportedDimensionError,
)
from .model import ExcitonRegister, renormalized_energy
from .pulses import PulseSequence

_PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_YY = np.kron(_PAULI_Y, _PAULI_Y)


def bell_state() -> np.ndarray:
    """(|00> + |11>)/sqrt(2) in the two-qubit computational basis."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1.0 / math.sqrt(2.0)
    return v


def fidelity(rho: np.ndarray, target: Sequence[complex]) -> float:
    """<target| rho |target> for a normalized pure target state."""
    t = np.asarray(target, dtype=complex)
    if t.shape != (rho.shape[0],):
        raise InvalidParameterError("target dimension does not match the state")
    norm = np.linalg.norm(t)
    if abs(norm - 1.0) > 1e-8:
        raise InvalidParameterError(f"target state is not normalized: |t| = {norm}")
    value = np.real(t.conj() @ rho @ t)
    return float(value)


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit entanglement monotone, 0 (separable) to 1 (Bell).

    max(0, l1 - l2 - l3 - l4) over the descending square roots of the
    eigenvalues of rho (Y x Y) rho* (Y x Y), with conjugation in the
    computational basis.
    """
    if rho.shape != (4, 4):
        raise UnsupportedDimensionError("concurrence is defined for two qubits only")
    r = rho @ _YY @ rho.conj() @ _YY
    eigs = np.linalg.eigvals(r)
    lambdas = np.sort(np.sqrt(np.clip(eigs.real, 0.0, None)))[::-1]
    return float(max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]))


@dataclass(frozen=True)
class SpectrumLine:
    """One optical transition: position, weight, and its conditioning."""

    energy_ev: float
    weight: float
    kind: str  # "excitonic" (0 -> 1) or "biexcitonic" (1 -> 2)
    dot: int
    conditioning: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.weight < 0:
            raise InvalidParameterError("line weight must be non-negative")


@dataclass(frozen=True)
class AbsorptionSpectrum:
    """Lorentzian-broadened line spectrum on an energy grid."""

    energies_ev: np.ndarray
    intensity: np.ndarray
    linewidth_mev: float
    lines: tuple[SpectrumLine, ...]

    def __post_init__(self):
        e = np.asarray(self.energies_ev, dtype=float)
        i = np.asarray(self.intensity, dtype=float)
        if np.any(i < 0):
            raise InvalidParameterError("intensity must be non-negative")
        object.__setattr__(self, "energies_ev", e)
        object.__setattr__(self, "intensity", i)
        object.__setattr__(self, "lines", tuple(self.lines))

    def integrated_weight(self) -> float:
        return float(np.trapezoid(self.intensity, self.energies_ev))


def spectrum_lines(
    register: ExcitonRegister,
    kind: str,
    conditioning: Mapping[int, int] | None = None,
    emit_dots: Sequence[int] | None = None,
) -> list[SpectrumLine]:
    """Stick transitions of the register.

    Excitonic: one line per dot at its bare energy (vacuum conditioning).
    Biexcitonic: with an explicit conditioning pattern, one line per
    emitting dot at its renormalized energy; dots occupied by the pattern
    cannot emit.  Without a pattern, emits the canonical single-partner
    set: dot l conditioned on one exciton in l', for every ordered pair.
    """
    n = register.n_qubits
    if kind == "excitonic":
        if conditioning:
            raise InvalidConditioningError(next(iter(conditioning)))
        return [
            SpectrumLine(
                energy_ev=renormalized_energy(register, l, {}),
                weight=1.0,
                kind=kind,
                dot=l,
                conditioning=(),
            )
            for l in range(n)
        ]
    if kind != "biexcitonic":
        raise InvalidParameterError(f"unknown spectrum kind {kind!r}")
    if conditioning is None:
        lines = []
        for l in range(n):
            for lp in range(n):
                if lp == l:
                    continue
                lines.append(
                    SpectrumLine(
                        energy_ev=renormalized_energy(register, l, {lp: 1}),
                        weight=1.0,
                        kind=kind,
                        dot=l,
                        conditioning=((lp, 1),),
                    )
                )
        return lines
    pattern = dict(conditioning)
    occupied = {d for d, occ in pattern.items() if occ == 1}
    if not occupied:
        raise InvalidParameterError(
            "biexcitonic conditioning must occupy at least one dot"
        )
    emitters = (
        list(emit_dots)
        if emit_dots is not None
        else [l for l in range(n) if l not in occupied]
    )
    if not emitters:
        raise InvalidConditioningError(min(occupied))
    lines = []
    for l in emitters:
        if l in occupied:
            raise InvalidConditioningError(l)
        lines.append(
            SpectrumLine(
                energy_ev=renormalized_energy(register, l, pattern),
                weight=1.0,
                kind=kind,
                dot=l,
                conditioning=tuple(sorted(pattern.items())),
            )
        )
    return lines


def default_energy_grid(
    lines: Sequence[SpectrumLine], linewidth_mev: float
) -> np.ndarray:
    """Grid wide and fine enough to hold >= 99% of the Lorentzian weight."""
    positions = [line.energy_ev for line in lines]
    pad = 40.0 * linewidth_mev * 1e-3
    step = linewidth_mev * 1e-3 / 50.0
    lo, hi = min(positions) - pad, max(positions) + pad
    return np.arange(lo, hi + step, step)


def broaden_lines(
    lines: Sequence[SpectrumLine],
    linewidth_mev: float,
    grid_ev: Sequence[float] | None = None,
) -> AbsorptionSpectrum:
    """Lorentzian-broaden stick lines on a grid (default: auto-sized)."""
    if linewidth_mev <= 0:
        raise InvalidParameterError("linewidth must be positive")
    if not lines:
        raise InvalidParameterError("no lines to broaden")
    if grid_ev is None:
        grid = default_energy_grid(lines, linewidth_mev)
    else:
        grid = np.asarray(grid_ev, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise InvalidParameterError("energy grid must be ascending")
    gamma = linewidth_mev * 1e-3  # FWHM in eV
    intensity = np.zeros_like(grid)
    for line in lines:
        intensity += (
            line.weight
            * (gamma / (2.0 * math.pi))
            / ((grid - line.energy_ev) ** 2 + (gamma / 2.0) ** 2)
        )
    return AbsorptionSpectrum(
        energies_ev=grid,
        intensity=intensity,
        linewidth_mev=linewidth_mev,
        lines=tuple(lines),
    )


def absorption_spectrum(
    register: ExcitonRegister,
    kind: str,
    conditioning: Mapping[int, int] | None = None,
    grid_ev: Sequence[float] | None = None,
    linewidth_mev: float = 0.5,
    emit_dots: Sequence[int] | None = None,
) -> AbsorptionSpectrum:
    """Lorentzian-broadened absorption spectrum, unit weight per line."""
    lines = spectrum_lines(register, kind, conditioning, emit_dots)
    return broaden_lines(lines, linewidth_mev, grid_ev)


def default_fidelity_states(n_qubits: int) -> list[np.ndarray]:
    """Deterministic state set for gate fidelity averaging.

    All computational basis states plus, per qubit, the uniform
    superpositions (|0...0> + |e_l>)/sqrt2 and (|e_l> + |1...1>)/sqrt2;
    the latter pairs are sensitive to conditional-phase errors.
    """
    dim = 2**n_qubits
    states = []
    for idx in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[idx] = 1.0
        states.append(v)
    top = dim - 1
    for l in range(n_qubits):
        v = np.zeros(dim, dtype=complex)
        v[0] = v[1 << l] = 1.0 / math.sqrt(2.0)
        states.append(v)
        w = np.zeros(dim, dtype=complex)
        w[1 << l] = w[top] = 1.0 / math.sqrt(2.0)
        if top != (1 << l):
            states.append(w)
    return states


def gate_fidelity(
    sequence: PulseSequence,
    register: ExcitonRegister,
    channels: Sequence[LindbladChannel],
    config: SimulationConfig,
    ideal_unitary: np.ndarray,
) -> float:
    """Average fidelity of the propagated sequence against an ideal gate.

    Each reference state is propagated through the full sequence; the final
    state, taken to the interaction picture, is compared with the ideal
    image of that state.  The average runs over the deterministic state set
    of default_fidelity_states.
    """
    dim = register.dimension
    ideal = np.asarray(ideal_unitary, dtype=complex)
    if ideal.shape != (dim, dim):
        raise InvalidParameterError("ideal unitary does not match register size")
    total = 0.0
    states = default_fidelity_states(register.n_qubits)
    for psi in states:
        traj = propagate(
            pure_state_density(psi), sequence, register, channels, config
        )
        rho_final = traj.final_state_interaction_picture()
        total += fidelity(rho_final, ideal @ psi)
    return total / len(states)
