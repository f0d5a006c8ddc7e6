"""Density-matrix propagation.

Solves the Liouville-von Neumann equation with optional Lindblad channels,

    drho/dt = -(i/hbar) [H0 + H_drive(t), rho]
              + sum_k (L_k rho L_k+ - 1/2 {L_k+ L_k, rho}),

with a classical fixed-step 4th-order integrator (reproducible trajectories,
no adaptive stepping).  The drive couples through the bit-flip operators:
H_drive = -sum_l (f_l(t) sigma+_l + conj(f_l(t)) sigma-_l), where f_l is the
per-dot amplitude returned by pulses.field_at (real in the lab frame,
complex half-amplitude in the rotating frame).

Default frame: rotating at a reference energy, which keeps every meV-scale
detuning and inter-color cross term while removing only the optical
carrier, so ~fs steps suffice.  The literal lab frame (optical period
~2.4 fs) is retained for validation with steps of at most 0.05 fs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import units
from .errors import (
    InvalidParameterError,
    NumericalConsistencyError,
    PropagationDiagnosticsError,
)
from .model import ExcitonRegister, build_hamiltonian, lowering_operator
from .pulses import PulseSequence, field_at

LAB_FRAME_MAX_STEP_PS = 5e-5  # 0.05 fs


def pure_state_density(vector: Sequence[complex]) -> np.ndarray:
    """Rank-one density matrix |psi><psi| from a normalized state vector."""
    v = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-8:
        raise InvalidParameterError(f"state vector is not normalized: |psi| = {norm}")
    return np.outer(v, v.conj())


def basis_state_density(n_qubits: int, index: int) -> np.ndarray:
    """Density matrix of the computational basis state |n>."""
    dim = 2**n_qubits
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return np.outer(v, v.conj())


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-12,
    trace_tol: float = 1e-9,
    eig_floor: float = -1e-9,
) -> None:
    """Check Hermiticity, unit trace, and positivity within tolerances."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidParameterError("density matrix must be square")
    if np.max(np.abs(rho - rho.T.conj())) > herm_tol:
        raise InvalidParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise InvalidParameterError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.T.conj())).min() < eig_floor:
        raise InvalidParameterError("density matrix has a negative eigenvalue")


@dataclass(frozen=True)
class LindbladChannel:
    """Phenomenological decoherence channel on one dot.

    kind 'decay': rate = 1/T1, jump operator sqrt(rate) sigma-_l.
    kind 'pure-dephasing': rate = gamma_phi, jump operator
    sqrt(rate/2) (1 - 2 n_l), which damps coherences of dot l at
    gamma_phi without touching populations.
    """

    kind: str
    dot: int
    rate_per_ps: float

    def __post_init__(self):
        if self.kind not in ("decay", "pure-dephasing"):
            raise InvalidParameterError(f"unknown channel kind {self.kind!r}")
        if self.rate_per_ps < 0:
            raise InvalidParameterError("channel rate must be non-negative")


def channel_operator(register: ExcitonRegister, channel: LindbladChannel) -> np.ndarray:
    """Jump operator of one channel on the 2^N space."""
    if channel.kind == "decay":
        return math.sqrt(channel.rate_per_ps) * lowering_operator(
            register, channel.dot
        )
    n = register.n_qubits
    bits = np.array([(idx >> channel.dot) & 1 for idx in range(2**n)], dtype=float)
    z = np.diag(1.0 - 2.0 * bits)
    return math.sqrt(channel.rate_per_ps / 2.0) * z


@dataclass
class SimulationConfig:
    """Integration controls.

    reference_energy_ev: rotating-frame reference; None picks the exciton
    energy of the first pulse's target dot.  duration_ps extends the
    integration window beyond the pulse span (required for empty
    sequences).  trace_tol / eig_floor are the per-step diagnostic limits.
    """

    time_step_ps: float = 1e-3
    frame: str = "rotating"
    integrator_order: int = 4
    sample_stride: int = 10
    reference_energy_ev: float | None = None
    duration_ps: float | None = None
    addressing: str = "global"
    trace_tol: float = 1e-7
    eig_floor: float = -1e-6
    store_states: bool = False
    coherence_pair: tuple[int, int] | None = None  # None: (0, dim - 1)

    def __post_init__(self):
        if self.time_step_ps <= 0:
            raise InvalidParameterError("time step must be positive")
        if self.frame not in ("lab", "rotating"):
            raise InvalidParameterError(f"unknown frame {self.frame!r}")
        if self.integrator_order not in (2, 4):
            raise InvalidParameterError("integrator order must be 2 or 4")
        if self.sample_stride < 1:
            raise InvalidParameterError("sample stride must be >= 1")


@dataclass
class Trajectory:
    """Sampled populations, occupations, and one coherence of a run."""

    times_ps: np.ndarray
    populations: np.ndarray  # (n_samples, dim), real
    occupations: np.ndarray  # (n_samples, n_qubits), real
    coherences: np.ndarray  # (n_samples,), complex, element rho[pair]
    coherence_pair: tuple[int, int]
    final_state: np.ndarray
    final_time_ps: float
    frame: str
    reference_energy_ev: float
    h0_diag_mev: np.ndarray
    n_steps: int
    max_trace_drift: float
    states: np.ndarray | None = None  # (n_samples, dim, dim) if stored

    def final_state_interaction_picture(self) -> np.ndarray:
        """Final state with the static diagonal phases removed.

        Conjugates by exp(+i H0 t / hbar) of the frame's static diagonal,
        which freezes free evolution and makes gate-level states
        comparable against fixed targets regardless of sampling time.
        """
        return to_interaction_picture(
            self.final_state, self.final_time_ps, self.h0_diag_mev
        )


def to_interaction_picture(
    rho: np.ndarray, t_ps: float, h0_diag_mev: np.ndarray
) -> np.ndarray:
    phases = np.exp(1j * np.asarray(h0_diag_mev) * t_ps / units.HBAR_MEV_PS)
    return (phases[:, None] * rho) * phases.conj()[None, :]


def liouvillian_apply(
    rho: np.ndarray,
    t_ps: float,
    h0_diag_mev: np.ndarray,
    drive: Callable[[float], np.ndarray] | None,
    raising_ops: Sequence[np.ndarray],
    channel_ops: Sequence[np.ndarray],
) -> np.ndarray:
    """Exact generator d(rho)/dt at time t, meV-ps units.

    drive(t) returns per-dot amplitudes f_l (meV); raising_ops are the
    sigma+_l matrices the drive couples to.
    """
    h = np.diag(h0_diag_mev).astype(complex)
    if drive is not None:
        amps = drive(t_ps)
        for f_l, sp in zip(amps, raising_ops):
            if f_l != 0.0:
                h -= f_l * sp + np.conj(f_l) * sp.T.conj()
    out = (-1j / units.HBAR_MEV_PS) * (h @ rho - rho @ h)
    for lk, lk_dag, lk_dag_lk in channel_ops:
        out += lk @ rho @ lk_dag - 0.5 * (lk_dag_lk @ rho + rho @ lk_dag_lk)
    return out


def _prepare_channel_ops(channel_matrices: Sequence[np.ndarray]):
    ops = []
    for lk in channel_matrices:
        lk = np.asarray(lk, dtype=complex)
        lk_dag = lk.T.conj()
        ops.append((lk, lk_dag, lk_dag @ lk))
    return ops


def integrate_master_equation(
    rho0: np.ndarray,
    h0_diag_mev: np.ndarray,
    drive: Callable[[float], np.ndarray] | None,
    raising_ops: Sequence[np.ndarray],
    channel_matrices: Sequence[np.ndarray],
    t_start_ps: float,
    t_end_ps: float,
    config: SimulationConfig,
    frame: str = "rotating",
    reference_energy_ev: float = 0.0,
) -> Trajectory:
    """Fixed-step integration of the master equation over [t_start, t_end].

    The requested step is shrunk to divide the window exactly.  The state
    is re-Hermitized once per step; the trace is never re-normalized, its
    drift is a diagnostic.  Samples are taken every sample_stride steps
    plus the final step.
    """
    rho = np.array(rho0, dtype=complex)
    validate_density_matrix(rho)
    dim = rho.shape[0]
    n_qubits = dim.bit_length() - 1
    if 2**n_qubits != dim:
        raise InvalidParameterError("state dimension must be a power of two")
    h0 = np.asarray(h0_diag_mev, dtype=float)
    if h0.shape != (dim,):
        raise InvalidParameterError("diagonal Hamiltonian does not match state size")
    channel_ops = _prepare_channel_ops(channel_matrices)

    span = t_end_ps - t_start_ps
    if span < 0:
        raise InvalidParameterError("integration window must not be reversed")
    n_steps = max(int(math.ceil(span / config.time_step_ps - 1e-12)), 0)
    dt = span / n_steps if n_steps else 0.0

    pair = config.coherence_pair if config.coherence_pair is not None else (0, dim - 1)
    if not (0 <= pair[0] < dim and 0 <= pair[1] < dim):
        raise InvalidParameterError(f"coherence pair {pair} out of range")
    occupation_masks = [
        np.array([(idx >> l) & 1 for idx in range(dim)], dtype=float)
        for l in range(n_qubits)
    ]

    times, pops, occs, cohs, kept = [], [], [], [], []

    def sample(t, state):
        times.append(t)
        diag = np.real(np.diag(state))
        pops.append(diag)
        occs.append([float(diag @ m) for m in occupation_masks])
        cohs.append(state[pair])
        if config.store_states:
            kept.append(state.copy())

    def rhs(t, state):
        return liouvillian_apply(state, t, h0, drive, raising_ops, channel_ops)

    max_drift = abs(np.trace(rho).real - 1.0)
    sample(t_start_ps, rho)
    t = t_start_ps
    for step in range(1, n_steps + 1):
        if config.integrator_order == 4:
            k1 = rhs(t, rho)
            k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
            k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2)
            k4 = rhs(t + dt, rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:  # midpoint rule
            k1 = rhs(t, rho)
            rho = rho + dt * rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
        rho = 0.5 * (rho + rho.T.conj())
        t = t_start_ps + step * dt
        drift = abs(np.trace(rho).real - 1.0)
        max_drift = max(max_drift, drift)
        if drift > config.trace_tol:
            raise PropagationDiagnosticsError(
                f"trace drift {drift:.3e} exceeds {config.trace_tol:.1e}", step=step
            )
        min_eig = np.linalg.eigvalsh(rho).min()
        if min_eig < config.eig_floor:
            raise PropagationDiagnosticsError(
                f"negative eigenvalue {min_eig:.3e} below {config.eig_floor:.1e}",
                step=step,
            )
        if step % config.sample_stride == 0 or step == n_steps:
            sample(t, rho)

    return Trajectory(
        times_ps=np.array(times),
        populations=np.array(pops),
        occupations=np.array(occs).reshape(len(times), n_qubits),
        coherences=np.array(cohs),
        coherence_pair=pair,
        final_state=rho,
        final_time_ps=t,
        frame=frame,
        reference_energy_ev=reference_energy_ev,
        h0_diag_mev=h0,
        n_steps=n_steps,
        max_trace_drift=max_drift,
        states=np.array(kept) if config.store_states else None,
    )


def _raising_operators(register: ExcitonRegister) -> list[np.ndarray]:
    return [
        lowering_operator(register, l).T.conj() for l in range(register.n_qubits)
    ]


def default_reference_energy(
    sequence: PulseSequence, register: ExcitonRegister
) -> float:
    """Rotating-frame reference: exciton energy of the first pulse's dot."""
    if len(sequence) > 0:
        return float(
            register.exciton_energies_ev[sequence.pulses[0].target_dipole]
        )
    return float(register.exciton_energies_ev[0])


def propagate(
    rho0: np.ndarray,
    sequence: PulseSequence,
    register: ExcitonRegister,
    channels: Sequence[LindbladChannel] = (),
    config: SimulationConfig | None = None,
) -> Trajectory:
    """Propagate the register state through a pulse sequence.

    Builds the frame Hamiltonian (full optical energies in the lab frame,
    reference-shifted in the rotating frame), the drive from field_at, and
    the channel jump operators, then runs the fixed-step integrator over
    the sequence span (extended to duration_ps when configured).
    """
    config = config or SimulationConfig()
    if len(sequence) > 0:
        tau_min = min(p.tau_ps for p in sequence)
        if config.frame == "rotating" and config.time_step_ps > tau_min / 20.0:
            raise InvalidParameterError(
                f"time step {config.time_step_ps} ps too coarse: must be at most "
                f"tau_min/20 = {tau_min / 20.0:.3e} ps"
            )
    if config.frame == "lab" and config.time_step_ps > LAB_FRAME_MAX_STEP_PS:
        raise InvalidParameterError(
            f"lab-frame steps must be at most {LAB_FRAME_MAX_STEP_PS} ps to resolve "
            "the optical carrier"
        )

    diag_ev = build_hamiltonian(register).diagonal_ev
    n = register.n_qubits
    occupancy = np.array(
        [sum((idx >> l) & 1 for l in range(n)) for idx in range(2**n)], dtype=float
    )
    if config.frame == "rotating":
        ref = (
            config.reference_energy_ev
            if config.reference_energy_ev is not None
            else default_reference_energy(sequence, register)
        )
        h0 = (diag_ev - ref * occupancy) * units.MEV_PER_EV
    else:
        ref = 0.0
        h0 = diag_ev * units.MEV_PER_EV
        # global energy offset is gauge (cancels in rho); centering the
        # spectrum halves the stiffest phase the integrator must resolve
        h0 = h0 - 0.5 * (h0.max() + h0.min())

    dipoles = register.transition_dipoles
    frame = config.frame
    addressing = config.addressing

    if len(sequence) > 0:
        def drive(t: float) -> np.ndarray:
            return field_at(
                sequence,
                t,
                dipoles,
                frame=frame,
                reference_energy_ev=ref if frame == "rotating" else None,
                addressing=addressing,
            )
    else:
        drive = None

    t_start = min(0.0, sequence.start_ps) if len(sequence) else 0.0
    t_end = sequence.end_ps if len(sequence) else 0.0
    if config.duration_ps is not None:
        t_end = max(t_end, t_start + config.duration_ps)

    return integrate_master_equation(
        rho0,
        h0,
        drive,
        _raising_operators(register),
        [channel_operator(register, ch) for ch in channels],
        t_start,
        t_end,
        config,
        frame=frame,
        reference_energy_ev=ref,
    )


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    """Real expectation value trace(op rho).

    The imaginary residue must stay below 1e-8; residues below 1e-10 are
    silently discarded, anything between is still accepted but indicates
    marginal Hermiticity.
    """
    if op.shape != rho.shape:
        raise InvalidParameterError("operator and state dimensions differ")
    value = complex(np.trace(op @ rho))
    if abs(value.imag) > 1e-8:
        raise NumericalConsistencyError(
            f"expectation value has imaginary residue {value.imag:.3e}"
        )
    return value.real


def purity(rho: np.ndarray) -> float:
    """trace(rho^2), 1 for pure states."""
    return float(np.real(np.trace(rho @ rho)))
