"""Command-line orchestration.

Subcommands: shift | spectrum | compile | simulate, each driven by a run
configuration file.  All data artifacts are CSV with one '#' header comment
line documenting column semantics and basis ordering; floats are written
with repr so identical configs produce byte-identical files.  Wall-clock
information appears only in the run manifest.

Exit codes: 0 success, 2 usage/config error, 3 numerical-diagnostics
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    absorption_spectrum,
    broaden_lines,
    concurrence,
    fidelity,
    spectrum_lines,
)
from .config import RunConfig, dot_label, load_config
from .device import shift_vs_field
from .dynamics import SimulationConfig, Trajectory, basis_state_density, propagate, purity
from .errors import (
    ConfigError,
    ExcitonSimError,
    NumericalConsistencyError,
    PropagationDiagnosticsError,
)
from .model import basis_label
from .pulses import PulseSequence, compile_program

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIAGNOSTICS = 3


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _initial_state(config: RunConfig) -> np.ndarray:
    n = config.register.n_qubits
    return basis_state_density(n, 0)


def cmd_shift(config: RunConfig, out_dir: Path) -> int:
    if config.device is None:
        raise ConfigError("the shift subcommand needs a device section", "device")
    grid = config.device.field_grid_kv_cm
    if not grid:
        raise ConfigError("field_grid_kv_cm must list at least one field", "device")
    l, lp = config.device.shift_pair
    rows = shift_vs_field(
        config.device.structure, l, lp, grid, rel_tol=config.device.coulomb_rel_tol
    )
    lines = [
        f"# biexcitonic shift of dots {dot_label(l)},{dot_label(lp)} vs in-plane field",
        "field_kV_cm,delta_E_meV",
    ]
    lines += [f"{_fmt(f)},{_fmt(de)}" for f, de in rows]
    _write_lines(out_dir / "shift.csv", lines)
    print(f"wrote {out_dir / 'shift.csv'} ({len(rows)} rows)")
    return EXIT_OK


def _write_spectrum(path: Path, spectrum, kind: str) -> None:
    positions = ", ".join(
        f"{dot_label(line.dot)}@{_fmt(line.energy_ev)}eV" for line in spectrum.lines
    )
    lines = [
        f"# {kind} absorption, Lorentzian FWHM "
        f"{_fmt(spectrum.linewidth_mev)} meV; lines: {positions}",
        "energy_eV,intensity",
    ]
    lines += [
        f"{_fmt(e)},{_fmt(i)}"
        for e, i in zip(spectrum.energies_ev, spectrum.intensity)
    ]
    _write_lines(path, lines)


def cmd_spectrum(config: RunConfig, out_dir: Path) -> int:
    lw = config.outputs.spectrum_linewidth_mev
    exc = absorption_spectrum(config.register, "excitonic", linewidth_mev=lw)
    _write_spectrum(out_dir / "spectrum_excitonic.csv", exc, "excitonic")
    print(f"wrote {out_dir / 'spectrum_excitonic.csv'} ({len(exc.lines)} lines)")
    patterns = config.outputs.biexcitonic_conditionings
    if patterns is None:
        bi = absorption_spectrum(config.register, "biexcitonic", linewidth_mev=lw)
    else:
        lines = []
        for pattern in patterns:
            lines.extend(spectrum_lines(config.register, "biexcitonic", pattern))
        bi = broaden_lines(lines, lw)
    _write_spectrum(out_dir / "spectrum_biexcitonic.csv", bi, "biexcitonic")
    print(f"wrote {out_dir / 'spectrum_biexcitonic.csv'} ({len(bi.lines)} lines)")
    return EXIT_OK


def _compiled_sequence(config: RunConfig) -> PulseSequence:
    if not config.program:
        return PulseSequence(())
    return compile_program(config.register, config.program, config.policy)


def _write_sequence(path: Path, sequence: PulseSequence) -> None:
    lines = [
        "# compiled pulse sequence; Gaussian envelopes truncated at +-4 tau",
        "center_ps,tau_ps,carrier_eV,area_rad,phase_rad",
    ]
    lines += [
        f"{_fmt(p.center_ps)},{_fmt(p.tau_ps)},{_fmt(p.carrier_energy_ev)},"
        f"{_fmt(p.area_rad)},{_fmt(p.phase_rad)}"
        for p in sequence
    ]
    _write_lines(path, lines)


def _program_echo(config: RunConfig, sequence: PulseSequence) -> list[str]:
    lines = ["# program echo"]
    for i, (spec, start) in enumerate(config.program, start=1):
        conds = (
            " when " + ",".join(f"{dot_label(d)}:{o}" for d, o in spec.conditions)
            if spec.conditions
            else ""
        )
        start_txt = "auto" if start is None else f"{_fmt(start)} ps"
        lines.append(
            f"gate {i}: {spec.kind} on {dot_label(spec.target)}"
            f" angle={_fmt(spec.angle)} rad{conds} (start {start_txt})"
        )
    lines.append(f"# {len(sequence)} pulses, span "
                 f"[{_fmt(sequence.start_ps)}, {_fmt(sequence.end_ps)}] ps")
    for j, p in enumerate(sequence, start=1):
        lines.append(
            f"pulse {j}: carrier {_fmt(p.carrier_energy_ev)} eV, center "
            f"{_fmt(p.center_ps)} ps, tau {_fmt(p.tau_ps)} ps, area "
            f"{_fmt(p.area_rad)} rad, phase {_fmt(p.phase_rad)} rad, "
            f"calibrated on {dot_label(p.target_dipole)}"
        )
    return lines


def cmd_compile(config: RunConfig, out_dir: Path) -> int:
    if not config.program:
        raise ConfigError("the compile subcommand needs a program section", "program")
    sequence = _compiled_sequence(config)
    _write_sequence(out_dir / "sequence.csv", sequence)
    echo = _program_echo(config, sequence)
    _write_lines(out_dir / "program.txt", echo)
    print("\n".join(echo))
    print(f"wrote {out_dir / 'sequence.csv'} and {out_dir / 'program.txt'}")
    return EXIT_OK


def _write_trajectory(path: Path, traj: Trajectory, n_qubits: int) -> None:
    dim = traj.populations.shape[1]
    pop_cols = [f"pop_{basis_label(i, n_qubits)}" for i in range(dim)]
    occ_cols = [f"n_{dot_label(l)}" for l in range(n_qubits)]
    i, j = traj.coherence_pair
    header = ",".join(["t_ps", *pop_cols, *occ_cols, "re_coh_sel", "im_coh_sel"])
    comment = (
        f"# basis index sum_l n_l 2^l with dot a least significant; pop columns "
        f"list occupations (n_a n_b ...); coherence = <{basis_label(i, n_qubits)}"
        f"|rho|{basis_label(j, n_qubits)}> in the {traj.frame} frame, reference "
        f"{_fmt(traj.reference_energy_ev)} eV"
    )
    lines = [comment, header]
    for k in range(traj.times_ps.size):
        row = [_fmt(traj.times_ps[k])]
        row += [_fmt(v) for v in traj.populations[k]]
        row += [_fmt(v) for v in traj.occupations[k]]
        row += [_fmt(traj.coherences[k].real), _fmt(traj.coherences[k].imag)]
        lines.append(",".join(row))
    _write_lines(path, lines)


def _metrics(config: RunConfig, traj: Trajectory) -> list[str]:
    reg = config.register
    rho_gate = traj.final_state_interaction_picture()
    lines = []
    if config.outputs.fidelity_target is not None:
        lines.append(
            f"fidelity_vs_target = "
            f"{_fmt(fidelity(rho_gate, config.outputs.fidelity_target))}"
        )
    if reg.n_qubits == 2:
        lines.append(f"concurrence = {_fmt(concurrence(rho_gate))}")
    for l in range(reg.n_qubits):
        lines.append(f"final_n_{dot_label(l)} = {_fmt(traj.occupations[-1, l])}")
    for i, p in enumerate(traj.populations[-1]):
        lines.append(f"final_pop_{basis_label(i, reg.n_qubits)} = {_fmt(p)}")
    lines.append(f"final_purity = {_fmt(purity(traj.final_state))}")
    lines.append(f"max_trace_drift = {_fmt(traj.max_trace_drift)}")
    lines.append(f"n_steps = {traj.n_steps}")
    return lines


def _manifest(
    config: RunConfig,
    config_path: Path,
    sim: SimulationConfig,
    traj: Trajectory,
    wall_s: float,
) -> list[str]:
    digest = hashlib.sha256(config_path.read_bytes()).hexdigest()
    lines = [
        "# run manifest: resolved parameters; feeding this file back as the",
        "# config reproduces the run identically",
        f"# tool_version = {__version__}",
        f"# input_file = {config_path.name}",
        f"# input_sha256 = {digest}",
        f"# wall_clock_s = {wall_s:.3f}",
        f"# integration_steps = {traj.n_steps}",
        "",
    ]
    if config.register_source == "device" and config.device is not None:
        dev = config.device
        lines.append("[device]")
        if dev.preset is not None:
            lines.append(f"preset = {dev.preset}")
        else:
            s = dev.structure
            m = s.material
            lines.append(f"electron_mass = {_fmt(m.electron_effective_mass)}")
            lines.append(f"hole_mass = {_fmt(m.hole_effective_mass)}")
            lines.append(f"epsilon_r = {_fmt(m.relative_permittivity)}")
            lines.append(f"band_gap_ev = {_fmt(m.band_gap_ev)}")
            lines.append(
                "well_widths_nm = " + " ".join(_fmt(d.well_width_nm) for d in s.dots)
            )
            lines.append(
                "hbar_omega_e_mev = "
                + " ".join(_fmt(d.confinement_energy_e_mev) for d in s.dots)
            )
            lines.append(
                "hbar_omega_h_mev = "
                + " ".join(_fmt(d.confinement_energy_h_mev) for d in s.dots)
            )
            lines.append(
                "barriers_nm = " + " ".join(_fmt(b) for b in s.barrier_widths_nm)
            )
        lines.append(f"field_kv_cm = {_fmt(dev.structure.field_kv_cm)}")
        if dev.field_grid_kv_cm:
            lines.append(
                "field_grid_kv_cm = " + " ".join(_fmt(f) for f in dev.field_grid_kv_cm)
            )
        lines.append(f"shift_pair = {dev.shift_pair[0]} {dev.shift_pair[1]}")
        lines.append(f"coulomb_rel_tol = {_fmt(dev.coulomb_rel_tol)}")
        if dev.dipoles is not None:
            lines.append("dipoles = " + " ".join(_fmt(d) for d in dev.dipoles))
    else:
        reg = config.register
        lines.append("[register]")
        lines.append(
            "energies_ev = " + " ".join(_fmt(e) for e in reg.exciton_energies_ev)
        )
        n = reg.n_qubits
        for i in range(n):
            for j in range(i + 1, n):
                if reg.shift_matrix_mev[i, j] != 0.0:
                    lines.append(
                        f"shift_mev_{i}_{j} = {_fmt(reg.shift_matrix_mev[i, j])}"
                    )
        lines.append(
            "dipoles = " + " ".join(_fmt(d) for d in reg.transition_dipoles)
        )
    lines.append("")
    if config.program:
        lines.append("[program]")
        for i, (spec, start) in enumerate(config.program, start=1):
            parts = [spec.kind, f"target={spec.target}", f"angle={_fmt(spec.angle)}"]
            if spec.conditions:
                parts.append(
                    "when=" + ",".join(f"{d}:{o}" for d, o in spec.conditions)
                )
            parts.append("start=" + ("auto" if start is None else _fmt(start)))
            lines.append(f"gate.{i} = " + " ".join(parts))
        lines.append("")
    lines.append("[pulses]")
    pol = config.policy
    lines.append(
        "tau_ps = " + ("auto" if pol.tau_ps is None else _fmt(pol.tau_ps))
    )
    lines.append(f"selectivity_fraction = {_fmt(pol.selectivity_fraction)}")
    lines.append(f"fallback_tau_ps = {_fmt(pol.fallback_tau_ps)}")
    lines.append(f"gap_factor = {_fmt(pol.gap_factor)}")
    lines.append(f"addressing = {config.addressing}")
    lines.append("")
    if config.channels:
        lines.append("[channels]")
        for ch in config.channels:
            key = "decay" if ch.kind == "decay" else "dephasing"
            lines.append(f"{key}.{ch.dot} = {_fmt(ch.rate_per_ps)}")
        lines.append("")
    lines.append("[integration]")
    lines.append(f"time_step_ps = {_fmt(sim.time_step_ps)}")
    lines.append(f"frame = {sim.frame}")
    lines.append(f"integrator_order = {sim.integrator_order}")
    lines.append(f"sample_stride = {sim.sample_stride}")
    if sim.reference_energy_ev is not None:
        lines.append(f"reference_energy_ev = {_fmt(sim.reference_energy_ev)}")
    if sim.duration_ps is not None:
        lines.append(f"duration_ps = {_fmt(sim.duration_ps)}")
    lines.append(f"trace_tol = {_fmt(sim.trace_tol)}")
    lines.append(f"eig_floor = {_fmt(sim.eig_floor)}")
    lines.append("")
    lines.append("[outputs]")
    if config.outputs.fidelity_target_text is not None:
        lines.append(f"fidelity_target = {config.outputs.fidelity_target_text}")
    lines.append(
        f"spectrum_linewidth_mev = {_fmt(config.outputs.spectrum_linewidth_mev)}"
    )
    if config.outputs.biexcitonic_conditioning_text is not None:
        lines.append(
            "biexcitonic_conditioning = "
            f"{config.outputs.biexcitonic_conditioning_text}"
        )
    if config.outputs.coherence_pair is not None:
        i, j = config.outputs.coherence_pair
        lines.append(f"coherence_pair = {i}:{j}")
    return lines


def cmd_simulate(config: RunConfig, out_dir: Path, config_path: Path) -> int:
    sequence = _compiled_sequence(config)
    sim = config.simulation
    if len(sequence) == 0 and sim.duration_ps is None:
        sim = dataclasses.replace(sim, duration_ps=1.0)
    if config.outputs.coherence_pair is not None:
        sim = dataclasses.replace(sim, coherence_pair=config.outputs.coherence_pair)
    started = time.perf_counter()
    traj = propagate(
        _initial_state(config), sequence, config.register, config.channels, sim
    )
    wall = time.perf_counter() - started
    _write_sequence(out_dir / "sequence.csv", sequence)
    _write_trajectory(out_dir / "trajectory.csv", traj, config.register.n_qubits)
    metrics = _metrics(config, traj)
    _write_lines(out_dir / "metrics.txt", metrics)
    _write_lines(
        out_dir / "manifest.cfg", _manifest(config, config_path, sim, traj, wall)
    )
    print("\n".join(metrics))
    print(
        f"wrote trajectory.csv, sequence.csv, metrics.txt, manifest.cfg to {out_dir}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excitonsim",
        description=(
            "Pulse-level simulator for exciton qubits in coupled quantum dots"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("shift", "biexcitonic shift vs field sweep (CSV)"),
        ("spectrum", "excitonic and biexcitonic absorption spectra (CSV)"),
        ("compile", "compile the gate program into a pulse sequence (CSV)"),
        ("simulate", "compile, propagate, and report metrics"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out-dir", default=".", help="directory for data artifacts")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config_path = Path(args.config)
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        config = load_config(str(config_path))
        if args.command == "shift":
            return cmd_shift(config, out_dir)
        if args.command == "spectrum":
            return cmd_spectrum(config, out_dir)
        if args.command == "compile":
            return cmd_compile(config, out_dir)
        return cmd_simulate(config, out_dir, config_path)
    except (PropagationDiagnosticsError, NumericalConsistencyError) as err:
        print(f"error: {config_path}: {err}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except ExcitonSimError as err:
        print(f"error: {config_path}: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
