"""Run-configuration files.

Plain-text INI-style files with named sections and key = value entries;
numeric keys carry their unit in the name (tau_ps, field_kv_cm).  A run
takes its register either from an explicit [register] section or derived
from a [device] section, never both.

Program entries are one gate per key, ordered by index:

    [program]
    gate.1 = rotation target=0 angle=pi/2
    gate.2 = conditional-rotation target=1 angle=pi when=0:1 start=auto
    gate.3 = cnot target=1 control=0
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

import numpy as np

from .device import (
    DeviceStructure,
    DotGeometry,
    MaterialParams,
    GAAS_TWO_DOT_PRESET_NAME,
    build_register,
    gaas_two_dot,
)
from .dynamics import LindbladChannel, SimulationConfig
from .errors import ConfigError, ExcitonSimError
from .model import ExcitonRegister
from .pulses import GateSpec, TimingPolicy

_SECTION_KEYS = {
    "device": {
        "preset",
        "field_kv_cm",
        "electron_mass",
        "hole_mass",
        "epsilon_r",
        "band_gap_ev",
        "hbar_omega_e_mev",
        "hbar_omega_h_mev",
        "well_widths_nm",
        "barriers_nm",
        "field_grid_kv_cm",
        "shift_pair",
        "coulomb_rel_tol",
        "dipoles",
    },
    "register": None,  # dynamic shift_mev_<i>_<j> keys
    "program": None,  # dynamic gate.<n> keys
    "pulses": {
        "tau_ps",
        "selectivity_fraction",
        "addressing",
        "fallback_tau_ps",
        "gap_factor",
    },
    "channels": None,  # dynamic decay.<dot> / dephasing.<dot>
    "integration": {
        "time_step_ps",
        "frame",
        "integrator_order",
        "sample_stride",
        "reference_energy_ev",
        "duration_ps",
        "trace_tol",
        "eig_floor",
    },
    "outputs": {
        "fidelity_target",
        "spectrum_linewidth_mev",
        "biexcitonic_conditioning",
        "coherence_pair",
    },
}

_DOT_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def dot_label(index: int) -> str:
    """Letter name of a dot: 0 -> a, 1 -> b, ..."""
    if index < len(_DOT_LETTERS):
        return _DOT_LETTERS[index]
    return f"q{index}"


def parse_dot(token: str, section: str) -> int:
    token = token.strip().lower()
    if token.isdigit():
        return int(token)
    if len(token) == 1 and token in _DOT_LETTERS:
        return _DOT_LETTERS.index(token)
    raise ConfigError(f"cannot parse dot name {token!r}", section=section)


def parse_angle(token: str, section: str) -> float:
    """Angle in radians; accepts plain floats and pi fractions like 'pi/2'."""
    text = token.strip().lower().replace(" ", "")
    try:
        return float(text)
    except ValueError:
        pass
    if "pi" in text:
        coeff_str, _, rest = text.partition("pi")
        try:
            coeff = float(coeff_str) if coeff_str else 1.0
            if rest.startswith("/"):
                coeff /= float(rest[1:])
            elif rest:
                raise ValueError
            return coeff * math.pi
        except ValueError:
            pass
    raise ConfigError(f"cannot parse angle {token!r}", section=section)


def _floats(text: str, section: str, key: str) -> list[float]:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as err:
        raise ConfigError(f"key {key}: expected numbers, got {text!r}", section) from err


@dataclass
class DeviceSection:
    structure: DeviceStructure
    field_grid_kv_cm: list[float] = field(default_factory=list)
    shift_pair: tuple[int, int] = (0, 1)
    coulomb_rel_tol: float = 1e-6
    dipoles: list[float] | None = None
    preset: str | None = None


@dataclass
class OutputsSection:
    fidelity_target: np.ndarray | None = None
    fidelity_target_text: str | None = None
    spectrum_linewidth_mev: float = 0.5
    # explicit conditioning patterns for the biexcitonic spectrum;
    # None selects the canonical single-partner set
    biexcitonic_conditionings: list[dict[int, int]] | None = None
    biexcitonic_conditioning_text: str | None = None
    coherence_pair: tuple[int, int] | None = None


@dataclass
class RunConfig:
    """Fully resolved run description."""

    register: ExcitonRegister
    register_source: str  # "register" or "device"
    device: DeviceSection | None
    program: list[tuple[GateSpec, float | None]]
    policy: TimingPolicy
    addressing: str
    channels: list[LindbladChannel]
    simulation: SimulationConfig
    outputs: OutputsSection
    raw_register_section: dict[str, str]


def _check_keys(parser: configparser.ConfigParser, section: str) -> None:
    allowed = _SECTION_KEYS.get(section)
    if allowed is None:
        return
    for key in parser.options(section):
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", section=section)


def _parse_device(parser: configparser.ConfigParser) -> DeviceSection:
    section = "device"
    _check_keys(parser, section)
    get = parser[section].get
    preset = get("preset")
    field_kv = float(get("field_kv_cm", "30.0"))
    if preset is not None:
        if preset != GAAS_TWO_DOT_PRESET_NAME:
            raise ConfigError(f"unknown preset {preset!r}", section=section)
        geometry_keys = {
            "electron_mass",
            "hole_mass",
            "epsilon_r",
            "band_gap_ev",
            "hbar_omega_e_mev",
            "hbar_omega_h_mev",
            "well_widths_nm",
            "barriers_nm",
        }
        overlap = geometry_keys & set(parser.options(section))
        if overlap:
            raise ConfigError(
                f"preset and explicit geometry keys {sorted(overlap)} conflict",
                section=section,
            )
        structure = gaas_two_dot(field_kv_cm=field_kv)
    else:
        try:
            material = MaterialParams(
                electron_effective_mass=float(get("electron_mass")),
                hole_effective_mass=float(get("hole_mass")),
                relative_permittivity=float(get("epsilon_r")),
                band_gap_ev=float(get("band_gap_ev")),
            )
            widths = _floats(get("well_widths_nm"), section, "well_widths_nm")
            hw_e = _floats(get("hbar_omega_e_mev"), section, "hbar_omega_e_mev")
            hw_h = _floats(get("hbar_omega_h_mev"), section, "hbar_omega_h_mev")
            barriers = _floats(get("barriers_nm", ""), section, "barriers_nm")
        except (TypeError, ValueError) as err:
            raise ConfigError(
                "explicit geometry requires electron_mass, hole_mass, epsilon_r, "
                "band_gap_ev, well_widths_nm, hbar_omega_e_mev, hbar_omega_h_mev, "
                "barriers_nm",
                section=section,
            ) from err
        n = len(widths)
        if not (len(hw_e) == len(hw_h) == n) or len(barriers) != n - 1:
            raise ConfigError(
                "per-dot lists must agree in length (barriers: one fewer)",
                section=section,
            )
        dots = []
        z = 0.0
        for i in range(n):
            if i > 0:
                z += 0.5 * (widths[i - 1] + widths[i]) + barriers[i - 1]
            dots.append(
                DotGeometry(
                    confinement_energy_e_mev=hw_e[i],
                    confinement_energy_h_mev=hw_h[i],
                    well_width_nm=widths[i],
                    z_center_nm=z,
                )
            )
        try:
            structure = DeviceStructure(
                dots=tuple(dots),
                barrier_widths_nm=tuple(barriers),
                material=material,
                field_kv_cm=field_kv,
            )
        except ExcitonSimError as err:
            raise ConfigError(str(err), section=section) from err

    grid = _floats(get("field_grid_kv_cm", ""), section, "field_grid_kv_cm")
    pair_tokens = get("shift_pair", "0 1").split()
    if len(pair_tokens) != 2:
        raise ConfigError("shift_pair needs exactly two dots", section=section)
    pair = (parse_dot(pair_tokens[0], section), parse_dot(pair_tokens[1], section))
    dipoles = None
    if get("dipoles") is not None:
        dipoles = _floats(get("dipoles"), section, "dipoles")
    return DeviceSection(
        structure=structure,
        field_grid_kv_cm=grid,
        shift_pair=pair,
        coulomb_rel_tol=float(get("coulomb_rel_tol", "1e-6")),
        dipoles=dipoles,
        preset=preset,
    )


def _parse_register(parser: configparser.ConfigParser) -> ExcitonRegister:
    section = "register"
    options = dict(parser[section])
    energies_text = options.pop("energies_ev", None)
    if energies_text is None:
        raise ConfigError("missing energies_ev", section=section)
    energies = _floats(energies_text, section, "energies_ev")
    n = len(energies)
    dipoles = None
    dipoles_text = options.pop("dipoles", None)
    if dipoles_text is not None:
        dipoles = _floats(dipoles_text, section, "dipoles")
    shifts = np.zeros((n, n))
    for key, value in options.items():
        parts = key.split("_")
        if len(parts) != 4 or parts[0] != "shift" or parts[1] != "mev":
            raise ConfigError(f"unknown key {key!r}", section=section)
        try:
            i, j = int(parts[2]), int(parts[3])
        except ValueError as err:
            raise ConfigError(f"bad pair in key {key!r}", section=section) from err
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ConfigError(f"pair {i},{j} out of range", section=section)
        shifts[i, j] = shifts[j, i] = float(value)
    try:
        return ExcitonRegister(
            exciton_energies_ev=np.array(energies),
            shift_matrix_mev=shifts,
            transition_dipoles=None if dipoles is None else np.array(dipoles),
        )
    except ExcitonSimError as err:
        raise ConfigError(str(err), section=section) from err


def _parse_gate(text: str, n_qubits: int, key: str) -> tuple[GateSpec, float | None]:
    section = "program"
    tokens = text.split()
    if not tokens:
        raise ConfigError(f"{key}: empty gate entry", section=section)
    kind = tokens[0]
    fields: dict[str, str] = {}
    for tok in tokens[1:]:
        name, sep, value = tok.partition("=")
        if not sep:
            raise ConfigError(f"{key}: cannot parse token {tok!r}", section=section)
        fields[name] = value
    unknown = set(fields) - {"target", "angle", "when", "control", "start"}
    if unknown:
        raise ConfigError(f"{key}: unknown fields {sorted(unknown)}", section=section)
    if "target" not in fields:
        raise ConfigError(f"{key}: gate needs a target", section=section)
    target = parse_dot(fields["target"], section)
    if target >= n_qubits:
        raise ConfigError(f"{key}: target dot {target} out of range", section=section)
    conditions: list[tuple[int, int]] = []
    if "control" in fields:
        conditions.append((parse_dot(fields["control"], section), 1))
    if "when" in fields:
        for item in fields["when"].split(","):
            dot_tok, sep, occ_tok = item.partition(":")
            if not sep or occ_tok not in ("0", "1"):
                raise ConfigError(
                    f"{key}: conditions look like when=a:1,b:0", section=section
                )
            conditions.append((parse_dot(dot_tok, section), int(occ_tok)))
    for dot, _ in conditions:
        if dot >= n_qubits:
            raise ConfigError(f"{key}: condition dot {dot} out of range", section)
    angle = (
        parse_angle(fields["angle"], section) if "angle" in fields else math.pi
    )
    start: float | None = None
    if "start" in fields and fields["start"] != "auto":
        try:
            start = float(fields["start"])
        except ValueError as err:
            raise ConfigError(f"{key}: bad start time", section=section) from err
    try:
        spec = GateSpec(
            kind=kind, target=target, angle=angle, conditions=tuple(conditions)
        )
    except ExcitonSimError as err:
        raise ConfigError(f"{key}: {err}", section=section) from err
    return spec, start


def _parse_program(
    parser: configparser.ConfigParser, n_qubits: int
) -> list[tuple[GateSpec, float | None]]:
    section = "program"
    if not parser.has_section(section):
        return []
    entries = []
    for key in parser.options(section):
        if not key.startswith("gate."):
            raise ConfigError(f"unknown key {key!r}", section=section)
        try:
            order = int(key.split(".", 1)[1])
        except ValueError as err:
            raise ConfigError(f"bad gate key {key!r}", section=section) from err
        entries.append((order, key))
    entries.sort()
    return [
        _parse_gate(parser[section][key], n_qubits, key) for _, key in entries
    ]


def _parse_pulses(parser: configparser.ConfigParser) -> tuple[TimingPolicy, str]:
    section = "pulses"
    if not parser.has_section(section):
        return TimingPolicy(), "global"
    _check_keys(parser, section)
    get = parser[section].get
    tau_text = get("tau_ps", "auto")
    tau = None if tau_text.strip() == "auto" else float(tau_text)
    addressing = get("addressing", "global")
    if addressing not in ("global", "local"):
        raise ConfigError("addressing must be global or local", section=section)
    policy = TimingPolicy(
        tau_ps=tau,
        selectivity_fraction=float(get("selectivity_fraction", "0.25")),
        fallback_tau_ps=float(get("fallback_tau_ps", "0.1")),
        gap_factor=float(get("gap_factor", "8.0")),
    )
    return policy, addressing


def _parse_channels(
    parser: configparser.ConfigParser, n_qubits: int
) -> list[LindbladChannel]:
    section = "channels"
    if not parser.has_section(section):
        return []
    channels = []
    for key in parser.options(section):
        kind_tok, sep, dot_tok = key.partition(".")
        kinds = {"decay": "decay", "dephasing": "pure-dephasing"}
        if not sep or kind_tok not in kinds:
            raise ConfigError(f"unknown key {key!r}", section=section)
        dot = parse_dot(dot_tok, section)
        if dot >= n_qubits:
            raise ConfigError(f"channel dot {dot} out of range", section=section)
        rate = float(parser[section][key])
        channels.append(LindbladChannel(kinds[kind_tok], dot, rate))
    return channels


def _parse_integration(parser: configparser.ConfigParser) -> SimulationConfig:
    section = "integration"
    if not parser.has_section(section):
        return SimulationConfig()
    _check_keys(parser, section)
    get = parser[section].get
    kwargs = {}
    if get("time_step_ps") is not None:
        kwargs["time_step_ps"] = float(get("time_step_ps"))
    if get("frame") is not None:
        kwargs["frame"] = get("frame")
    if get("integrator_order") is not None:
        kwargs["integrator_order"] = int(get("integrator_order"))
    if get("sample_stride") is not None:
        kwargs["sample_stride"] = int(get("sample_stride"))
    if get("reference_energy_ev") is not None:
        kwargs["reference_energy_ev"] = float(get("reference_energy_ev"))
    if get("duration_ps") is not None:
        kwargs["duration_ps"] = float(get("duration_ps"))
    if get("trace_tol") is not None:
        kwargs["trace_tol"] = float(get("trace_tol"))
    if get("eig_floor") is not None:
        kwargs["eig_floor"] = float(get("eig_floor"))
    try:
        return SimulationConfig(**kwargs)
    except ExcitonSimError as err:
        raise ConfigError(str(err), section=section) from err


def _parse_outputs(parser: configparser.ConfigParser, dim: int) -> OutputsSection:
    section = "outputs"
    out = OutputsSection()
    if not parser.has_section(section):
        return out
    _check_keys(parser, section)
    get = parser[section].get
    target_text = get("fidelity_target")
    if target_text is not None:
        target_text = target_text.strip()
        out.fidelity_target_text = target_text
        if target_text == "bell":
            if dim != 4:
                raise ConfigError(
                    "fidelity_target = bell needs a two-qubit register", section
                )
            vec = np.zeros(4, dtype=complex)
            vec[0] = vec[3] = 1.0 / math.sqrt(2.0)
        else:
            try:
                vec = np.array([complex(tok) for tok in target_text.split()])
            except ValueError as err:
                raise ConfigError("cannot parse fidelity_target", section) from err
            if vec.size != dim:
                raise ConfigError(
                    f"fidelity_target needs {dim} amplitudes", section
                )
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ConfigError("fidelity_target must be nonzero", section)
            vec = vec / norm
        out.fidelity_target = vec
    if get("spectrum_linewidth_mev") is not None:
        out.spectrum_linewidth_mev = float(get("spectrum_linewidth_mev"))
    if get("biexcitonic_conditioning") is not None:
        text = get("biexcitonic_conditioning").strip()
        out.biexcitonic_conditioning_text = text
        patterns = []
        for chunk in text.split(";"):
            pattern: dict[int, int] = {}
            for item in chunk.split(","):
                dot_tok, sep, occ_tok = item.partition(":")
                if not sep or occ_tok.strip() not in ("0", "1"):
                    raise ConfigError(
                        "biexcitonic_conditioning looks like a:1 or a:1;b:1",
                        section,
                    )
                pattern[parse_dot(dot_tok, section)] = int(occ_tok)
            patterns.append(pattern)
        out.biexcitonic_conditionings = patterns
    if get("coherence_pair") is not None:
        toks = get("coherence_pair").split(":")
        if len(toks) != 2:
            raise ConfigError("coherence_pair looks like 0:3", section)
        out.coherence_pair = (int(toks[0]), int(toks[1]))
    return out


def load_config(path: str) -> RunConfig:
    """Parse and resolve a run-configuration file."""
    parser = configparser.ConfigParser(
        delimiters=("=",), inline_comment_prefixes=("#",), interpolation=None
    )
    parser.optionxform = str.lower  # type: ignore[assignment]
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    except configparser.Error as err:
        raise ConfigError(f"malformed config file {path}: {err}") from err

    known = set(_SECTION_KEYS)
    for section in parser.sections():
        if section not in known:
            raise ConfigError("unknown section", section=section)

    has_device = parser.has_section("device")
    has_register = parser.has_section("register")
    if has_device and has_register:
        raise ConfigError(
            "give either a device section or a register section, not both",
            section="register",
        )
    if not has_device and not has_register:
        raise ConfigError("a device or register section is required", section="register")

    device = _parse_device(parser) if has_device else None
    if device is not None:
        register = build_register(
            device.structure,
            transition_dipoles=device.dipoles,
            rel_tol=device.coulomb_rel_tol,
        )
        register_source = "device"
        raw_register = {}
    else:
        register = _parse_register(parser)
        register_source = "register"
        raw_register = dict(parser["register"])

    policy, addressing = _parse_pulses(parser)
    simulation = _parse_integration(parser)
    simulation.addressing = addressing
    return RunConfig(
        register=register,
        register_source=register_source,
        device=device,
        program=_parse_program(parser, register.n_qubits),
        policy=policy,
        addressing=addressing,
        channels=_parse_channels(parser, register.n_qubits),
        simulation=simulation,
        outputs=_parse_outputs(parser, register.dimension),
        raw_register_section=raw_register,
    )
