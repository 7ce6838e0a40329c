"""Strict scenario configuration for the command-line runner.

The format is flat ``key = value`` pairs under ``[section]`` headers (INI
syntax, ``#`` comments).  Parsing is strict: unknown sections or keys, missing
required keys, and malformed values are all hard errors that name the exact
section and key, so a config that runs once keeps meaning the same thing.
The full grammar is documented in the README.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .apertures import (
    ApertureProfile,
    ApertureSetup,
    MomentumGrid,
    default_grid,
    gaussian_profile,
    point_profile,
    rectangular_profile,
)
from .detectors import (
    DetectorModel,
    DipoleSpec,
    PhotonQuadrature,
    custom_model,
    fixed_dipole,
    heisenberg_model,
    isotropic_dipole,
    micromaser_model,
)
from .eraser import plus_minus_basis

SCENARIOS = ("heisenberg", "micromaser", "custom", "eraser")
MODES = ("simulate", "sweep", "decompose", "erase")
SWEEP_PARAMETERS = ("k_gamma_d", "shift_over_length")


class ConfigError(ValueError):
    """A scenario config is syntactically or semantically invalid."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description; one config drives one run."""

    scenario: str
    mode: str
    separation: float
    wavelength: float
    profile: ApertureProfile
    grid_p_max: float | None
    grid_n_points: int
    seed: int
    output_prefix: str
    out_dir: str | None
    # heisenberg detector
    k_gamma: float | None = None
    gamma_over_c: float = 0.0
    dipole: DipoleSpec = field(default_factory=isotropic_dipole)
    quadrature: PhotonQuadrature = field(default_factory=PhotonQuadrature)
    # micromaser detector
    cavity_length: float | None = None
    k_max: float | None = None
    n_k: int = 8001
    # custom detector
    channels: tuple[tuple[float, complex, complex], ...] | None = None
    # sweep mode
    sweep_parameter: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_count: int | None = None
    # erase mode
    chi_values: tuple[float, ...] | None = None
    # decompose mode
    histogram_bins: int = 64
    # raw key/value sections for the summary echo
    echo: dict = field(default_factory=dict, compare=False)

    def build_setup(self) -> ApertureSetup:
        return ApertureSetup(self.separation, self.profile, self.wavelength)

    def build_grid(self) -> MomentumGrid:
        if self.grid_p_max is not None:
            return MomentumGrid(self.grid_p_max, self.grid_n_points)
        return default_grid(self.separation, self.grid_n_points)

    def build_model(self) -> DetectorModel:
        if self.scenario == "heisenberg":
            assert self.k_gamma is not None
            return heisenberg_model(
                k_gamma=self.k_gamma,
                separation=self.separation,
                gamma_over_c=self.gamma_over_c,
                dipole=self.dipole,
                quadrature=self.quadrature,
            )
        if self.scenario == "micromaser":
            assert self.cavity_length is not None
            return micromaser_model(
                cavity_length=self.cavity_length,
                separation=self.separation,
                k_max=self.k_max,
                n_k=self.n_k,
            )
        if self.scenario == "custom":
            assert self.channels is not None
            return custom_model(list(self.channels))
        # the eraser scenario is the ideal orthogonal detector viewed in
        # its +/- superposition basis
        return plus_minus_basis(custom_model([(1.0, 1.0, 0.0), (1.0, 0.0, 1.0)]))


class _Section:
    """One parsed section with strict key accounting."""

    def __init__(self, name: str, data: dict[str, str], source: str):
        self.name = name
        self.data = dict(data)
        self.used: set[str] = set()
        self.source = source

    def _error(self, key: str, message: str) -> ConfigError:
        return ConfigError(f"{self.source}: [{self.name}] {key}: {message}")

    def raw(self, key: str, default: str | None = None, required: bool = False) -> str | None:
        if key in self.data:
            self.used.add(key)
            return self.data[key]
        if required:
            raise self._error(key, "required key is missing")
        return default

    def string(self, key: str, choices: tuple[str, ...], **kw) -> str | None:
        value = self.raw(key, **kw)
        if value is not None and value not in choices:
            raise self._error(key, f"must be one of {', '.join(choices)}; got {value!r}")
        return value

    def number(self, key: str, default: float | None = None, required: bool = False) -> float | None:
        value = self.raw(key, required=required)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            raise self._error(key, f"not a number: {value!r}") from None

    def integer(self, key: str, default: int | None = None, required: bool = False) -> int | None:
        value = self.raw(key, required=required)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            raise self._error(key, f"not an integer: {value!r}") from None

    def numbers(self, key: str, required: bool = False) -> list[float] | None:
        value = self.raw(key, required=required)
        if value is None:
            return None
        try:
            return [float(tok) for tok in value.split()]
        except ValueError:
            raise self._error(key, f"not a list of numbers: {value!r}") from None

    def check_exhausted(self) -> None:
        unknown = sorted(set(self.data) - self.used)
        if unknown:
            raise ConfigError(
                f"{self.source}: [{self.name}] unknown key(s): {', '.join(unknown)}"
            )


def _parse_channels(section: _Section) -> tuple[tuple[float, complex, complex], ...]:
    raw = section.raw("channels", required=True)
    entries = [e.strip() for chunk in raw.split("\n") for e in chunk.split(";") if e.strip()]
    if not entries:
        raise ConfigError(f"{section.source}: [detector] channels: no channels given")
    channels = []
    for entry in entries:
        tokens = entry.split()
        if len(tokens) != 3:
            raise ConfigError(
                f"{section.source}: [detector] channels: expected "
                f"'weight amp_a amp_b', got {entry!r}"
            )
        try:
            channels.append((float(tokens[0]), complex(tokens[1]), complex(tokens[2])))
        except ValueError:
            raise ConfigError(
                f"{section.source}: [detector] channels: malformed entry {entry!r}"
            ) from None
    return tuple(channels)


def parse_config(text: str, source: str = "<config>", mode: str | None = None) -> ScenarioConfig:
    """Parse and validate a scenario config.

    ``mode`` is the CLI subcommand; a ``mode`` key inside the config is
    allowed but must agree with it.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), strict=True
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    sections = {
        name: _Section(name, dict(parser.items(name)), source) for name in parser.sections()
    }
    echo = {name: dict(parser.items(name)) for name in parser.sections()}

    def take(name: str) -> _Section:
        if name not in sections:
            raise ConfigError(f"{source}: missing required section [{name}]")
        return sections[name]

    scenario_sec = take("scenario")
    scenario = scenario_sec.string("kind", SCENARIOS, required=True)
    config_mode = scenario_sec.string("mode", MODES)
    if mode is None:
        if config_mode is None:
            raise ConfigError(f"{source}: [scenario] mode: required when no subcommand sets it")
        mode = config_mode
    elif config_mode is not None and config_mode != mode:
        raise ConfigError(
            f"{source}: [scenario] mode: config says {config_mode!r} but the "
            f"{mode!r} subcommand was invoked"
        )
    assert scenario is not None and mode is not None

    if mode == "erase" and scenario != "eraser":
        raise ConfigError(f"{source}: [scenario] kind: erase runs need kind = eraser")
    if mode == "sweep" and scenario not in ("heisenberg", "micromaser"):
        raise ConfigError(
            f"{source}: [scenario] kind: sweep runs need kind = heisenberg or micromaser"
        )

    geometry = take("geometry")
    separation = geometry.number("separation", required=True)
    wavelength = geometry.number("wavelength", required=True)
    kind = geometry.string("profile", ("point", "rectangular", "gaussian"), required=True)
    profile: ApertureProfile
    try:
        if kind == "point":
            profile = point_profile()
        elif kind == "rectangular":
            width = geometry.number("width", required=True)
            profile = rectangular_profile(float(width))
        else:
            sigma = geometry.number("sigma", required=True)
            profile = gaussian_profile(float(sigma))
        if separation is None or separation <= 0:
            raise ConfigError(f"{source}: [geometry] separation: must be positive")
        if wavelength is None or wavelength <= 0:
            raise ConfigError(f"{source}: [geometry] wavelength: must be positive")
        ApertureSetup(float(separation), profile, float(wavelength))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{source}: [geometry] {exc}") from None

    grid_p_max = None
    grid_n_points = 4096
    if "grid" in sections:
        grid_sec = sections["grid"]
        grid_p_max = grid_sec.number("p_max")
        n_points = grid_sec.integer("n_points", default=4096)
        assert n_points is not None
        grid_n_points = n_points
        if grid_p_max is not None and grid_p_max <= 0:
            raise ConfigError(f"{source}: [grid] p_max: must be positive")
        if grid_n_points < 2:
            raise ConfigError(f"{source}: [grid] n_points: must be >= 2")

    fields: dict = {}
    if scenario == "eraser":
        if "detector" in sections:
            raise ConfigError(f"{source}: [detector]: not allowed for the eraser scenario")
    else:
        detector = take("detector")
        try:
            if scenario == "heisenberg":
                sweeps_k = mode == "sweep"
                if sweeps_k:
                    if detector.raw("k_gamma") is not None:
                        raise ConfigError(
                            f"{source}: [detector] k_gamma: not allowed in a sweep "
                            "(the sweep sets it)"
                        )
                else:
                    fields["k_gamma"] = detector.number("k_gamma", required=True)
                fields["gamma_over_c"] = detector.number("gamma_over_c", default=0.0)
                dipole_kind = detector.string(
                    "dipole", ("isotropic", "fixed"), default="isotropic"
                )
                if dipole_kind == "fixed":
                    direction = detector.numbers("dipole_direction", required=True)
                    if direction is None or len(direction) != 3:
                        raise ConfigError(
                            f"{source}: [detector] dipole_direction: need three components"
                        )
                    fields["dipole"] = fixed_dipole(tuple(direction))  # type: ignore[arg-type]
                else:
                    fields["dipole"] = isotropic_dipole()
                fields["quadrature"] = PhotonQuadrature(
                    n_theta=detector.integer("n_theta", default=64),  # type: ignore[arg-type]
                    n_phi=detector.integer("n_phi", default=64),  # type: ignore[arg-type]
                    n_omega=detector.integer("n_omega", default=1),  # type: ignore[arg-type]
                    omega_window=detector.number("omega_window", default=40.0),  # type: ignore[arg-type]
                )
            elif scenario == "micromaser":
                fields["cavity_length"] = detector.number("cavity_length", required=True)
                fields["k_max"] = detector.number("k_max")
                fields["n_k"] = detector.integer("n_k", default=8001)
            else:
                fields["channels"] = _parse_channels(detector)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{source}: [detector] {exc}") from None

    allowed = {"scenario", "geometry", "grid", "output", "run"}
    if scenario != "eraser":
        allowed.add("detector")

    if mode == "sweep":
        allowed.add("sweep")
        sweep = take("sweep")
        parameter = sweep.string("parameter", SWEEP_PARAMETERS, required=True)
        if scenario == "heisenberg" and parameter != "k_gamma_d":
            raise ConfigError(
                f"{source}: [sweep] parameter: heisenberg sweeps use k_gamma_d"
            )
        if scenario == "micromaser" and parameter != "shift_over_length":
            raise ConfigError(
                f"{source}: [sweep] parameter: micromaser sweeps use shift_over_length"
            )
        start = sweep.number("start", required=True)
        stop = sweep.number("stop", required=True)
        count = sweep.integer("count", required=True)
        assert start is not None and stop is not None and count is not None
        if count < 2:
            raise ConfigError(f"{source}: [sweep] count: must be >= 2")
        if not stop > start:
            raise ConfigError(f"{source}: [sweep] stop: must exceed start")
        # wavenumbers must stay positive; a zero lag is fine
        if parameter == "k_gamma_d" and start <= 0:
            raise ConfigError(f"{source}: [sweep] start: must be positive")
        if parameter == "shift_over_length" and start < 0:
            raise ConfigError(f"{source}: [sweep] start: must be nonnegative")
        fields.update(
            sweep_parameter=parameter,
            sweep_start=float(start),
            sweep_stop=float(stop),
            sweep_count=int(count),
        )

    if mode == "erase":
        allowed.add("eraser")
        eraser_sec = take("eraser")
        chi_list = eraser_sec.numbers("chi")
        chi_count = eraser_sec.integer("chi_count")
        if (chi_list is None) == (chi_count is None):
            raise ConfigError(
                f"{source}: [eraser]: give exactly one of 'chi' or 'chi_count'"
            )
        if chi_count is not None:
            if chi_count < 2:
                raise ConfigError(f"{source}: [eraser] chi_count: must be >= 2")
            chi_list = list(2.0 * np.pi * np.arange(chi_count) / chi_count)
        assert chi_list is not None
        if not chi_list:
            raise ConfigError(f"{source}: [eraser] chi: needs at least one value")
        fields["chi_values"] = tuple(float(c) for c in chi_list)

    if mode == "decompose":
        allowed.add("histogram")
        if "histogram" in sections:
            bins = sections["histogram"].integer("bins", default=64)
            assert bins is not None
            if bins < 1:
                raise ConfigError(f"{source}: [histogram] bins: must be >= 1")
            fields["histogram_bins"] = bins

    prefix = ""
    out_dir = None
    if "output" in sections:
        out_sec = sections["output"]
        prefix = out_sec.raw("prefix", default="") or ""
        out_dir = out_sec.raw("out_dir")

    seed = 0
    if "run" in sections:
        run_seed = sections["run"].integer("seed", default=0)
        assert run_seed is not None
        seed = run_seed

    unknown_sections = sorted(set(sections) - allowed)
    if unknown_sections:
        raise ConfigError(
            f"{source}: section(s) not allowed for mode {mode!r}: "
            + ", ".join(f"[{s}]" for s in unknown_sections)
        )
    for section in sections.values():
        section.check_exhausted()

    return ScenarioConfig(
        scenario=scenario,
        mode=mode,
        separation=float(separation),  # type: ignore[arg-type]
        wavelength=float(wavelength),  # type: ignore[arg-type]
        profile=profile,
        grid_p_max=grid_p_max,
        grid_n_points=grid_n_points,
        seed=seed,
        output_prefix=prefix,
        out_dir=out_dir,
        echo=echo,
        **fields,
    )


def render_config(echo: dict) -> str:
    """Turn a summary's config echo back into config text (round-trip aid)."""
    lines = []
    for section, items in echo.items():
        lines.append(f"[{section}]")
        for key, value in items.items():
            if "\n" in value:
                indented = value.replace("\n", "\n    ")
                lines.append(f"{key} = {indented}")
            else:
                lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
