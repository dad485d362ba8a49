"""Plain-text key = value configuration files.

Lines are ``key = value`` with ``#`` comments; keys mirror the fields of
SimulationConfig.  dump_default_config writes a fully commented example
that reproduces the 0.5 V diode benchmark.
"""

from __future__ import annotations

from dataclasses import fields
from pathlib import Path

from .errors import ConfigurationError
from .simulate import SimulationConfig

_DOC = {
    "mode": "stochastic_recombination | no_recombination | split_recombination",
    "final_time_ps": "simulated time in picoseconds",
    "cfl": "advective CFL number in (0, 1)",
    "nx": "position cells; keep channel edges on cell boundaries",
    "nmu": "angle cells (even, so no cell straddles mu = 0)",
    "r_cells_per_shell": "r cells per phonon energy A; r spacing = A / this",
    "r_max_target": "energy cutoff target; rounded up to a shell-aligned value",
    "bias_volts": "applied potential at x = 1",
    "n_outputs": "number of output times (including t = 0)",
    "write_snapshots": "1 to dump full phase-space snapshots per output time",
    "n_plus_per_m3": "contact doping in 1/m^3",
    "n_channel_per_m3": "channel doping in 1/m^3",
    "channel_start": "channel left edge in device units [0, 1]",
    "channel_end": "channel right edge in device units [0, 1]",
    "quad_points": "Gauss-Legendre points for chaos projections",
    "n_divisor": "N: random interval is +-beta/N around the mean 1/(K_B T_L)",
    "lattice_temperature": "mean lattice temperature in K",
    "phonon_energy_ev": "optical phonon energy in eV",
    "effective_mass_ratio": "conduction-band effective mass over m_e",
    "beta_sig_figs": "significant digits kept in beta (quoted-constant chain)",
}

_BOOL_FIELDS = {"write_snapshots"}
_INT_FIELDS = {"nx", "nmu", "r_cells_per_shell", "n_outputs", "quad_points",
               "beta_sig_figs"}
_STR_FIELDS = {"mode"}


def parse_config_text(text: str, source: str = "<config>") -> SimulationConfig:
    values: dict = {}
    known = {f.name for f in fields(SimulationConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            if key in _STR_FIELDS:
                values[key] = val
            elif key in _BOOL_FIELDS:
                values[key] = val.lower() in ("1", "true", "yes", "on")
            elif key in _INT_FIELDS:
                values[key] = int(val)
            else:
                values[key] = float(val)
        except ValueError as exc:
            raise ConfigurationError(f"{source}:{lineno}: bad value for {key}: {val!r}") from exc
    try:
        return SimulationConfig(**values)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc


def load_config(path) -> SimulationConfig:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {p}")
    return parse_config_text(p.read_text(), source=str(p))


def default_config_text() -> str:
    lines = ["# sgdiode run configuration (0.5 V, 1 um n+/n/n+ silicon diode)"]
    cfg = SimulationConfig()
    for f in fields(SimulationConfig):
        value = getattr(cfg, f.name)
        if f.name in _BOOL_FIELDS:
            value = int(value)
        lines.append(f"{f.name} = {value}    # {_DOC[f.name]}")
    return "\n".join(lines) + "\n"


def dump_default_config(path) -> None:
    Path(path).write_text(default_config_text())
