"""INI-style experiment configuration and run manifests.

Sections mirror the simulator's modules::

    [scenario]      schemes, n_interfering_femtos, trials, seed (required) ...
    [spectrum]      macro_width_hz, guard_width_hz
    [propagation]   carrier_mhz, decay_index, shadowing_db, constant_mode, ...
    [allocation]    sensing_radius_m, s_th_dbm, s_th_distance_m, ...
    [metrics]       x_prob, y_prob, noise_figure_db, delta_b_hz, zeta_db, ...

Errors carry ``path:line:`` prefixes.
"""

from __future__ import annotations

import configparser
import json
import re
from pathlib import Path

from . import __version__
from .scenario import ExperimentConfig, Scheme

SECTIONS: dict[str, tuple[str, ...]] = {
    "scenario": ("schemes", "n_interfering_femtos", "trials", "seed", "workers",
                 "reference_distance_m", "macro_radius_m", "femto_radius_m"),
    "spectrum": ("macro_width_hz", "guard_width_hz"),
    "propagation": ("carrier_mhz", "macro_tx_w", "femto_tx_w", "macro_height_m",
                    "femto_height_m", "mobile_height_m", "decay_index", "shadowing_db",
                    "indoor_shadowing_db", "constant_mode", "min_distance_m"),
    "allocation": ("sensing_radius_m", "sensing_shadowing_db", "s_th_dbm", "s_th_distance_m"),
    "metrics": ("x_prob", "y_prob", "noise_figure_db", "noise_density_dbm_hz", "delta_b_hz",
                "zeta_db"),
}
REQUIRED = {"scenario": ("schemes", "n_interfering_femtos", "trials", "seed")}
INT_KEYS = {"trials", "seed", "workers"}
STR_KEYS = {"constant_mode"}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


class ConfigError(ValueError):
    pass


def parse_int_list(text: str) -> tuple[int, ...]:
    """``"0, 5, 10"`` or an inclusive range ``"0:40:5"``."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        start, stop, step = parts
        if step <= 0:
            raise ValueError("range step must be > 0")
        return tuple(range(start, stop + 1, step))
    return tuple(int(p) for p in text.replace(",", " ").split())


def parse_float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        if step <= 0:
            raise ValueError("range step must be > 0")
        n = int(round((stop - start) / step))
        return tuple(start + k * step for k in range(n + 1))
    return tuple(float(p) for p in text.replace(",", " ").split())


def _line_index(text: str) -> tuple[dict, dict]:
    sections, keys = {}, {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1).strip()
            sections.setdefault(current, lineno)
            continue
        m = _KEY_RE.match(line)
        if m and current is not None:
            keys.setdefault((current, m.group(1).strip().lower()), lineno)
    return sections, keys


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key == "schemes":
        return tuple(Scheme(s) for s in raw.replace(",", " ").split())
    if key == "n_interfering_femtos":
        return parse_int_list(raw)
    if key == "s_th_dbm":
        return None if raw.lower() in ("", "auto", "none") else float(raw)
    if key in INT_KEYS:
        return int(raw)
    if key in STR_KEYS:
        return raw
    return float(raw)


def loads_config(text: str, path: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", 1)
        raise ConfigError(f"{path}:{lineno}: {exc.message.splitlines()[0]}") from None
    sections, lines = _line_index(text)

    values = {}
    for section in parser.sections():
        where = f"{path}:{sections.get(section, 1)}"
        if section not in SECTIONS:
            raise ConfigError(f"{where}: unknown section [{section}]")
        for key, raw in parser.items(section):
            at = f"{path}:{lines.get((section, key), sections.get(section, 1))}"
            if key not in SECTIONS[section]:
                raise ConfigError(f"{at}: unknown key {key!r} in [{section}]")
            try:
                values[key] = _convert(key, raw)
            except ValueError as exc:
                raise ConfigError(f"{at}: bad value for {key!r}: {exc}") from None
    for section, keys in REQUIRED.items():
        for key in keys:
            if not parser.has_option(section, key):
                raise ConfigError(
                    f"{path}:{sections.get(section, 1)}: missing required key {key!r} "
                    f"in [{section}]")
    try:
        return ExperimentConfig(**values).validate()
    except ValueError as exc:
        raise ConfigError(f"{path}:1: {exc}") from None


def load_config(path) -> ExperimentConfig:
    """Read an ``.ini`` config or a ``manifest.json`` written by a previous run."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            return config_from_manifest(json.loads(text))
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"{path}:1: bad manifest: {exc}") from None
    return loads_config(text, str(path))


def dumps_config(config: ExperimentConfig) -> str:
    """Render ``config`` in the INI format accepted by :func:`loads_config`."""
    d = config.to_dict()
    out = []
    for section, keys in SECTIONS.items():
        out.append(f"[{section}]")
        for key in keys:
            v = d[key]
            if key == "schemes":
                v = ", ".join(v)
            elif key == "n_interfering_femtos":
                v = ", ".join(str(n) for n in v)
            elif v is None:
                v = "auto"
            out.append(f"{key} = {v}")
        out.append("")
    return "\n".join(out)


def manifest(config: ExperimentConfig, config_path, output_dir, command: str = "run",
             extra: dict | None = None) -> dict:
    m = {
        "tool": "femtodfr",
        "version": __version__,
        "command": command,
        "config_path": str(config_path),
        "output_dir": str(output_dir),
        "seed": config.seed,
        "config": config.to_dict(),
    }
    if extra:
        m.update(extra)
    return m


def config_from_manifest(m: dict) -> ExperimentConfig:
    return ExperimentConfig.from_dict(m["config"]).validate()
