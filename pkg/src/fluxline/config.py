"""Flat key = value configuration files.

One assignment per line, '#' starts a comment, keys are case-sensitive.
Units: lengths in meters, frequencies in GHz (plain, not angular), Z in
ohms.  Unknown keys are rejected to catch typos early.

Example:

    # single qubit, strongly loaded
    length_L  = 0.01
    w0        = 1e-6
    d0        = 1e-6
    w_over_w0 = 20
    d0_over_d = 10
    N         = 1
    Z_ohm     = 50
    f0_GHz    = 6.0
"""

from __future__ import annotations

import hashlib
import math

from .errors import ConfigError
from .geometry import DeviceGeometry, SectorLayout, build_layout, set_switch


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _parse_bool_list(text: str) -> list[bool]:
    return [_parse_bool(tok) for tok in text.replace(",", " ").split()]


# key -> (parser, default); None default means "absent unless given"
SCHEMA = {
    # geometry / physical scales
    "length_L": (float, 0.01),
    "w0": (float, 1e-6),
    "d0": (float, 1e-6),
    "w_over_w0": (float, 1.0),
    "d0_over_d": (float, 1.0),
    "N": (int, 1),
    "Z_ohm": (float, 50.0),
    "f0_GHz": (float, 6.0),
    "fa_GHz": (float, None),
    "switches": (_parse_bool_list, None),
    "harmonic": (int, None),
    # sweep axes; explicit value lists override min/max/steps
    "w_over_w0_min": (float, 1.0),
    "w_over_w0_max": (float, 60.0),
    "w_over_w0_steps": (int, None),
    "w_over_w0_values": (_parse_float_list, None),
    "d0_over_d_min": (float, 1.0),
    "d0_over_d_max": (float, 15.0),
    "d0_over_d_steps": (int, None),
    "d0_over_d_values": (_parse_float_list, None),
    "diagonal": (_parse_bool, False),
    "qubit_counts": (_parse_int_list, None),
    "two_qubit": (_parse_bool, False),
    # execution
    "workers": (int, 1),
    "grid_points": (int, 2 ** 17 + 1),
    "profile_samples": (int, 4001),
}


def parse_assignments(lines, source="<config>") -> dict[str, str]:
    """Raw key -> value-string pairs from config-file lines."""
    raw = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def coerce(raw: dict[str, str]) -> dict:
    """Typed config dict from raw strings; applies defaults and validates keys."""
    cfg = {}
    for key, value in raw.items():
        if key not in SCHEMA:
            known = ", ".join(sorted(SCHEMA))
            raise ConfigError(f"unknown config key {key!r}; known keys: {known}")
        parser, _ = SCHEMA[key]
        try:
            cfg[key] = parser(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc
    for key, (_, default) in SCHEMA.items():
        if key not in cfg and default is not None:
            cfg[key] = default
    return cfg


def load_config(path: str | None = None, overrides: list[str] | None = None) -> dict:
    """Read a config file (optional) and apply key=value override strings."""
    raw = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = parse_assignments(fh, source=str(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        raw[key.strip()] = value.strip()
    return coerce(raw)


def config_hash(cfg: dict) -> str:
    """Stable digest of the effective configuration."""
    canon = "\n".join(f"{k}={cfg[k]!r}" for k in sorted(cfg))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def omega0_from_config(cfg: dict) -> float:
    """Angular base-mode frequency (rad/s) from f0_GHz."""
    return 2.0 * math.pi * cfg["f0_GHz"] * 1e9


def omega_a_from_config(cfg: dict) -> float | None:
    fa = cfg.get("fa_GHz")
    return None if fa is None else 2.0 * math.pi * fa * 1e9


def geometry_from_config(cfg: dict) -> DeviceGeometry:
    return DeviceGeometry.from_ratios(
        length_L=cfg["length_L"],
        w0=cfg["w0"],
        d0=cfg["d0"],
        w_over_w0=cfg["w_over_w0"],
        d0_over_d=cfg["d0_over_d"],
        qubit_count_N=cfg["N"],
        impedance_Z=cfg["Z_ohm"],
        base_mode_freq=omega0_from_config(cfg),
    )


def layout_from_config(cfg: dict) -> SectorLayout:
    layout = build_layout(geometry_from_config(cfg))
    switches = cfg.get("switches")
    if switches is not None:
        if len(switches) != layout.qubit_count:
            raise ConfigError(
                f"switches lists {len(switches)} states for N={layout.qubit_count} qubits"
            )
        for i, on in enumerate(switches):
            layout = set_switch(layout, i, on)
    return layout
