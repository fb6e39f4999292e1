"""Run configuration: ``key = value`` documents with [model] and [run] sections."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .model import ModelParams, dmi_from_field

log = logging.getLogger(__name__)

FIELD_TOL = 1e-12


class ConfigError(ValueError):
    """Invalid configuration document or flag."""


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not a finite number")
    return value


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError("not an integer")
    return int(value)


def _optional(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str):
        if text.strip().lower() in ("", "auto", "none"):
            return None
        return conv(text)
    return parse


def _pairs(text: str) -> list[tuple[int, int]]:
    """'1-4, 1-14' (1-based sites) -> [(0, 3), (0, 13)]."""
    out = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        left, sep, right = item.partition("-")
        if not sep:
            raise ValueError(f"pair {item!r} must look like 'source-probe'")
        n, m = int(left), int(right)
        if n < 1 or m < 1:
            raise ValueError("site indices are 1-based")
        out.append((n - 1, m - 1))
    if not out:
        raise ValueError("no pairs given")
    return out


def _format_pairs(pairs) -> str:
    return ", ".join(f"{n + 1}-{m + 1}" for n, m in pairs)


# key -> (section, parser, default); model defaults are the reference parameter set
KEYS: dict[str, tuple[str, Callable[[str], Any], Any]] = {
    "j1": ("model", _float, 1.0),
    "j2": ("model", _float, 0.5),
    "d": ("model", _float, 1.0),
    "a": ("model", _float, 1e-3),
    "a0": ("model", _float, 1.0),
    "n": ("model", _int, 1000),
    "g_me": ("model", _float, 1.0),
    "e_y": ("model", _optional(_float), None),
    "zeta": ("model", _optional(_float), None),
    "zeta_decay": ("model", _float, 5.0),
    "r_sites": ("run", _int, 10),
    "t_max": ("run", _optional(_float), None),
    "dt": ("run", _optional(_float), None),
    "d_min": ("run", _float, 0.0),
    "d_max": ("run", _float, 3.0),
    "d_steps": ("run", _int, 7),
    "n_sites": ("run", _int, 16),
    "source": ("run", _int, 1),
    "displacement": ("run", _int, 3),
    "pairs": ("run", _pairs, [(0, 3), (0, 13)]),
    "k_points": ("run", _int, 721),
}


@dataclass
class RunConfig:
    model: dict[str, Any]
    run: dict[str, Any]
    provenance: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str):
        if key in self.model:
            return self.model[key]
        return self.run[key]

    def model_params(self) -> ModelParams:
        m = self.model
        return ModelParams(j1=m["j1"], j2=m["j2"], d=m["d"], a=m["a"], a0=m["a0"],
                           n=m["n"], g_me=m["g_me"], zeta_decay=m["zeta_decay"])

    @property
    def zeta_override(self) -> float | None:
        return self.model["zeta"]

    def resolved(self) -> dict[str, Any]:
        """Every key with its final value, in declaration order."""
        out = {}
        for key in KEYS:
            value = self[key]
            out[key] = _format_pairs(value) if key == "pairs" else value
        return out


def _parse_value(key: str, text: str, where: str):
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        return KEYS[key][1](text)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value {text!r} for {key!r}: {exc}") from None


def parse_config(text: str = "", overrides: Mapping[str, str] | None = None) -> RunConfig:
    """Parse a configuration document and apply flag overrides.

    Precedence is flag > file > default; the source of every key is kept in
    ``provenance``.
    """
    values = {key: default for key, (_, _, default) in KEYS.items()}
    provenance = {key: "default" for key in KEYS}

    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("model", "run"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key = key.strip().lower()
        where = f"line {lineno}"
        parsed = _parse_value(key, value.strip(), where)
        if section is not None and KEYS[key][0] != section:
            raise ConfigError(f"{where}: key {key!r} belongs in [{KEYS[key][0]}], not [{section}]")
        values[key] = parsed
        provenance[key] = "file"

    for key, value in (overrides or {}).items():
        values[key] = _parse_value(key, str(value), f"flag --{key.replace('_', '-')}")
        provenance[key] = "flag"

    if values["e_y"] is not None:
        derived = dmi_from_field(values["e_y"], values["g_me"])
        if provenance["d"] != "default" and abs(derived - values["d"]) > FIELD_TOL:
            raise ConfigError(
                f"d = {values['d']} conflicts with e_y * g_me = {derived}; give one or make them agree")
        values["d"] = derived
        provenance["d"] = f"derived({provenance['e_y']})"

    for key in KEYS:
        log.info("config %s = %r (%s)", key, values[key], provenance[key])

    model = {k: v for k, v in values.items() if KEYS[k][0] == "model"}
    run = {k: v for k, v in values.items() if KEYS[k][0] == "run"}
    config = RunConfig(model=model, run=run, provenance=provenance)
    try:
        config.model_params()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if config.zeta_override is not None and not 0 < config.zeta_override <= 1:
        raise ConfigError(f"zeta must lie in (0, 1], got {config.zeta_override}")
    return config
