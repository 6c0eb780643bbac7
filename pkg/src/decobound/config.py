"""INI configuration with a closed schema.

Every section and key must be known; a typo in a physics parameter is an
error rather than a silent fallback to the default.  Values missing from a
user file are taken from the shipped ``data/default.ini``.  The ``materials``
section is a free table of ``name = density`` entries.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DecoboundError, DomainError
from .optomech import OptomechParams, PhysicalConstants

ENV_VAR = "DECOBOUND_CONFIG"


class ConfigError(DecoboundError):
    """Schema violation; ``path`` names the offending ``section.key``."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise ValueError("must be a positive integer")
    return v


def _float(s: str) -> float:
    v = float(s)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError("must be finite")
    return v


def _positive_float(s: str) -> float:
    v = _float(s)
    if v <= 0:
        raise ValueError("must be positive")
    return v


def _nonneg_float(s: str) -> float:
    v = _float(s)
    if v < 0:
        raise ValueError("must be non-negative")
    return v


def _probability(s: str) -> float:
    v = _float(s)
    if not 0 <= v <= 1:
        raise ValueError("must lie in [0, 1]")
    return v


def _float_list(s: str) -> list[float]:
    items = [x.strip() for x in s.split(",") if x.strip()]
    if not items:
        raise ValueError("must be a non-empty comma-separated list")
    return [_nonneg_float(x) for x in items]


def _name_list(s: str) -> list[str]:
    items = [x.strip() for x in s.split(",") if x.strip()]
    if not items:
        raise ValueError("must be a non-empty comma-separated list")
    return items


def _state(s: str) -> str:
    if s not in ("canonical", "werner"):
        raise ValueError("must be 'canonical' or 'werner'")
    return s


SCHEMA = {
    "constants": {"G": _positive_float, "k_B": _positive_float, "hbar": _positive_float},
    "optomech": {
        "g0": _positive_float,
        "omega_m": _positive_float,
        "gamma_m": _positive_float,
        "temperatures": _float_list,
        "materials": _name_list,
        "grid": _positive_int,
    },
    "grids": {"region": _positive_int, "channels": _positive_int},
    "tolerances": {
        "certificate": _nonneg_float,
        "oracle": _nonneg_float,
        "tightness_beta": _nonneg_float,
        "tightness_dec": _nonneg_float,
        "converse": _nonneg_float,
        "lp": _nonneg_float,
    },
    "seeds": {"simulate": int, "certify": int},
    "simulate": {"state": _state, "visibility": _probability, "rounds": _positive_int, "runs": _positive_int},
    "certify": {
        "sdp_states": _positive_int,
        "oracle_states": _positive_int,
        "tightness_points": _positive_int,
        "converse_states": _positive_int,
    },
}
FREE_SECTIONS = {"materials": _nonneg_float}


@dataclass
class Config:
    values: dict[str, dict]
    source: str

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    @property
    def constants(self) -> PhysicalConstants:
        c = self["constants"]
        return PhysicalConstants(G=c["G"], k_B=c["k_B"], hbar=c["hbar"])

    def optomech_cases(self) -> list[tuple[str, float, OptomechParams]]:
        o = self["optomech"]
        out = []
        for mat in o["materials"]:
            for temp in o["temperatures"]:
                params = OptomechParams(
                    o["g0"], o["omega_m"], o["gamma_m"], temp,
                    self["materials"][mat], self.constants,
                )
                out.append((mat, temp, params))
        return out


def _parser() -> configparser.ConfigParser:
    p = configparser.ConfigParser(interpolation=None)
    p.optionxform = str  # keys are case-sensitive (k_B, G)
    return p


def default_text() -> str:
    return resources.files("decobound").joinpath("data/default.ini").read_text()


def _merge(base: configparser.ConfigParser, text: str, source: str):
    user = _parser()
    try:
        user.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(source, f"unparseable: {exc}") from None
    for section in user.sections():
        if section not in SCHEMA and section not in FREE_SECTIONS:
            raise ConfigError(section, "unknown section")
        if not base.has_section(section):
            base.add_section(section)
        for key, value in user.items(section):
            if section in SCHEMA and key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
            base.set(section, key, value)


def load_config(path: str | os.PathLike | None = None) -> Config:
    """Load ``path`` (or ``$DECOBOUND_CONFIG``) over the shipped defaults.

    Raises OSError when the file cannot be read and ConfigError on any schema
    violation.
    """
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    base = _parser()
    base.read_string(default_text(), source="<default>")
    source = "<default>"
    if path is not None:
        text = Path(path).read_text()
        _merge(base, text, str(path))
        source = str(path)

    values: dict[str, dict] = {}
    for section, keys in SCHEMA.items():
        values[section] = {}
        for key, conv in keys.items():
            raw = base.get(section, key, fallback=None)
            if raw is None:
                raise ConfigError(f"{section}.{key}", "missing")
            try:
                values[section][key] = conv(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}", f"{raw!r} {exc}") from None
    for section, conv in FREE_SECTIONS.items():
        values[section] = {}
        for key, raw in base.items(section) if base.has_section(section) else []:
            try:
                values[section][key] = conv(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}", f"{raw!r} {exc}") from None

    cfg = Config(values, source)
    for i, mat in enumerate(values["optomech"]["materials"]):
        if mat not in values["materials"]:
            raise ConfigError(f"optomech.materials[{i}]", f"no density for material {mat!r}")
    try:
        cfg.optomech_cases()
    except DomainError as exc:
        # only the quality factor check can still fail here
        raise ConfigError("optomech.gamma_m", str(exc)) from None
    return cfg
