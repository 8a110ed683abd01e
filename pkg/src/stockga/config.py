"""Flat ``key = value`` config files for :class:`~stockga.ga.GaConfig`.

Keys are exactly the GaConfig field names. Blank lines and ``#`` comments are
ignored; unknown or repeated keys are errors.
"""

from __future__ import annotations

from dataclasses import asdict, fields

from .ga import ConfigError, GaConfig, GenerationPolicy

_DISABLED = {"none", "off", "disabled"}


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _window(key: str, text: str) -> int | None:
    if text.lower() in _DISABLED:
        return None
    return _int(key, text)


_PARSERS = {
    "max_iterations": _int,
    "stabilization_window": _window,
    "crossover_rate": _float,
    "swap_probability": _float,
    "mutation_points": _int,
    "generation_policy": lambda key, text: GenerationPolicy.parse(text),
    "population_size": _int,
    "seed": _int,
}
assert set(_PARSERS) == {f.name for f in fields(GaConfig)}


def parse_config(text: str) -> GaConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _PARSERS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = _PARSERS[key](key, value)
    return GaConfig(**values)


def load_config(path) -> GaConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: GaConfig) -> dict:
    doc = asdict(config)
    doc["generation_policy"] = str(config.generation_policy)
    return doc


def format_config(config: GaConfig) -> str:
    lines = []
    for key, value in config_to_dict(config).items():
        lines.append(f"{key} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"
