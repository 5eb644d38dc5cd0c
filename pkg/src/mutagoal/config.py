"""Run configuration: defaults, the optional ``mutagoal.conf`` file, flags."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Optional

from mutagoal.errors import MutagoalError
from mutagoal.interp import DEFAULT_BUDGET
from mutagoal.mutantgen import OPERATORS
from mutagoal.reporting import FORMATS
from mutagoal.selection import STRATEGIES

CONFIG_NAME = "mutagoal.conf"
COST_MODES = ("steps", "wall")


class ConfigError(MutagoalError):
    """Invalid setting, either on the command line or in a config file."""


@dataclass(frozen=True)
class Config:
    ops: tuple[str, ...] = OPERATORS
    strategy: str = "focal"
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    out: str = "out"
    format: str = "table"
    cost_mode: str = "steps"


SETTINGS = tuple(f.name for f in fields(Config))


def parse_ops(text: str) -> tuple[str, ...]:
    ops = tuple(sorted({o.strip().upper() for o in text.split(",") if o.strip()}))
    if not ops or any(o not in OPERATORS for o in ops):
        raise ConfigError(f"invalid operator list {text!r}; choose from {','.join(OPERATORS)}")
    return ops


def _positive(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {text!r}") from None
    if value <= 0:
        raise ConfigError(f"{what} must be positive, got {value}")
    return value


def coerce(key: str, value: str):
    """Convert the textual form of one setting, validating it."""
    if key == "ops":
        return parse_ops(value)
    if key in ("budget", "jobs"):
        return _positive(value, key)
    choices = {"strategy": STRATEGIES, "format": FORMATS, "cost_mode": COST_MODES}.get(key)
    if choices is not None and value not in choices:
        raise ConfigError(f"invalid {key} {value!r}; choose from {', '.join(choices)}")
    return value


def read_config_file(path: Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise ConfigError(f"{path}:{n}: unknown setting {key!r}")
        values[key] = coerce(key, value)
    return values


def load_config(project: Optional[Path], overrides: Mapping[str, object] = {}) -> Config:
    """Defaults, then ``<project>/mutagoal.conf``, then ``overrides`` (flags).

    ``None`` overrides are ignored; strings are validated like file values.
    """
    config = Config()
    if project is not None and (Path(project) / CONFIG_NAME).is_file():
        config = replace(config, **read_config_file(Path(project) / CONFIG_NAME))
    flags = {k: coerce(k, v) if isinstance(v, str) else v
             for k, v in overrides.items() if v is not None}
    return replace(config, **flags)
