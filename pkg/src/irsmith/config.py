"""Generator configuration and its ``key = value`` file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

WEIGHT_PREFIX = "weight."


class ConfigError(ValueError):
    pass


@dataclass
class GenConfig:
    seed: int = 0
    p_stop: float = 0.2
    max_region_depth: int = 4
    max_total_ops: int = 200
    max_ops_per_block: int = 32
    max_functions: int = 3
    max_return_values: int = 2
    allow_unsafe_memory: bool = False
    # min/max of the sampled width and one uniform draw are always added
    int_constant_pool: tuple[int, ...] = (0, 1, -1, 2, 7)
    # fully-qualified op name -> weight; missing ops weigh 1.0
    op_weights: dict[str, float] = field(default_factory=dict)

    def weight(self, op_name: str) -> float:
        return self.op_weights.get(op_name, 1.0)

    def replace(self, **changes: Any) -> GenConfig:
        return dataclasses.replace(self, **changes)

    def validate(self, op_names: list[str] | None = None) -> None:
        """Raise ConfigError on out-of-range values.

        ``op_names`` lists the poolable (non-terminator) ops; when given, at
        least one of them must keep a positive weight.
        """
        if not 0.0 < self.p_stop < 1.0:
            raise ConfigError(f"p_stop must lie in (0, 1), got {self.p_stop}")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError(f"seed must be an unsigned 64-bit value, got {self.seed}")
        for name in ("max_region_depth", "max_total_ops", "max_ops_per_block", "max_functions"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_return_values < 0:
            raise ConfigError("max_return_values must be non-negative")
        for name, w in self.op_weights.items():
            if w < 0:
                raise ConfigError(f"weight for {name} is negative ({w})")
        if op_names is not None:
            unknown = sorted(set(self.op_weights) - set(op_names))
            if unknown:
                raise ConfigError(f"weight given for unknown op {unknown[0]!r}")
            if not any(self.weight(n) > 0 for n in op_names):
                raise ConfigError("every selectable op has weight 0")


_SCALAR_FIELDS = [f for f in dataclasses.fields(GenConfig) if f.name != "op_weights"]


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_field(name: str, text: str) -> Any:
    if name == "int_constant_pool":
        return tuple(int(x, 0) for x in text.split(",") if x.strip())
    if name == "p_stop":
        return float(text)
    if name == "allow_unsafe_memory":
        return _parse_bool(text)
    return int(text, 0)


def apply_settings(config: GenConfig, items: Mapping[str, str], source: str = "<input>") -> GenConfig:
    """Return ``config`` updated from raw string settings (file or CLI)."""
    scalar = {f.name for f in _SCALAR_FIELDS}
    changes: dict[str, Any] = {}
    weights = dict(config.op_weights)
    for key, raw in items.items():
        if key.startswith(WEIGHT_PREFIX):
            op = key[len(WEIGHT_PREFIX):]
            try:
                weights[op] = float(raw)
            except ValueError:
                raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from None
        elif key in scalar:
            try:
                changes[key] = _parse_field(key, raw)
            except ValueError:
                raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from None
        else:
            raise ConfigError(f"{source}: unknown config key {key!r}")
    return config.replace(op_weights=weights, **changes)


def parse_config_text(text: str, base: GenConfig | None = None, source: str = "<input>") -> GenConfig:
    items: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        items[key.strip()] = value.strip()
    return apply_settings(base or GenConfig(), items, source)


def load_config(path: Union[str, Path], base: GenConfig | None = None) -> GenConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, base, str(path))


def dump_config(config: GenConfig, op_names: list[str] | None = None) -> str:
    """Fully-resolved config text; weights are listed for every op in ``op_names``."""
    lines = []
    for f in _SCALAR_FIELDS:
        value = getattr(config, f.name)
        if f.name == "int_constant_pool":
            value = ", ".join(str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name} = {value}")
    names = sorted(set(op_names or []) | set(config.op_weights))
    for name in names:
        lines.append(f"{WEIGHT_PREFIX}{name} = {config.weight(name)!r}")
    return "\n".join(lines) + "\n"
