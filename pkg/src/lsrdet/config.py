"""Pipeline configuration stored as a small TOML file."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import LineDetectionError
from .group import GroupingParams
from .segment import SegmentationParams


class ConfigError(LineDetectionError, ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    input_side: int = 288
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    grouping: GroupingParams = field(default_factory=GroupingParams)
    eval_tolerance_fraction: float = 0.01
    raster_thickness: int = 1

    def __post_init__(self):
        if int(self.input_side) != self.input_side or self.input_side < 2:
            raise ConfigError("input_side must be an integer >= 2")
        if not self.eval_tolerance_fraction > 0:
            raise ConfigError("eval_tolerance_fraction must be > 0")
        if int(self.raster_thickness) != self.raster_thickness or self.raster_thickness < 1:
            raise ConfigError("raster_thickness must be an integer >= 1")


_TOP = ("input_side", "eval_tolerance_fraction", "raster_thickness")
_SECTIONS = {"segmentation": SegmentationParams, "grouping": GroupingParams}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def dumps(cfg: PipelineConfig) -> str:
    lines = [f"{k} = {_fmt(getattr(cfg, k))}" for k in _TOP]
    for name in _SECTIONS:
        sub = getattr(cfg, name)
        lines.append("")
        lines.append(f"[{name}]")
        lines.extend(f"{f.name} = {_fmt(getattr(sub, f.name))}" for f in fields(sub))
    return "\n".join(lines) + "\n"


def _coerce(cls, values: dict, where: str) -> dict:
    out = {}
    known = {f.name: f for f in fields(cls)}
    for k, v in values.items():
        if k not in known:
            raise ConfigError(f"unknown key {where}{k}")
        default = known[k].default
        if isinstance(default, int) and not isinstance(default, bool):
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{where}{k} must be an integer")
        elif isinstance(default, float):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{where}{k} must be a number")
            v = float(v)
        out[k] = v
    return out


def loads(text: str) -> PipelineConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    try:
        subs = {}
        for name, cls in _SECTIONS.items():
            sec = raw.pop(name, {})
            if not isinstance(sec, dict):
                raise ConfigError(f"[{name}] must be a table")
            subs[name] = cls(**_coerce(cls, sec, f"{name}."))
        top = _coerce(PipelineConfig, raw, "")
        return PipelineConfig(**top, **subs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def dump(cfg: PipelineConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cfg))
