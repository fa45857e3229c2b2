"""Flat ``section.key = value`` configuration files.

Lines are ``key = value`` pairs; blank lines and text after ``#`` are
ignored.  Keys are dotted (``vehicle.m``, ``task.z0``, ``gains.k_z``,
``sim.h``).  Later sources override earlier ones: scenario defaults, then
the file, then ``--set`` flags.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Mapping

from ..errors import ConfigError

_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)+$")


def parse_line(line: str, where: str = "<override>") -> tuple[str, str] | None:
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        raise ConfigError(f"{where}: expected 'key = value', got {line.strip()!r}")
    key, value = (part.strip() for part in text.split("=", 1))
    if not _KEY.match(key):
        raise ConfigError(f"{where}: malformed key {key!r}")
    if not value:
        raise ConfigError(f"{where}: empty value for {key!r}")
    return key, value


def parse_text(text: str, source: str = "<string>") -> dict[str, str]:
    out: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        kv = parse_line(line, f"{source}:{n}")
        if kv is None:
            continue
        key, value = kv
        if key in out:
            raise ConfigError(f"{source}:{n}: duplicate key {key!r}")
        out[key] = value
    return out


def load_file(path: str | Path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_text(text, str(path))


def parse_overrides(items: Iterable[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in items:
        kv = parse_line(item)
        if kv is None:
            raise ConfigError(f"empty override {item!r}")
        out[kv[0]] = kv[1]
    return out


def merge(base: Mapping[str, str], *layers: Mapping[str, str]) -> dict[str, str]:
    """Overlay ``layers`` on ``base``; every key must already exist in ``base``."""
    out = dict(base)
    for layer in layers:
        for key, value in layer.items():
            if key not in out:
                known = ", ".join(sorted(out))
                raise ConfigError(f"unknown config key {key!r} (known: {known})")
            out[key] = value
    return out


def as_float(cfg: Mapping[str, str], key: str) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {cfg[key]!r}") from None


def as_int(cfg: Mapping[str, str], key: str) -> int:
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {cfg[key]!r}") from None


def as_bool(cfg: Mapping[str, str], key: str) -> bool:
    v = cfg[key].lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {cfg[key]!r}")


def dump(cfg: Mapping[str, str]) -> str:
    return "".join(f"{k} = {cfg[k]}\n" for k in sorted(cfg))
