"""Line-oriented ``key = value`` config files.

UTF-8 text, one assignment per line, ``#`` starts a comment, blank lines
ignored. Parsing is fail-fast: unknown and duplicate keys are errors, and
values are coerced to the type of the schema default they override.
``parse_config(serialize_config(cfg), cfg)`` returns an equal mapping.
"""

from __future__ import annotations

Value = bool | int | float | str
Config = dict[str, Value]


def parse_config(text: str, defaults: Config) -> Config:
    """Parse ``text`` over ``defaults``; returns a fresh, fully-typed dict."""
    out: Config = dict(defaults)
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in defaults:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        if key in seen:
            raise ValueError(f"line {lineno}: duplicate config key {key!r}")
        seen.add(key)
        out[key] = _coerce(key, value, defaults[key], lineno)
    return out


def _coerce(key: str, value: str, default: Value, lineno: int) -> Value:
    kind = type(default)
    try:
        if kind is bool:
            if value not in ("true", "false"):
                raise ValueError("expected true/false")
            return value == "true"
        if kind is int:
            return int(value)
        if kind is float:
            return float(value)
        return value
    except ValueError as exc:
        raise ValueError(
            f"line {lineno}: invalid {kind.__name__} for {key!r}: {value!r} ({exc})"
        ) from None


def serialize_config(cfg: Config) -> str:
    """Emit sorted ``key = value`` lines that parse back to ``cfg``."""
    lines = []
    for key in sorted(cfg):
        value = cfg[key]
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        if isinstance(value, str) and (text != text.strip() or "\n" in text or "#" in text):
            raise ValueError(f"config value for {key!r} is not serializable: {value!r}")
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def load_config_file(path: str, defaults: Config) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), defaults)
