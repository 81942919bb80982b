"""Key-value config files and the small value grammars used by the CLI.

A config file holds one ``key = value`` pair per line; ``#`` starts a
comment.  Keys are case-insensitive and dashes are treated as underscores,
so a file can mirror the long command-line flags.
"""
from __future__ import annotations

from pathlib import Path

from .errors import DomainError


def read_keyvalue(path: str | Path) -> dict[str, str]:
    path = Path(path)
    out: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise DomainError(f"{path}:{lineno}: empty key")
        out[key.lower().replace("-", "_")] = value
    return out


def parse_complex(text: str) -> complex:
    """Parse ``re[+im i]`` text such as ``0.5``, ``1+0.5i``, ``-2i`` or ``1-1j``."""
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        z = complex(s)
    except ValueError:
        raise DomainError(f"cannot parse complex number {text!r}") from None
    if z != z or abs(z) == float("inf"):
        raise DomainError(f"complex number must be finite, got {text!r}")
    return z


def parse_values(text: str) -> list[float]:
    """A comma list ``0.1, 0.5`` or an inclusive range ``start:stop:step``."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"range must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise DomainError(f"cannot parse range {text!r}") from None
        if step <= 0 or stop < start:
            raise DomainError(f"range {text!r} must have step > 0 and stop >= start")
        n = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(n)]
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise DomainError(f"cannot parse value list {text!r}") from None
    if not vals:
        raise DomainError("empty value list")
    return vals


def parse_interval(text: str) -> tuple[float, float]:
    vals = parse_values(text.replace(":", ","))
    if len(vals) != 2 or not vals[1] > vals[0]:
        raise DomainError(f"interval must be 'a, b' with b > a, got {text!r}")
    return vals[0], vals[1]


def parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"cannot parse boolean {text!r}")
