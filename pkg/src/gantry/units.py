"""Size and duration parsing/rendering helpers.

All sizes are handled internally as MiB integers.  Display rules follow the
operator tooling conventions: table cells use one-decimal binary gigabytes
("137.9G") with a plain MiB fallback below 1 GiB ("246M"), while vgs-style
listings use two decimals and a lowercase suffix ("137.87g").
"""

from __future__ import annotations

from .errors import ValidationError

MIB_PER_GIB = 1024


def parse_size(text: str) -> int:
    """Parse a size like "4G" or "256M" into MiB."""
    s = text.strip()
    if not s:
        raise ValidationError("bad-size", "empty size")
    suffix = s[-1].upper()
    if suffix in ("M", "G"):
        number = s[:-1]
    else:
        raise ValidationError("bad-size", f"unknown size suffix in {text!r} (use M or G)")
    try:
        value = float(number)
    except ValueError:
        raise ValidationError("bad-size", f"cannot parse size {text!r}") from None
    if value < 0:
        raise ValidationError("bad-size", f"negative size {text!r}")
    mib = value * (MIB_PER_GIB if suffix == "G" else 1)
    return int(round(mib))


def fmt_size(mib: int) -> str:
    """Table/report rendering: one-decimal G at or above 1 GiB, else plain M."""
    if mib >= MIB_PER_GIB:
        return f"{mib / MIB_PER_GIB:.1f}G"
    return f"{mib}M"


def fmt_size_vgs(mib: int) -> str:
    """vgs-style rendering: two decimals, lowercase g."""
    return f"{mib / MIB_PER_GIB:.2f}g"


def fmt_duration(seconds: float) -> str:
    """Render a remaining-time estimate: "4m 16s" above a minute, else "56s"."""
    total = max(0, int(round(seconds)))
    if total >= 60:
        return f"{total // 60}m {total % 60}s"
    return f"{total}s"
