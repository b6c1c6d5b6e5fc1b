"""Angle parsing and formatting with exact multiples of pi where possible."""

from __future__ import annotations

import math
import re
from fractions import Fraction

_PI_RE = re.compile(r"^([+-]?\d*)\*?pi(?:/(\d+))?$")


def parse_angle(text: str) -> float:
    """Parse ``0.5``, ``pi``, ``-pi/4``, ``3pi/8`` or ``3*pi/8``."""
    t = text.strip().replace(" ", "")
    m = _PI_RE.match(t)
    if m:
        num = m.group(1)
        if num in ("", "+"):
            k = 1
        elif num == "-":
            k = -1
        else:
            k = int(num)
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError("zero denominator")
        return k * math.pi / den
    return float(t)


def format_angle(a: float) -> str:
    """Render as a small rational multiple of pi when exact, else ``repr``."""
    if a == 0:
        return "0"
    f = Fraction(a / math.pi).limit_denominator(1024)
    if f.numerator != 0 and abs(float(f) * math.pi - a) < 1e-14:
        num = "" if f.numerator == 1 else ("-" if f.numerator == -1 else str(f.numerator))
        return f"{num}pi" + (f"/{f.denominator}" if f.denominator != 1 else "")
    return repr(float(a))
