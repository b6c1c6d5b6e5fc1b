"""Shared helpers for the line-oriented text formats."""

from __future__ import annotations

import sys
from typing import Iterator


class FormatError(ValueError):
    """Malformed input; carries the 1-based line number (0 when not line-specific)."""

    def __init__(self, lineno: int, message: str) -> None:
        self.lineno = lineno
        self.message = message
        where = f"line {lineno}: " if lineno else ""
        super().__init__(where + message)


def iter_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(lineno, tokens)`` for non-blank lines; ``#`` starts a comment."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def read_text(path: str) -> str:
    """Read a file, with ``-`` meaning standard input."""
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path: str, text: str) -> None:
    """Write a file, with ``-`` meaning standard output."""
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(lineno, f"expected integer {what}, got {tok!r}") from None


def parse_float(tok: str, lineno: int, what: str) -> float:
    from .angles import parse_angle

    try:
        return parse_angle(tok)
    except ValueError:
        raise FormatError(lineno, f"expected angle {what}, got {tok!r}") from None


def parse_site(toks: list[str], lineno: int) -> tuple[int, int, int]:
    if len(toks) != 3:
        raise FormatError(lineno, "expected three integer coordinates")
    return tuple(parse_int(t, lineno, "coordinate") for t in toks)  # type: ignore[return-value]
