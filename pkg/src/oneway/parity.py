"""Affine GF(2) expressions over measurement outcomes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .pauli import format_qubit, qubit_key

Var = Hashable


@dataclass(frozen=True)
class ParityExpression:
    """``const + sum(vars) mod 2``.

    Variables are site labels (lattice coordinates for measurement outcomes)
    or strings for outcomes that live outside a pattern, such as the
    incoming byproduct bits ``"in0.x"`` of a sub-pattern.
    """

    const: int = 0
    vars: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "const", int(self.const) & 1)
        object.__setattr__(self, "vars", frozenset(self.vars))

    @classmethod
    def of(cls, *vars: Var, const: int = 0) -> "ParityExpression":
        """Expression with the given variables; repeated variables cancel."""
        acc: set = set()
        for v in vars:
            acc ^= {v}
        return cls(const, frozenset(acc))

    @classmethod
    def constant(cls, c: int) -> "ParityExpression":
        return cls(c, frozenset())

    def __add__(self, other: "ParityExpression | int") -> "ParityExpression":
        if isinstance(other, int):
            return ParityExpression(self.const ^ (other & 1), self.vars)
        return ParityExpression(self.const ^ other.const, self.vars ^ other.vars)

    __radd__ = __add__
    __xor__ = __add__

    def evaluate(self, values: Mapping[Var, int]) -> int:
        """Value under an assignment; missing variables raise ``KeyError``."""
        v = self.const
        for x in self.vars:
            v ^= int(values[x]) & 1
        return v

    def substitute(self, mapping: Mapping[Var, "ParityExpression"]) -> "ParityExpression":
        """Replace variables found in ``mapping`` by expressions."""
        out = ParityExpression(self.const, frozenset())
        for x in self.vars:
            out = out + mapping.get(x, ParityExpression(0, frozenset({x})))
        return out

    def relabel(self, mapping: Mapping[Var, Var]) -> "ParityExpression":
        return ParityExpression.of(*(mapping.get(x, x) for x in self.vars), const=self.const)

    def is_constant(self) -> bool:
        return not self.vars

    def sorted_vars(self) -> list:
        return sorted(self.vars, key=qubit_key)

    def __str__(self) -> str:
        return render_parity(self)


def render_var(v: Var) -> str:
    """Render a variable: sites as ``x:y:z``, strings verbatim."""
    if isinstance(v, tuple):
        return ":".join(str(c) for c in v)
    return str(v)


def parse_var(text: str) -> Var:
    """Inverse of :func:`render_var`."""
    t = text.strip()
    if not t:
        raise ValueError("empty variable")
    parts = t.split(":")
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        return t
    if len(vals) == 1:
        return vals[0]
    return vals


def render_parity(e: ParityExpression) -> str:
    """Human-readable form such as ``1+s(1,0,0)+s(2,0,0)``."""
    terms = [f"s{format_qubit(v)}" if isinstance(v, tuple) else str(v) for v in e.sorted_vars()]
    if e.const or not terms:
        terms.insert(0, str(e.const))
    return "+".join(terms)


def parity_from_vars(vars: Iterable[Var], const: int = 0) -> ParityExpression:
    return ParityExpression.of(*vars, const=const)
