"""Byproduct operators: Pauli frames carried along a one-way computation.

A byproduct operator on ``n`` logical qubits is ``prod_i X_i^{x_i} Z_i^{z_i}``
with the global phase dropped.  This module moves byproducts through
Clifford gates (conjugation), past non-Clifford rotations (which flips
rotation angles instead), and reinterprets Z-basis readout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate, Rotation, expand_gate
from .pauli import CliffordGate, PauliProduct, commutes, conjugate


@dataclass(frozen=True)
class ByproductOperator:
    """``prod_i X_i^{x_i} Z_i^{z_i}`` up to a global phase.

    Parameters
    ----------
    x, z
        Bit tuples of equal length ``n``.
    """

    x: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self) -> None:
        x = tuple(int(b) & 1 for b in self.x)
        z = tuple(int(b) & 1 for b in self.z)
        if len(x) != len(z):
            raise ValueError("x and z bit vectors differ in length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @classmethod
    def identity(cls, n: int) -> "ByproductOperator":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_pauli(cls, p: PauliProduct, n: int) -> "ByproductOperator":
        x, z = [0] * n, [0] * n
        for q, a in p.ops:
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} outside 0..{n - 1}")
            x[q] = 1 if a in "XY" else 0
            z[q] = 1 if a in "ZY" else 0
        return cls(tuple(x), tuple(z))

    @property
    def n(self) -> int:
        return len(self.x)

    def to_pauli(self) -> PauliProduct:
        """Hermitian Pauli product with ``X Z`` pairs written as ``Y``."""
        ops = {}
        for q in range(self.n):
            if self.x[q] and self.z[q]:
                ops[q] = "Y"
            elif self.x[q]:
                ops[q] = "X"
            elif self.z[q]:
                ops[q] = "Z"
        return PauliProduct.from_dict(ops)

    def __mul__(self, other: "ByproductOperator") -> "ByproductOperator":
        if self.n != other.n:
            raise ValueError("byproduct size mismatch")
        return ByproductOperator(
            tuple(a ^ b for a, b in zip(self.x, other.x)),
            tuple(a ^ b for a, b in zip(self.z, other.z)),
        )

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    def matrix(self) -> np.ndarray:
        """Dense ``prod X^x Z^z`` with qubit 0 as the most significant bit."""
        xm = np.array([[0, 1], [1, 0]], dtype=complex)
        zm = np.diag([1, -1]).astype(complex)
        out = np.ones((1, 1), dtype=complex)
        for q in range(self.n):
            m = np.eye(2, dtype=complex)
            if self.x[q]:
                m = m @ xm
            if self.z[q]:
                m = m @ zm
            out = np.kron(out, m)
        return out

    def render(self) -> str:
        return " ".join(f"x{q}={self.x[q]} z{q}={self.z[q]}" for q in range(self.n))


class InfoFlowVector:
    """The running byproduct (``2n`` bits) at the current cut of a run."""

    def __init__(self, n: int) -> None:
        self.x = [0] * n
        self.z = [0] * n
        self.history: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    @property
    def n(self) -> int:
        return len(self.x)

    def set(self, x: Sequence[int], z: Sequence[int]) -> None:
        """Record the byproduct known after a round."""
        self.x = [int(b) & 1 for b in x]
        self.z = [int(b) & 1 for b in z]
        self.history.append((tuple(self.x), tuple(self.z)))

    def operator(self) -> ByproductOperator:
        return ByproductOperator(tuple(self.x), tuple(self.z))

    def bits(self) -> list[int]:
        """Interleaved ``x_0, z_0, x_1, z_1, ...``."""
        out = []
        for a, b in zip(self.x, self.z):
            out.extend([a, b])
        return out


def propagate_through_clifford(u: ByproductOperator, gate: CliffordGate | Gate) -> ByproductOperator:
    """Byproduct ``u'`` with ``g u = u' g``, i.e. ``u' = g u g^dagger``.

    Raises
    ------
    ValueError
        If ``gate`` is not a Clifford gate.
    """
    if isinstance(gate, Gate):
        if not gate.is_clifford:
            raise ValueError(f"gate {gate.name} is not Clifford")
        items = expand_gate(gate)
    else:
        items = [gate]
    p = u.to_pauli()
    for g in items:
        p = conjugate(g, p)
    return ByproductOperator.from_pauli(p, u.n)


def modify_rotation(u: ByproductOperator, euler: tuple[float, float, float]) -> tuple[float, float, float]:
    """Euler angles after moving a single-qubit byproduct through ``U_x[zeta] U_z[eta] U_x[xi]``.

    An ``X`` part flips ``eta``; a ``Z`` part flips ``xi`` and ``zeta``.
    """
    if u.n != 1:
        raise ValueError("modify_rotation takes a single-qubit byproduct")
    xi, eta, zeta = euler
    if u.x[0]:
        eta = -eta
    if u.z[0]:
        xi, zeta = -xi, -zeta
    return xi, eta, zeta


def reinterpret_readout(raw: Sequence[int], u: ByproductOperator) -> list[int]:
    """Z-basis readout corrected for the byproduct: ``s'_i = s_i xor x_i``."""
    if len(raw) != u.n:
        raise ValueError("outcome count does not match byproduct size")
    return [(int(s) ^ x) & 1 for s, x in zip(raw, u.x)]


@dataclass(frozen=True)
class ModifiedItem:
    """One Clifford gate or rotation of a gate sequence after byproduct exchange."""

    item: CliffordGate | Rotation
    flipped: bool = False


def expand_circuit(c: Circuit) -> list[CliffordGate | Rotation]:
    """All Clifford and rotation items of ``c`` in application order (physical frame)."""
    out: list = []
    for gi, g in enumerate(c.gates):
        out.extend(expand_gate(g, gi))
    return out


def swap_gate_and_byproduct(
    claim: Circuit | Iterable[CliffordGate | Rotation], u: ByproductOperator
) -> tuple[ByproductOperator, list[ModifiedItem]]:
    """Rewrite ``U u`` as ``u' U'``.

    Clifford items conjugate the byproduct; each rotation ``exp(i beta P)``
    whose axis anticommutes with the current byproduct has ``beta``
    negated.

    Returns
    -------
    (u', items)
        The byproduct on the output side and the modified item list.
    """
    items = expand_circuit(claim) if isinstance(claim, Circuit) else list(claim)
    p = u.to_pauli()
    out: list[ModifiedItem] = []
    for it in items:
        if isinstance(it, CliffordGate):
            out.append(ModifiedItem(it))
            p = conjugate(it, p)
        else:
            flip = not commutes(p, it.pauli)
            r = Rotation(-it.beta if flip else it.beta, it.pauli, it.gate_index)
            out.append(ModifiedItem(r, flip))
    return ByproductOperator.from_pauli(p, u.n), out


def items_unitary(items: Sequence[ModifiedItem | CliffordGate | Rotation], n: int) -> np.ndarray:
    """Dense unitary of an item list (qubit 0 most significant)."""
    from .circuit import circuit_unitary

    dim = 2 ** n
    u = np.eye(dim, dtype=complex)
    for it in items:
        g = it.item if isinstance(it, ModifiedItem) else it
        if isinstance(g, CliffordGate):
            m = circuit_unitary(Circuit(n, [Gate(g.name, g.qubits)]))
        else:
            pm = g.pauli.to_dense(list(range(n)))
            m = np.cos(g.beta) * np.eye(dim) + 1j * np.sin(g.beta) * pm
        u = m @ u
    return u


__all__ = [
    "ByproductOperator",
    "InfoFlowVector",
    "ModifiedItem",
    "expand_circuit",
    "items_unitary",
    "modify_rotation",
    "propagate_through_clifford",
    "reinterpret_readout",
    "swap_gate_and_byproduct",
]
