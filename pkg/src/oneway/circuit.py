"""Quantum logic networks used as claimed unitaries and dense oracles.

A :class:`Circuit` is a list of :class:`Gate` values on ``n`` logical
qubits.  Dense matrices use wire 0 as the most significant bit.  The
rotation conventions are ``RX(t) = exp(-i t X / 2)`` and
``RZ(t) = exp(-i t Z / 2)``.

:func:`decompose` rewrites a circuit as a Clifford part followed by the
list of multi-qubit Pauli rotations ``exp(i beta P)`` expressed in the
input frame; this is the form the pattern-derivation engine matches
adaptive measurements against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .angles import format_angle
from .formats import FormatError, iter_lines, parse_float, parse_int
from .pauli import CliffordGate, PauliProduct, conjugate, gate_matrix, multiply

# name -> (number of qubit operands or None for variadic, takes angle)
GATE_SPECS: dict[str, tuple[int | None, bool]] = {
    "H": (1, False),
    "S": (1, False),
    "SDG": (1, False),
    "X": (1, False),
    "Y": (1, False),
    "Z": (1, False),
    "CNOT": (2, False),
    "CZ": (2, False),
    "SWAP": (2, False),
    "RX": (1, True),
    "RZ": (1, True),
    "CPHASE": (2, True),
    "TOFFPHASE": (3, True),
    "CARRY": (4, False),
    "SWAPN": (None, False),
    "ZZROT": (None, True),
}

CLIFFORD_NAMES = {"H", "S", "SDG", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "SWAPN"}


class CircuitError(ValueError):
    """Invalid gate or circuit."""


@dataclass(frozen=True)
class Gate:
    """One gate of a logic network.

    Parameters
    ----------
    name
        Gate name from :data:`GATE_SPECS`.
    qubits
        Logical qubit indices.  ``SWAPN`` reverses the listed qubits;
        ``ZZROT`` acts on all listed qubits.
    angle
        Rotation or phase angle in radians for parametrized gates.
    """

    name: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if name not in GATE_SPECS:
            raise CircuitError(f"unknown gate {self.name!r}")
        arity, has_angle = GATE_SPECS[name]
        if arity is not None and len(self.qubits) != arity:
            raise CircuitError(f"gate {name} takes {arity} qubits")
        if arity is None and not self.qubits:
            raise CircuitError(f"gate {name} needs at least one qubit")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"gate {name} repeats a qubit")
        if has_angle and self.angle is None:
            raise CircuitError(f"gate {name} needs an angle")
        if not has_angle and self.angle is not None:
            raise CircuitError(f"gate {name} takes no angle")
        if min(self.qubits) < 0:
            raise CircuitError("negative qubit index")

    @property
    def is_clifford(self) -> bool:
        return self.name in CLIFFORD_NAMES

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.name, tuple(q + offset for q in self.qubits), self.angle)

    def remapped(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.name, tuple(mapping[q] for q in self.qubits), self.angle)


@dataclass
class Circuit:
    """Gate list on ``n`` logical qubits (gates applied in list order)."""

    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        for g in self.gates:
            if max(g.qubits) >= self.n:
                raise CircuitError(f"gate {g.name} uses qubit {max(g.qubits)} >= n={self.n}")

    def add(self, name: str, *qubits: int, angle: float | None = None) -> "Circuit":
        g = Gate(name, tuple(qubits), angle)
        if max(g.qubits) >= self.n:
            raise CircuitError(f"qubit {max(g.qubits)} out of range")
        self.gates.append(g)
        return self

    def extend(self, other: "Circuit", offset: int = 0) -> "Circuit":
        for g in other.gates:
            self.gates.append(g.shifted(offset))
        return self

    def then(self, other: "Circuit") -> "Circuit":
        """New circuit running ``self`` first and ``other`` second."""
        if other.n != self.n:
            raise CircuitError("qubit counts differ")
        return Circuit(self.n, list(self.gates) + list(other.gates))

    def depth(self) -> int:
        """ASAP layer count, treating each gate as one time step."""
        level = [0] * self.n
        for g in self.gates:
            t = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = t
        return max(level, default=0)

    def unitary(self) -> np.ndarray:
        return circuit_unitary(self)


# dense matrices ------------------------------------------------------------

def gate_unitary(g: Gate) -> np.ndarray:
    """Dense matrix of ``g`` on its own qubits (listed order, first most significant)."""
    name, a = g.name, g.angle
    if name in ("H", "S", "SDG", "X", "Y", "Z", "CNOT", "CZ", "SWAP"):
        return gate_matrix(name)
    if name == "RX":
        return np.array(
            [[math.cos(a / 2), -1j * math.sin(a / 2)], [-1j * math.sin(a / 2), math.cos(a / 2)]],
            dtype=complex,
        )
    if name == "RZ":
        return np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)])
    if name == "CPHASE":
        return np.diag([1, 1, 1, np.exp(1j * a)])
    if name == "TOFFPHASE":
        d = np.ones(8, dtype=complex)
        d[7] = np.exp(1j * a)
        return np.diag(d)
    if name == "CARRY":
        d = np.ones(16, dtype=complex)
        for i in range(16):
            c1, c2, c3, t = (i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1
            if t and c1 + c2 + c3 >= 2:
                d[i] = -1
        return np.diag(d)
    if name == "ZZROT":
        k = len(g.qubits)
        d = np.empty(2**k, dtype=complex)
        for i in range(2**k):
            par = bin(i).count("1") & 1
            d[i] = np.exp(-1j * a / 2 * (-1 if par else 1))
        return np.diag(d)
    if name == "SWAPN":
        k = len(g.qubits)
        m = np.zeros((2**k, 2**k), dtype=complex)
        for i in range(2**k):
            j = int(format(i, f"0{k}b")[::-1], 2)
            m[j, i] = 1
        return m
    raise CircuitError(f"unknown gate {name!r}")


def apply_gate_to_tensor(psi: np.ndarray, g: Gate) -> np.ndarray:
    """Apply ``g`` to a tensor whose leading axes are the logical qubits."""
    k = len(g.qubits)
    u = gate_unitary(g).reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(g.qubits)))
    return np.moveaxis(out, list(range(k)), list(g.qubits))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense ``2^n x 2^n`` unitary of the circuit."""
    dim = 2**c.n
    psi = np.eye(dim, dtype=complex).reshape((2,) * c.n + (dim,))
    for g in c.gates:
        psi = apply_gate_to_tensor(psi, g)
    return psi.reshape(dim, dim)


def apply_circuit(c: Circuit, state: np.ndarray) -> np.ndarray:
    psi = np.asarray(state, dtype=complex).reshape((2,) * c.n)
    for g in c.gates:
        psi = apply_gate_to_tensor(psi, g)
    return psi.reshape(-1)


def dft_matrix(n: int) -> np.ndarray:
    """Discrete Fourier transform on ``n`` qubits, ``F[j,k] = w^{jk}/sqrt(N)``."""
    N = 2**n
    j = np.arange(N)
    return np.exp(2j * np.pi * np.outer(j, j) / N) / math.sqrt(N)


def bit_reversal(n: int) -> np.ndarray:
    """Permutation matrix reversing the order of ``n`` qubits."""
    return gate_unitary(Gate("SWAPN", tuple(range(n))))


# Clifford + rotation decomposition -------------------------------------------

@dataclass(frozen=True)
class Rotation:
    """``exp(i beta P)`` with ``P`` a Hermitian Pauli product on logical qubits.

    ``gate_index`` records which circuit gate produced the rotation.
    """

    beta: float
    pauli: PauliProduct
    gate_index: int


@dataclass
class Decomposition:
    """``U = C * R_m ... R_1`` (up to a global phase).

    ``rotations`` are in application order and expressed in the input
    frame; ``x_images[i]`` and ``z_images[i]`` are ``C X_i C^dagger`` and
    ``C Z_i C^dagger``.
    """

    n: int
    rotations: list[Rotation]
    x_images: list[PauliProduct]
    z_images: list[PauliProduct]


def _zprod(qs: Iterable[int]) -> PauliProduct:
    return PauliProduct.from_dict({q: "Z" for q in qs})


def expand_gate(g: Gate, index: int = 0) -> list:
    """Split ``g`` into :class:`CliffordGate` and physical-frame :class:`Rotation` items."""
    n, a, qs = g.name, g.angle, g.qubits
    if n in ("H", "S", "SDG", "X", "Y", "Z", "CNOT", "CZ", "SWAP"):
        return [CliffordGate(n, qs)]
    if n == "SWAPN":
        k = len(qs)
        return [CliffordGate("SWAP", (qs[i], qs[k - 1 - i])) for i in range(k // 2)]
    if n == "RX":
        return [Rotation(-a / 2, PauliProduct.single(qs[0], "X"), index)]
    if n == "RZ":
        return [Rotation(-a / 2, PauliProduct.single(qs[0], "Z"), index)]
    if n == "ZZROT":
        return [Rotation(-a / 2, _zprod(qs), index)]
    if n == "CPHASE":
        # |11><11| = (1 - Z_a - Z_b + Z_a Z_b) / 4
        x, y = qs
        return [
            Rotation(-a / 4, _zprod([x]), index),
            Rotation(-a / 4, _zprod([y]), index),
            Rotation(a / 4, _zprod([x, y]), index),
        ]
    if n == "TOFFPHASE":
        # |111><111| = prod (1 - Z_i) / 2 = sum_S (-1)^{|S|} Z_S / 8
        items = []
        for r in (3, 2, 1):
            for sub in combinations(qs, r):
                items.append(Rotation((-1) ** r * a / 8, _zprod(sub), index))
        return items
    if n == "CARRY":
        c1, c2, c3, t = qs
        q8 = math.pi / 8
        return [
            Rotation(q8, _zprod([t, c1, c2, c3]), index),
            Rotation(-q8, _zprod([c1, c2, c3]), index),
            Rotation(-q8, _zprod([t, c1]), index),
            CliffordGate("SDG", (t,)),
            Rotation(q8, _zprod([c1]), index),
            Rotation(q8, _zprod([c2]), index),
            Rotation(q8, _zprod([c3]), index),
            Rotation(-q8, _zprod([t, c2]), index),
            Rotation(-q8, _zprod([t, c3]), index),
        ]
    raise CircuitError(f"unknown gate {n!r}")


def inverse_clifford(g: CliffordGate) -> CliffordGate:
    if g.name == "S":
        return CliffordGate("SDG", g.qubits)
    if g.name == "SDG":
        return CliffordGate("S", g.qubits)
    return g


def decompose(c: Circuit) -> Decomposition:
    """Clifford part and input-frame rotations of ``c``."""
    done: list[CliffordGate] = []
    rotations: list[Rotation] = []
    for gi, g in enumerate(c.gates):
        for item in expand_gate(g, gi):
            if isinstance(item, CliffordGate):
                done.append(item)
            else:
                p = item.pauli
                for cg in reversed(done):
                    p = conjugate(inverse_clifford(cg), p)
                rotations.append(Rotation(item.beta, p, gi))
    xs, zs = [], []
    for i in range(c.n):
        px, pz = PauliProduct.single(i, "X"), PauliProduct.single(i, "Z")
        for cg in done:
            px, pz = conjugate(cg, px), conjugate(cg, pz)
        xs.append(px)
        zs.append(pz)
    return Decomposition(c.n, rotations, xs, zs)


def decomposition_unitary(d: Decomposition) -> np.ndarray:
    """Dense ``C * R_m ... R_1`` rebuilt from images (for self-checks only)."""
    n = d.n
    dim = 2**n
    u = np.eye(dim, dtype=complex)
    qs = list(range(n))
    for r in d.rotations:
        p = r.pauli.to_dense(qs)
        u = (math.cos(r.beta) * np.eye(dim) + 1j * math.sin(r.beta) * p) @ u
    return u


def clifford_images_unitary_check(d: Decomposition, cl: np.ndarray) -> bool:
    """Whether dense ``cl`` maps X_i, Z_i to the stored images."""
    qs = list(range(d.n))
    for i in range(d.n):
        for p, img in ((PauliProduct.single(i, "X"), d.x_images[i]), (PauliProduct.single(i, "Z"), d.z_images[i])):
            if not np.allclose(cl @ p.to_dense(qs) @ cl.conj().T, img.to_dense(qs)):
                return False
    return True


# text format -------------------------------------------------------------------

def format_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n}"]
    for g in c.gates:
        if g.name == "SWAPN":
            qs = list(g.qubits)
            if qs == list(range(len(qs))):
                lines.append(f"SWAPN {len(qs)}")
            else:
                lines.append(f"SWAPN {len(qs)} " + " ".join(map(str, qs)))
        elif g.name == "ZZROT":
            lines.append(f"ZZROT {format_angle(g.angle)} " + " ".join(map(str, g.qubits)))
        else:
            parts = [g.name] + [str(q) for q in g.qubits]
            if g.angle is not None:
                parts.append(format_angle(g.angle))
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    """Parse one gate per line; an optional ``qubits n`` line fixes the width."""
    gates: list[Gate] = []
    n_decl = None
    for lineno, toks in iter_lines(text):
        name = toks[0].upper()
        if name == "QUBITS":
            if len(toks) != 2:
                raise FormatError(lineno, "expected 'qubits <n>'")
            n_decl = parse_int(toks[1], lineno, "qubit count")
            continue
        if name not in GATE_SPECS:
            raise FormatError(lineno, f"unknown gate {toks[0]!r}")
        arity, has_angle = GATE_SPECS[name]
        args = toks[1:]
        try:
            if name == "SWAPN":
                if not args:
                    raise FormatError(lineno, "SWAPN needs k")
                k = parse_int(args[0], lineno, "k")
                qs = [parse_int(t, lineno, "qubit") for t in args[1:]] or list(range(k))
                if len(qs) != k or k < 1:
                    raise FormatError(lineno, "SWAPN k must match the qubit list")
                gates.append(Gate("SWAPN", tuple(qs)))
            elif name == "ZZROT":
                if len(args) < 2:
                    raise FormatError(lineno, "ZZROT needs an angle and qubits")
                ang = parse_float(args[0], lineno, "angle")
                qs = [parse_int(t, lineno, "qubit") for t in args[1:]]
                gates.append(Gate("ZZROT", tuple(qs), ang))
            else:
                need = arity + (1 if has_angle else 0)
                if len(args) != need:
                    raise FormatError(lineno, f"{name} expects {need} arguments")
                qs = [parse_int(t, lineno, "qubit") for t in args[:arity]]
                ang = parse_float(args[arity], lineno, "angle") if has_angle else None
                gates.append(Gate(name, tuple(qs), ang))
        except CircuitError as e:
            raise FormatError(lineno, str(e)) from None
    width = max((max(g.qubits) + 1 for g in gates), default=1)
    n = n_decl if n_decl is not None else width
    if n < width:
        raise FormatError(0, f"declared {n} qubits but gates use {width}")
    return Circuit(n, gates)


def _reduce_mul(ps: Iterable[PauliProduct]) -> PauliProduct:
    return reduce(multiply, ps, PauliProduct.identity())
