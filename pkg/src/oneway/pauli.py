"""Signed Pauli products over named qubits and Clifford conjugation.

A :class:`PauliProduct` is an immutable map from qubit labels to one-qubit
Pauli axes together with a global phase ``i**k``.  Qubit labels are opaque
hashable values; lattice coordinates ``(x, y, z)`` and plain integers are
both supported and sorted by :func:`qubit_key`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

Qubit = Hashable

AXES = ("X", "Y", "Z")
_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_AXIS_OF = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(axis: str) -> np.ndarray:
    """Return the 2x2 matrix of a one-qubit Pauli axis (``I``, ``X``, ``Y`` or ``Z``)."""
    return _PAULI_MATRICES[axis].copy()


def qubit_key(q: Qubit) -> tuple:
    """Total ordering key for heterogeneous qubit labels.

    Tuples sort before integers, integers before strings; within a kind the
    natural order applies.
    """
    if isinstance(q, tuple):
        return (0, q)
    if isinstance(q, (int, np.integer)):
        return (1, int(q))
    return (2, str(q))


def format_qubit(q: Qubit) -> str:
    """Render a qubit label as it appears in textual Pauli products."""
    if isinstance(q, tuple):
        return "(" + ",".join(str(v) for v in q) + ")"
    return f"({q})"


def _single_product(a: tuple[int, int], b: tuple[int, int]) -> tuple[tuple[int, int], int]:
    """Multiply two one-qubit Paulis in binary form; return (bits, i-exponent)."""
    x1, z1 = a
    x2, z2 = b
    x, z = x1 ^ x2, z1 ^ z2
    k = x1 * z1 + x2 * z2 + 2 * z1 * x2 - x * z
    return (x, z), k % 4


@dataclass(frozen=True)
class PauliProduct:
    """Tensor product of one-qubit Paulis with a phase ``i**phase``.

    Parameters
    ----------
    ops
        Sorted tuple of ``(qubit, axis)`` pairs with ``axis`` in ``"XYZ"``.
        Qubits absent from ``ops`` carry the identity.
    phase
        Exponent ``k`` of the prefactor ``i**k`` (taken modulo 4).
    """

    ops: tuple[tuple[Qubit, str], ...] = ()
    phase: int = 0

    def __post_init__(self) -> None:
        cleaned: dict[Qubit, str] = {}
        for q, a in self.ops:
            if a not in AXES:
                if a == "I":
                    continue
                raise ValueError(f"unknown Pauli axis {a!r}")
            if q in cleaned:
                raise ValueError(f"qubit {q!r} listed twice")
            cleaned[q] = a
        ordered = tuple(sorted(cleaned.items(), key=lambda kv: qubit_key(kv[0])))
        object.__setattr__(self, "ops", ordered)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    # construction helpers -------------------------------------------------
    @classmethod
    def from_dict(cls, ops: Mapping[Qubit, str], phase: int = 0) -> "PauliProduct":
        """Build from a ``{qubit: axis}`` mapping."""
        return cls(tuple(ops.items()), phase)

    @classmethod
    def single(cls, q: Qubit, axis: str, phase: int = 0) -> "PauliProduct":
        """One-qubit Pauli ``axis`` on qubit ``q``."""
        return cls(((q, axis),), phase)

    @classmethod
    def identity(cls, phase: int = 0) -> "PauliProduct":
        """The identity operator times ``i**phase``."""
        return cls((), phase)

    @classmethod
    def from_bits(
        cls, qubits: Sequence[Qubit], x: Sequence[int], z: Sequence[int], sign: int = 0
    ) -> "PauliProduct":
        """Build the Hermitian product ``(-1)**sign * prod_q X^x Z^z`` rescaled to Y where needed.

        The binary pair ``(1, 1)`` denotes ``Y`` (not ``XZ``), matching the
        usual symplectic convention where every row is Hermitian.
        """
        ops = {}
        for q, xb, zb in zip(qubits, x, z):
            if xb or zb:
                ops[q] = _AXIS_OF[(int(xb) & 1, int(zb) & 1)]
        return cls(tuple(ops.items()), 2 * (sign & 1))

    # queries --------------------------------------------------------------
    @property
    def support(self) -> tuple[Qubit, ...]:
        """Qubits on which the product acts non-trivially, in sorted order."""
        return tuple(q for q, _ in self.ops)

    def as_dict(self) -> dict[Qubit, str]:
        """Return the ``{qubit: axis}`` map."""
        return dict(self.ops)

    def axis(self, q: Qubit) -> str:
        """Axis on ``q`` (``"I"`` when absent)."""
        return self.as_dict().get(q, "I")

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return len(self.ops)

    @property
    def is_hermitian(self) -> bool:
        """True when the phase is real (``+1`` or ``-1``)."""
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """Sign bit of a Hermitian product (0 for ``+``, 1 for ``-``)."""
        if not self.is_hermitian:
            raise ValueError("product has imaginary phase")
        return self.phase // 2

    def with_phase(self, phase: int) -> "PauliProduct":
        """Copy with the phase exponent replaced."""
        return PauliProduct(self.ops, phase)

    def negate(self) -> "PauliProduct":
        """Return ``-self``."""
        return PauliProduct(self.ops, self.phase + 2)

    def restrict(self, qubits: Iterable[Qubit]) -> "PauliProduct":
        """Drop every factor outside ``qubits`` (phase kept)."""
        keep = set(qubits)
        return PauliProduct(tuple((q, a) for q, a in self.ops if q in keep), self.phase)

    def relabel(self, mapping: Mapping[Qubit, Qubit]) -> "PauliProduct":
        """Rename qubits according to ``mapping`` (unmapped labels stay)."""
        return PauliProduct(tuple((mapping.get(q, q), a) for q, a in self.ops), self.phase)

    # algebra --------------------------------------------------------------
    def __mul__(self, other: "PauliProduct") -> "PauliProduct":
        return multiply(self, other)

    def to_dense(self, qubits: Sequence[Qubit] | None = None) -> np.ndarray:
        """Dense matrix on ``qubits`` (first qubit is the most significant)."""
        order = list(qubits) if qubits is not None else list(self.support)
        d = self.as_dict()
        extra = set(d) - set(order)
        if extra:
            raise ValueError(f"qubits {sorted(extra, key=qubit_key)} missing from order")
        mat = np.array([[1.0 + 0j]])
        for q in order:
            mat = np.kron(mat, _PAULI_MATRICES[d.get(q, "I")])
        return (1j**self.phase) * mat

    def __str__(self) -> str:
        return render(self)


def multiply(a: PauliProduct, b: PauliProduct) -> PauliProduct:
    """Operator product ``a * b`` with exact phase tracking.

    Examples
    --------
    >>> str(multiply(PauliProduct.single(1, "X"), PauliProduct.single(1, "Z")))
    '-iY(1)'
    """
    da = a.as_dict()
    db = b.as_dict()
    phase = a.phase + b.phase
    out: dict[Qubit, str] = {}
    for q in set(da) | set(db):
        pa = _BITS.get(da.get(q, "I"), (0, 0))
        pb = _BITS.get(db.get(q, "I"), (0, 0))
        bits, k = _single_product(pa, pb)
        phase += k
        if bits != (0, 0):
            out[q] = _AXIS_OF[bits]
    return PauliProduct(tuple(out.items()), phase)


def commutes(a: PauliProduct, b: PauliProduct) -> bool:
    """True iff ``a`` and ``b`` commute.

    Two Pauli products commute exactly when the number of qubits carrying
    distinct non-identity axes is even.
    """
    db = b.as_dict()
    n = 0
    for q, ax in a.ops:
        bx = db.get(q)
        if bx is not None and bx != ax:
            n += 1
    return n % 2 == 0


# Clifford gates ------------------------------------------------------------

_ONE_QUBIT = {"I", "H", "S", "SDG", "X", "Y", "Z"}
_TWO_QUBIT = {"CZ", "CNOT", "SWAP"}
GATE_NAMES = frozenset(_ONE_QUBIT | _TWO_QUBIT)


@dataclass(frozen=True)
class CliffordGate:
    """A named Clifford gate acting on specific qubits.

    Parameters
    ----------
    name
        One of ``I, H, S, SDG, X, Y, Z`` (one qubit) or ``CZ, CNOT, SWAP``
        (two qubits; for ``CNOT`` the first qubit is the control).
    qubits
        Labels of the acted-on qubits.
    """

    name: str
    qubits: tuple[Qubit, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", self.name.upper())
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.name in _ONE_QUBIT:
            if len(self.qubits) != 1:
                raise ValueError(f"gate {self.name} takes one qubit")
        elif self.name in _TWO_QUBIT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"gate {self.name} takes two distinct qubits")
        else:
            raise ValueError(f"unknown gate name {self.name!r}")

    def to_dense(self) -> np.ndarray:
        """Dense unitary on ``self.qubits`` (first qubit most significant)."""
        return gate_matrix(self.name)


def gate_matrix(name: str) -> np.ndarray:
    """Dense matrix of a named Clifford gate."""
    name = name.upper()
    s2 = 1 / np.sqrt(2)
    if name == "I":
        return np.eye(2, dtype=complex)
    if name == "H":
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if name == "S":
        return np.diag([1, 1j]).astype(complex)
    if name == "SDG":
        return np.diag([1, -1j]).astype(complex)
    if name in ("X", "Y", "Z"):
        return pauli_matrix(name)
    if name == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "CNOT":
        m = np.eye(4, dtype=complex)
        m[[2, 3]] = m[[3, 2]]
        return m
    if name == "SWAP":
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    raise ValueError(f"unknown gate name {name!r}")


def _images(name: str, qubits: tuple[Qubit, ...]) -> dict[tuple[int, str], PauliProduct]:
    """Images ``g P g^dagger`` of X and Z on each acted qubit, keyed by (slot, axis)."""
    P = PauliProduct.from_dict
    if name in _ONE_QUBIT:
        (q,) = qubits
        table = {
            "I": (P({q: "X"}), P({q: "Z"})),
            "H": (P({q: "Z"}), P({q: "X"})),
            "S": (P({q: "Y"}), P({q: "Z"})),
            "SDG": (P({q: "Y"}, 2), P({q: "Z"})),
            "X": (P({q: "X"}), P({q: "Z"}, 2)),
            "Y": (P({q: "X"}, 2), P({q: "Z"}, 2)),
            "Z": (P({q: "X"}, 2), P({q: "Z"})),
        }
        x_img, z_img = table[name]
        return {(0, "X"): x_img, (0, "Z"): z_img}
    a, b = qubits
    if name == "CZ":
        return {
            (0, "X"): P({a: "X", b: "Z"}),
            (0, "Z"): P({a: "Z"}),
            (1, "X"): P({a: "Z", b: "X"}),
            (1, "Z"): P({b: "Z"}),
        }
    if name == "CNOT":
        return {
            (0, "X"): P({a: "X", b: "X"}),
            (0, "Z"): P({a: "Z"}),
            (1, "X"): P({b: "X"}),
            (1, "Z"): P({a: "Z", b: "Z"}),
        }
    if name == "SWAP":
        return {
            (0, "X"): P({b: "X"}),
            (0, "Z"): P({b: "Z"}),
            (1, "X"): P({a: "X"}),
            (1, "Z"): P({a: "Z"}),
        }
    raise ValueError(f"unknown gate name {name!r}")


def conjugate(g: CliffordGate, p: PauliProduct) -> PauliProduct:
    """Return ``g p g^dagger``.

    Examples
    --------
    >>> str(conjugate(CliffordGate("CZ", ("a", "b")), PauliProduct.single("a", "X")))
    '+X(a) Z(b)'
    """
    if g.name not in GATE_NAMES:
        raise ValueError(f"unknown gate name {g.name!r}")
    imgs = _images(g.name, g.qubits)
    d = p.as_dict()
    rest = {q: a for q, a in d.items() if q not in g.qubits}
    out = PauliProduct(tuple(rest.items()), p.phase)
    # Y = i X Z, so a factor with bits (x, z) is i^{xz} X^x Z^z.
    for slot, q in enumerate(g.qubits):
        ax = d.get(q)
        if ax is None:
            continue
        x, z = _BITS[ax]
        term = PauliProduct.identity(x * z)
        if x:
            term = multiply(term, imgs[(slot, "X")])
        if z:
            term = multiply(term, imgs[(slot, "Z")])
        out = multiply(out, term)
    return out


def conjugate_all(gates: Iterable[CliffordGate], p: PauliProduct) -> PauliProduct:
    """Conjugate ``p`` through a gate sequence applied in order (first gate first)."""
    for g in gates:
        p = conjugate(g, p)
    return p


# text format ------------------------------------------------------------

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TERM_RE = re.compile(r"([XYZ])\(([^)]*)\)")


def render(p: PauliProduct) -> str:
    """Render as ``+X(1,2) Z(2,2)``; the identity renders as ``+I``."""
    head = _PHASE_TEXT[p.phase]
    if not p.ops:
        return head + "I"
    return head + " ".join(f"{a}{format_qubit(q)}" for q, a in p.ops)


def _parse_label(text: str) -> Qubit:
    parts = [t.strip() for t in text.split(",")]
    try:
        vals = [int(t) for t in parts]
    except ValueError:
        if len(parts) == 1:
            return parts[0]
        raise ValueError(f"bad qubit label {text!r}") from None
    if len(vals) == 1:
        return vals[0]
    return tuple(vals)


def parse(text: str) -> PauliProduct:
    """Parse the output of :func:`render`."""
    s = text.strip()
    m = re.match(r"^([+-])(i?)", s)
    if not m:
        raise ValueError(f"missing sign in {text!r}")
    phase = (2 if m.group(1) == "-" else 0) + (1 if m.group(2) else 0)
    body = s[m.end():].strip()
    if body == "I":
        return PauliProduct.identity(phase)
    ops = []
    pos = 0
    for tm in _TERM_RE.finditer(body):
        if body[pos:tm.start()].strip():
            raise ValueError(f"unexpected text in {text!r}")
        ops.append((_parse_label(tm.group(2)), tm.group(1)))
        pos = tm.end()
    if body[pos:].strip() or not ops:
        raise ValueError(f"cannot parse Pauli product {text!r}")
    return PauliProduct(tuple(ops), phase)
