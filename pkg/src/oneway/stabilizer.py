"""Stabilizer-state simulation on bitset rows.

Every generator row stores its X and Z parts as Python integers used as
bitsets over qubit slots, and a *sign form*: an integer whose bit 0 is a
constant sign bit and whose higher bits are GF(2) variables.  Concrete
simulation only ever sets bit 0; the symbolic pattern-derivation engine in
:mod:`oneway.symbolic` uses the variable bits to carry measurement outcomes
through the algebra.  Rows are Hermitian Pauli products in the convention
where the bit pair ``(1, 1)`` denotes ``Y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .pauli import CliffordGate, PauliProduct, qubit_key

Qubit = Hashable

_AXIS_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class TableauError(ValueError):
    """Raised for invalid tableau operations (e.g. contradictory forced outcomes)."""


def product_flips_sign(x1: int, z1: int, x2: int, z2: int) -> bool:
    """Whether the product of two commuting Hermitian rows picks up a ``-1``.

    Raises
    ------
    TableauError
        If the rows anticommute (the product would not be Hermitian).
    """
    y1, y2 = x1 & z1, x2 & z2
    xo1, xo2 = x1 & ~z1, x2 & ~z2
    zo1, zo2 = z1 & ~x1, z2 & ~x2
    plus = (y1 & zo2).bit_count() + (xo1 & y2).bit_count() + (zo1 & xo2).bit_count()
    minus = (y1 & xo2).bit_count() + (xo1 & zo2).bit_count() + (zo1 & y2).bit_count()
    k = (plus - minus) % 4
    if k % 2:
        raise TableauError("product of anticommuting rows")
    return k == 2


def anticommutes(x1: int, z1: int, x2: int, z2: int) -> bool:
    """Symplectic product of two rows."""
    return bool(((x1 & z2) ^ (z1 & x2)).bit_count() & 1)


class BitTableau:
    """Mutable set of stabilizer generators over dynamically allocated qubit slots.

    This is the shared core of :class:`StabilizerTableau` (concrete signs) and
    the symbolic derivation engine.  Qubits are addressed by label; each label
    owns a bit position for its whole lifetime, even after being discarded.
    """

    def __init__(self) -> None:
        self.index: dict[Qubit, int] = {}
        self.labels: list[Qubit] = []
        self.alive: set[Qubit] = set()
        self.rows: list[list[int]] = []

    # register management -------------------------------------------------
    def copy(self) -> "BitTableau":
        t = self.__class__.__new__(self.__class__)
        t.__dict__.update(self.__dict__)
        t.index = dict(self.index)
        t.labels = list(self.labels)
        t.alive = set(self.alive)
        t.rows = [list(r) for r in self.rows]
        return t

    def bit(self, q: Qubit) -> int:
        try:
            return 1 << self.index[q]
        except KeyError:
            raise TableauError(f"unknown qubit {q!r}") from None

    def mask(self, qubits: Iterable[Qubit]) -> int:
        m = 0
        for q in qubits:
            m |= self.bit(q)
        return m

    def add_qubit(self, q: Qubit, x: int = 1, z: int = 0, sign: int = 0) -> None:
        """Append qubit ``q`` in the one-qubit eigenstate of the row ``(x, z, sign)``."""
        if q in self.index:
            raise TableauError(f"duplicate qubit {q!r}")
        self.index[q] = len(self.labels)
        self.labels.append(q)
        self.alive.add(q)
        b = self.bit(q)
        self.rows.append([b if x else 0, b if z else 0, sign])

    def pauli_bits(self, p: PauliProduct) -> tuple[int, int]:
        x = z = 0
        for q, a in p.ops:
            if q not in self.alive:
                raise TableauError(f"qubit {q!r} not in register")
            bx, bz = _AXIS_BITS[a]
            b = self.bit(q)
            if bx:
                x |= b
            if bz:
                z |= b
        return x, z

    def row_to_pauli(self, row: Sequence[int]) -> PauliProduct:
        x, z, s = row
        if s >> 1:
            raise TableauError("row sign is symbolic")
        ops = []
        for q in self.alive:
            b = self.bit(q)
            xb, zb = bool(x & b), bool(z & b)
            if xb or zb:
                ops.append((q, "Y" if xb and zb else ("X" if xb else "Z")))
        return PauliProduct(tuple(ops), 2 * (s & 1))

    # row algebra ---------------------------------------------------------
    def mul_into(self, i: int, j: int) -> None:
        """rows[i] <- rows[i] * rows[j]."""
        ri, rj = self.rows[i], self.rows[j]
        flip = product_flips_sign(ri[0], ri[1], rj[0], rj[1])
        ri[0] ^= rj[0]
        ri[1] ^= rj[1]
        ri[2] ^= rj[2] ^ (1 if flip else 0)

    @staticmethod
    def mul_rows(a: Sequence[int], b: Sequence[int]) -> list[int]:
        flip = product_flips_sign(a[0], a[1], b[0], b[1])
        return [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2] ^ (1 if flip else 0)]

    # Clifford gates ------------------------------------------------------
    def h(self, q: Qubit) -> None:
        b = self.bit(q)
        for r in self.rows:
            xb, zb = r[0] & b, r[1] & b
            if xb and zb:
                r[2] ^= 1
            r[0] = (r[0] & ~b) | zb
            r[1] = (r[1] & ~b) | xb

    def s(self, q: Qubit) -> None:
        b = self.bit(q)
        for r in self.rows:
            if r[0] & b:
                if r[1] & b:
                    r[2] ^= 1
                r[1] ^= b

    def sdg(self, q: Qubit) -> None:
        for _ in range(3):
            self.s(q)

    def pauli_flip(self, q: Qubit, axis: str) -> None:
        """Conjugate by a one-qubit Pauli: rows anticommuting with it flip sign."""
        b = self.bit(q)
        for r in self.rows:
            xb, zb = bool(r[0] & b), bool(r[1] & b)
            if axis == "X":
                anti = zb
            elif axis == "Z":
                anti = xb
            else:
                anti = xb != zb
            if anti:
                r[2] ^= 1

    def cz(self, a: Qubit, b: Qubit) -> None:
        ba, bb = self.bit(a), self.bit(b)
        for r in self.rows:
            xa, xb = bool(r[0] & ba), bool(r[0] & bb)
            if xa and xb and (bool(r[1] & ba) != bool(r[1] & bb)):
                r[2] ^= 1
            if xa:
                r[1] ^= bb
            if xb:
                r[1] ^= ba

    def cnot(self, c: Qubit, t: Qubit) -> None:
        bc, bt = self.bit(c), self.bit(t)
        for r in self.rows:
            xc, zt = bool(r[0] & bc), bool(r[1] & bt)
            if xc and zt and (bool(r[0] & bt) == bool(r[1] & bc)):
                r[2] ^= 1
            if xc:
                r[0] ^= bt
            if zt:
                r[1] ^= bc

    def swap(self, a: Qubit, b: Qubit) -> None:
        ba, bb = self.bit(a), self.bit(b)
        for r in self.rows:
            for k in (0, 1):
                va, vb = bool(r[k] & ba), bool(r[k] & bb)
                if va != vb:
                    r[k] ^= ba | bb

    def apply_gate(self, g: CliffordGate) -> None:
        name, qs = g.name, g.qubits
        if name == "I":
            self.bit(qs[0])
        elif name == "H":
            self.h(qs[0])
        elif name == "S":
            self.s(qs[0])
        elif name == "SDG":
            self.sdg(qs[0])
        elif name in ("X", "Y", "Z"):
            self.pauli_flip(qs[0], name)
        elif name == "CZ":
            self.cz(*qs)
        elif name == "CNOT":
            self.cnot(*qs)
        elif name == "SWAP":
            self.swap(*qs)
        else:
            raise TableauError(f"unknown gate name {name!r}")

    # measurement ---------------------------------------------------------
    def anticommuting_rows(self, px: int, pz: int) -> list[int]:
        return [i for i, r in enumerate(self.rows) if anticommutes(r[0], r[1], px, pz)]

    def measure(self, px: int, pz: int, outcome_form: int | None) -> tuple[bool, int]:
        """Measure the Hermitian Pauli ``(px, pz)``.

        Returns ``(random, form)``.  When the outcome is random the rows are
        updated and the measured row receives ``outcome_form`` (which must
        then be provided).  When it is determined, ``form`` is the sign form
        of the observable within the stabilizer group and the rows are left
        untouched.
        """
        anti = self.anticommuting_rows(px, pz)
        if not anti:
            found = self.find_element(px, pz, self.mask(self.alive))
            if found is None:
                raise TableauError("observable neither random nor determined")
            return False, found[2]
        if outcome_form is None:
            raise TableauError("random outcome requires an outcome form")
        p = anti[0]
        for i in anti[1:]:
            self.mul_into(i, p)
        self.rows[p] = [px, pz, outcome_form]
        return True, outcome_form

    def discard(self, q: Qubit) -> None:
        """Remove qubit ``q``, which must be in a product state with the rest."""
        b = self.bit(q)
        if q not in self.alive:
            raise TableauError(f"qubit {q!r} already discarded")
        touching = [i for i, r in enumerate(self.rows) if (r[0] | r[1]) & b]
        if not touching:
            raise TableauError(f"qubit {q!r} is not stabilized")
        t0 = touching[0]
        for i in touching[1:]:
            self.mul_into(i, t0)
        for i in touching[1:]:
            if (self.rows[i][0] | self.rows[i][1]) & b:
                raise TableauError(f"qubit {q!r} is entangled; cannot discard")
        del self.rows[t0]
        self.alive.discard(q)

    def find_element(self, tx: int, tz: int, mask: int) -> list[int] | None:
        """Find a group element whose restriction to ``mask`` equals ``(tx, tz)``.

        Returns the full row ``[x, z, sign]`` of that element, or ``None`` if
        no product of generators restricts to the target.  When several
        elements qualify, the returned one is an arbitrary representative.
        """
        shift = max(self.index.values(), default=0) + 1

        def key(x: int, z: int) -> int:
            return (x & mask) | ((z & mask) << shift)

        pivots: dict[int, list[int]] = {}
        for r in self.rows:
            cur = list(r)
            k = key(cur[0], cur[1])
            while k:
                top = k.bit_length() - 1
                piv = pivots.get(top)
                if piv is None:
                    pivots[top] = cur
                    break
                cur = self.mul_rows(cur, piv)
                k = key(cur[0], cur[1])
        target = key(tx, tz)
        acc = [0, 0, 0]
        k = target
        while k:
            top = k.bit_length() - 1
            piv = pivots.get(top)
            if piv is None:
                return None
            acc = self.mul_rows(acc, piv)
            k = target ^ key(acc[0], acc[1])
        return acc

    def rank(self) -> int:
        """GF(2) rank of the generator rows (signs ignored)."""
        shift = max(self.index.values(), default=0) + 1
        pivots: dict[int, int] = {}
        for r in self.rows:
            k = r[0] | (r[1] << shift)
            while k:
                top = k.bit_length() - 1
                if top not in pivots:
                    pivots[top] = k
                    break
                k ^= pivots[top]
        return len(pivots)

    def null_elements(self, mask: int) -> list[list[int]]:
        """Basis of group elements acting trivially on ``mask``."""
        shift = max(self.index.values(), default=0) + 1

        def key(x: int, z: int) -> int:
            return (x & mask) | ((z & mask) << shift)

        pivots: dict[int, list[int]] = {}
        nulls = []
        for r in self.rows:
            cur = list(r)
            k = key(cur[0], cur[1])
            while True:
                if not k:
                    if cur[0] or cur[1]:
                        nulls.append(cur)
                    break
                top = k.bit_length() - 1
                piv = pivots.get(top)
                if piv is None:
                    pivots[top] = cur
                    break
                cur = self.mul_rows(cur, piv)
                k = key(cur[0], cur[1])
        return nulls


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


class StabilizerTableau:
    """Pure stabilizer state on labelled qubits with concrete signs.

    The tableau is mutated in place by its methods; use :meth:`copy` to
    branch.  Generators are exposed as :class:`PauliProduct` values with
    phase ``+1`` or ``-1``.
    """

    def __init__(self) -> None:
        self.core = BitTableau()

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau()
        t.core = self.core.copy()
        return t

    # construction --------------------------------------------------------
    @classmethod
    def from_graph(
        cls,
        vertices: Iterable[Qubit],
        edges: Iterable[tuple[Qubit, Qubit]],
        kappa: Mapping[Qubit, int] | None = None,
    ) -> "StabilizerTableau":
        """Graph state with generators ``(-1)^kappa_a X_a prod_{b ~ a} Z_b``."""
        t = cls()
        kappa = kappa or {}
        vs = sorted(set(vertices), key=qubit_key)
        for v in vs:
            t.core.add_qubit(v, 1, 0, int(kappa.get(v, 0)) & 1)
        for a, b in edges:
            if a == b:
                raise TableauError("self-loop in graph")
            t.core.cz(a, b)
        return t

    @classmethod
    def from_generators(cls, gens: Sequence[PauliProduct], qubits: Sequence[Qubit] | None = None) -> "StabilizerTableau":
        """Build from explicit Hermitian generators (validated for commutation and independence)."""
        t = cls()
        qs = list(qubits) if qubits is not None else sorted({q for g in gens for q in g.support}, key=qubit_key)
        for q in qs:
            t.core.index[q] = len(t.core.labels)
            t.core.labels.append(q)
            t.core.alive.add(q)
        for g in gens:
            x, z = t.core.pauli_bits(g)
            t.core.rows.append([x, z, g.sign])
        t.check_invariants()
        return t

    def add_qubit(self, q: Qubit, state: str = "+") -> None:
        """Tensor on a fresh qubit in ``|+>``, ``|->``, ``|0>`` or ``|1>``."""
        table = {"+": (1, 0, 0), "-": (1, 0, 1), "0": (0, 1, 0), "1": (0, 1, 1)}
        if state not in table:
            raise TableauError(f"unknown state {state!r}")
        self.core.add_qubit(q, *table[state])

    # queries --------------------------------------------------------------
    @property
    def qubits(self) -> list[Qubit]:
        return sorted(self.core.alive, key=qubit_key)

    @property
    def n(self) -> int:
        return len(self.core.alive)

    def generators(self) -> list[PauliProduct]:
        return [self.core.row_to_pauli(r) for r in self.core.rows]

    def check_invariants(self) -> None:
        """Verify commutation, independence and full rank."""
        rows = self.core.rows
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                if anticommutes(rows[i][0], rows[i][1], rows[j][0], rows[j][1]):
                    raise TableauError("generators do not commute")
        if self.core.rank() != len(rows):
            raise TableauError("generators are dependent")
        if len(rows) != self.n:
            raise TableauError("generator count differs from qubit count")

    # operations -----------------------------------------------------------
    def apply_clifford(self, g: CliffordGate) -> "StabilizerTableau":
        for q in g.qubits:
            if q not in self.core.alive:
                raise TableauError(f"qubit {q!r} not in register")
        self.core.apply_gate(g)
        return self

    def measure_pauli(
        self,
        site: Qubit,
        axis: str,
        forced_outcome: int | None = None,
        rng=None,
        discard: bool = False,
    ) -> int:
        """Measure ``axis`` on ``site``; return the outcome bit.

        Parameters
        ----------
        forced_outcome
            Outcome to select when the result is random.  Forcing a value
            that contradicts a deterministic outcome raises
            :class:`TableauError`.
        rng
            Seed or ``numpy.random.Generator`` for random outcomes.
        discard
            Remove the measured qubit from the register afterwards.
        """
        if axis not in _AXIS_BITS:
            raise TableauError(f"unknown axis {axis!r}")
        if site not in self.core.alive:
            raise TableauError(f"qubit {site!r} not in register")
        return self.measure_product(PauliProduct.single(site, axis), forced_outcome, rng, discard)

    def measure_product(
        self, p: PauliProduct, forced_outcome: int | None = None, rng=None, discard: bool = False
    ) -> int:
        """Measure a Hermitian multi-qubit Pauli product."""
        if not p.is_hermitian:
            raise TableauError("observable must be Hermitian")
        px, pz = self.core.pauli_bits(p)
        anti = self.core.anticommuting_rows(px, pz)
        if anti:
            if forced_outcome is None:
                forced_outcome = int(_rng(rng).integers(2))
            s = int(forced_outcome) & 1
            self.core.measure(px, pz, s ^ p.sign)
        else:
            _, form = self.core.measure(px, pz, None)
            s = (form & 1) ^ p.sign
            if forced_outcome is not None and (int(forced_outcome) & 1) != s:
                raise TableauError(f"forced outcome {forced_outcome} contradicts deterministic outcome {s}")
        if discard:
            if p.weight != 1:
                raise TableauError("only one-qubit measurements can discard")
            self.core.discard(p.support[0])
        return s

    def discard(self, q: Qubit) -> None:
        self.core.discard(q)

    def expected_eigenvalue(self, p: PauliProduct) -> int | None:
        """``+1`` or ``-1`` if ``+p`` or ``-p`` stabilizes the state, else ``None``."""
        if not p.is_hermitian:
            return None
        px, pz = self.core.pauli_bits(p)
        if self.core.anticommuting_rows(px, pz):
            return None
        found = self.core.find_element(px, pz, self.core.mask(self.core.alive))
        if found is None:
            return None
        return -1 if (found[2] ^ p.sign) & 1 else 1

    def same_state(self, other: "StabilizerTableau") -> bool:
        """Exact equality of stabilizer groups, signs included."""
        if set(self.qubits) != set(other.qubits):
            return False
        return all(other.expected_eigenvalue(g) == 1 for g in self.generators())

    def to_statevector(self, order: Sequence[Qubit] | None = None) -> np.ndarray:
        """Dense amplitudes (first qubit of ``order`` most significant)."""
        from .statevector import DenseState

        g = extract_graph_state(self)
        order = list(order) if order is not None else self.qubits
        st = DenseState()
        for v in order:
            st.attach(v, "-" if g.kappa.get(v, 0) else "+")
        for a, b in g.edges:
            st.apply_cz(a, b)
        for v in order:
            for gate in lc_gates(g.lc.get(v, "I")):
                st.apply_1q(v, gate)
        return st.amplitudes(order)


# graph-state extraction ----------------------------------------------------

LC_NAMES = ("I", "H", "S", "HS")


def lc_gates(name: str) -> list[str]:
    """Gates of a local-Clifford name in application order.

    Names are matrix products: ``"HS"`` means ``H @ S``, so ``S`` acts first.
    """
    if name == "I":
        return []
    return list(reversed(list(name)))


@dataclass
class GraphStateDescription:
    """Graph state with sign bits and per-vertex local Cliffords.

    The described state is ``prod_v lc_v |G, kappa>`` where ``|G, kappa>`` is
    stabilized by ``(-1)^kappa_a X_a prod_{b ~ a} Z_b``.
    """

    vertices: list[Qubit]
    edges: list[tuple[Qubit, Qubit]]
    kappa: dict[Qubit, int] = field(default_factory=dict)
    lc: dict[Qubit, str] = field(default_factory=dict)

    def tableau(self) -> StabilizerTableau:
        """Stabilizer tableau of the described state (local Cliffords applied)."""
        t = StabilizerTableau.from_graph(self.vertices, self.edges, self.kappa)
        for v in self.vertices:
            for gname in lc_gates(self.lc.get(v, "I")):
                t.apply_clifford(CliffordGate(gname, (v,)))
        return t

    def neighbors(self, v: Qubit) -> set:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


def extract_graph_state(t: StabilizerTableau) -> GraphStateDescription:
    """Canonical local-Clifford-equivalent graph state of ``t``.

    Column pivoting follows the sorted qubit labels, so the output is
    canonical for the stabilizer group.  Hadamards go on the pivot columns
    of the Z-only part of the group; ``S`` corrections then remove
    self-loops.  The result is verified by tableau equality before return.
    """
    core = t.core
    qs = t.qubits
    pos = {q: i for i, q in enumerate(qs)}
    n = len(qs)

    def to_vecs(row) -> tuple[int, int]:
        x = z = 0
        for q in qs:
            b = core.bit(q)
            if row[0] & b:
                x |= 1 << (n - 1 - pos[q])
            if row[1] & b:
                z |= 1 << (n - 1 - pos[q])
        return x, z

    rows = [list(to_vecs(r)) + [r[2] & 1] for r in core.rows]

    # Row-reduce on X; leftover rows have zero X-part.
    def rref(rs, sel):
        rs = [list(r) for r in rs]
        piv_rows = []
        for col in range(n - 1, -1, -1):
            b = 1 << col
            idx = next((i for i, r in enumerate(rs) if sel(r) & b), None)
            if idx is None:
                continue
            pr = rs.pop(idx)
            for r in rs:
                if sel(r) & b:
                    _vec_mul(r, pr)
            for r in piv_rows:
                if sel(r) & b:
                    _vec_mul(r, pr)
            piv_rows.append(pr)
        return piv_rows, rs

    _, zonly = rref(rows, lambda r: r[0])
    zpiv, _ = rref(zonly, lambda r: r[1])
    hset = set()
    for r in zpiv:
        hset.add(qs[n - 1 - (r[1].bit_length() - 1)])

    work = t.copy()
    for q in sorted(hset, key=qubit_key):
        work.core.h(q)
    rows = [list(to_vecs(r)) + [r[2] & 1] for r in work.core.rows]
    # Gauss-Jordan to X = identity.
    for col in range(n - 1, -1, -1):
        b = 1 << col
        idx = next((i for i in range(n - 1 - col, n) if rows[i][0] & b), None)
        if idx is None:
            raise TableauError("X-part not invertible after Hadamards")
        rows[n - 1 - col], rows[idx] = rows[idx], rows[n - 1 - col]
        for i in range(n):
            if i != n - 1 - col and rows[i][0] & b:
                _vec_mul(rows[i], rows[n - 1 - col])
    sset = set()
    kappa = {}
    edges = []
    for i, q in enumerate(qs):
        x, z, s = rows[i]
        b = 1 << (n - 1 - i)
        if z & b:
            sset.add(q)
            # S^dagger maps Y to X without a sign.
            z ^= b
        kappa[q] = s
        for j in range(i + 1, n):
            if z & (1 << (n - 1 - j)):
                edges.append((q, qs[j]))
    lc = {}
    for q in qs:
        name = ("H" if q in hset else "") + ("S" if q in sset else "")
        lc[q] = name or "I"
    desc = GraphStateDescription(list(qs), edges, kappa, lc)
    if not desc.tableau().same_state(t):
        raise TableauError("graph extraction failed verification")
    return desc


def _vec_mul(r: list[int], p: list[int]) -> None:
    flip = product_flips_sign(r[0], r[1], p[0], p[1])
    r[0] ^= p[0]
    r[1] ^= p[1]
    r[2] ^= p[2] ^ (1 if flip else 0)


# text format ---------------------------------------------------------------

def _fmt_vertex(v: Qubit) -> str:
    if isinstance(v, tuple):
        return ":".join(str(c) for c in v)
    return str(v)


def _parse_vertex(s: str) -> Qubit:
    parts = s.split(":")
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        return s
    return vals[0] if len(vals) == 1 else vals


def format_graph_description(g: GraphStateDescription) -> str:
    """Serialize as ``vertex <id> kappa <b> lc <name>`` and ``edge <id> <id>`` lines."""
    lines = [f"vertex {_fmt_vertex(v)} kappa {g.kappa.get(v, 0)} lc {g.lc.get(v, 'I')}" for v in g.vertices]
    lines += [f"edge {_fmt_vertex(a)} {_fmt_vertex(b)}" for a, b in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph_description(text: str) -> GraphStateDescription:
    """Inverse of :func:`format_graph_description`; ``#`` starts a comment."""
    from .formats import FormatError, iter_lines

    vertices, edges, kappa, lc = [], [], {}, {}
    for lineno, toks in iter_lines(text):
        if toks[0] == "vertex":
            if len(toks) != 6 or toks[2] != "kappa" or toks[4] != "lc":
                raise FormatError(lineno, "expected 'vertex <id> kappa <0|1> lc <name>'")
            v = _parse_vertex(toks[1])
            if toks[3] not in ("0", "1"):
                raise FormatError(lineno, "kappa must be 0 or 1")
            if toks[5] not in LC_NAMES:
                raise FormatError(lineno, f"unknown local Clifford {toks[5]!r}")
            vertices.append(v)
            kappa[v] = int(toks[3])
            lc[v] = toks[5]
        elif toks[0] == "edge":
            if len(toks) != 3:
                raise FormatError(lineno, "expected 'edge <id> <id>'")
            edges.append((_parse_vertex(toks[1]), _parse_vertex(toks[2])))
        else:
            raise FormatError(lineno, f"unknown record {toks[0]!r}")
    known = set(vertices)
    for a, b in edges:
        if a not in known or b not in known:
            raise FormatError(0, f"edge ({a}, {b}) references unknown vertex")
        if a == b:
            raise FormatError(0, "self-loop")
    return GraphStateDescription(vertices, edges, kappa, lc)


# functional API ------------------------------------------------------------

def from_graph(vertices, edges, kappa=None) -> StabilizerTableau:
    return StabilizerTableau.from_graph(vertices, edges, kappa)


def apply_clifford(t: StabilizerTableau, g: CliffordGate) -> StabilizerTableau:
    return t.apply_clifford(g)


def measure_pauli(t: StabilizerTableau, site, axis: str, forced_outcome: int | None = None, rng=None):
    """Measure and return ``(outcome, t)``; ``t`` is updated in place."""
    s = t.measure_pauli(site, axis, forced_outcome, rng)
    return s, t


def expected_eigenvalue(t: StabilizerTableau, p: PauliProduct) -> int | None:
    return t.expected_eigenvalue(p)
