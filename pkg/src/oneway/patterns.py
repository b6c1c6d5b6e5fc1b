"""Measurement patterns, the gate catalog and pattern composition.

A :class:`MeasurementPattern` couples a :class:`~oneway.cluster.Cluster`
with a measurement basis for every measured site, the byproduct operator
as affine parities of outcomes, and the circuit it claims to implement.
Running the pattern on input ``|psi>`` leaves the output sites in
``B * U * |psi>`` where ``U`` is the claimed circuit and
``B = prod_i X_i^{x_i} Z_i^{z_i}`` is the byproduct evaluated on the
observed outcomes.

Every catalog pattern is produced by :func:`derive_pattern`, which runs
the symbolic stabilizer derivation in :mod:`oneway.symbolic` on the
layout and fails loudly if the layout does not realize the claim.
Byproduct and adaptive-sign expressions may mention the incoming
byproduct variables ``in<i>.x`` / ``in<i>.z``; they are zero for a
stand-alone pattern and are substituted when patterns are composed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .angles import format_angle
from .circuit import Circuit, Gate, circuit_unitary, format_circuit, parse_circuit
from .cluster import (
    Cluster,
    Decomposition,
    SubCluster,
    format_cluster,
    induced_lattice_edges,
    norm_edge,
    parse_cluster,
)
from .formats import FormatError, iter_lines, parse_float, parse_int, parse_site
from .parity import ParityExpression, parse_var, render_var
from .pauli import qubit_key
from .symbolic import DerivationError, derive_unit, in_var

Site = Hashable

KINDS = ("X", "Y", "Z", "XY")
PAULI = ("X", "Y", "Z")


class PatternError(ValueError):
    """Invalid pattern, composition or rewrite."""


@dataclass(frozen=True)
class MeasurementBasis:
    """Measurement basis of one site.

    Parameters
    ----------
    kind
        ``X``, ``Y``, ``Z`` or ``XY`` (adaptive, in the equatorial plane).
    angle
        Base angle ``phi0`` for ``XY``; the site is measured in the
        eigenbasis of ``cos(phi) X + sin(phi) Y`` with
        ``phi = (-1)^(offset + sum of dep outcomes) * phi0``.  Outcome 0
        is the ``+1`` eigenvector.
    deps
        Sites (or incoming byproduct variables) whose outcome parity
        flips the sign of the angle.
    offset
        Constant sign flip.
    post_deps, post_offset
        Parity added to the recorded outcome (unused by the catalog,
        reserved for readout-style corrections).
    """

    kind: str
    angle: float = 0.0
    deps: frozenset = frozenset()
    offset: int = 0
    post_deps: frozenset = frozenset()
    post_offset: int = 0

    def __post_init__(self) -> None:
        k = self.kind.upper()
        if k not in KINDS:
            raise PatternError(f"unknown measurement kind {self.kind!r}")
        object.__setattr__(self, "kind", k)
        object.__setattr__(self, "deps", frozenset(self.deps))
        object.__setattr__(self, "post_deps", frozenset(self.post_deps))
        object.__setattr__(self, "offset", int(self.offset) & 1)
        object.__setattr__(self, "post_offset", int(self.post_offset) & 1)
        if k in PAULI and (self.angle != 0.0 or self.deps or self.offset):
            raise PatternError("Pauli measurements carry no angle or sign dependencies")

    @property
    def is_adaptive(self) -> bool:
        return self.kind == "XY"

    def sign_parity(self, outcomes: Mapping[Site, int]) -> int:
        p = self.offset
        for d in self.deps:
            p ^= _lookup(outcomes, d)
        return p

    def effective_angle(self, outcomes: Mapping[Site, int]) -> float:
        """Angle after applying the sign parity; ``0`` for Pauli kinds."""
        if self.kind != "XY":
            return 0.0
        return -self.angle if self.sign_parity(outcomes) else self.angle

    def sign_expression(self) -> ParityExpression:
        return ParityExpression(self.offset, self.deps)


def _lookup(values: Mapping, var) -> int:
    """Outcome of ``var``; incoming byproduct variables default to 0."""
    if var in values:
        return int(values[var]) & 1
    if isinstance(var, str) and var.startswith("in"):
        return 0
    raise KeyError(var)


def evaluate(expr: ParityExpression, outcomes: Mapping[Site, int]) -> int:
    """Evaluate with incoming byproduct variables taken as 0."""
    v = expr.const
    for x in expr.vars:
        v ^= _lookup(outcomes, x)
    return v


@dataclass(frozen=True)
class MeasurementPattern:
    """A measurement pattern with byproduct rule and claimed circuit.

    Attributes
    ----------
    cluster
        The cluster; its wires give the logical inputs and outputs.
    bases
        Basis for every measured site (every site except the outputs).
    byproduct_x, byproduct_z
        Per logical wire, the exponent of ``X`` and ``Z`` in the output
        byproduct.
    claim
        The circuit realized up to the byproduct.
    name
        Catalog name.
    meta
        Free-form metadata: ``perm`` (wire permutation of the claim),
        ``S_qln``/``T_qln``/``O_qln`` (logic-network size), notes.
    determined
        Pauli sites whose outcome is fixed by other outcomes, as parity
        expressions.  Branches only range over the remaining sites.
    """

    cluster: Cluster
    bases: Mapping[Site, MeasurementBasis]
    byproduct_x: tuple[ParityExpression, ...]
    byproduct_z: tuple[ParityExpression, ...]
    claim: Circuit
    name: str = ""
    meta: Mapping[str, str] = field(default_factory=dict)
    determined: Mapping[Site, ParityExpression] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", dict(self.bases))
        object.__setattr__(self, "determined", dict(self.determined))
        object.__setattr__(self, "byproduct_x", tuple(self.byproduct_x))
        object.__setattr__(self, "byproduct_z", tuple(self.byproduct_z))
        object.__setattr__(self, "meta", dict(self.meta))

    # queries --------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.cluster.n_wires

    @property
    def inputs(self) -> list[Site]:
        return self.cluster.inputs

    @property
    def outputs(self) -> list[Site]:
        return self.cluster.outputs

    def measured_sites(self) -> list[Site]:
        return sorted(self.bases, key=qubit_key)

    def adaptive_sites(self) -> list[Site]:
        return sorted((s for s, b in self.bases.items() if b.kind == "XY"), key=qubit_key)

    def pauli_sites(self) -> list[Site]:
        return sorted((s for s, b in self.bases.items() if b.kind != "XY"), key=qubit_key)

    def is_clifford(self) -> bool:
        return all(b.kind in PAULI for b in self.bases.values())

    def forward_cones(self) -> dict[Site, set[Site]]:
        """``fc(p)``: sites whose basis depends on the outcome of ``p``."""
        fc: dict = {s: set() for s in self.bases}
        for q, b in self.bases.items():
            for d in b.deps:
                if d in fc:
                    fc[d].add(q)
        return fc

    def byproduct_at(self, outcomes: Mapping[Site, int]):
        """Byproduct operator for the given outcomes (incoming byproduct 0)."""
        from .byproduct import ByproductOperator

        return ByproductOperator(
            tuple(evaluate(e, outcomes) for e in self.byproduct_x),
            tuple(evaluate(e, outcomes) for e in self.byproduct_z),
        )

    def free_sites(self) -> list[Site]:
        """Measured sites whose outcomes are random (not in :attr:`determined`)."""
        return [s for s in self.measured_sites() if s not in self.determined]

    def complete_outcomes(self, free: Mapping[Site, int]) -> dict[Site, int]:
        """Add the determined outcomes to an assignment of the free sites.

        Raises
        ------
        PatternError
            If a determined outcome depends on an unassigned site.
        """
        out = {s: int(v) & 1 for s, v in free.items()}
        pending = [s for s in self.determined if s not in out]
        while pending:
            progress = False
            for s in list(pending):
                e = self.determined[s]
                if all(v in out or (isinstance(v, str) and v.startswith("in")) for v in e.vars):
                    out[s] = evaluate(e, out)
                    pending.remove(s)
                    progress = True
            if not progress:
                raise PatternError(f"cannot evaluate determined outcome of {pending[0]!r}")
        return out

    def permutation(self) -> list[int]:
        """Logical qubit held by each output wire after the claim (identity if absent)."""
        p = self.meta.get("perm")
        if not p:
            return list(range(self.n))
        return [int(v) for v in str(p).split(",")]

    def validate(self) -> None:
        """Check structural invariants; raises :class:`PatternError`."""
        outs = set(self.outputs)
        for s in self.cluster.sites:
            if s in outs and s in self.bases:
                raise PatternError(f"output site {s!r} has a measurement basis")
            if s not in outs and s not in self.bases:
                raise PatternError(f"site {s!r} has no measurement basis")
        for s in self.bases:
            if s not in self.cluster.sites:
                raise PatternError(f"basis given for unknown site {s!r}")
        fc = self.forward_cones()
        for p, cone in fc.items():
            for q in cone:
                if self.bases[q].kind in PAULI:
                    raise PatternError(f"Pauli site {q!r} in the forward cone of {p!r}")
        for q, b in self.bases.items():
            for d in b.deps:
                if d not in self.bases and not (isinstance(d, str) and d.startswith("in")):
                    raise PatternError(f"site {q!r} depends on unmeasured {d!r}")
        _check_acyclic(self)
        for s in self.determined:
            if s not in self.bases or self.bases[s].kind not in PAULI:
                raise PatternError(f"determined outcome for non-Pauli or unmeasured site {s!r}")
        if len(self.byproduct_x) != self.n or len(self.byproduct_z) != self.n:
            raise PatternError("byproduct length does not match the wire count")
        if self.claim.n != self.n:
            raise PatternError("claimed circuit acts on a different number of qubits")

    def with_meta(self, **kv) -> "MeasurementPattern":
        m = dict(self.meta)
        m.update({k: str(v) for k, v in kv.items()})
        return replace(self, meta=m)


def _check_acyclic(p: MeasurementPattern) -> None:
    deps = {q: [d for d in b.deps if d in p.bases] for q, b in p.bases.items()}
    state: dict = {}
    for start in deps:
        if state.get(start) == 2:
            continue
        stack = [(start, iter(deps[start]))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                continue
            st = state.get(nxt)
            if st == 1:
                raise PatternError(f"dependency cycle through {nxt!r}")
            if st is None:
                state[nxt] = 1
                stack.append((nxt, iter(deps[nxt])))


# ---------------------------------------------------------------------------
# derivation from a layout


def lattice_edges(sites: Iterable[Site]) -> list[tuple[Site, Site]]:
    return sorted(induced_lattice_edges(sites), key=lambda e: (qubit_key(e[0]), qubit_key(e[1])))


def derive_pattern(
    name: str,
    sites: Iterable[Site],
    inputs: Sequence[Site],
    outputs: Sequence[Site],
    kinds: Mapping[Site, str],
    claim: Circuit,
    derive_claim: Circuit | None = None,
    edges: Iterable[tuple[Site, Site]] | None = None,
    meta: Mapping[str, str] | None = None,
) -> MeasurementPattern:
    """Build a pattern by deriving adaptive bases and byproducts from a layout.

    Parameters
    ----------
    kinds
        Measurement kind per measured site; ``XY`` sites get their angle,
        sign dependencies and offset from the derivation.
    claim
        Circuit recorded as the pattern's claim.
    derive_claim
        Circuit used to match adaptive sites to rotations when it differs
        in form from ``claim`` (it must have the same unitary up to phase).

    Raises
    ------
    DerivationError
        If the layout does not realize the claim.
    """
    sites = list(sites)
    edges = lattice_edges(sites) if edges is None else [norm_edge(a, b) for a, b in edges]
    dc = derive_claim or claim
    if derive_claim is not None:
        u1, u2 = circuit_unitary(claim), circuit_unitary(derive_claim)
        ov = abs(np.vdot(u1.ravel(), u2.ravel())) / u1.shape[0]
        if abs(ov - 1) > 1e-9:
            raise DerivationError("derivation circuit differs from the claim")
    d = derive_unit(sites, edges, inputs, outputs, kinds, dc)
    bases = {}
    for s, k in kinds.items():
        if k == "XY":
            t = d.tilted[s]
            bases[s] = MeasurementBasis("XY", t.base_angle, t.deps.vars, t.offset)
        else:
            bases[s] = MeasurementBasis(k)
    cl = Cluster(frozenset(sites), frozenset(edges), wires=tuple(zip(inputs, outputs)))
    m = network_metadata(claim)
    m.update(meta or {})
    p = MeasurementPattern(cl, bases, tuple(d.byproduct_x), tuple(d.byproduct_z), claim, name, m, d.determined)
    p.validate()
    return p


# ---------------------------------------------------------------------------
# unit templates (local coordinates: inputs at x = 0, wire i on row y = 2i+1)


def _chain(n_measured: int, kinds: Sequence[str], y: int = 1) -> tuple[list, list, list, dict]:
    sites = [(x, y, 0) for x in range(n_measured + 1)]
    kd = {sites[i]: kinds[i] for i in range(n_measured)}
    return sites, [sites[0]], [sites[-1]], kd


def gate_identity_wire(length: int = 2) -> MeasurementPattern:
    """Wire of ``length + 1`` sites; ``length`` must be even."""
    if length < 2 or length % 2:
        raise PatternError("identity wire length must be a positive even number")
    sites, ins, outs, kd = _chain(length, ["X"] * length)
    return derive_pattern("identity", sites, ins, outs, kd, Circuit(1))


def gate_rot_x(xi: float) -> MeasurementPattern:
    """3-site chain realizing ``U_x[xi] = exp(-i xi X / 2)``."""
    sites, ins, outs, kd = _chain(2, ["X", "XY"])
    return derive_pattern("rotx", sites, ins, outs, kd, Circuit(1).add("RX", 0, angle=xi))


def gate_rot_z(eta: float) -> MeasurementPattern:
    """5-site chain realizing ``U_z[eta]``."""
    sites, ins, outs, kd = _chain(4, ["X", "X", "XY", "X"])
    return derive_pattern("rotz", sites, ins, outs, kd, Circuit(1).add("RZ", 0, angle=eta))


def gate_rot_euler(xi: float, eta: float, zeta: float) -> MeasurementPattern:
    """5-site chain realizing ``U_x[zeta] U_z[eta] U_x[xi]``."""
    sites, ins, outs, kd = _chain(4, ["X", "XY", "XY", "XY"])
    c = Circuit(1).add("RX", 0, angle=xi).add("RZ", 0, angle=eta).add("RX", 0, angle=zeta)
    return derive_pattern("euler", sites, ins, outs, kd, c)


def gate_hadamard() -> MeasurementPattern:
    sites, ins, outs, kd = _chain(4, ["X", "Y", "Y", "Y"])
    return derive_pattern("hadamard", sites, ins, outs, kd, Circuit(1).add("H", 0))


def gate_phase_s() -> MeasurementPattern:
    sites, ins, outs, kd = _chain(4, ["X", "X", "Y", "X"])
    return derive_pattern("phase", sites, ins, outs, kd, Circuit(1).add("S", 0))


def cnot15_site(k: int) -> tuple[int, int, int]:
    """Coordinates of qubit ``k`` (1..15) of the 15-site CNOT layout."""
    if 1 <= k <= 7:
        return (k - 1, 1, 0)
    if k == 8:
        return (3, 2, 0)
    if 9 <= k <= 15:
        return (k - 9, 3, 0)
    raise PatternError("CNOT layout qubits are numbered 1..15")


def gate_cnot15(mirrored: bool = False) -> MeasurementPattern:
    """The 15-site CNOT; control on wire 0 (row 1), target on wire 1 (row 3).

    With ``mirrored`` the layout is reflected so the control sits on the
    lower wire; the claim is then ``CNOT 1 0``.
    """
    kd = {}
    for k in (1, 9, 10, 11, 13, 14):
        kd[cnot15_site(k)] = "X"
    for k in (2, 3, 4, 5, 6, 8, 12):
        kd[cnot15_site(k)] = "Y"
    sites = [cnot15_site(k) for k in range(1, 16)]
    ins, outs = [cnot15_site(1), cnot15_site(9)], [cnot15_site(7), cnot15_site(15)]
    claim = Circuit(2).add("CNOT", 0, 1)
    if mirrored:
        f = lambda s: (s[0], 4 - s[1], s[2])  # noqa: E731
        sites = [f(s) for s in sites]
        kd = {f(s): k for s, k in kd.items()}
        ins, outs = [f(s) for s in reversed(ins)], [f(s) for s in reversed(outs)]
        claim = Circuit(2).add("CNOT", 1, 0)
    return derive_pattern("cnot15" + ("m" if mirrored else ""), sites, ins, outs, kd, claim)


def _block(n: int, width: int, vacancies: Iterable[tuple[int, int]] = (), extra: Iterable[tuple[int, int]] = (),
           out_x: int | None = None):
    vac = set(vacancies)
    body = [(x, y, 0) for x in range(1, width + 1) for y in range(1, 2 * n) if (x, y) not in vac]
    body += [(x, y, 0) for x, y in extra]
    ox = width + 1 if out_x is None else out_x
    ins = [(0, 2 * i + 1, 0) for i in range(n)]
    outs = [(ox, 2 * i + 1, 0) for i in range(n)]
    return body, ins, outs


def _reversal_meta(n: int) -> str:
    return ",".join(str(n - 1 - i) for i in range(n))


def gate_swap_n(n: int) -> MeasurementPattern:
    """Square of side ``2n - 1`` measured in X; reverses the order of ``n`` wires."""
    if n < 1:
        raise PatternError("swap needs at least one wire")
    if n == 1:
        return gate_identity_wire(2)
    body, ins, outs = _block(n, 2 * n - 1)
    kd = {s: "X" for s in body + ins}
    claim = Circuit(n).add("SWAPN", *range(n))
    return derive_pattern(f"swap{n}", body + ins + outs, ins, outs, kd, claim, meta={"perm": _reversal_meta(n)})


def gate_hamiltonian_zn(n: int, phi: float) -> MeasurementPattern:
    """``exp(-i phi Z^n)`` followed by the wire reversal, in two rounds.

    The body is a full block of width ``2n - 2`` plus one extra X site per
    wire; the adaptive site is ``(n - 1, n)``.
    """
    if n < 1:
        raise PatternError("need at least one wire")
    if n == 1:
        p = gate_rot_z(2 * phi)
        return replace(p, name="hamiltonian1")
    w = 2 * n - 2
    body, ins, outs = _block(n, w, extra=[(w + 1, 2 * i + 1) for i in range(n)], out_x=w + 2)
    kd = {s: "X" for s in body + ins}
    kd[(n - 1, n, 0)] = "XY"
    claim = Circuit(n).add("ZZROT", *range(n), angle=2 * phi).add("SWAPN", *range(n))
    return derive_pattern(f"hamiltonian{n}", body + ins + outs, ins, outs, kd, claim,
                          meta={"perm": _reversal_meta(n)})


CPG_ADAPTIVE = ((2, 1, 0), (1, 2, 0), (2, 3, 0))


def _cpg_layout():
    body, ins, outs = _block(2, 3, vacancies=[(3, 2)])
    return body, ins, outs


def gate_controlled_phase(theta: float) -> MeasurementPattern:
    """Controlled phase ``diag(1,1,1,e^{i theta})`` followed by a swap."""
    body, ins, outs = _cpg_layout()
    kd = {s: "X" for s in body + ins}
    for s in CPG_ADAPTIVE:
        kd[s] = "XY"
    claim = Circuit(2).add("CPHASE", 0, 1, angle=theta).add("SWAP", 0, 1)
    return derive_pattern("cpg", body + ins + outs, ins, outs, kd, claim, meta={"perm": "1,0"})


def gate_crossing() -> MeasurementPattern:
    """Clifford point of the controlled-phase layout: ``CZ`` then swap."""
    body, ins, outs = _cpg_layout()
    kd = {s: "X" for s in body + ins}
    for s in CPG_ADAPTIVE:
        kd[s] = "Y"
    claim = Circuit(2).add("CZ", 0, 1).add("SWAP", 0, 1)
    return derive_pattern("crossing", body + ins + outs, ins, outs, kd, claim, meta={"perm": "1,0"})


TOFFOLI_VACANCIES = ((1, 4), (3, 2), (4, 4), (7, 4))
TOFFOLI_ADAPTIVE = ((1, 2), (8, 1), (4, 3), (3, 4), (2, 1), (4, 5), (9, 2))


def gate_toffoli_phase(phi: float) -> MeasurementPattern:
    """``1 + (e^{i phi} - 1)|111><111|`` followed by a swap of wires 1 and 2.

    The block has width 9 with four vacancies; its seven adaptive sites
    realize the seven ``Z``-product rotations in one round.
    """
    body, ins, outs = _block(3, 9, vacancies=TOFFOLI_VACANCIES)
    kd = {s: "X" for s in body + ins}
    for x, y in TOFFOLI_ADAPTIVE:
        kd[(x, y, 0)] = "XY"
    claim = Circuit(3).add("TOFFPHASE", 0, 1, 2, angle=phi).add("SWAP", 1, 2)
    return derive_pattern("toffoli", body + ins + outs, ins, outs, kd, claim, meta={"perm": "0,2,1"})


def gate_carry() -> MeasurementPattern:
    """Phase flip on the target (wire 3) iff at least two of wires 0..2 are set.

    Modulo 2 the majority of three bits is ``c1 c2 + c1 c3 + c2 c3``, so
    the gate is the product of three controlled-controlled-Z gates, each a
    Toffoli-phase layout with ``phi = pi`` on a triple containing the
    target.  Toffoli layouts leave only Z-type byproducts from their
    adaptive sites, so the composite still measures all adaptive sites in
    a single round.
    """
    comp = Composer(4)
    for triple in ((1, 2, 3), (0, 1, 3), (0, 2, 3)):
        comp.add_gate(Gate("TOFFPHASE", triple, math.pi))
    comp.logical_gates = [Gate("CARRY", (0, 1, 2, 3))]
    return comp.build("carry")


def _perm_gates(perm: Sequence[int]) -> list[tuple]:
    """SWAP gates moving logical wire ``i`` to output wire ``perm[i]``."""
    n = len(perm)
    cur = list(range(n))
    want = [0] * n
    for i in range(n):
        want[perm[i]] = i
    out = []
    for p in range(n):
        if cur[p] != want[p]:
            q = cur.index(want[p])
            out.append(("SWAP", p, q))
            cur[p], cur[q] = cur[q], cur[p]
    return out


def _perm_meta(perm: Sequence[int]) -> list[int]:
    """Logical wire held by each output position."""
    out = [0] * len(perm)
    for i, p in enumerate(perm):
        out[p] = i
    return out


# ---------------------------------------------------------------------------
# composition


def _subst_basis(b: MeasurementBasis, sub: Mapping) -> MeasurementBasis:
    if not b.deps or not any(d in sub for d in b.deps):
        return b
    e = ParityExpression(b.offset, b.deps).substitute(sub)
    return replace(b, deps=e.vars, offset=e.const)


def _rename_in_vars(p: MeasurementPattern, shift: int) -> MeasurementPattern:
    if shift == 0:
        return p
    sub = {}
    for i in range(p.n):
        for a in ("x", "z"):
            sub[in_var(i, a)] = ParityExpression.of(in_var(i + shift, a))
    return replace(
        p,
        bases={s: _subst_basis(b, sub) for s, b in p.bases.items()},
        byproduct_x=tuple(e.substitute(sub) for e in p.byproduct_x),
        byproduct_z=tuple(e.substitute(sub) for e in p.byproduct_z),
        determined={s: e.substitute(sub) for s, e in p.determined.items()},
    )


def translate_pattern(p: MeasurementPattern, dx: int = 0, dy: int = 0, dz: int = 0) -> MeasurementPattern:
    """Shift every lattice site (and outcome variable) by ``(dx, dy, dz)``."""
    if dx == dy == dz == 0:
        return p
    m = {s: (s[0] + dx, s[1] + dy, s[2] + dz) for s in p.cluster.sites}
    return relabel_pattern(p, m)


def relabel_pattern(p: MeasurementPattern, m: Mapping[Site, Site]) -> MeasurementPattern:
    """Rename sites; outcome variables follow their sites."""
    f = lambda v: m.get(v, v)  # noqa: E731
    bases = {
        f(s): replace(b, deps=frozenset(f(d) for d in b.deps), post_deps=frozenset(f(d) for d in b.post_deps))
        for s, b in p.bases.items()
    }
    return replace(
        p,
        cluster=p.cluster.relabel(m),
        bases=bases,
        byproduct_x=tuple(e.relabel(m) for e in p.byproduct_x),
        byproduct_z=tuple(e.relabel(m) for e in p.byproduct_z),
        determined={f(s): e.relabel(m) for s, e in p.determined.items()},
    )


def compose_parallel(parts: Sequence[MeasurementPattern], name: str = "") -> MeasurementPattern:
    """Disjoint union; wires are concatenated in the given order."""
    if not parts:
        raise PatternError("nothing to compose")
    sites: set = set()
    edges: set = set()
    kappa: set = set()
    roles: dict = {}
    wires: list = []
    bases: dict = {}
    det: dict = {}
    bx: list = []
    bz: list = []
    n = sum(p.n for p in parts)
    claim = Circuit(n)
    perm: list[int] = []
    off = 0
    for p in parts:
        if sites & p.cluster.sites:
            raise PatternError("parallel parts overlap")
        q = _rename_in_vars(p, off)
        sites |= q.cluster.sites
        edges |= q.cluster.edges
        kappa |= q.cluster.kappa
        roles.update(q.cluster.roles)
        wires.extend(q.cluster.wires)
        bases.update(q.bases)
        det.update(q.determined)
        bx.extend(q.byproduct_x)
        bz.extend(q.byproduct_z)
        claim.extend(q.claim, offset=off)
        perm.extend(v + off for v in q.permutation())
        off += p.n
    cl = Cluster(frozenset(sites), frozenset(edges), frozenset(kappa), roles, tuple(wires))
    return MeasurementPattern(cl, bases, tuple(bx), tuple(bz), claim, name or "parallel",
                              {"perm": ",".join(map(str, perm))}, det)


def compose_patterns(g1: MeasurementPattern, g2: MeasurementPattern, name: str = "") -> MeasurementPattern:
    """Run ``g2`` after ``g1``: every input site of ``g2`` must be an output site of ``g1``.

    Wires of ``g1`` that ``g2`` does not touch pass through unchanged.
    The incoming byproduct variables of ``g2`` are replaced by ``g1``'s
    outgoing byproduct on the joined wires, which propagates ``g1``'s
    byproduct through ``g2`` and adapts ``g2``'s bases.
    """
    out_index = {s: i for i, s in enumerate(g1.outputs)}
    wmap = []
    for j, s in enumerate(g2.inputs):
        if s not in out_index:
            raise PatternError(f"input {s!r} of the second pattern is not an output of the first")
        wmap.append(out_index[s])
    shared = set(g2.inputs)
    overlap = (g1.cluster.sites & g2.cluster.sites) - shared
    if overlap:
        raise PatternError(f"patterns overlap outside the joined wires: {sorted(overlap, key=qubit_key)[:3]}")
    sub = {}
    for j, i in enumerate(wmap):
        sub[in_var(j, "x")] = g1.byproduct_x[i]
        sub[in_var(j, "z")] = g1.byproduct_z[i]
    # g2 in-vars of wires it does not have cannot occur; rename surviving ones to g1 indices is not needed
    bases = dict(g1.bases)
    for s, b in g2.bases.items():
        bases[s] = _subst_basis(b, sub)
    det = dict(g1.determined)
    for s, e in g2.determined.items():
        det[s] = e.substitute(sub)
    bx, bz = list(g1.byproduct_x), list(g1.byproduct_z)
    for j, i in enumerate(wmap):
        bx[i] = g2.byproduct_x[j].substitute(sub)
        bz[i] = g2.byproduct_z[j].substitute(sub)
    wires = list(g1.cluster.wires)
    for j, i in enumerate(wmap):
        wires[i] = (wires[i][0], g2.outputs[j])
    roles = dict(g1.cluster.roles)
    roles.update(g2.cluster.roles)
    for s in shared:
        roles[s] = "body"
    for i, (a, b) in enumerate(wires):
        roles[a], roles[b] = "input", "output"
    cl = Cluster(
        g1.cluster.sites | g2.cluster.sites,
        g1.cluster.edges | g2.cluster.edges,
        g1.cluster.kappa | g2.cluster.kappa,
        roles,
        tuple(wires),
    )
    claim = Circuit(g1.n)
    claim.extend(g1.claim)
    for g in g2.claim.gates:
        claim.gates.append(g.remapped(wmap))
    perm1 = g1.permutation()
    perm2 = g2.permutation()
    perm = list(perm1)
    for j, i in enumerate(wmap):
        perm[i] = perm1[wmap[perm2[j]]]
    meta = {"perm": ",".join(map(str, perm))}
    return MeasurementPattern(cl, bases, tuple(bx), tuple(bz), claim, name or f"{g1.name}+{g2.name}", meta, det)


def empty_pattern() -> None:
    """Composition identity: ``compose(None, p)`` returns ``p``."""
    return None


def compose(g1: MeasurementPattern | None, g2: MeasurementPattern | None) -> MeasurementPattern | None:
    """:func:`compose_patterns` that treats ``None`` as the empty pattern."""
    if g1 is None:
        return g2
    if g2 is None:
        return g1
    return compose_patterns(g1, g2)


def decomposition_of(parts: Sequence[MeasurementPattern], whole: MeasurementPattern) -> Decomposition:
    """Gate subclusters of a composed pattern, for the decomposition validator."""
    subs = tuple(
        SubCluster(p.cluster.sites, p.cluster.edges, tuple(p.inputs), tuple(p.outputs), p.name) for p in parts
    )
    return Decomposition(whole.cluster, subs)


# ---------------------------------------------------------------------------
# geometric composer


UnitFactory = Callable[[], MeasurementPattern]


@dataclass
class PlacedUnit:
    pattern: MeasurementPattern  # already translated
    positions: tuple[int, ...]


class Composer:
    """Places unit patterns on ``n`` horizontal wires and composes them.

    Wire position ``p`` runs along row ``y = 2p + 1``.  Units act on
    consecutive positions and are packed into layers as early as their
    wires allow.  Every layer is as wide as its widest unit; the other
    wires in the layer are padded with identity chains.  Units that
    permute their wires update the logical-to-position map, so a logical
    gate is routed through adjacent swaps only when its qubits are not
    already consecutive and in order.
    """

    def __init__(self, n: int) -> None:
        if n < 1:
            raise PatternError("composer needs at least one wire")
        self.n = n
        self.layers: list[list[tuple[MeasurementPattern, tuple[int, ...]]]] = []
        self.busy = [0] * n  # first free layer per position
        self.where = list(range(n))  # logical -> position
        self.logical_gates: list[Gate] = []

    # placement -----------------------------------------------------------
    def place(self, unit: MeasurementPattern, first_position: int) -> None:
        k = unit.n
        pos = tuple(range(first_position, first_position + k))
        if first_position < 0 or pos[-1] >= self.n:
            raise PatternError("unit does not fit on the wires")
        layer = max(self.busy[p] for p in pos)
        while len(self.layers) <= layer:
            self.layers.append([])
        self.layers[layer].append((unit, pos))
        for p in pos:
            self.busy[p] = layer + 1
        perm = unit.permutation()
        at = {p: self._logical_at(p) for p in pos}
        for j, p in enumerate(pos):
            src = pos[perm[j]]
            self.where[at[src]] = p

    def _logical_at(self, p: int) -> int:
        return self.where.index(p)

    def route(self, qubits: Sequence[int]) -> int:
        """Move logical ``qubits`` onto consecutive positions in order; return the first."""
        k = len(qubits)
        cur = [self.where[q] for q in qubits]
        start = min(max(cur[0], 0), self.n - k)
        if all(self.where[q] == start + j for j, q in enumerate(qubits)):
            return start
        start = min(max(int(round(sum(cur) / k - (k - 1) / 2)), 0), self.n - k)
        # target line: the gate's qubits in order on the block, the rest keep their order
        line = [self._logical_at(p) for p in range(self.n)]
        others = [q for q in line if q not in qubits]
        target = others[:start] + list(qubits) + others[start:]
        rank = {q: i for i, q in enumerate(target)}
        changed = True
        while changed:
            changed = False
            for p in range(self.n - 1):
                if rank[line[p]] > rank[line[p + 1]]:
                    self.place(unit_swap(), p)
                    line[p], line[p + 1] = line[p + 1], line[p]
                    changed = True
        return start

    def add_gate(self, g: Gate) -> None:
        """Place the unit(s) for one logical gate."""
        self.logical_gates.append(g)
        name = g.name
        qs = g.qubits
        if name in _SINGLE_UNITS:
            self.place(_SINGLE_UNITS[name](g), self.where[qs[0]])
            return
        if name == "CNOT":
            c, t = qs
            pc, pt = self.where[c], self.where[t]
            if pt == pc + 1:
                self.place(unit_cnot(False), pc)
            elif pc == pt + 1:
                self.place(unit_cnot(True), pt)
            else:
                p = self.route([c, t])
                self.place(unit_cnot(False), p)
            return
        if name == "CZ":
            self.add_gate(Gate("H", (qs[1],)))
            self.add_gate(Gate("CNOT", qs))
            self.add_gate(Gate("H", (qs[1],)))
            self.logical_gates[-3:] = []
            return
        if name in ("CPHASE", "SWAP"):
            a, b = qs
            pa, pb = self.where[a], self.where[b]
            if abs(pa - pb) != 1:
                self.route([a, b])
                pa, pb = self.where[a], self.where[b]
            unit = unit_cpg(g.angle) if name == "CPHASE" else unit_swap()
            self.place(unit, min(pa, pb))
            return
        if name == "TOFFPHASE":
            p = self._route_symmetric(list(qs))
            self.place(unit_toffoli(g.angle), p)
            return
        if name == "CARRY":
            controls, t = list(qs[:3]), qs[3]
            p = self._route_symmetric(controls + [t], fixed_last=True)
            self.place(unit_carry(), p)
            return
        raise PatternError(f"composer has no unit for gate {name}")

    def _route_symmetric(self, qs: list[int], fixed_last: bool = False) -> int:
        """Route qubits of a gate symmetric in (some of) its arguments."""
        k = len(qs)
        pos = sorted(self.where[q] for q in qs)
        if pos == list(range(pos[0], pos[0] + k)):
            if not fixed_last or self.where[qs[-1]] == pos[-1]:
                return pos[0]
        head = sorted(qs[:-1], key=lambda q: self.where[q]) if fixed_last else sorted(qs, key=lambda q: self.where[q])
        order = head + [qs[-1]] if fixed_last else head
        return self.route(order)

    def add_circuit(self, c: Circuit) -> None:
        if c.n != self.n:
            raise PatternError("circuit size does not match the composer")
        for g in c.gates:
            self.add_gate(g)

    # assembly ------------------------------------------------------------
    def build(self, name: str = "composed") -> MeasurementPattern:
        """Translate, pad and compose all placed units."""
        x0 = 0
        whole: MeasurementPattern | None = None
        self.parts: list[MeasurementPattern] = []
        if not self.layers:
            self.layers.append([])
        for layer in self.layers:
            span = max([_span(u) for u, _ in layer] + [2])
            covered: dict[int, MeasurementPattern] = {}
            pieces: list[tuple[int, MeasurementPattern]] = []
            for u, pos in layer:
                placed = translate_pattern(u, x0, 2 * pos[0])
                pieces.append((pos[0], placed))
                for p in pos:
                    covered[p] = placed
                extra = span - _span(u)
                if extra:
                    for j, p in enumerate(pos):
                        pad = translate_pattern(gate_identity_wire(extra), x0 + _span(u), 2 * p)
                        pieces.append((p + 0.5, pad))
            for p in range(self.n):
                if p not in covered:
                    pieces.append((p, translate_pattern(gate_identity_wire(span), x0, 2 * p)))
            for _, piece in sorted(pieces, key=lambda t: t[0]):
                if whole is None or not (set(piece.inputs) <= set(whole.outputs)):
                    whole = piece if whole is None else _attach_new(whole, piece)
                else:
                    whole = compose_patterns(whole, piece)
                self.parts.append(piece)
            x0 += span
        assert whole is not None
        claim = Circuit(self.n)
        claim.extend(whole.claim)
        meta = dict(whole.meta)
        logical = Circuit(self.n, list(self.logical_gates))
        meta.update(network_metadata(logical))
        wp = [0] * self.n
        for q, p in enumerate(self.where):
            wp[p] = q
        meta["perm"] = ",".join(map(str, wp))
        return replace(whole, name=name, meta=meta)


def _attach_new(whole: MeasurementPattern, piece: MeasurementPattern) -> MeasurementPattern:
    """Add the first pieces of the first layer as new wires, keeping row order."""
    merged = compose_parallel([whole, piece])
    return _sort_wires(merged)


def _sort_wires(p: MeasurementPattern) -> MeasurementPattern:
    """Reorder wires top to bottom by input row (first-layer assembly only)."""
    order = sorted(range(p.n), key=lambda i: (p.inputs[i][1], p.inputs[i][0]))
    if order == list(range(p.n)):
        return p
    inv = [0] * p.n
    for new, old in enumerate(order):
        inv[old] = new
    sub = {}
    for old in range(p.n):
        for a in ("x", "z"):
            sub[in_var(old, a)] = ParityExpression.of(in_var(inv[old], a))
    claim = Circuit(p.n, [g.remapped(inv) for g in p.claim.gates])
    perm_old = p.permutation()
    perm = [inv[perm_old[old]] for old in order]
    cl = replace(p.cluster, wires=tuple(p.cluster.wires[o] for o in order))
    cl = Cluster(cl.sites, cl.edges, cl.kappa, cl.roles, cl.wires)
    return replace(
        p,
        cluster=cl,
        bases={s: _subst_basis(b, sub) for s, b in p.bases.items()},
        determined={s: e.substitute(sub) for s, e in p.determined.items()},
        byproduct_x=tuple(p.byproduct_x[o].substitute(sub) for o in order),
        byproduct_z=tuple(p.byproduct_z[o].substitute(sub) for o in order),
        claim=claim,
        meta={**p.meta, "perm": ",".join(map(str, perm))},
    )


def _span(u: MeasurementPattern) -> int:
    return max(s[0] for s in u.outputs) - min(s[0] for s in u.inputs)


def network_metadata(c: Circuit) -> dict[str, str]:
    """Logic-network size: qubits, depth plus readout, gates plus readouts."""
    return {"S_qln": str(c.n), "T_qln": str(c.depth() + 1), "O_qln": str(len(c.gates) + c.n)}


# cached unit constructors ------------------------------------------------------


@lru_cache(maxsize=None)
def unit_swap() -> MeasurementPattern:
    return gate_swap_n(2)


@lru_cache(maxsize=None)
def unit_cnot(mirrored: bool) -> MeasurementPattern:
    return gate_cnot15(mirrored)


@lru_cache(maxsize=None)
def unit_hadamard() -> MeasurementPattern:
    return gate_hadamard()


@lru_cache(maxsize=None)
def unit_phase() -> MeasurementPattern:
    return gate_phase_s()


@lru_cache(maxsize=None)
def unit_cpg(theta: float) -> MeasurementPattern:
    return gate_controlled_phase(theta)


@lru_cache(maxsize=None)
def unit_toffoli(phi: float) -> MeasurementPattern:
    return gate_toffoli_phase(phi)


@lru_cache(maxsize=None)
def unit_carry() -> MeasurementPattern:
    return gate_carry()


@lru_cache(maxsize=None)
def unit_rx(a: float) -> MeasurementPattern:
    # pad the 3-site chain to the even span 4 with an X pair
    sites, ins, outs, kd = _chain(4, ["X", "XY", "X", "X"])
    return derive_pattern("rotx", sites, ins, outs, kd, Circuit(1).add("RX", 0, angle=a))


@lru_cache(maxsize=None)
def unit_rz(a: float) -> MeasurementPattern:
    return gate_rot_z(a)


def _pauli_unit(name: str) -> MeasurementPattern:
    w = gate_identity_wire(2)
    bx, bz = w.byproduct_x[0], w.byproduct_z[0]
    if name in ("X", "Y"):
        bx = bx + 1
    if name in ("Z", "Y"):
        bz = bz + 1
    return replace(w, byproduct_x=(bx,), byproduct_z=(bz,), claim=Circuit(1).add(name, 0), name=name.lower())


@lru_cache(maxsize=None)
def unit_sdg() -> MeasurementPattern:
    sites, ins, outs, kd = _chain(4, ["X", "X", "Y", "X"])
    # S^dagger = S Z: the S layout with a flipped z constant
    p = derive_pattern("phase", sites, ins, outs, kd, Circuit(1).add("S", 0))
    return replace(p, byproduct_z=(p.byproduct_z[0] + 1,), claim=Circuit(1).add("SDG", 0), name="phasedg")


_SINGLE_UNITS: dict[str, Callable[[Gate], MeasurementPattern]] = {
    "H": lambda g: unit_hadamard(),
    "S": lambda g: unit_phase(),
    "SDG": lambda g: unit_sdg(),
    "X": lambda g: _pauli_unit("X"),
    "Y": lambda g: _pauli_unit("Y"),
    "Z": lambda g: _pauli_unit("Z"),
    "RX": lambda g: unit_rx(g.angle),
    "RZ": lambda g: unit_rz(g.angle),
}


def compile_circuit(c: Circuit, name: str = "compiled") -> MeasurementPattern:
    """Compose catalog units into one pattern realizing ``c`` (up to a final wire permutation).

    The claim is the literal unit sequence, including routing swaps and
    the swaps built into controlled-phase and Toffoli layouts; the
    ``perm`` metadata gives the logical qubit on each output wire.
    """
    comp = Composer(c.n)
    comp.add_circuit(c)
    return comp.build(name)


# ---------------------------------------------------------------------------
# composite catalog entries


def gate_distant_cnot(separation: int) -> MeasurementPattern:
    """CNOT between wires ``0`` and ``separation + 1`` via crossing layouts.

    The control is carried down across the intermediate wires by
    crossings (controlled-Z then swap), the neighbour CNOT is applied, and
    the control is carried back.  The controlled-Z factors cancel in
    pairs.
    """
    if separation < 0:
        raise PatternError("separation must be non-negative")
    if separation == 0:
        return gate_cnot15()
    return distant_cnot_composer(separation).build(f"distant_cnot{separation}")


def distant_cnot_composer(separation: int) -> Composer:
    """Composer holding the units of :func:`gate_distant_cnot` (``separation >= 1``)."""
    n = separation + 2
    comp = Composer(n)
    for p in range(separation):
        comp.place(gate_crossing(), p)
    comp.place(unit_cnot(False), separation)
    for p in reversed(range(separation)):
        comp.place(gate_crossing(), p)
    comp.logical_gates = [Gate("CNOT", (0, n - 1))]
    return comp


def qft_circuit(n: int) -> Circuit:
    """Logical QFT on a line: Hadamards and controlled phases with built-in swaps.

    Pass ``k`` applies ``H`` to the qubit at position 0 and carries it to
    position ``n - 1 - k`` through controlled phases
    ``CPHASE(pi / 2^m)``, so the output order is reversed.
    """
    c = Circuit(n)
    pos = list(range(n))  # pos[p] = logical at position p
    for k in range(n):
        c.add("H", pos[0])
        for m in range(1, n - k):
            a, b = pos[m - 1], pos[m]
            c.add("CPHASE", a, b, angle=math.pi / 2 ** m)
            pos[m - 1], pos[m] = pos[m], pos[m - 1]
    return c


def circuit_qft(n: int, elide: bool = True) -> MeasurementPattern:
    """Quantum Fourier transform on ``n`` wires from Hadamard and controlled-phase layouts.

    With ``elide`` the X pairs of the padding wires are removed.
    """
    p = qft_composer(n).build(f"qft{n}")
    return elide_x_pairs(p) if elide else p


def qft_composer(n: int) -> Composer:
    """Composer holding the Hadamard and controlled-phase units of the QFT."""
    if n < 1:
        raise PatternError("need at least one qubit")
    comp = Composer(n)
    pos = list(range(n))
    for k in range(n):
        comp.logical_gates.append(Gate("H", (pos[0],)))
        comp.place(unit_hadamard(), 0)
        for m in range(1, n - k):
            comp.logical_gates.append(Gate("CPHASE", (pos[m - 1], pos[m]), math.pi / 2 ** m))
            comp.place(unit_cpg(math.pi / 2 ** m), m - 1)
            pos[m - 1], pos[m] = pos[m], pos[m - 1]
    return comp


def adder_wires(n: int) -> list[str]:
    """Logical wire labels of the ripple-carry adder in initial top-to-bottom order."""
    labels = ["a0", "c1", "b0"] if n >= 2 else ["a0", "b0"]
    for i in range(1, n):
        labels += [f"b{i}", f"a{i}"]
        if i + 1 < n:
            labels.append(f"c{i + 1}")
    return labels


def adder_circuit(n: int) -> tuple[Circuit, list[str]]:
    """Ripple-carry adder ``b <- a + b mod 2^n`` without carry uncomputation.

    Carries are computed with a Toffoli (``H TOFFPHASE(pi) H`` on the
    target) for ``c1`` and ``H CARRY H`` for later carries; sums use two
    CNOTs per bit.  Carry wires start in ``|0>`` and keep their values.
    """
    labels = adder_wires(n)
    q = {lab: i for i, lab in enumerate(labels)}
    c = Circuit(len(labels))
    if n >= 2:
        c.add("H", q["c1"])
        c.add("TOFFPHASE", q["a0"], q["c1"], q["b0"], angle=math.pi)
        c.add("H", q["c1"])
    for i in range(1, n - 1):
        t = q[f"c{i + 1}"]
        c.add("H", t)
        c.add("CARRY", q[f"c{i}"], q[f"b{i}"], q[f"a{i}"], t)
        c.add("H", t)
    for i in range(n):
        c.add("CNOT", q[f"a{i}"], q[f"b{i}"])
        if i >= 1:
            c.add("CNOT", q[f"c{i}"], q[f"b{i}"])
    return c, labels


def circuit_adder(n: int, elide: bool = True) -> MeasurementPattern:
    """Composed ripple-carry adder pattern on ``3n - 1`` wires.

    With ``elide`` the X pairs of the padding wires are removed.
    """
    if n < 1:
        raise PatternError("need at least one bit")
    c, labels = adder_circuit(n)
    p = compile_circuit(c, f"adder{n}")
    if elide:
        p = elide_x_pairs(p)
    return p.with_meta(labels=",".join(labels))


def random_clifford_network(n: int, gates: int, rng) -> Circuit:
    """Random circuit of ``H``, ``S`` and ``CNOT`` gates."""
    c = Circuit(n)
    for _ in range(gates):
        r = rng.random()
        if n >= 2 and r < 0.4:
            a, b = rng.choice(n, size=2, replace=False)
            c.add("CNOT", int(a), int(b))
        elif r < 0.7:
            c.add("H", int(rng.integers(n)))
        else:
            c.add("S", int(rng.integers(n)))
    return c


# ---------------------------------------------------------------------------
# rewrites


def elide_x_pairs(p: MeasurementPattern, pairs: Sequence[tuple[Site, Site]] | None = None) -> MeasurementPattern:
    """Remove pairs of adjacent X-measured wire sites and join their neighbours.

    A pair ``(p1, p2)`` is eligible when both are X-measured body sites of
    degree two, adjacent to each other, and their outer neighbours are
    distinct and not adjacent.  The removed outcomes are set to zero in
    every byproduct and sign expression.

    Raises
    ------
    PatternError
        If an explicitly requested pair is not eligible.
    """
    adj = p.cluster.adjacency()
    io = set(p.inputs) | set(p.outputs)

    def eligible(a, b, removed) -> tuple | None:
        if a in removed or b in removed or a in io or b in io:
            return None
        if b not in adj[a]:
            return None
        for s in (a, b):
            bs = p.bases.get(s)
            if bs is None or bs.kind != "X" or len(adj[s]) != 2:
                return None
        (u,) = adj[a] - {b}
        (v,) = adj[b] - {a}
        if u == v or v in adj[u] or u in removed or v in removed:
            return None
        return u, v

    chosen: list[tuple] = []
    removed: set = set()
    if pairs is not None:
        for a, b in pairs:
            r = eligible(a, b, removed)
            if r is None:
                raise PatternError(f"pair ({a!r}, {b!r}) is not an isolated X pair")
            chosen.append((a, b) + r)
            removed |= {a, b}
            adj[r[0]] = (adj[r[0]] - {a}) | {r[1]}
            adj[r[1]] = (adj[r[1]] - {b}) | {r[0]}
    else:
        for a in sorted(p.cluster.sites, key=qubit_key):
            for b in sorted(adj.get(a, ()), key=qubit_key):
                if a in removed:
                    break
                r = eligible(a, b, removed)
                if r is None:
                    continue
                chosen.append((a, b) + r)
                removed |= {a, b}
                adj[r[0]] = (adj[r[0]] - {a}) | {r[1]}
                adj[r[1]] = (adj[r[1]] - {b}) | {r[0]}
                break
    if not chosen:
        return p
    zero = {s: ParityExpression.constant(0) for s in removed}
    edges = {norm_edge(x, y) for x in adj if x not in removed for y in adj[x] if y not in removed}
    sites = p.cluster.sites - removed
    cl = Cluster(sites, frozenset(edges), p.cluster.kappa - removed,
                 {s: r for s, r in p.cluster.roles.items() if s in sites}, p.cluster.wires)
    bases = {s: _subst_basis(b, zero) for s, b in p.bases.items() if s not in removed}
    det = {s: e.substitute(zero) for s, e in p.determined.items() if s not in removed}
    return replace(
        p,
        cluster=cl,
        bases=bases,
        determined=det,
        byproduct_x=tuple(e.substitute(zero) for e in p.byproduct_x),
        byproduct_z=tuple(e.substitute(zero) for e in p.byproduct_z),
    )


def euler_chain_9(xi: float, eta: float, zeta: float) -> MeasurementPattern:
    """Unreduced Euler rotation: the three adaptive sites separated by X pairs."""
    kinds = ["X", "XY", "X", "X", "XY", "X", "X", "XY"]
    sites, ins, outs, kd = _chain(8, kinds)
    c = Circuit(1).add("RX", 0, angle=xi).add("RZ", 0, angle=eta).add("RX", 0, angle=zeta)
    return derive_pattern("euler9", sites, ins, outs, kd, c)


# ---------------------------------------------------------------------------
# text format


def _fmt_site(s: Site) -> str:
    return " ".join(str(v) for v in s)


def _fmt_vars(vs: Iterable) -> str:
    return ",".join(render_var(v) for v in sorted(vs, key=qubit_key))


def format_pattern(p: MeasurementPattern) -> str:
    """Serialize a pattern with its cluster and claim inline."""
    lines = [f"pattern {p.name or 'unnamed'}"]
    for k in sorted(p.meta):
        lines.append(f"meta {k} {p.meta[k]}")
    lines.append("cluster inline")
    lines.extend(format_cluster(p.cluster).splitlines())
    for s in p.measured_sites():
        b = p.bases[s]
        t = f"measure {_fmt_site(s)} {b.kind}"
        if b.kind == "XY":
            t += f" angle={format_angle(b.angle)}"
            if b.deps:
                t += f" deps={_fmt_vars(b.deps)}"
            t += f" offset={b.offset}"
        if b.post_deps or b.post_offset:
            t += f" post={_fmt_vars(b.post_deps)} postoffset={b.post_offset}"
        lines.append(t)
    for s in sorted(p.determined, key=qubit_key):
        e = p.determined[s]
        t = f"determined {_fmt_site(s)} const={e.const}"
        if e.vars:
            t += f" deps={_fmt_vars(e.vars)}"
        lines.append(t)
    for i in range(p.n):
        for axis, e in (("x", p.byproduct_x[i]), ("z", p.byproduct_z[i])):
            t = f"byproduct wire={i} axis={axis} const={e.const}"
            if e.vars:
                t += f" deps={_fmt_vars(e.vars)}"
            lines.append(t)
    lines.append("claims inline")
    lines.extend(format_circuit(p.claim).splitlines())
    lines.append("end")
    return "\n".join(lines) + "\n"


def _kv(toks: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for t in toks:
        if "=" not in t:
            raise FormatError(lineno, f"expected key=value, got {t!r}")
        k, v = t.split("=", 1)
        out[k] = v
    return out


def _parse_vars(text: str, lineno: int) -> frozenset:
    if not text:
        return frozenset()
    try:
        return frozenset(parse_var(t) for t in text.split(","))
    except ValueError as e:
        raise FormatError(lineno, str(e)) from None


def parse_pattern(text: str, base_dir: str | None = None) -> MeasurementPattern:
    """Inverse of :func:`format_pattern`.

    ``cluster <file>`` and ``claims <file>`` may name external files
    (relative to ``base_dir``) instead of ``inline``.

    Raises
    ------
    FormatError
        With the offending line number.
    """
    import os

    lines = text.splitlines()
    name = ""
    meta: dict = {}
    cluster_lines: list[str] = []
    circuit_lines: list[str] = []
    bases: dict = {}
    bp: dict = {}
    det: dict = {}
    mode = None
    cluster_text = None
    circuit_text = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if mode == "circuit":
            if head == "end":
                mode = None
            else:
                circuit_lines.append(line)
            continue
        if head == "pattern":
            name = toks[1] if len(toks) > 1 else ""
        elif head == "meta":
            if len(toks) < 3:
                raise FormatError(lineno, "expected 'meta key value'")
            meta[toks[1]] = " ".join(toks[2:])
        elif head == "cluster":
            if len(toks) != 2:
                raise FormatError(lineno, "expected 'cluster inline' or 'cluster <file>'")
            if toks[1] != "inline":
                path = os.path.join(base_dir or ".", toks[1])
                try:
                    with open(path, encoding="utf-8") as fh:
                        cluster_text = fh.read()
                except OSError as e:
                    raise FormatError(lineno, f"cannot read cluster file: {e}") from None
        elif head in ("site", "edge", "wire"):
            cluster_lines.append(line)
        elif head == "measure":
            if len(toks) < 5:
                raise FormatError(lineno, "expected 'measure x y z kind ...'")
            s = parse_site(toks[1:4], lineno)
            kind = toks[4].upper()
            if kind not in KINDS:
                raise FormatError(lineno, f"unknown kind {toks[4]!r}")
            kv = _kv(toks[5:], lineno)
            unknown = set(kv) - {"angle", "deps", "offset", "post", "postoffset"}
            if unknown:
                raise FormatError(lineno, f"unknown field {sorted(unknown)[0]!r}")
            try:
                b = MeasurementBasis(
                    kind,
                    parse_float(kv["angle"], lineno, "angle") if "angle" in kv else 0.0,
                    _parse_vars(kv.get("deps", ""), lineno),
                    parse_int(kv.get("offset", "0"), lineno, "offset"),
                    _parse_vars(kv.get("post", ""), lineno),
                    parse_int(kv.get("postoffset", "0"), lineno, "postoffset"),
                )
            except PatternError as e:
                raise FormatError(lineno, str(e)) from None
            if s in bases:
                raise FormatError(lineno, f"duplicate basis for {s!r}")
            bases[s] = b
        elif head == "determined":
            if len(toks) < 4:
                raise FormatError(lineno, "expected 'determined x y z const=b deps=...'")
            s = parse_site(toks[1:4], lineno)
            kv = _kv(toks[4:], lineno)
            det[s] = ParityExpression(parse_int(kv.get("const", "0"), lineno, "const"),
                                      _parse_vars(kv.get("deps", ""), lineno))
        elif head == "byproduct":
            kv = _kv(toks[1:], lineno)
            if "wire" not in kv or kv.get("axis") not in ("x", "z"):
                raise FormatError(lineno, "expected 'byproduct wire=i axis=x|z const=b deps=...'")
            i = parse_int(kv["wire"], lineno, "wire")
            e = ParityExpression(parse_int(kv.get("const", "0"), lineno, "const"),
                                 _parse_vars(kv.get("deps", ""), lineno))
            bp[(i, kv["axis"])] = e
        elif head == "claims":
            if len(toks) != 2:
                raise FormatError(lineno, "expected 'claims inline' or 'claims <file>'")
            if toks[1] == "inline":
                mode = "circuit"
            else:
                path = os.path.join(base_dir or ".", toks[1])
                try:
                    with open(path, encoding="utf-8") as fh:
                        circuit_text = fh.read()
                except OSError as e:
                    raise FormatError(lineno, f"cannot read circuit file: {e}") from None
        else:
            raise FormatError(lineno, f"unknown record {head!r}")
    if mode == "circuit":
        raise FormatError(len(lines), "claims block not terminated by 'end'")
    cl = parse_cluster(cluster_text if cluster_text is not None else "\n".join(cluster_lines))
    claim = parse_circuit(circuit_text if circuit_text is not None else "\n".join(circuit_lines))
    n = cl.n_wires
    try:
        bx = tuple(bp.get((i, "x"), ParityExpression()) for i in range(n))
        bz = tuple(bp.get((i, "z"), ParityExpression()) for i in range(n))
        extra = [k for k in bp if not 0 <= k[0] < n]
        if extra:
            raise PatternError(f"byproduct for unknown wire {extra[0][0]}")
        p = MeasurementPattern(cl, bases, bx, bz, claim, name, meta, det)
        p.validate()
    except PatternError as e:
        raise FormatError(0, str(e)) from None
    return p


__all__ = [
    "lattice_edges",
    "cnot15_site",
    "decomposition_of",
    "network_metadata",
    "adder_wires",
    "distant_cnot_composer",
    "qft_composer",
    "Composer",
    "MeasurementBasis",
    "MeasurementPattern",
    "PatternError",
    "adder_circuit",
    "circuit_adder",
    "circuit_qft",
    "compile_circuit",
    "compose",
    "compose_parallel",
    "compose_patterns",
    "derive_pattern",
    "elide_x_pairs",
    "euler_chain_9",
    "evaluate",
    "format_pattern",
    "gate_carry",
    "gate_cnot15",
    "gate_controlled_phase",
    "gate_crossing",
    "gate_distant_cnot",
    "gate_hadamard",
    "gate_hamiltonian_zn",
    "gate_identity_wire",
    "gate_phase_s",
    "gate_rot_euler",
    "gate_rot_x",
    "gate_rot_z",
    "gate_swap_n",
    "gate_toffoli_phase",
    "parse_pattern",
    "qft_circuit",
    "random_clifford_network",
    "relabel_pattern",
    "translate_pattern",
]
