"""Symbolic stabilizer derivation of adaptive bases and byproduct operators.

Given a cluster, the measurement kind of each site and a claimed circuit,
:func:`derive_unit` tracks the cluster state together with one reference
qubit per logical input (a Choi-state construction) through all
measurements with outcome bits kept as GF(2) variables.  The result is

* for every adaptive (XY-plane) site, the base angle and the parity of
  earlier outcomes that flips its sign;
* for every logical wire, the byproduct exponents as affine parities.

Reference qubit ``R_i`` starts in a Bell pair with input site ``I_i``
whose stabilizer signs carry the *incoming* byproduct variables
``in<i>.x`` and ``in<i>.z``.  Patterns derived this way compose by
substituting an earlier pattern's output byproduct for these variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .circuit import Circuit, Decomposition, decompose
from .parity import ParityExpression
from .pauli import PauliProduct, commutes, qubit_key
from .stabilizer import BitTableau, TableauError

Qubit = Hashable

PAULI_KINDS = ("X", "Y", "Z")
_AXIS_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class DerivationError(ValueError):
    """The layout does not realize the claimed circuit."""


def in_var(i: int, axis: str) -> str:
    """Name of the incoming byproduct variable for wire ``i`` (``axis`` is ``x`` or ``z``)."""
    return f"in{i}.{axis}"


def ref_label(i: int) -> str:
    return f"R{i}"


class VarTable:
    """Allocation of GF(2) variables to bit positions of sign forms (bit 0 is the constant)."""

    def __init__(self) -> None:
        self.names: list = [None]
        self.pos: dict = {}

    def bit(self, name) -> int:
        k = self.pos.get(name)
        if k is None:
            k = len(self.names)
            self.names.append(name)
            self.pos[name] = k
        return 1 << k

    def expr(self, form: int) -> ParityExpression:
        vs = []
        k = 1
        f = form >> 1
        while f:
            if f & 1:
                vs.append(self.names[k])
            f >>= 1
            k += 1
        return ParityExpression.of(*vs, const=form & 1)

    def form(self, e: ParityExpression) -> int:
        f = e.const & 1
        for v in e.vars:
            f ^= self.bit(v)
        return f


@dataclass
class TiltedInfo:
    """Derived data for an adaptive site."""

    site: Qubit
    base_angle: float
    deps: ParityExpression  # vars only; const folded into ``offset``
    offset: int
    rotation: int  # index into the claimed decomposition's rotations
    batch: int


@dataclass
class DerivedUnit:
    """Result of :func:`derive_unit`."""

    tilted: dict[Qubit, TiltedInfo]
    byproduct_x: list[ParityExpression]
    byproduct_z: list[ParityExpression]
    determined: dict[Qubit, ParityExpression] = field(default_factory=dict)
    batches: list[list[Qubit]] = field(default_factory=list)


def _bits_to_pauli(tab: BitTableau, x: int, z: int, sites: Sequence[Qubit], labels: Sequence) -> PauliProduct:
    ops = {}
    for s, lab in zip(sites, labels):
        b = tab.bit(s)
        xb, zb = bool(x & b), bool(z & b)
        if xb or zb:
            ops[lab] = "Y" if xb and zb else ("X" if xb else "Z")
    return PauliProduct.from_dict(ops)


def prepare_choi(
    sites: Sequence[Qubit],
    edges: Sequence[tuple[Qubit, Qubit]],
    inputs: Sequence[Qubit],
    kappa: Mapping[Qubit, int],
    vt: VarTable,
    with_in_vars: bool = True,
) -> BitTableau:
    """Cluster on ``sites`` with each input Bell-paired to a reference qubit."""
    tab = BitTableau()
    inset = set(inputs)
    for i, _ in enumerate(inputs):
        tab.add_qubit(ref_label(i), 0, 0, 0)
        tab.rows.pop()  # rows for the reference come with its input below
    for s in sorted(sites, key=qubit_key):
        if s in inset:
            tab.add_qubit(s, 0, 0, 0)
            tab.rows.pop()
        else:
            tab.add_qubit(s, 1, 0, 0)
    for i, s in enumerate(inputs):
        rb, sb = tab.bit(ref_label(i)), tab.bit(s)
        xs = vt.bit(in_var(i, "z")) if with_in_vars else 0
        zs = vt.bit(in_var(i, "x")) if with_in_vars else 0
        tab.rows.append([rb | sb, 0, xs])
        tab.rows.append([0, rb | sb, zs])
    for s in sites:
        if kappa.get(s, 0) & 1:
            tab.pauli_flip(s, "Z")
    for a, b in edges:
        tab.cz(a, b)
    return tab


def measure_symbolic(tab: BitTableau, vt: VarTable, site: Qubit, axis: str) -> ParityExpression | None:
    """Measure ``axis`` on ``site`` with a fresh outcome variable and discard the site.

    Returns ``None`` for a random outcome, or the determined outcome as a
    parity expression.
    """
    bx, bz = _AXIS_BITS[axis]
    b = tab.bit(site)
    px, pz = (b if bx else 0), (b if bz else 0)
    anti = tab.anticommuting_rows(px, pz)
    if anti:
        tab.measure(px, pz, vt.bit(site))
        det = None
    else:
        _, form = tab.measure(px, pz, None)
        det = vt.expr(form)
    tab.discard(site)
    return det


def _solve_gf2(rows: list[int], rhs: list[int], nvars: int) -> list[int]:
    """Solve ``A u = rhs`` over GF(2) where ``rhs`` entries are sign forms.

    ``rows[k]`` is a bitmask over ``nvars`` unknowns.  Returns the form of
    each unknown.  Raises if singular.
    """
    a = list(rows)
    b = list(rhs)
    m = len(a)
    where = [-1] * nvars
    r = 0
    for col in range(nvars):
        piv = next((i for i in range(r, m) if (a[i] >> col) & 1), None)
        if piv is None:
            raise DerivationError("byproduct system is singular")
        a[r], a[piv] = a[piv], a[r]
        b[r], b[piv] = b[piv], b[r]
        for i in range(m):
            if i != r and (a[i] >> col) & 1:
                a[i] ^= a[r]
                b[i] ^= b[r]
        where[col] = r
        r += 1
    return [b[where[c]] for c in range(nvars)]


def derive_unit(
    sites: Sequence[Qubit],
    edges: Sequence[tuple[Qubit, Qubit]],
    inputs: Sequence[Qubit],
    outputs: Sequence[Qubit],
    kinds: Mapping[Qubit, str],
    claim: Circuit,
    kappa: Mapping[Qubit, int] | None = None,
) -> DerivedUnit:
    """Derive adaptive bases and byproducts so that the layout realizes ``claim``.

    Parameters
    ----------
    sites, edges
        The cluster graph.
    inputs, outputs
        One site per logical wire, in wire order.
    kinds
        ``X``, ``Y``, ``Z`` or ``XY`` for every measured site (all sites but
        the outputs).
    claim
        Circuit the pattern should implement up to an output byproduct.

    Raises
    ------
    DerivationError
        If the measured correlations cannot realize ``claim``.
    """
    n = claim.n
    if len(inputs) != n or len(outputs) != n:
        raise DerivationError("wire count does not match the claimed circuit")
    kappa = kappa or {}
    outset = set(outputs)
    for s in sites:
        if s not in outset and s not in kinds:
            raise DerivationError(f"site {s!r} has no measurement kind")
    for s in outputs:
        if s in kinds:
            raise DerivationError(f"output site {s!r} must stay unmeasured")
    vt = VarTable()
    for i in range(n):
        vt.bit(in_var(i, "x"))
        vt.bit(in_var(i, "z"))
    tab = prepare_choi(sites, edges, inputs, kappa, vt)
    refs = [ref_label(i) for i in range(n)]
    rmask = tab.mask(refs)

    determined: dict = {}
    for s in sorted((s for s in kinds if kinds[s] in PAULI_KINDS), key=qubit_key):
        det = measure_symbolic(tab, vt, s, kinds[s])
        if det is not None:
            determined[s] = det

    dec: Decomposition = decompose(claim)
    pending = sorted((s for s in kinds if kinds[s] == "XY"), key=qubit_key)
    items = []  # (site, W as PauliProduct on wire indices incl. transpose sign, sign form, batch)
    batches: list[list] = []
    while pending:
        alive_sites = [q for q in tab.alive if q not in refs]
        amask = tab.mask(alive_sites)
        if tab.null_elements(amask):
            raise DerivationError("reference qubits are not maximally entangled with the cluster")
        ready = []
        for t in pending:
            el = tab.find_element(0, tab.bit(t), amask)
            if el is not None:
                ready.append((t, el))
        if not ready:
            raise DerivationError(
                "no adaptive site is ready; remaining: " + ", ".join(map(str, pending))
            )
        batch = []
        for t, el in ready:
            w = _bits_to_pauli(tab, el[0] & rmask, el[1] & rmask, refs, range(n))
            ny = sum(1 for _, a in w.ops if a == "Y")
            items.append((t, w, el[2] ^ (ny & 1), len(batches)))
            batch.append(t)
        for t in batch:
            if measure_symbolic(tab, vt, t, "X") is not None:
                raise DerivationError(f"adaptive site {t!r} has a determined outcome")
            pending.remove(t)
        batches.append(batch)

    # match adaptive sites to claimed rotations
    rots = dec.rotations
    used = [False] * len(rots)
    tilted: dict = {}
    for t, w, form, bidx in items:
        choice = None
        for k, r in enumerate(rots):
            if used[k]:
                continue
            if r.pauli.ops == w.ops:
                blocked = any(not used[j] and not commutes(rots[j].pauli, r.pauli) for j in range(k))
                if not blocked:
                    choice = k
                    break
            # a non-matching earlier rotation that does not commute blocks later ones
        if choice is None:
            raise DerivationError(f"site {t!r} realizes rotation about {w} which the claim lacks")
        used[choice] = True
        r = rots[choice]
        e = r.pauli.sign
        total = form ^ e
        deps = vt.expr(total & ~1)
        tilted[t] = TiltedInfo(t, 2 * r.beta, deps, total & 1, choice, bidx)
    if not all(used):
        missing = [str(rots[k].pauli) for k in range(len(rots)) if not used[k]]
        raise DerivationError("claimed rotations without adaptive site: " + ", ".join(missing))

    # byproduct from the reference correlations
    omask = tab.mask(outputs)
    if set(tab.alive) != set(refs) | outset:
        raise DerivationError("unmeasured sites besides outputs remain")
    eq_rows: list[int] = []
    eq_rhs: list[int] = []
    for i in range(n):
        for axis, images in (("X", dec.x_images), ("Z", dec.z_images)):
            bx, bz = _AXIS_BITS[axis]
            rb = tab.bit(refs[i])
            el = tab.find_element(rb if bx else 0, rb if bz else 0, rmask)
            if el is None:
                raise DerivationError(f"no correlation for {axis} on wire {i}")
            got = _bits_to_pauli(tab, el[0] & omask, el[1] & omask, outputs, range(n))
            want = images[i]
            if got.ops != want.ops:
                raise DerivationError(
                    f"wire {i} {axis}: pattern maps to {got} but claim maps to {want}"
                )
            row = 0
            for q, a in want.ops:
                xb, zb = _AXIS_BITS[a]
                # anticommutation of X^xi Z^zeta with the factor
                if zb:
                    row |= 1 << q  # xi_q
                if xb:
                    row |= 1 << (n + q)  # zeta_q
            eq_rows.append(row)
            eq_rhs.append(el[2] ^ want.sign)
    sol = _solve_gf2(eq_rows, eq_rhs, 2 * n)
    bx_exprs = [vt.expr(sol[q]) for q in range(n)]
    bz_exprs = [vt.expr(sol[n + q]) for q in range(n)]
    return DerivedUnit(tilted, bx_exprs, bz_exprs, determined, batches)


def tilted_element_probe(
    sites: Sequence[Qubit],
    edges: Sequence[tuple[Qubit, Qubit]],
    inputs: Sequence[Qubit],
    outputs: Sequence[Qubit],
    kinds: Mapping[Qubit, str],
    candidates: Sequence[Qubit],
) -> dict:
    """For each candidate site, the input-frame Pauli its rotation would act on.

    All sites in ``kinds`` except the candidates are measured in their Pauli
    bases; each candidate is then probed individually.  Used to search for
    layouts that realize multi-qubit rotations.
    """
    vt = VarTable()
    tab = prepare_choi(sites, edges, inputs, {}, vt, with_in_vars=False)
    cand = set(candidates)
    for s in sorted((s for s in kinds if s not in cand), key=qubit_key):
        measure_symbolic(tab, vt, s, kinds[s])
    n = len(inputs)
    refs = [ref_label(i) for i in range(n)]
    rmask = tab.mask(refs)
    amask = tab.mask([q for q in tab.alive if q not in refs])
    out = {}
    for t in candidates:
        el = tab.find_element(0, tab.bit(t), amask)
        if el is not None:
            out[t] = _bits_to_pauli(tab, el[0] & rmask, el[1] & rmask, refs, range(n))
    return out


__all__ = [
    "DerivationError",
    "DerivedUnit",
    "TiltedInfo",
    "VarTable",
    "derive_unit",
    "in_var",
    "measure_symbolic",
    "prepare_choi",
    "tilted_element_probe",
    "TableauError",
]
