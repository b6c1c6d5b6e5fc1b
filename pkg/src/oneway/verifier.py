"""Checking that a measurement pattern realizes its claimed circuit.

For one branch (an assignment of outcomes to the measured sites) the
input sites are left unmeasured and every other measured site is
projected onto its outcome.  The result is a state ``Phi`` on the input
and output sites which is the Choi state of the map ``T0`` realized by
the body of the pattern.  Measuring the inputs in X with outcomes
``s_I`` then realizes ``M = T0 Z^{s_I}``, so the pattern is correct on
that branch when ``M`` equals ``B(s) U`` up to a global phase.

The check is carried out in two orderings:

* ``B U``: the byproduct sits on the output side (as it is stored in
  the pattern) and ``M`` is compared to ``B(s) U`` directly.
* ``U' B_in``: the byproduct is moved to the input side, which flips
  the angles of rotations that do not commute with it, and ``Phi`` is
  tested against the ``2n`` eigen-equations
  ``X_i^(I) (U' X_i U'^+)^(O) Phi = (-1)^{lx_i} Phi`` and
  ``Z_i^(I) (U' Z_i U'^+)^(O) Phi = (-1)^{lz_i} Phi``.

On top of this the oracle check pushes basis states, ``|+>^n`` and
random states through ``M`` and compares with ``B U psi``, and a few
branches are re-run directly with the input attached as a cross-check
of the Choi construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Hashable, Mapping, Sequence

import numpy as np

from .byproduct import ByproductOperator, items_unitary, swap_gate_and_byproduct
from .circuit import circuit_unitary
from .parity import ParityExpression
from .patterns import MeasurementBasis, MeasurementPattern, PatternError
from .pauli import pauli_matrix
from .runtime import RunError, _greedy_order, execute_split
from .statevector import DenseStateError, WindowedExecutor

Site = Hashable

EIGEN_TOL = 1e-9
FIDELITY_TOL = 1e-9
PHASE_TOL = 1e-7
PROB_TOL = 1e-7
EXHAUSTIVE_LIMIT = 4096
SAMPLED_BRANCHES = 256


class VerificationError(RuntimeError):
    """The pattern could not be checked (malformed or too large)."""


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ClaimCheck:
    """One eigen-equation on one branch."""

    wire: int
    axis: str
    branch: str
    residual: float

    @property
    def passed(self) -> bool:
        return self.residual <= EIGEN_TOL

    def render(self) -> str:
        verdict = "pass" if self.passed else "fail"
        return f"claim wire={self.wire} axis={self.axis} branch={self.branch} {verdict} residual={self.residual:.3e}"


@dataclass(frozen=True)
class OracleCheck:
    """Realized output versus ``B U psi`` for one input on one branch."""

    branch: str
    input_label: str
    fidelity: float
    phase: float

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1 - FIDELITY_TOL

    def render(self) -> str:
        verdict = "pass" if self.passed else "fail"
        return (
            f"oracle branch={self.branch} input={self.input_label} {verdict} "
            f"fidelity={self.fidelity:.12f} phase={self.phase:.9f}"
        )


@dataclass
class VerificationReport:
    """Outcome of :func:`verify`.

    Attributes
    ----------
    claims
        Eigen-equation checks (``2n`` per branch).
    oracle
        Oracle checks (one per input per branch).
    failures
        Human-readable reasons for every failed check, including branches
        with the wrong probability and phase mismatches.
    branches
        Number of branches examined.
    exhaustive
        Whether every branch of the free sites was examined.
    """

    name: str
    n: int
    claims: list[ClaimCheck] = field(default_factory=list)
    oracle: list[OracleCheck] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    branches: int = 0
    exhaustive: bool = False

    @property
    def ok(self) -> bool:
        return (
            not self.failures
            and all(c.passed for c in self.claims)
            and all(o.passed for o in self.oracle)
        )

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.claims), default=0.0)

    @property
    def min_fidelity(self) -> float:
        return min((o.fidelity for o in self.oracle), default=1.0)

    def render(self, claims: bool = True, oracle: bool = False) -> str:
        lines = [f"pattern {self.name or '-'} wires={self.n}"]
        lines.append(f"branches {self.branches} {'exhaustive' if self.exhaustive else 'sampled'}")
        if claims:
            lines.extend(c.render() for c in self.claims)
        if oracle:
            lines.extend(o.render() for o in self.oracle)
        lines.extend(f"failure {f}" for f in self.failures)
        ok_c = sum(c.passed for c in self.claims)
        ok_o = sum(o.passed for o in self.oracle)
        lines.append(
            f"summary {'pass' if self.ok else 'fail'} claims={ok_c}/{len(self.claims)} "
            f"oracle={ok_o}/{len(self.oracle)} max_residual={self.max_residual:.3e} "
            f"min_fidelity={self.min_fidelity:.12f}"
        )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# branches


def branch_bits(p: MeasurementPattern, outcomes: Mapping[Site, int]) -> str:
    """Outcome string over the measured sites in lattice order."""
    return "".join(str(outcomes[s]) for s in p.measured_sites())


def enumerate_branches(
    p: MeasurementPattern,
    limit: int = EXHAUSTIVE_LIMIT,
    samples: int = SAMPLED_BRANCHES,
    seed: int = 0,
) -> tuple[list[dict], bool]:
    """Branches to check: all of them when ``2^free <= limit``, else ``samples`` seeded draws.

    Returns
    -------
    (branches, exhaustive)
        Each branch assigns every measured site (determined outcomes
        included).
    """
    free = p.free_sites()
    k = len(free)
    if k <= 62 and 2 ** k <= limit:
        out = []
        for m in range(2 ** k):
            bits = {s: (m >> (k - 1 - i)) & 1 for i, s in enumerate(free)}
            out.append(p.complete_outcomes(bits))
        return out, True
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        bits = {s: int(b) for s, b in zip(free, rng.integers(0, 2, size=k))}
        out.append(p.complete_outcomes(bits))
    return out, False


# ---------------------------------------------------------------------------
# realized maps


@dataclass
class BranchMap:
    """The map realized on one branch.

    Attributes
    ----------
    choi
        Normalized ``Phi`` as a ``2^n x 2^n`` matrix (rows: input sites,
        columns: output sites).
    body
        ``T0`` with the input X outcomes not yet applied.
    realized
        ``M``: ``T0`` followed by the input measurements (``T0 Z^{s_I}``
        for X-measured inputs); unitary when the branch is valid.
    probability
        Probability of the body outcomes.
    expected_probability
        ``2^-k`` for ``k`` free body sites.
    """

    choi: np.ndarray
    body: np.ndarray
    realized: np.ndarray
    probability: float
    expected_probability: float


def input_projection(p: MeasurementPattern, outcomes: Mapping[Site, int]) -> np.ndarray:
    """Diagonal factor contributed by measuring the input sites.

    An input site holding ``sum_a psi_a |a>`` and measured with bra
    ``beta`` contributes ``sqrt2 * diag(beta)``.  For an X measurement
    with outcome ``s`` this is ``Z^s``.
    """
    d = np.ones(1, dtype=complex)
    for s in p.inputs:
        b = p.bases[s]
        o = outcomes[s]
        if b.kind == "Z":
            beta = np.array([1.0, 0.0]) if o == 0 else np.array([0.0, 1.0])
            beta = beta * math.sqrt(2)
        else:
            ang = b.effective_angle(outcomes) if b.kind == "XY" else (math.pi / 2 if b.kind == "Y" else 0.0)
            e = np.exp(-1j * ang)
            beta = np.array([1.0, e if o == 0 else -e])
        d = np.kron(d, beta)
    return np.diag(d)


def body_order(p: MeasurementPattern) -> list[Site]:
    """Measurement order for the body that keeps the dense window small."""
    body = [s for s in p.bases if s not in set(p.inputs)]
    return _greedy_order(body, p.cluster.adjacency(), set(p.inputs), {}, None)


def branch_map(
    p: MeasurementPattern,
    outcomes: Mapping[Site, int],
    order: Sequence[Site] | None = None,
) -> BranchMap:
    """Choi state and realized map of ``p`` on one branch.

    Raises
    ------
    VerificationError
        If the branch has zero probability.
    """
    ins = p.inputs
    inset = set(ins)
    adj = p.cluster.adjacency()
    ex = WindowedExecutor(adj, p.cluster.kappa_map())
    for s in ins:
        ex.attach(s)
    order = list(order) if order is not None else body_order(p)
    prob = 1.0
    free = set(p.free_sites())
    k = 0
    for s in order:
        b = p.bases[s]
        try:
            ex.step(s, b.kind, b.effective_angle(outcomes), outcomes[s])
        except DenseStateError as e:
            raise VerificationError(f"branch has zero probability at {s!r}: {e}") from None
        prob *= ex.state.last_probability
        if s in free:
            k += 1
    for s in p.outputs:
        ex.attach(s)
    n = p.n
    dim = 2 ** n
    phi = ex.state.amplitudes(list(ins) + list(p.outputs)).reshape(dim, dim)
    nrm = np.linalg.norm(phi)
    phi = phi / nrm
    t0 = math.sqrt(dim) * phi.T
    return BranchMap(phi, t0, t0 @ input_projection(p, outcomes), prob, 2.0 ** -k)


def _global_phase(a: np.ndarray, b: np.ndarray) -> tuple[complex, float]:
    """Phase ``c`` minimizing ``|a - c b|`` and the normalized residual."""
    ov = np.vdot(b.ravel(), a.ravel())
    nb = np.vdot(b.ravel(), b.ravel()).real
    if abs(ov) < 1e-300:
        return 1.0, float("inf")
    c = ov / abs(ov)
    res = float(np.linalg.norm(a - c * b) / math.sqrt(max(nb, 1e-300)))
    return c, res


# ---------------------------------------------------------------------------
# moving the byproduct to the input side


def input_side_byproduct(claim, b: ByproductOperator) -> ByproductOperator:
    """``B_in`` such that moving it through ``claim`` gives ``b``.

    The output frame is a linear function of the input frame (only the
    Clifford items act on it), so ``B_in`` is found by GF(2) elimination.
    """
    n = b.n
    cols = []
    for j in range(2 * n):
        x = [0] * n
        z = [0] * n
        (x if j < n else z)[j % n] = 1
        out, _ = swap_gate_and_byproduct(claim, ByproductOperator(tuple(x), tuple(z)))
        cols.append(list(out.x) + list(out.z))
    a = np.array(cols, dtype=np.uint8).T  # out = a @ in
    rhs = np.array(list(b.x) + list(b.z), dtype=np.uint8)
    m = np.concatenate([a, rhs[:, None]], axis=1)
    rows, piv_cols = 2 * n, []
    r = 0
    for c in range(2 * n):
        piv = next((i for i in range(r, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        piv_cols.append(c)
        r += 1
    if r != 2 * n:
        raise VerificationError("Clifford frame map is singular")
    sol = [0] * (2 * n)
    for i, c in enumerate(piv_cols):
        sol[c] = int(m[i, -1])
    return ByproductOperator(tuple(sol[:n]), tuple(sol[n:]))


def _single(n: int, q: int, axis: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for i in range(n):
        out = np.kron(out, pauli_matrix(axis) if i == q else np.eye(2))
    return out


def eigen_residuals(
    choi: np.ndarray, modified: np.ndarray, b_in: ByproductOperator, s_in: Sequence[int]
) -> list[tuple[int, str, float]]:
    """Residuals of the ``2n`` eigen-equations for ``Phi``.

    The expected signs are ``lx_i = z_i(B_in) xor s_I,i`` and
    ``lz_i = x_i(B_in)``.
    """
    n = b_in.n
    out = []
    for i in range(n):
        for axis in ("x", "z"):
            p1 = _single(n, i, axis.upper())
            v = modified @ p1 @ modified.conj().T
            lam = (b_in.z[i] ^ s_in[i]) if axis == "x" else b_in.x[i]
            k_phi = p1 @ choi @ v.T
            r = float(np.linalg.norm(k_phi - (-1) ** lam * choi))
            out.append((i, axis, r))
    return out


# ---------------------------------------------------------------------------
# top level


def _random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def oracle_inputs(n: int, random_count: int = 3, seed: int = 0) -> list[tuple[str, np.ndarray]]:
    """Computational basis states, ``|+>^n`` and seeded random states."""
    dim = 2 ** n
    out = []
    for k in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[k] = 1
        out.append((f"basis:{k}", v))
    out.append(("plus", np.full(dim, 1 / math.sqrt(dim), dtype=complex)))
    rng = np.random.default_rng(seed)
    for j in range(random_count):
        out.append((f"random:{j}", _random_state(rng, dim)))
    return out


def verify(
    p: MeasurementPattern,
    branches: Sequence[Mapping[Site, int]] | None = None,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = SAMPLED_BRANCHES,
    random_inputs: int = 3,
    direct_checks: int = 2,
    stop_on_failure: bool = False,
) -> VerificationReport:
    """Check that ``p`` realizes ``B(s) U`` on every examined branch.

    Parameters
    ----------
    branches
        Explicit branches; by default all branches when there are at
        most ``exhaustive_limit`` of them, otherwise ``samples`` seeded
        random ones.
    random_inputs
        Number of random input states for the oracle check.
    direct_checks
        Number of branches re-run with the input attached, comparing the
        output to the Choi prediction.
    stop_on_failure
        Return at the first failing branch.
    """
    try:
        p.validate()
    except PatternError as e:
        rep = VerificationReport(p.name, p.n)
        rep.failures.append(f"invalid pattern: {e}")
        return rep
    n = p.n
    rep = VerificationReport(p.name, n)
    if branches is None:
        branches, rep.exhaustive = enumerate_branches(p, exhaustive_limit, samples, seed)
    branches = list(branches)
    u = circuit_unitary(p.claim)
    inputs = oracle_inputs(n, random_inputs, seed)
    order = body_order(p)
    modified_cache: dict = {}
    for bi, br in enumerate(branches):
        bits = branch_bits(p, br)
        rep.branches += 1
        before = len(rep.failures)
        try:
            bm = branch_map(p, br, order)
        except VerificationError as e:
            rep.failures.append(f"branch={bits}: {e}")
            if stop_on_failure:
                return rep
            continue
        if abs(bm.probability - bm.expected_probability) > PROB_TOL * bm.expected_probability:
            rep.failures.append(
                f"branch={bits}: probability {bm.probability:.6g}, expected {bm.expected_probability:.6g}"
            )
        sing = np.linalg.svd(bm.realized, compute_uv=False)
        if sing.min() < 1 - 1e-6:
            rep.failures.append(f"branch={bits}: realized map is not unitary (smallest singular value {sing.min():.3g})")
        byp = p.byproduct_at(br)
        target = byp.matrix() @ u

        # ordering B U: direct comparison of the realized map
        _, res = _global_phase(bm.realized, target)
        if res > EIGEN_TOL * max(1, 2 ** (n / 2)):
            rep.failures.append(f"branch={bits}: realized map differs from B U (residual {res:.3e})")

        # ordering U' B_in: eigen-equations of the Choi state
        b_in = input_side_byproduct(p.claim, byp)
        key = (b_in.x, b_in.z)
        if key not in modified_cache:
            _, items = swap_gate_and_byproduct(p.claim, b_in)
            modified_cache[key] = items_unitary(items, n)
        if all(p.bases[s].kind == "X" for s in p.inputs):
            choi, s_in = bm.choi, [br[s] for s in p.inputs]
        else:
            choi, s_in = bm.realized.T / 2 ** (n / 2), [0] * n
        for wire, axis, r in eigen_residuals(choi, modified_cache[key], b_in, s_in):
            rep.claims.append(ClaimCheck(wire, axis, bits, r))

        # oracle: inputs pushed through the realized map
        phases = []
        for label, psi in inputs:
            got = bm.realized @ psi
            want = target @ psi
            ov = np.vdot(want, got)
            fid = float(abs(ov) ** 2 / max(np.vdot(got, got).real, 1e-300))
            ph = float(np.angle(ov)) if abs(ov) > 1e-12 else 0.0
            phases.append(ph)
            rep.oracle.append(OracleCheck(bits, label, fid, ph))
        spread = max(abs(np.angle(np.exp(1j * (ph - phases[0])))) for ph in phases)
        if spread > PHASE_TOL:
            rep.failures.append(f"branch={bits}: global phase differs between inputs by {spread:.3e}")

        if bi < direct_checks:
            _direct_check(p, br, bm, inputs[-1], bits, rep)
        if stop_on_failure and (
            len(rep.failures) > before
            or not all(c.passed for c in rep.claims[-2 * n:])
            or not all(o.passed for o in rep.oracle[-len(inputs):])
        ):
            return rep
    return rep


def _direct_check(p, br, bm: BranchMap, item, bits: str, rep: VerificationReport) -> None:
    label, psi = item
    try:
        rec = execute_split(p, 24, seed=0, forced=br, input_state=psi, readout=False)
    except (RunError, DenseStateError) as e:
        rep.failures.append(f"branch={bits}: direct run failed: {e}")
        return
    got = rec.output_state
    want = bm.realized @ psi
    _, res = _global_phase(got, want / np.linalg.norm(want))
    if res > 1e-7:
        rep.failures.append(f"branch={bits}: direct run on {label} disagrees with the Choi map ({res:.3e})")


# ---------------------------------------------------------------------------
# byproduct rule from the realized maps


def identify_pauli(m: np.ndarray, tol: float = 1e-7) -> ByproductOperator | None:
    """``(x, z)`` with ``m`` proportional to ``prod X^x Z^z``, or ``None``."""
    dim = m.shape[0]
    n = dim.bit_length() - 1
    col = m[:, 0]
    xi = int(np.argmax(np.abs(col)))
    x = tuple((xi >> (n - 1 - q)) & 1 for q in range(n))
    cand_x = ByproductOperator(x, (0,) * n).matrix()
    d = np.diag(cand_x.conj().T @ m)
    if abs(d[0]) < tol:
        return None
    z = tuple(int((d[1 << (n - 1 - q)] / d[0]).real < 0) for q in range(n))
    cand = ByproductOperator(x, z)
    _, res = _global_phase(m, cand.matrix())
    return cand if res < tol * dim else None


@dataclass(frozen=True)
class ByproductRule:
    """Byproduct exponents as affine parities over the free sites."""

    free: tuple
    x: tuple[ParityExpression, ...]
    z: tuple[ParityExpression, ...]

    def at(self, outcomes: Mapping[Site, int]) -> ByproductOperator:
        from .patterns import evaluate

        return ByproductOperator(
            tuple(evaluate(e, outcomes) for e in self.x), tuple(evaluate(e, outcomes) for e in self.z)
        )


def derive_byproduct_rule(p: MeasurementPattern) -> ByproductRule:
    """Recover the byproduct of ``p`` from realized maps alone.

    The byproduct is affine in the free outcomes, so it is fixed by the
    all-zero branch and the ``k`` branches with a single free outcome
    set.  On each of them ``M U^+`` is identified as a Pauli product.

    Raises
    ------
    VerificationError
        If some ``M U^+`` is not a Pauli product.
    """
    u = circuit_unitary(p.claim)
    free = p.free_sites()
    order = body_order(p)

    def frame(bits: Mapping[Site, int]) -> ByproductOperator:
        br = p.complete_outcomes(bits)
        bm = branch_map(p, br, order)
        b = identify_pauli(bm.realized @ u.conj().T)
        if b is None:
            raise VerificationError("realized map is not the claim up to a Pauli byproduct")
        return b

    base = frame({s: 0 for s in free})
    n = p.n
    xs: list[set] = [set() for _ in range(n)]
    zs: list[set] = [set() for _ in range(n)]
    for s in free:
        b = frame({t: int(t == s) for t in free})
        for i in range(n):
            if b.x[i] ^ base.x[i]:
                xs[i].add(s)
            if b.z[i] ^ base.z[i]:
                zs[i].add(s)
    return ByproductRule(
        tuple(free),
        tuple(ParityExpression(base.x[i], frozenset(v)) for i, v in enumerate(xs)),
        tuple(ParityExpression(base.z[i], frozenset(v)) for i, v in enumerate(zs)),
    )


def byproduct_agrees(p: MeasurementPattern, rule: ByproductRule, trials: int = 64, seed: int = 0) -> bool:
    """Whether the stored byproduct of ``p`` matches ``rule`` on random branches."""
    rng = np.random.default_rng(seed)
    free = p.free_sites()
    for _ in range(trials):
        br = p.complete_outcomes({s: int(rng.integers(2)) for s in free})
        if p.byproduct_at(br) != rule.at(br):
            return False
    return True


# ---------------------------------------------------------------------------
# mutations


MUTATION_KINDS = ("basis", "angle", "byproduct")


def inert_sites(p: MeasurementPattern) -> list[Site]:
    """Determined Pauli sites whose outcome no expression of ``p`` reads.

    Once the other measured sites are measured, such a site is left in
    an eigenstate of its basis, unentangled from the rest, so measuring
    it in any other Pauli basis yields the same pattern semantics.
    """
    read: set = set()
    for e in (*p.byproduct_x, *p.byproduct_z, *p.determined.values()):
        read |= set(e.vars)
    for b in p.bases.values():
        read |= set(b.deps)
    return [s for s in p.measured_sites() if s in p.determined and s not in read]


def mutate(p: MeasurementPattern, kind: str, rng: np.random.Generator) -> tuple[MeasurementPattern, str]:
    """One random single-element change of the given kind.

    ``basis`` replaces the kind of one measured site (skipping
    :func:`inert_sites`, where the change is semantically void), ``angle`` negates
    the base angle of an adaptive site whose angle is not ``0`` or
    ``pi``, ``byproduct`` flips the constant of one byproduct bit.

    Raises
    ------
    VerificationError
        If ``p`` has nothing to mutate for ``kind``.
    """
    if kind == "basis":
        inert = set(inert_sites(p))
        sites = [s for s in p.measured_sites() if s not in inert]
        if not sites:
            raise VerificationError("no measured site with a semantically relevant basis")
        s = sites[int(rng.integers(len(sites)))]
        b = p.bases[s]
        choices = [k for k in ("X", "Y", "Z") if k != b.kind]
        new = choices[int(rng.integers(len(choices)))]
        bases = dict(p.bases)
        bases[s] = MeasurementBasis(new)
        # a Pauli site may not depend on other outcomes; dependants keep theirs
        q = replace(p, bases=bases, determined={k: v for k, v in p.determined.items() if k != s})
        return q, f"basis {s!r} {b.kind}->{new}"
    if kind == "angle":
        cands = [
            s
            for s in p.adaptive_sites()
            if abs(math.sin(p.bases[s].angle)) > 1e-6
        ]
        if not cands:
            raise VerificationError("no adaptive site with a sign-sensitive angle")
        s = cands[int(rng.integers(len(cands)))]
        b = p.bases[s]
        bases = dict(p.bases)
        bases[s] = replace(b, angle=-b.angle)
        return replace(p, bases=bases), f"angle {s!r} {b.angle:.6g}->{-b.angle:.6g}"
    if kind == "byproduct":
        i = int(rng.integers(p.n))
        axis = "x" if rng.integers(2) == 0 else "z"
        bx, bz = list(p.byproduct_x), list(p.byproduct_z)
        tgt = bx if axis == "x" else bz
        tgt[i] = ParityExpression(tgt[i].const ^ 1, tgt[i].vars)
        return replace(p, byproduct_x=tuple(bx), byproduct_z=tuple(bz)), f"byproduct wire={i} axis={axis}"
    raise VerificationError(f"unknown mutation kind {kind!r}")


def detects(p: MeasurementPattern, samples: int = 16, seed: int = 0) -> bool:
    """Whether :func:`verify` rejects ``p`` (used on mutated patterns)."""
    rep = verify(p, seed=seed, exhaustive_limit=samples, samples=samples, random_inputs=1,
                 direct_checks=0, stop_on_failure=True)
    return not rep.ok


__all__ = [
    "BranchMap",
    "ByproductRule",
    "ClaimCheck",
    "EIGEN_TOL",
    "MUTATION_KINDS",
    "OracleCheck",
    "VerificationError",
    "VerificationReport",
    "body_order",
    "branch_bits",
    "branch_map",
    "byproduct_agrees",
    "derive_byproduct_rule",
    "detects",
    "eigen_residuals",
    "enumerate_branches",
    "identify_pauli",
    "inert_sites",
    "input_side_byproduct",
    "mutate",
    "oracle_inputs",
    "verify",
]
