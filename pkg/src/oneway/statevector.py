"""Dense state-vector simulation with just-in-time entangling.

:class:`DenseState` keeps only the currently active qubits.  The newest
qubit is appended last and is the least significant bit of the flat
amplitude index.  :class:`WindowedExecutor` attaches cluster sites lazily:
before a site is measured its closed neighbourhood is attached and the
pending controlled-Z bonds to already active neighbours are applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .pauli import gate_matrix, pauli_matrix, qubit_key

Qubit = Hashable

NORM_TOL = 1e-12
STATE_TOL = 1e-10
FORCE_TOL = 1e-12

_INITIAL = {
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
}


class DenseStateError(ValueError):
    """Invalid dense-state operation."""


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


class DenseState:
    """State vector over an ordered list of active sites."""

    def __init__(self) -> None:
        self.sites: list[Qubit] = []
        self.psi = np.ones((), dtype=complex)
        self.peak = 0

    def copy(self) -> "DenseState":
        st = DenseState()
        st.sites = list(self.sites)
        st.psi = self.psi.copy()
        st.peak = self.peak
        return st

    # structure --------------------------------------------------------------
    def _axis(self, site: Qubit) -> int:
        try:
            return self.sites.index(site)
        except ValueError:
            raise DenseStateError(f"site {site!r} is not active") from None

    @property
    def n(self) -> int:
        return len(self.sites)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi.ravel()))

    def attach(self, site: Qubit, initial: str | Sequence[complex] = "+") -> "DenseState":
        """Tensor on a new last qubit in ``|+>``, ``|->``, ``|0>``, ``|1>`` or ``(alpha, beta)``."""
        if site in self.sites:
            raise DenseStateError(f"duplicate site {site!r}")
        if isinstance(initial, str):
            if initial not in _INITIAL:
                raise DenseStateError(f"unknown initial state {initial!r}")
            vec = _INITIAL[initial]
        else:
            vec = np.asarray(initial, dtype=complex).reshape(2)
            nrm = np.linalg.norm(vec)
            if nrm < NORM_TOL:
                raise DenseStateError("zero initial amplitude pair")
            vec = vec / nrm
        self.psi = np.multiply.outer(self.psi, vec)
        self.sites.append(site)
        self.peak = max(self.peak, len(self.sites))
        return self

    def attach_joint(self, sites: Sequence[Qubit], amplitudes: np.ndarray) -> "DenseState":
        """Tensor on several new qubits in a joint state (first site most significant)."""
        for s in sites:
            if s in self.sites:
                raise DenseStateError(f"duplicate site {s!r}")
        vec = np.asarray(amplitudes, dtype=complex).reshape((2,) * len(sites))
        nrm = np.linalg.norm(vec.ravel())
        if nrm < NORM_TOL:
            raise DenseStateError("zero joint state")
        self.psi = np.multiply.outer(self.psi, vec / nrm)
        self.sites.extend(sites)
        self.peak = max(self.peak, len(self.sites))
        return self

    # gates --------------------------------------------------------------------
    def apply_cz(self, a: Qubit, b: Qubit) -> "DenseState":
        """Negate the ``|1>_a |1>_b`` amplitudes."""
        ia, ib = self._axis(a), self._axis(b)
        if ia == ib:
            raise DenseStateError("CZ needs two distinct sites")
        idx: list = [slice(None)] * self.n
        idx[ia] = 1
        idx[ib] = 1
        self.psi[tuple(idx)] *= -1
        return self

    def apply_1q(self, site: Qubit, gate: str | np.ndarray) -> "DenseState":
        """Apply a one-qubit gate given by name (``H``, ``S``, ``X``...) or matrix."""
        m = gate_matrix(gate) if isinstance(gate, str) else np.asarray(gate, dtype=complex)
        ax = self._axis(site)
        self.psi = np.moveaxis(np.tensordot(m, self.psi, axes=([1], [ax])), 0, ax)
        return self

    def apply_unitary(self, sites: Sequence[Qubit], u: np.ndarray) -> "DenseState":
        """Apply a ``2^k x 2^k`` unitary to ``sites`` (first site most significant)."""
        axes = [self._axis(s) for s in sites]
        k = len(sites)
        t = np.asarray(u, dtype=complex).reshape((2,) * (2 * k))
        out = np.tensordot(t, self.psi, axes=(list(range(k, 2 * k)), axes))
        self.psi = np.moveaxis(out, list(range(k)), axes)
        return self

    # measurement --------------------------------------------------------------
    def _project(self, site: Qubit, bra: np.ndarray, outcome: int | None, rng) -> int:
        ax = self._axis(site)
        moved = np.moveaxis(self.psi, ax, 0)
        branches = []
        for s in (0, 1):
            branches.append(np.tensordot(bra[s], moved, axes=([0], [0])))
        probs = [float(np.vdot(b, b).real) for b in branches]
        if outcome is None:
            total = probs[0] + probs[1]
            outcome = int(_rng(rng).random() * total >= probs[0])
        else:
            outcome = int(outcome) & 1
            if probs[outcome] < FORCE_TOL:
                raise DenseStateError(
                    f"forced outcome {outcome} on {site!r} has probability {probs[outcome]:.3g}"
                )
        self.psi = branches[outcome] / math.sqrt(probs[outcome])
        del self.sites[ax]
        self.last_probability = probs[outcome]
        return outcome

    def measure_xy(self, site: Qubit, angle: float, forced_outcome: int | None = None, rng=None) -> int:
        """Measure in ``(|0> +- e^{i angle}|1>)/sqrt2``; outcome 0 is the ``+`` state."""
        e = np.exp(-1j * angle)
        bra = np.array([[1, e], [1, -e]], dtype=complex) / math.sqrt(2)
        return self._project(site, bra, forced_outcome, rng)

    def measure_z(self, site: Qubit, forced_outcome: int | None = None, rng=None) -> int:
        """Computational-basis measurement."""
        bra = np.eye(2, dtype=complex)
        return self._project(site, bra, forced_outcome, rng)

    def measure_pauli(self, site: Qubit, axis: str, forced_outcome: int | None = None, rng=None) -> int:
        if axis == "X":
            return self.measure_xy(site, 0.0, forced_outcome, rng)
        if axis == "Y":
            return self.measure_xy(site, math.pi / 2, forced_outcome, rng)
        if axis == "Z":
            return self.measure_z(site, forced_outcome, rng)
        raise DenseStateError(f"unknown axis {axis!r}")

    def expectation(self, ops: Mapping[Qubit, str]) -> complex:
        """``<psi| P |psi>`` for a Pauli product given as ``{site: axis}``."""
        phi = self.psi
        for s, a in ops.items():
            ax = self._axis(s)
            phi = np.moveaxis(np.tensordot(pauli_matrix(a), phi, axes=([1], [ax])), 0, ax)
        return complex(np.vdot(self.psi.ravel(), phi.ravel()))

    # export -----------------------------------------------------------------
    def amplitudes(self, order: Sequence[Qubit] | None = None) -> np.ndarray:
        """Flat amplitudes in ``order`` (default: current site order)."""
        if order is None:
            return self.psi.reshape(-1).copy()
        order = list(order)
        if sorted(map(qubit_key, order)) != sorted(map(qubit_key, self.sites)):
            raise DenseStateError("order must list exactly the active sites")
        perm = [self._axis(s) for s in order]
        return np.transpose(self.psi, perm).reshape(-1).copy()

    def dump(self) -> str:
        """Text dump: ``site-order:`` header then ``index real imag`` lines."""
        from .parity import render_var

        lines = ["site-order: " + " ".join(render_var(s) for s in self.sites)]
        for i, a in enumerate(self.psi.reshape(-1)):
            lines.append(f"{i} {a.real:.17g} {a.imag:.17g}")
        return "\n".join(lines) + "\n"


def states_equal(a: np.ndarray, b: np.ndarray, tol: float = STATE_TOL) -> bool:
    """Equality of normalized vectors up to a global phase."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        return False
    ov = np.vdot(a, b)
    if abs(ov) < 1e-300:
        return np.linalg.norm(a) < tol and np.linalg.norm(b) < tol
    phase = ov / abs(ov)
    return float(np.linalg.norm(a * phase - b)) < tol


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2`` for normalized vectors."""
    return float(abs(np.vdot(np.ravel(a), np.ravel(b))) ** 2)


# windowed execution ----------------------------------------------------------


@dataclass
class WindowedExecutor:
    """Lazily entangled execution over a graph.

    Parameters
    ----------
    neighbors
        Adjacency map of the cluster.
    kappa
        Per-site sign bits; a site with ``kappa = 1`` is attached as ``|->``.
    state
        Dense state, possibly pre-populated with input sites (and any
        reference qubits) that are already entangled appropriately.
    """

    neighbors: Mapping[Qubit, Iterable[Qubit]]
    kappa: Mapping[Qubit, int] = field(default_factory=dict)
    state: DenseState = field(default_factory=DenseState)
    measured: set = field(default_factory=set)
    attached: set = field(default_factory=set)
    pre_rotation: Mapping[Qubit, Sequence[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.attached |= set(self.state.sites)

    def attach(self, site: Qubit) -> None:
        if site in self.attached:
            return
        self.state.attach(site, "-" if self.kappa.get(site, 0) else "+")
        self.attached.add(site)
        for nb in self.neighbors.get(site, ()):
            if nb in self.attached and nb not in self.measured:
                self.state.apply_cz(site, nb)
            elif nb in self.measured:
                raise DenseStateError(f"site {nb!r} was measured before its neighbour {site!r} was attached")

    def prepare(self, site: Qubit) -> None:
        """Attach ``site`` and its neighbourhood so it can be measured."""
        self.attach(site)
        for nb in sorted(self.neighbors.get(site, ()), key=qubit_key):
            self.attach(nb)

    def step(
        self,
        site: Qubit,
        kind: str,
        angle: float = 0.0,
        forced_outcome: int | None = None,
        rng=None,
    ) -> int:
        """Entangle the neighbourhood of ``site`` then measure it.

        ``kind`` is ``X``, ``Y``, ``Z`` or ``XY`` (with ``angle``).
        """
        if site in self.measured:
            raise DenseStateError(f"site {site!r} already measured")
        self.prepare(site)
        for g in self.pre_rotation.get(site, ()):
            self.state.apply_1q(site, g)
        if kind == "XY":
            s = self.state.measure_xy(site, angle, forced_outcome, rng)
        else:
            s = self.state.measure_pauli(site, kind, forced_outcome, rng)
        self.measured.add(site)
        return s

    @property
    def peak(self) -> int:
        return self.state.peak


def step_window(
    ex: WindowedExecutor,
    site: Qubit,
    kind: str,
    angle: float = 0.0,
    forced_outcome: int | None = None,
    rng=None,
) -> tuple[int, WindowedExecutor]:
    """Functional wrapper around :meth:`WindowedExecutor.step`."""
    s = ex.step(site, kind, angle, forced_outcome, rng)
    return s, ex


def attach_qubit(state: DenseState, site: Qubit, initial="+") -> DenseState:
    return state.attach(site, initial)


def apply_cz(state: DenseState, a: Qubit, b: Qubit) -> DenseState:
    return state.apply_cz(a, b)


def measure_xy(state: DenseState, site: Qubit, angle: float, forced_outcome=None, rng=None):
    s = state.measure_xy(site, angle, forced_outcome, rng)
    return s, state


def measure_z(state: DenseState, site: Qubit, forced_outcome=None, rng=None):
    s = state.measure_z(site, forced_outcome, rng)
    return s, state
