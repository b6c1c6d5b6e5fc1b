from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import equal_up_to_phase
from oneway.byproduct import (
    ByproductOperator,
    InfoFlowVector,
    expand_circuit,
    items_unitary,
    modify_rotation,
    propagate_through_clifford,
    reinterpret_readout,
    swap_gate_and_byproduct,
)
from oneway.circuit import Circuit, Gate, circuit_unitary
from oneway.pauli import CliffordGate, PauliProduct

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def bops(n: int):
    return st.tuples(
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
        st.lists(st.integers(0, 1), min_size=n, max_size=n),
    ).map(lambda t: ByproductOperator(tuple(t[0]), tuple(t[1])))


def rx(a: float) -> np.ndarray:
    return np.cos(a / 2) * np.eye(2) - 1j * np.sin(a / 2) * X


def rz(a: float) -> np.ndarray:
    return np.cos(a / 2) * np.eye(2) - 1j * np.sin(a / 2) * Z


CLIFFORD_GATES = [
    Gate("CNOT", (0, 1)),
    Gate("CNOT", (1, 0)),
    Gate("CZ", (0, 1)),
    Gate("SWAP", (0, 1)),
    Gate("H", (0,)),
    Gate("S", (1,)),
]

ROTATION_CIRCUITS = [
    Circuit(2).add("RX", 0, angle=0.7),
    Circuit(2).add("RZ", 1, angle=-1.3),
    Circuit(2).add("CPHASE", 0, 1, angle=0.9),
    Circuit(2).add("RX", 1, angle=0.4).add("CNOT", 0, 1).add("RZ", 0, angle=2.1),
    Circuit(3).add("TOFFPHASE", 0, 1, 2, angle=0.6),
    Circuit(3).add("ZZROT", 0, 1, 2, angle=0.5),
]


class TestOperator:
    def test_matrix_of_xz(self):
        b = ByproductOperator((1,), (1,))
        np.testing.assert_allclose(b.matrix(), X @ Z)

    def test_two_qubit_matrix_order(self):
        b = ByproductOperator((1, 0), (0, 1))
        np.testing.assert_allclose(b.matrix(), np.kron(X, Z))

    @given(bops(3), bops(3))
    def test_product_matches_dense_up_to_phase(self, a, b):
        assert equal_up_to_phase((a * b).matrix().reshape(-1), (a.matrix() @ b.matrix()).reshape(-1))

    def test_pauli_round_trip(self):
        b = ByproductOperator((1, 0, 1), (1, 1, 0))
        assert b.to_pauli() == PauliProduct.from_dict({0: "Y", 1: "Z", 2: "X"})
        assert ByproductOperator.from_pauli(b.to_pauli(), 3) == b

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ByproductOperator((0, 1), (0,))

    def test_identity(self):
        assert ByproductOperator.identity(4).is_identity()
        assert not ByproductOperator((0, 0), (0, 1)).is_identity()

    def test_render(self):
        assert ByproductOperator((1, 0), (0, 1)).render() == "x0=1 z0=0 x1=0 z1=1"


class TestPropagate:
    @pytest.mark.parametrize(
        "before,after",
        [
            (((1, 0), (0, 0)), ((1, 1), (0, 0))),  # X on control spreads to the target
            (((0, 0), (0, 1)), ((0, 0), (1, 1))),  # Z on target spreads to the control
            (((0, 1), (0, 0)), ((0, 1), (0, 0))),  # X on target stays
            (((0, 0), (1, 0)), ((0, 0), (1, 0))),  # Z on control stays
        ],
    )
    def test_cnot_table(self, before, after):
        got = propagate_through_clifford(ByproductOperator(*before), Gate("CNOT", (0, 1)))
        assert got == ByproductOperator(*after)

    def test_hadamard_exchanges(self):
        assert propagate_through_clifford(ByproductOperator((1,), (0,)), Gate("H", (0,))) == ByproductOperator(
            (0,), (1,)
        )

    def test_phase_gate(self):
        got = propagate_through_clifford(ByproductOperator((1,), (0,)), Gate("S", (0,)))
        assert got == ByproductOperator((1,), (1,))

    def test_cz_x_picks_up_z(self):
        got = propagate_through_clifford(ByproductOperator((1, 0), (0, 0)), CliffordGate("CZ", (0, 1)))
        assert got == ByproductOperator((1, 0), (0, 1))

    def test_non_clifford_rejected(self):
        with pytest.raises(ValueError):
            propagate_through_clifford(ByproductOperator((0,), (0,)), Gate("RX", (0,), 0.3))

    @pytest.mark.parametrize("g", CLIFFORD_GATES, ids=lambda g: f"{g.name}{g.qubits}")
    def test_all_byproducts_against_dense(self, g):
        u = circuit_unitary(Circuit(2, [g]))
        for bits in itertools.product((0, 1), repeat=4):
            b = ByproductOperator(bits[:2], bits[2:])
            got = propagate_through_clifford(b, g)
            lhs = u @ b.matrix()
            rhs = got.matrix() @ u
            assert equal_up_to_phase(lhs.reshape(-1), rhs.reshape(-1))


class TestModifyRotation:
    @pytest.mark.parametrize("x,z", [(0, 0), (1, 0), (0, 1), (1, 1)])
    def test_matches_dense(self, x, z):
        xi, eta, zeta = 0.3, -1.1, 2.2
        b = ByproductOperator((x,), (z,))
        nxi, neta, nzeta = modify_rotation(b, (xi, eta, zeta))
        lhs = rx(zeta) @ rz(eta) @ rx(xi) @ b.matrix()
        rhs = b.matrix() @ rx(nzeta) @ rz(neta) @ rx(nxi)
        assert equal_up_to_phase(lhs.reshape(-1), rhs.reshape(-1))

    def test_x_flips_eta(self):
        assert modify_rotation(ByproductOperator((1,), (0,)), (1.0, 2.0, 3.0)) == (1.0, -2.0, 3.0)

    def test_multi_qubit_rejected(self):
        with pytest.raises(ValueError):
            modify_rotation(ByproductOperator.identity(2), (0, 0, 0))


class TestSwapGateAndByproduct:
    @pytest.mark.parametrize("c", ROTATION_CIRCUITS, ids=range(len(ROTATION_CIRCUITS)))
    def test_exchange_is_exact(self, c):
        u = circuit_unitary(c)
        for bits in itertools.product((0, 1), repeat=2 * c.n):
            b = ByproductOperator(bits[: c.n], bits[c.n:])
            b2, items = swap_gate_and_byproduct(c, b)
            lhs = u @ b.matrix()
            rhs = b2.matrix() @ items_unitary(items, c.n)
            assert equal_up_to_phase(lhs.reshape(-1), rhs.reshape(-1))

    def test_identity_byproduct_flips_nothing(self):
        _, items = swap_gate_and_byproduct(ROTATION_CIRCUITS[3], ByproductOperator.identity(2))
        assert not any(i.flipped for i in items)

    def test_expanded_items_rebuild_the_circuit(self):
        for c in ROTATION_CIRCUITS:
            assert equal_up_to_phase(items_unitary(expand_circuit(c), c.n).reshape(-1),
                                     circuit_unitary(c).reshape(-1))

    def test_z_flips_rx(self):
        c = Circuit(1).add("RX", 0, angle=0.5)
        b2, items = swap_gate_and_byproduct(c, ByproductOperator((0,), (1,)))
        assert b2 == ByproductOperator((0,), (1,))
        assert [i.flipped for i in items] == [True]
        assert math.isclose(items[0].item.beta, -expand_circuit(c)[0].beta)


class TestReadout:
    def test_x_flips_bits(self):
        assert reinterpret_readout([0, 1, 1], ByproductOperator((1, 0, 1), (1, 1, 0))) == [1, 1, 0]

    def test_length_checked(self):
        with pytest.raises(ValueError):
            reinterpret_readout([0], ByproductOperator.identity(2))

    @settings(max_examples=30)
    @given(bops(3), st.integers(0, 7))
    def test_matches_projective_readout(self, b, k):
        """Measuring ``B|k>`` in Z and undoing ``x`` recovers ``k``."""
        psi = b.matrix() @ np.eye(8)[k]
        raw_index = int(np.argmax(np.abs(psi)))
        raw = [(raw_index >> (2 - q)) & 1 for q in range(3)]
        want = [(k >> (2 - q)) & 1 for q in range(3)]
        assert reinterpret_readout(raw, b) == want


class TestInfoFlow:
    def test_history_and_bits(self):
        f = InfoFlowVector(2)
        f.set([1, 0], [0, 1])
        f.set([1, 1], [0, 1])
        assert f.history == [((1, 0), (0, 1)), ((1, 1), (0, 1))]
        assert f.bits() == [1, 0, 1, 1]
        assert f.operator() == ByproductOperator((1, 1), (0, 1))
