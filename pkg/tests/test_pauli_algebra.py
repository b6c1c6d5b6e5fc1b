from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oneway.pauli import (
    CliffordGate,
    PauliProduct,
    commutes,
    conjugate,
    conjugate_all,
    multiply,
    parse,
    render,
)

QUBITS = [0, 1, 2]


def dense(p: PauliProduct, qubits=QUBITS) -> np.ndarray:
    return p.to_dense(qubits)


paulis = st.builds(
    lambda axes, phase: PauliProduct(tuple((q, a) for q, a in zip(QUBITS, axes)), phase),
    st.lists(st.sampled_from("IXYZ"), min_size=3, max_size=3),
    st.integers(0, 3),
)

GATES = [
    CliffordGate("H", (0,)),
    CliffordGate("S", (1,)),
    CliffordGate("SDG", (2,)),
    CliffordGate("X", (0,)),
    CliffordGate("Y", (1,)),
    CliffordGate("Z", (2,)),
    CliffordGate("CZ", (0, 2)),
    CliffordGate("CNOT", (1, 0)),
    CliffordGate("SWAP", (0, 1)),
]


def gate_dense(g: CliffordGate, qubits=QUBITS) -> np.ndarray:
    from oneway.circuit import Circuit, Gate, circuit_unitary

    return circuit_unitary(Circuit(len(qubits), [Gate(g.name, tuple(qubits.index(q) for q in g.qubits))]))


class TestMultiply:
    def test_x_times_z_is_minus_i_y(self):
        assert multiply(PauliProduct.single(1, "X"), PauliProduct.single(1, "Z")) == PauliProduct.single(1, "Y", 3)

    def test_two_chain_stabilizer_product(self):
        k1 = PauliProduct.from_dict({1: "X", 2: "Z"})
        k2 = PauliProduct.from_dict({1: "Z", 2: "X"})
        got = multiply(k1, k2)
        # XZ = -iY and ZX = +iY, so the phases cancel
        assert got == PauliProduct.from_dict({1: "Y", 2: "Y"})
        np.testing.assert_allclose(dense(got, [1, 2]), dense(k1, [1, 2]) @ dense(k2, [1, 2]), atol=1e-15)

    def test_identity_is_neutral(self):
        p = PauliProduct.from_dict({0: "X", 2: "Y"}, phase=1)
        assert multiply(p, PauliProduct.identity()) == p
        assert multiply(PauliProduct.identity(), p) == p

    @given(paulis, paulis)
    def test_matches_dense_product(self, a, b):
        np.testing.assert_allclose(dense(multiply(a, b)), dense(a) @ dense(b), atol=1e-12)

    @given(paulis)
    def test_square_is_phase_squared(self, p):
        sq = multiply(p, p)
        assert sq.ops == ()
        assert sq.phase == (2 * p.phase) % 4


class TestCommutes:
    def test_cluster_generators_commute(self):
        assert commutes(PauliProduct.from_dict({1: "X", 2: "Z"}), PauliProduct.from_dict({1: "Z", 2: "X"}))

    def test_x_z_anticommute(self):
        assert not commutes(PauliProduct.single(1, "X"), PauliProduct.single(1, "Z"))

    def test_disjoint_support_commutes(self):
        assert commutes(PauliProduct.single(1, "X"), PauliProduct.single(2, "X"))

    @given(paulis, paulis)
    def test_matches_dense_commutator(self, a, b):
        da, db = dense(a), dense(b)
        assert commutes(a, b) == bool(np.allclose(da @ db, db @ da))


class TestConjugate:
    def test_cz_maps_x_to_xz(self):
        assert conjugate(CliffordGate("CZ", ("a", "b")), PauliProduct.single("a", "X")) == PauliProduct.from_dict(
            {"a": "X", "b": "Z"}
        )

    def test_cnot_maps_control_x_to_xx(self):
        assert conjugate(CliffordGate("CNOT", ("c", "t")), PauliProduct.single("c", "X")) == PauliProduct.from_dict(
            {"c": "X", "t": "X"}
        )

    def test_h_maps_x_to_z(self):
        assert conjugate(CliffordGate("H", (0,)), PauliProduct.single(0, "X")) == PauliProduct.single(0, "Z")

    def test_unknown_gate_rejected(self):
        with pytest.raises(ValueError):
            CliffordGate("T", (0,))

    @pytest.mark.parametrize("g", GATES, ids=lambda g: g.name)
    def test_all_single_paulis_match_dense(self, g):
        u = gate_dense(g)
        for q, a in itertools.product(QUBITS, "XYZ"):
            p = PauliProduct.single(q, a)
            np.testing.assert_allclose(dense(conjugate(g, p)), u @ dense(p) @ u.conj().T, atol=1e-12)

    @settings(max_examples=60)
    @given(paulis, paulis, st.sampled_from(GATES))
    def test_is_a_homomorphism(self, a, b, g):
        assert conjugate(g, multiply(a, b)) == multiply(conjugate(g, a), conjugate(g, b))

    @given(paulis, st.lists(st.sampled_from(GATES), max_size=6))
    def test_sequence_matches_dense(self, p, gates):
        u = np.eye(8)
        for g in gates:
            u = gate_dense(g) @ u
        np.testing.assert_allclose(dense(conjugate_all(gates, p)), u @ dense(p) @ u.conj().T, atol=1e-12)

    @given(paulis, st.sampled_from(GATES))
    def test_hermitian_stays_hermitian(self, p, g):
        h = p.with_phase(p.phase & 2)
        assert conjugate(g, h).is_hermitian


class TestText:
    def test_render_lattice_labels(self):
        p = PauliProduct.from_dict({(2, 2): "Z", (1, 2): "X"})
        assert render(p) == "+X(1,2) Z(2,2)"

    def test_identity_renders(self):
        assert render(PauliProduct.identity(2)) == "-I"

    @given(paulis)
    def test_round_trip(self, p):
        assert parse(render(p)) == p

    @pytest.mark.parametrize("bad", ["X1", "+Q(1)", "+X(1) junk"])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            parse(bad)
