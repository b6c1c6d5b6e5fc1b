from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import equal_up_to_phase, random_state
from oneway.patterns import gate_cnot15
from oneway.pauli import PauliProduct
from oneway.runtime import execute, execute_split
from oneway.stabilizer import StabilizerTableau
from oneway.statevector import (
    DenseState,
    DenseStateError,
    WindowedExecutor,
    apply_cz,
    attach_qubit,
    fidelity,
    measure_xy,
    measure_z,
    states_equal,
    step_window,
)

R = 1 / math.sqrt(2)


def plus_state(*sites) -> DenseState:
    st_ = DenseState()
    for s in sites:
        st_.attach(s, "+")
    return st_


def chain_state(n: int) -> DenseState:
    st_ = plus_state(*range(n))
    for i in range(n - 1):
        st_.apply_cz(i, i + 1)
    return st_


def chain_tableau(n: int) -> StabilizerTableau:
    return StabilizerTableau.from_graph(range(n), [(i, i + 1) for i in range(n - 1)])


def agree_with_tableau(d: DenseState, t: StabilizerTableau) -> bool:
    """Every tableau generator has expectation +1 on the dense state."""
    for g in t.generators():
        ops = dict(g.ops)
        if abs(d.expectation(ops) * (-1) ** g.sign - 1) > 1e-10:
            return False
    return sorted(t.qubits) == sorted(d.sites)


class TestAttach:
    def test_plus_on_empty(self):
        st_ = attach_qubit(DenseState(), "a")
        np.testing.assert_allclose(st_.amplitudes(), [R, R], atol=1e-15)

    def test_one_onto_plus_is_old_major(self):
        st_ = plus_state("old").attach("new", "1")
        np.testing.assert_allclose(st_.amplitudes(), [0, R, 0, R], atol=1e-15)
        np.testing.assert_allclose(st_.amplitudes(["new", "old"]), [0, 0, R, R], atol=1e-15)

    @given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
    def test_arbitrary_pair_is_normalized(self, a, b):
        if abs(a) ** 2 + abs(b) ** 2 < 1e-6:
            return
        st_ = plus_state(0).attach(1, (a, b))
        assert abs(st_.norm() - 1) < 1e-12

    def test_duplicate_rejected(self):
        with pytest.raises(DenseStateError):
            plus_state(0).attach(0)

    def test_zero_pair_rejected(self):
        with pytest.raises(DenseStateError):
            DenseState().attach(0, (0, 0))


class TestCZ:
    def test_plus_plus_gives_two_chain(self):
        st_ = apply_cz(plus_state(1, 2), 1, 2)
        lit = (np.kron([1, 0], [R, R]) + np.kron([0, 1], [R, -R])) * R
        np.testing.assert_allclose(st_.amplitudes([1, 2]), lit, atol=1e-15)

    def test_twice_is_identity(self):
        rng = np.random.default_rng(0)
        st_ = DenseState().attach_joint([0, 1, 2], random_state(rng, 8))
        before = st_.amplitudes()
        st_.apply_cz(0, 2).apply_cz(2, 0)
        np.testing.assert_allclose(st_.amplitudes(), before, atol=1e-15)

    def test_on_zero_is_identity(self):
        st_ = DenseState().attach(0, "0").attach(1, (0.6, 0.8j))
        before = st_.amplitudes()
        st_.apply_cz(0, 1)
        np.testing.assert_allclose(st_.amplitudes(), before, atol=1e-15)

    def test_same_site_rejected(self):
        with pytest.raises(DenseStateError):
            plus_state(0).apply_cz(0, 0)


class TestMeasureXY:
    def test_zero_angle_on_plus_is_certain(self):
        st_ = plus_state(0)
        s, st_ = measure_xy(st_, 0, 0.0, rng=3)
        assert s == 0 and abs(st_.last_probability - 1) < 1e-12 and st_.n == 0

    def test_forcing_impossible_outcome_raises(self):
        with pytest.raises(DenseStateError):
            plus_state(0).measure_xy(0, 0.0, forced_outcome=1)

    @pytest.mark.parametrize("s", [0, 1])
    def test_two_chain_x_measurement(self, s):
        d = chain_state(2)
        assert d.measure_xy(0, 0.0, forced_outcome=s) == s
        assert abs(d.last_probability - 0.5) < 1e-12
        # qubit 2 is left in H Z^s |+>
        want = np.array([R, R]) if s == 0 else np.array([R, -R])
        had = np.array([[R, R], [R, -R]])
        assert equal_up_to_phase(d.amplitudes(), had @ want, 1e-12)
        t = chain_tableau(2)
        t.measure_pauli(0, "X", forced_outcome=s, discard=True)
        assert agree_with_tableau(d, t)

    @pytest.mark.parametrize("q", [0, 1, 2])
    @pytest.mark.parametrize("s", [0, 1])
    def test_quarter_turn_is_y(self, q, s):
        d = chain_state(3)
        t = chain_tableau(3)
        if t.expected_eigenvalue(PauliProduct.single(q, "Y")) is not None:
            pytest.skip("deterministic")
        d.measure_xy(q, math.pi / 2, forced_outcome=s)
        t.measure_pauli(q, "Y", forced_outcome=s, discard=True)
        assert agree_with_tableau(d, t)

    def test_unknown_site(self):
        with pytest.raises(DenseStateError):
            plus_state(0).measure_xy(1, 0.0)


class TestMeasureZ:
    def test_on_zero(self):
        s, st_ = measure_z(DenseState().attach(0, "0"), 0)
        assert s == 0 and abs(st_.last_probability - 1) < 1e-12

    def test_on_plus_is_even(self):
        for s in (0, 1):
            d = plus_state(0)
            d.measure_z(0, forced_outcome=s)
            assert abs(d.last_probability - 0.5) < 1e-12

    @pytest.mark.parametrize("s", [0, 1])
    def test_neighbour_kappa_flip(self, s):
        d = chain_state(3)
        d.measure_z(2, forced_outcome=s)
        t = chain_tableau(3)
        t.measure_pauli(2, "Z", forced_outcome=s, discard=True)
        assert agree_with_tableau(d, t)
        assert t.expected_eigenvalue(PauliProduct.from_dict({0: "Z", 1: "X"})) == (-1) ** s


class TestWindow:
    def test_five_chain_keeps_three_active(self):
        adj = {i: {j for j in (i - 1, i + 1) if 0 <= j < 5} for i in range(5)}
        ex = WindowedExecutor(adj)
        rng = np.random.default_rng(1)
        for i in range(4):
            s, ex = step_window(ex, i, "X", rng=rng)
        assert ex.peak <= 3
        assert ex.state.sites == [4]

    def test_measuring_twice_rejected(self):
        ex = WindowedExecutor({0: {1}, 1: {0}})
        ex.step(0, "X", rng=0)
        with pytest.raises(DenseStateError):
            ex.step(0, "X", rng=0)

    def test_empty_schedule_is_noop(self):
        ex = WindowedExecutor({0: set()})
        assert ex.state.n == 0 and ex.peak == 0

    def test_matches_monolithic_on_cnot(self):
        p = gate_cnot15()
        rng = np.random.default_rng(2)
        for _ in range(6):
            forced = p.complete_outcomes({s: int(rng.integers(2)) for s in p.free_sites()})
            psi = random_state(rng, 4)
            a = execute(p, engine="dense", forced=forced, input_state=psi, readout=False)
            b = execute_split(p, 8, forced=forced, input_state=psi, readout=False)
            assert b.peak_window <= 8
            assert states_equal(a.output_state, b.output_state, 1e-10)

    def test_windowed_distribution_matches_full(self):
        """Outcome probabilities along a 4-chain agree between lazy and eager entangling."""
        adj = {i: {j for j in (i - 1, i + 1) if 0 <= j < 4} for i in range(4)}
        for bits in np.ndindex(2, 2, 2):
            ex = WindowedExecutor(adj)
            full = chain_state(4)
            pw = pf = 1.0
            for i, s in enumerate(bits):
                ex.step(i, "XY", 0.4 * (i + 1), forced_outcome=s)
                full.measure_xy(i, 0.4 * (i + 1), forced_outcome=s)
                pw *= ex.state.last_probability
                pf *= full.last_probability
            assert abs(pw - pf) < 1e-12
            assert states_equal(ex.state.amplitudes(), full.amplitudes())


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
def test_pauli_patterns_agree_with_tableau(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4]
    t = StabilizerTableau.from_graph(range(n), edges)
    d = plus_state(*range(n))
    for a, b in edges:
        d.apply_cz(a, b)
    for q in rng.permutation(n)[: n // 2]:
        q = int(q)
        axis = "XYZ"[int(rng.integers(3))]
        s = t.measure_pauli(q, axis, rng=rng, discard=True)
        d.measure_pauli(q, axis, forced_outcome=s)
    assert agree_with_tableau(d, t)


def test_norm_preserved_over_long_sequences():
    rng = np.random.default_rng(5)
    d = plus_state(*range(6))
    for step in range(1000):
        r = rng.random()
        a, b = (int(x) for x in rng.choice(d.sites, size=2, replace=False))
        if r < 0.5:
            d.apply_cz(a, b)
        else:
            d.apply_1q(a, np.array([[1, 0], [0, np.exp(1j * rng.uniform(0, 6))]]))
            d.apply_1q(b, "H")
        assert abs(d.norm() - 1) < 1e-12


def test_dump_format():
    text = plus_state((0, 1, 0)).dump()
    lines = text.splitlines()
    assert lines[0] == "site-order: 0:1:0"
    assert lines[1].split()[0] == "0" and abs(float(lines[1].split()[1]) - R) < 1e-15


def test_states_equal_and_fidelity():
    a = np.array([R, R])
    assert states_equal(a, 1j * a)
    assert not states_equal(a, np.array([R, -R]))
    assert abs(fidelity(a, np.array([1, 0])) - 0.5) < 1e-15
