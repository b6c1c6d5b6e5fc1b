from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from helpers import equal_up_to_phase, random_state
from oneway.circuit import Circuit, circuit_unitary
from oneway.parity import ParityExpression
from oneway.patterns import (
    MeasurementBasis,
    PatternError,
    compose,
    compose_patterns,
    cnot15_site,
    elide_x_pairs,
    empty_pattern,
    euler_chain_9,
    format_pattern,
    gate_carry,
    gate_cnot15,
    gate_controlled_phase,
    gate_distant_cnot,
    gate_hadamard,
    gate_hamiltonian_zn,
    gate_identity_wire,
    gate_phase_s,
    gate_rot_euler,
    gate_rot_x,
    gate_rot_z,
    gate_swap_n,
    gate_toffoli_phase,
    parse_pattern,
    translate_pattern,
)
from oneway.pauli import PauliProduct
from oneway.runtime import execute, execute_split
from oneway.stabilizer import StabilizerTableau
from oneway.verifier import verify

R = 1 / math.sqrt(2)
ZERO, ONE = np.array([1.0, 0.0]), np.array([0.0, 1.0])
PLUS, MINUS = np.array([R, R]), np.array([R, -R])


def kron(*vs) -> np.ndarray:
    out = np.ones(1)
    for v in vs:
        out = np.kron(out, v)
    return out


def claim_in_wire_frame(p) -> np.ndarray:
    return circuit_unitary(p.claim)


def corrected_output(rec) -> np.ndarray:
    """Output state with the recorded byproduct undone."""
    return rec.byproduct.matrix().conj().T @ rec.output_state


def vars_of(e: ParityExpression) -> set:
    return set(e.vars)


class TestIdentityWire:
    def test_byproduct_variables(self):
        p = gate_identity_wire(2)
        assert p.measured_sites() == [(0, 1, 0), (1, 1, 0)]
        assert vars_of(p.byproduct_x[0]) == {(1, 1, 0), "in0.x"}
        assert vars_of(p.byproduct_z[0]) == {(0, 1, 0), "in0.z"}

    @pytest.mark.parametrize(
        "s1,s2,x,z", [(0, 0, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0), (1, 1, 1, 1)]
    )
    def test_byproduct_values(self, s1, s2, x, z):
        b = gate_identity_wire(2).byproduct_at({(0, 1, 0): s1, (1, 1, 0): s2})
        assert (b.x, b.z) == ((x,), (z,))

    @pytest.mark.parametrize("length", [1, 3, 0])
    def test_odd_length_rejected(self, length):
        with pytest.raises(PatternError):
            gate_identity_wire(length)

    def test_long_wire_site_count(self):
        p = gate_identity_wire(30)
        assert len(p.cluster.sites) == 31 and len(p.bases) == 30


class TestRotations:
    def test_rot_x_effective_angle(self):
        p = gate_rot_x(0.7)
        b = p.bases[(1, 1, 0)]
        assert b.kind == "XY"
        assert b.deps == {(0, 1, 0), "in0.z"}
        assert math.isclose(b.effective_angle({(0, 1, 0): 0}), -0.7)
        assert math.isclose(b.effective_angle({(0, 1, 0): 1}), 0.7)

    def test_euler_dependencies(self):
        p = gate_rot_euler(0.1, 0.2, 0.3)
        assert p.bases[(1, 1, 0)].deps == {(0, 1, 0), "in0.z"}
        assert p.bases[(2, 1, 0)].deps == {(1, 1, 0), "in0.x"}
        assert p.bases[(3, 1, 0)].deps == {(2, 1, 0), (0, 1, 0), "in0.z"}
        assert [p.bases[(k, 1, 0)].angle for k in (1, 2, 3)] == [-0.1, -0.2, -0.3]

    def test_euler_zero_is_identity(self):
        p = gate_rot_euler(0, 0, 0)
        assert equal_up_to_phase(claim_in_wire_frame(p).reshape(-1), np.eye(2).reshape(-1))
        assert verify(p).ok

    def test_euler_quarter_turns_verify(self):
        assert verify(gate_rot_euler(math.pi / 2, math.pi / 2, math.pi / 2)).ok

    @pytest.mark.parametrize("eta", [0.0, 0.9, -2.3])
    def test_rot_z_verifies(self, eta):
        assert verify(gate_rot_z(eta), random_inputs=2).ok


class TestCliffordChains:
    def test_hadamard_bases(self):
        p = gate_hadamard()
        assert [p.bases[(k, 1, 0)].kind for k in range(4)] == ["X", "Y", "Y", "Y"]
        assert p.is_clifford() and verify(p).ok

    def test_phase_bases(self):
        p = gate_phase_s()
        assert [p.bases[(k, 1, 0)].kind for k in range(4)] == ["X", "X", "Y", "X"]
        assert p.is_clifford() and verify(p).ok

    def test_hadamard_output_correlations(self):
        """X1 Z5 and Z1 X5 eigenvalues after measuring the three Y sites."""
        p = gate_hadamard()
        sites = [(k, 1, 0) for k in range(5)]
        for s2, s3, s4 in itertools.product((0, 1), repeat=3):
            t = StabilizerTableau.from_graph(sites, p.cluster.edges)
            for site, s in zip(sites[1:4], (s2, s3, s4)):
                t.measure_pauli(site, "Y", forced_outcome=s, discard=True)
            xz = PauliProduct.from_dict({sites[0]: "X", sites[4]: "Z"})
            zx = PauliProduct.from_dict({sites[0]: "Z", sites[4]: "X"})
            assert t.expected_eigenvalue(xz) == (-1) ** (s3 + s4)
            assert t.expected_eigenvalue(zx) == (-1) ** (s2 + s3)


class TestCnot15:
    def test_layout(self):
        assert [cnot15_site(k) for k in (1, 7, 8, 9, 15)] == [(0, 1, 0), (6, 1, 0), (3, 2, 0), (0, 3, 0), (6, 3, 0)]
        with pytest.raises(PatternError):
            cnot15_site(16)

    def test_bases(self):
        p = gate_cnot15()
        xs = {cnot15_site(k) for k in (1, 9, 10, 11, 13, 14)}
        ys = {cnot15_site(k) for k in (2, 3, 4, 5, 6, 8, 12)}
        assert {s for s, b in p.bases.items() if b.kind == "X"} == xs
        assert {s for s, b in p.bases.items() if b.kind == "Y"} == ys
        assert len(p.cluster.sites) == 15 and len(p.cluster.edges) == 14

    def test_byproduct_sets(self):
        """Byproduct exponents as sums over the layout numbering."""
        p = gate_cnot15()
        s = lambda *ks: {cnot15_site(k) for k in ks}  # noqa: E731
        assert vars_of(p.byproduct_x[0]) - {"in0.x"} == s(2, 3, 5, 6)
        assert vars_of(p.byproduct_x[1]) - {"in0.x", "in1.x"} == s(2, 3, 8, 10, 12, 14)
        assert vars_of(p.byproduct_z[0]) - {"in0.z", "in1.z"} == s(1, 3, 4, 5, 8, 9, 11)
        assert vars_of(p.byproduct_z[1]) - {"in1.z"} == s(9, 11, 13)
        assert p.byproduct_z[0].const == 1 and p.byproduct_x[0].const == 0

    def test_control_z_correlation(self):
        """Z1 Z7 eigenvalue after measuring every site but 1, 7, 9, 15."""
        p = gate_cnot15()
        keep = {cnot15_site(k) for k in (1, 7, 9, 15)}
        body = [s for s in p.measured_sites() if s not in keep]
        rng = np.random.default_rng(0)
        for _ in range(16):
            t = StabilizerTableau.from_graph(p.cluster.sites, p.cluster.edges)
            out = {}
            for site in body:
                out[site] = t.measure_pauli(site, p.bases[site].kind, rng=rng, discard=True)
            num = {k: out.get(cnot15_site(k)) for k in range(1, 16)}
            zz = PauliProduct.from_dict({cnot15_site(1): "Z", cnot15_site(7): "Z"})
            assert t.expected_eigenvalue(zz) == (-1) ** (num[2] + num[3] + num[5] + num[6])
            xx = PauliProduct.from_dict({cnot15_site(9): "X", cnot15_site(15): "X"})
            assert t.expected_eigenvalue(xx) == (-1) ** (num[11] + num[13])

    def test_mirrored_claim(self):
        p = gate_cnot15(mirrored=True)
        assert [(g.name, g.qubits) for g in p.claim.gates] == [("CNOT", (1, 0))]
        assert verify(p).ok


class TestSwap:
    def test_single_wire_is_a_plain_wire(self):
        p = gate_swap_n(1)
        assert p.claim.gates == [] and len(p.cluster.sites) == 3

    @pytest.mark.parametrize("n,det", [(2, 1), (3, 2), (4, 3)])
    def test_determined_sites(self, n, det):
        p = gate_swap_n(n)
        assert len(p.determined) == det
        assert p.permutation() == list(reversed(range(n)))
        assert len(p.cluster.sites) == (2 * n - 1) ** 2 + 2 * n

    def test_swap4_lambda_x1(self):
        """The z exponent on the wire carrying logical qubit 0 is ``s_(I,1) + lambda_x,1``.

        ``lambda_x,1 = s(1,2) + s(2,3) + s(3,4) + s(4,5) + s(5,6) + s(6,7)`` over
        the square's diagonal just above the main one.
        """
        p = gate_swap_n(4)
        assert p.inputs[0] == (0, 1, 0) and p.permutation()[3] == 0
        lambda_x1 = {(k, k + 1, 0) for k in range(1, 7)}
        assert vars_of(p.byproduct_z[3]) == lambda_x1 | {(0, 1, 0), "in0.z"}
        assert vars_of(p.byproduct_x[3]) == {(k, k, 0) for k in range(1, 8)} | {"in0.x"}

    def test_swap_unitary(self):
        u = claim_in_wire_frame(gate_swap_n(2))
        np.testing.assert_allclose(u, np.eye(4)[[0, 2, 1, 3]], atol=1e-15)


class TestHamiltonian:
    def test_zero_angle_is_the_reversal(self):
        u = claim_in_wire_frame(gate_hamiltonian_zn(4, 0.0))
        np.testing.assert_allclose(u, claim_in_wire_frame(gate_swap_n(4)), atol=1e-12)

    def test_adaptive_site_in_every_z_byproduct(self):
        p = gate_hamiltonian_zn(4, 0.37)
        assert p.adaptive_sites() == [(3, 4, 0)]
        assert math.isclose(p.bases[(3, 4, 0)].angle, -0.74)
        ins = set(p.inputs)
        for i in range(4):
            z = vars_of(p.byproduct_z[i])
            assert (3, 4, 0) in z
            assert len(z & ins) == 1
            assert (3, 4, 0) not in vars_of(p.byproduct_x[i])

    def test_diagonal_phase(self):
        u = claim_in_wire_frame(gate_hamiltonian_zn(2, 0.3))
        swap = np.eye(4)[[0, 2, 1, 3]]
        phases = np.exp(-1j * 0.3 * np.array([1, -1, -1, 1]))
        np.testing.assert_allclose(u, swap @ np.diag(phases), atol=1e-12)

    def test_two_wires_verify(self):
        assert verify(gate_hamiltonian_zn(2, 0.3), random_inputs=1).ok


class TestControlledPhase:
    def test_zero_is_swap(self):
        u = claim_in_wire_frame(gate_controlled_phase(0.0))
        np.testing.assert_allclose(u, np.eye(4)[[0, 2, 1, 3]], atol=1e-12)

    def test_pi_is_cz_then_swap(self):
        p = gate_controlled_phase(math.pi)
        u = claim_in_wire_frame(p)
        cz = np.diag([1, 1, 1, -1])
        np.testing.assert_allclose(u, np.eye(4)[[0, 2, 1, 3]] @ cz, atol=1e-12)
        assert verify(p, random_inputs=1).ok

    def test_three_adaptive_sites(self):
        assert len(gate_controlled_phase(0.4).adaptive_sites()) == 3


class TestToffoliAndCarry:
    def test_toffoli_zero_is_a_swap(self):
        u = claim_in_wire_frame(gate_toffoli_phase(0.0))
        perm = np.eye(8)[[0, 2, 1, 3, 4, 6, 5, 7]]
        np.testing.assert_allclose(u, perm, atol=1e-12)

    def test_toffoli_seven_adaptive_sites(self):
        assert len(gate_toffoli_phase(0.5).adaptive_sites()) == 7

    @pytest.mark.parametrize("bits", list(itertools.product((0, 1), repeat=3)))
    def test_carry_truth_table(self, bits):
        p = gate_carry()
        assert p.permutation() == [0, 2, 3, 1]
        psi = kron(*(ONE if b else ZERO for b in bits), PLUS)
        rec = execute_split(p, 24, seed=sum(b << i for i, b in enumerate(bits)), input_state=psi, readout=False)
        c1, c2, c3 = bits
        target = MINUS if c1 + c2 + c3 >= 2 else PLUS
        want = kron(ONE if c1 else ZERO, ONE if c3 else ZERO, target, ONE if c2 else ZERO)
        assert equal_up_to_phase(corrected_output(rec), want, 1e-9)


class TestDistantCnot:
    def test_zero_separation_is_cnot15(self):
        assert format_pattern(gate_distant_cnot(0)) == format_pattern(gate_cnot15())

    @pytest.mark.parametrize("sep", [1, 2])
    def test_claim_is_cnot(self, sep):
        p = gate_distant_cnot(sep)
        n = sep + 2
        want = circuit_unitary(Circuit(n).add("CNOT", 0, n - 1))
        assert p.permutation() == list(range(n))
        assert equal_up_to_phase(claim_in_wire_frame(p).reshape(-1), want.reshape(-1), 1e-10)

    def test_negative_rejected(self):
        with pytest.raises(PatternError):
            gate_distant_cnot(-1)


class TestCompose:
    def test_wire_after_wire(self):
        a = gate_identity_wire(2)
        b = translate_pattern(gate_identity_wire(2), dx=2)
        p = compose_patterns(a, b)
        assert len(p.cluster.sites) == 5 and len(p.bases) == 4
        assert verify(p).ok
        for s in itertools.product((0, 1), repeat=4):
            out = dict(zip(p.measured_sites(), s))
            b_ = p.byproduct_at(out)
            assert b_.x[0] == s[1] ^ s[3] and b_.z[0] == s[0] ^ s[2]

    def test_rotations_add(self):
        a = gate_rot_x(0.4)
        b = translate_pattern(gate_rot_x(0.5), dx=2)
        p = compose_patterns(a, b)
        want = circuit_unitary(Circuit(1).add("RX", 0, angle=0.9))
        assert equal_up_to_phase(claim_in_wire_frame(p).reshape(-1), want.reshape(-1))
        assert verify(p, random_inputs=2).ok

    def test_second_sign_reads_first_byproduct(self):
        p = compose_patterns(gate_rot_x(0.4), translate_pattern(gate_rot_x(0.5), dx=2))
        # the second adaptive site inherits the first pattern's z byproduct
        assert p.bases[(3, 1, 0)].deps == {(2, 1, 0), (0, 1, 0), "in0.z"}

    def test_empty_is_neutral(self):
        p = gate_hadamard()
        assert compose(empty_pattern(), p) is p
        assert compose(p, empty_pattern()) is p
        assert compose(None, None) is None

    def test_mismatched_wires_rejected(self):
        with pytest.raises(PatternError):
            compose_patterns(gate_identity_wire(2), translate_pattern(gate_identity_wire(2), dx=5))


class TestElision:
    def test_euler_chain_shrinks_to_five(self):
        long = euler_chain_9(0.3, -0.6, 1.1)
        short = elide_x_pairs(long)
        assert len(long.cluster.sites) == 9 and len(short.cluster.sites) == 5
        assert [short.bases[s].kind for s in short.measured_sites()] == ["X", "XY", "XY", "XY"]
        assert verify(short, random_inputs=1).ok

    def test_five_site_wire(self):
        short = elide_x_pairs(gate_identity_wire(4))
        assert len(short.cluster.sites) == 3
        assert verify(short).ok

    def test_nothing_eligible(self):
        p = gate_hadamard()
        assert elide_x_pairs(p) is p

    def test_invalid_explicit_pair(self):
        with pytest.raises(PatternError):
            elide_x_pairs(gate_identity_wire(4), [((1, 1, 0), (3, 1, 0))])

    def test_explicit_pair(self):
        short = elide_x_pairs(gate_identity_wire(4), [((1, 1, 0), (2, 1, 0))])
        assert (1, 1, 0) not in short.cluster.sites and (2, 1, 0) not in short.cluster.sites
        assert verify(short).ok


class TestValidate:
    def test_catalog_entries_are_valid(self):
        for p in (gate_rot_euler(1, 2, 3), gate_cnot15(), gate_swap_n(3), gate_carry()):
            p.validate()

    def test_dependency_cycle(self):
        p = gate_rot_euler(0.1, 0.2, 0.3)
        bases = dict(p.bases)
        bases[(1, 1, 0)] = MeasurementBasis("XY", -0.1, {(2, 1, 0)})
        from dataclasses import replace

        with pytest.raises(PatternError, match="cycl"):
            replace(p, bases=bases).validate()

    def test_pauli_site_in_forward_cone(self):
        from dataclasses import replace

        p = gate_rot_x(0.7)
        bases = dict(p.bases)
        # the constructor refuses Pauli bases with dependencies, so forge one
        forged = MeasurementBasis("XY", 0.0, {(0, 1, 0)})
        object.__setattr__(forged, "kind", "Y")
        bases[(1, 1, 0)] = forged
        with pytest.raises(PatternError, match="forward cone"):
            replace(p, bases=bases).validate()

    def test_pauli_basis_with_angle_rejected(self):
        with pytest.raises(PatternError):
            MeasurementBasis("X", 0.3)

    def test_output_with_basis(self):
        from dataclasses import replace

        p = gate_identity_wire(2)
        bases = dict(p.bases)
        bases[(2, 1, 0)] = MeasurementBasis("X")
        with pytest.raises(PatternError):
            replace(p, bases=bases).validate()


class TestText:
    @pytest.mark.parametrize(
        "build",
        [
            lambda: gate_rot_euler(0.1, -0.2, 0.3),
            gate_cnot15,
            gate_carry,
            lambda: gate_swap_n(3),
            lambda: gate_hamiltonian_zn(3, 0.25),
        ],
    )
    def test_round_trip(self, build):
        p = build()
        back = parse_pattern(format_pattern(p))
        assert back == p
        assert format_pattern(back) == format_pattern(p)

    def test_parse_error_reports_line(self):
        from oneway.formats import FormatError

        text = format_pattern(gate_identity_wire(2)).splitlines()
        text.insert(1, "bogus line")
        with pytest.raises(FormatError) as e:
            parse_pattern("\n".join(text))
        assert e.value.lineno == 2


def test_random_input_through_cnot():
    p = gate_cnot15()
    rng = np.random.default_rng(4)
    psi = random_state(rng, 4)
    rec = execute(p, engine="dense", seed=1, input_state=psi, readout=False)
    want = circuit_unitary(p.claim) @ psi
    assert equal_up_to_phase(corrected_output(rec), want, 1e-10)
