from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oneway.cluster import (
    CONSTRAINTS,
    Cluster,
    ClusterError,
    Decomposition,
    SubCluster,
    format_cluster,
    format_decomposition,
    induced_lattice_edges,
    make_lattice_cluster,
    parse_cluster,
    parse_decomposition,
    remove_redundant,
    validate_decomposition,
)
from oneway.formats import FormatError
from oneway.patterns import circuit_adder, decomposition_of, qft_composer
from oneway.stabilizer import StabilizerTableau


def site(x: int, y: int = 0, z: int = 0) -> tuple[int, int, int]:
    return (x, y, z)


class TestLattice:
    def test_chain(self):
        c = make_lattice_cluster((5,))
        assert len(c.sites) == 5 and len(c.edges) == 4

    @pytest.mark.parametrize("a,b", [(3, 5), (2, 2), (4, 3), (1, 7)])
    def test_block_edge_count(self, a, b):
        c = make_lattice_cluster((a, b))
        assert len(c.sites) == a * b
        assert len(c.edges) == 2 * a * b - a - b

    def test_single_site(self):
        c = make_lattice_cluster((1, 1))
        assert len(c.sites) == 1 and not c.edges

    def test_kappa_starts_zero(self):
        c = make_lattice_cluster((2, 3, 2))
        assert all(c.kappa_of(s) == 0 for s in c.sites)

    def test_edges_are_nearest_neighbours(self):
        c = make_lattice_cluster((3, 3, 2))
        for a, b in c.edges:
            assert sum(abs(u - v) for u, v in zip(a, b)) == 1
        for a, b in itertools.combinations(c.sites, 2):
            if sum(abs(u - v) for u, v in zip(a, b)) == 1:
                assert (a, b) in c.edges or (b, a) in c.edges

    def test_disconnected_shape_rejected(self):
        with pytest.raises(ClusterError):
            make_lattice_cluster([(0, 0), (2, 0)])

    def test_roles_partition(self):
        c = make_lattice_cluster((4,), wires=[(site(0), site(3))])
        assert c.role_set("input") == {site(0)}
        assert c.role_set("output") == {site(3)}
        assert c.role_set("body") == {site(1), site(2)}
        assert c.n_wires == 1

    def test_shared_wire_endpoint_rejected(self):
        with pytest.raises(ClusterError):
            make_lattice_cluster((3,), wires=[(site(0), site(2)), (site(0), site(1))])


class TestRemoveRedundant:
    @pytest.mark.parametrize("s", [0, 1])
    def test_middle_of_three_chain(self, s):
        c = make_lattice_cluster((3,))
        r = remove_redundant(c, [site(1)], {site(1): s}, normalize=False)
        assert r.cluster.sites == {site(0), site(2)}
        assert not r.cluster.edges
        assert r.cluster.kappa_of(site(0)) == s and r.cluster.kappa_of(site(2)) == s

    def test_remove_nothing(self):
        c = make_lattice_cluster((2, 3))
        r = remove_redundant(c, [])
        assert r.cluster == c and not r.z_corrections

    def test_corner_of_block(self):
        c = make_lattice_cluster((2, 2))
        r = remove_redundant(c, [site(1, 1)], {site(1, 1): 0})
        assert len(r.cluster.sites) == 3 and len(r.cluster.edges) == 2
        assert not r.z_corrections

    def test_normalization_records_corrections(self):
        c = make_lattice_cluster((3,))
        r = remove_redundant(c, [site(1)], {site(1): 1})
        assert r.normalized and not r.cluster.kappa
        assert r.z_corrections == {site(0), site(2)}

    def test_wire_endpoint_rejected(self):
        c = make_lattice_cluster((3,), wires=[(site(0), site(2))])
        with pytest.raises(ClusterError):
            remove_redundant(c, [site(0)])

    def test_unknown_site_rejected(self):
        with pytest.raises(ClusterError):
            remove_redundant(make_lattice_cluster((3,)), [site(9)])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_commutes_with_tableau(self, seed):
        rng = np.random.default_rng(seed)
        a, b = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        c = make_lattice_cluster((a, b))
        kappa = {s for s in c.sites if rng.random() < 0.3}
        c = Cluster(c.sites, c.edges, frozenset(kappa))
        sites = c.sorted_sites()
        red = [s for s in sites if rng.random() < 0.4]
        for bits in itertools.product((0, 1), repeat=len(red)):
            out = dict(zip(red, bits))
            t = StabilizerTableau.from_graph(c.sites, c.edges, {s: c.kappa_of(s) for s in c.sites})
            for s in red:
                t.measure_pauli(s, "Z", forced_outcome=out[s], discard=True)
            r = remove_redundant(c, red, out, normalize=False)
            ref = StabilizerTableau.from_graph(r.cluster.sites, r.cluster.edges,
                                               {s: r.cluster.kappa_of(s) for s in r.cluster.sites})
            assert ref.same_state(t)


def fig3_chain_split() -> Decomposition:
    parent = make_lattice_cluster((5,))
    g1 = {site(0), site(1), site(2)}
    g2 = {site(2), site(3), site(4)}
    parts = (
        SubCluster(frozenset(g1), frozenset(induced_lattice_edges(g1)), (site(0),), (site(2),), "g1"),
        SubCluster(frozenset(g2), frozenset(induced_lattice_edges(g2)), (site(2),), (site(4),), "g2"),
    )
    return Decomposition(parent, parts)


class TestValidateDecomposition:
    def test_chain_split_passes(self):
        d = fig3_chain_split()
        rep = validate_decomposition(d)
        assert rep.ok and rep.failed() == []
        # manual enumeration of the same facts
        union = set().union(*(p.sites for p in d.parts))
        assert union == set(d.parent.sites)
        edges = [e for p in d.parts for e in p.edges]
        assert len(edges) == len(set(edges)) == len(d.parent.edges)
        shared = set(d.parts[0].sites) & set(d.parts[1].sites)
        assert shared == set(d.parts[0].outputs) & set(d.parts[1].inputs)

    def test_missing_site(self):
        d = fig3_chain_split()
        p0 = d.parts[0]
        parts = (SubCluster(p0.sites - {site(1)}, frozenset(), p0.inputs, p0.outputs), d.parts[1])
        rep = validate_decomposition(Decomposition(d.parent, parts))
        assert "vertex_union" in rep.failed() and "edge_union" in rep.failed()

    def test_edge_in_two_parts(self):
        d = fig3_chain_split()
        p1 = d.parts[1]
        extra = SubCluster(p1.sites | {site(1)}, p1.edges | {(site(1), site(2))}, p1.inputs, p1.outputs)
        rep = validate_decomposition(Decomposition(d.parent, (d.parts[0], extra)))
        assert "edges_disjoint" in rep.failed()
        assert "one_io" in rep.failed()

    def test_edge_leaving_part(self):
        d = fig3_chain_split()
        p0 = d.parts[0]
        bad = SubCluster(p0.sites, p0.edges | {(site(2), site(3))}, p0.inputs, p0.outputs)
        rep = validate_decomposition(Decomposition(d.parent, (bad, d.parts[1])))
        assert "subgraph" in rep.failed()

    def test_crossing_edges_unassigned(self):
        parent = make_lattice_cluster((4, 2))
        left = {(x, y, 0) for x in (0, 1) for y in (0, 1)}
        right = {(x, y, 0) for x in (2, 3) for y in (0, 1)}
        parts = tuple(
            SubCluster(frozenset(s), frozenset(induced_lattice_edges(s)), (), (), n)
            for s, n in ((left, "g1"), (right, "g2"))
        )
        rep = validate_decomposition(Decomposition(parent, parts))
        assert "edge_union" in rep.failed()
        assert "disconnected_bodies" in rep.failed()

    def test_connected_outputs(self):
        parent = make_lattice_cluster((3, 2))
        left = {(x, y, 0) for x in (0, 1) for y in (0, 1)}
        right = {(x, y, 0) for x in (1, 2) for y in (0, 1)}
        shared = ((1, 0, 0), (1, 1, 0))
        parts = (
            SubCluster(frozenset(left), frozenset(induced_lattice_edges(left)), ((0, 0, 0), (0, 1, 0)), shared),
            SubCluster(frozenset(right), frozenset(induced_lattice_edges(right) - {shared}), shared,
                       ((2, 0, 0), (2, 1, 0))),
        )
        rep = validate_decomposition(Decomposition(parent, parts))
        assert "io_not_connected" in rep.failed()
        assert "induced_subgraph" in rep.failed()

    def test_never_raises_on_garbage(self):
        parent = make_lattice_cluster((2,))
        rep = validate_decomposition(Decomposition(parent, (SubCluster(frozenset({site(7)}), frozenset()),)))
        assert not rep.ok
        assert set(rep.results) == set(CONSTRAINTS)

    @pytest.mark.parametrize("build", [lambda: qft_composer(3), lambda: _adder_composer(2)])
    def test_library_compositions_pass(self, build):
        comp = build()
        whole = comp.build("whole")
        assert validate_decomposition(decomposition_of(comp.parts, whole)).ok

    def test_render_names_each_constraint(self):
        text = validate_decomposition(fig3_chain_split()).render()
        for k in CONSTRAINTS:
            assert f"{k}: pass" in text


def _adder_composer(n: int):
    from oneway.patterns import Composer, adder_circuit

    c, _ = adder_circuit(n)
    comp = Composer(c.n)
    comp.add_circuit(c)
    return comp


class TestText:
    def test_cluster_round_trip(self):
        c = make_lattice_cluster((3, 2), wires=[(site(0, 0), site(2, 0)), (site(0, 1), site(2, 1))])
        c = Cluster(c.sites, c.edges, frozenset({site(1, 1)}), c.roles, c.wires)
        assert parse_cluster(format_cluster(c)) == c

    def test_cluster_format_lines(self):
        c = make_lattice_cluster((2,), wires=[(site(0), site(1))])
        text = format_cluster(c)
        assert "site 0 0 0 input 0" in text
        assert "edge 0 0 0 1 0 0" in text
        assert "wire 0 in: 0 0 0 out: 1 0 0" in text

    def test_errors_carry_line_numbers(self):
        text = "site 0 0 0 body 0\n# comment\nedge 0 0 0 1 0 0\n"
        with pytest.raises(FormatError) as e:
            parse_cluster(text)
        assert e.value.lineno == 3

    def test_bad_role(self):
        with pytest.raises(FormatError):
            parse_cluster("site 0 0 0 wizard 0\n")

    def test_decomposition_round_trip(self):
        d = fig3_chain_split()
        back = parse_decomposition(format_decomposition(d))
        assert back.parent == d.parent
        assert [(p.sites, p.edges, p.inputs, p.outputs) for p in back.parts] == [
            (p.sites, {tuple(e) for e in p.edges}, p.inputs, p.outputs) for p in d.parts
        ]
        assert validate_decomposition(back).ok

    def test_adder_decomposition_round_trip(self):
        comp = _adder_composer(2)
        whole = comp.build("adder")
        d = decomposition_of(comp.parts, whole)
        back = parse_decomposition(format_decomposition(d))
        assert validate_decomposition(back).ok
        assert len(back.parts) == len(d.parts)


def test_adder_pattern_cluster_is_connected():
    assert circuit_adder(2).cluster.is_connected()
