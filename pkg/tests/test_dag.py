"""Graphs, d-separation (vs a brute-force oracle), and structure checks."""

from __future__ import annotations

from itertools import combinations

import pytest

from proxitext.dag import (
    BUILTIN_GRAPH_NAMES,
    CausalDag,
    RoleAssignment,
    builtin_graph,
    check_proximal_structure,
    d_separated,
    find_open_path,
    format_edge_list,
    parse_edge_list,
)

from oracles import dsep_brute_force, random_dag

ROLES = RoleAssignment("A", "Y", "U", ("C",), "W", "Z")


def _exhaustive_queries(g: CausalDag):
    nodes = sorted(g.nodes)
    for x, y in combinations(nodes, 2):
        rest = [n for n in nodes if n not in (x, y)]
        for r in range(len(rest) + 1):
            for zs in combinations(rest, r):
                yield {x}, {y}, set(zs)


def test_reachability_matches_brute_force_oracle(rng):
    for _ in range(60):
        g = random_dag(rng)
        for xs, ys, zs in _exhaustive_queries(g):
            assert d_separated(g, xs, ys, zs) == dsep_brute_force(g, xs, ys, zs)


def test_d_separated_symmetric_in_xs_ys(rng):
    for _ in range(20):
        g = random_dag(rng)
        for xs, ys, zs in _exhaustive_queries(g):
            assert d_separated(g, xs, ys, zs) == d_separated(g, ys, xs, zs)


def test_isolated_node_never_changes_verdicts(rng):
    for _ in range(10):
        g = random_dag(rng)
        extended = CausalDag(g.nodes + ("lonely",), g.edges)
        for xs, ys, zs in _exhaustive_queries(g):
            assert d_separated(g, xs, ys, zs) == d_separated(extended, xs, ys, zs)


def test_open_path_witness_iff_connected(rng):
    for _ in range(15):
        g = random_dag(rng)
        for xs, ys, zs in _exhaustive_queries(g):
            path = find_open_path(g, xs, ys, zs)
            if d_separated(g, xs, ys, zs):
                assert path is None
            else:
                assert path is not None
                assert path[0] in xs and path[-1] in ys


# -- spec'd example queries ---------------------------------------------------

def test_post_outcome_text_leaves_outcome_linked():
    g = builtin_graph("fig3a")
    assert not d_separated(g, {"Z"}, {"Y"}, {"A", "U", "C"})


def test_distinct_realizations_separate_proxies():
    g = builtin_graph("fig3d")
    assert d_separated(g, {"W"}, {"Z"}, {"U", "C"})


def test_edgeless_graph_is_separated():
    g = CausalDag(("A", "B"), ())
    assert d_separated(g, {"A"}, {"B"}, set())


def test_unknown_node_raises():
    g = builtin_graph("fig2a")
    with pytest.raises(ValueError, match="unknown"):
        d_separated(g, {"A"}, {"nope"}, set())


def test_overlapping_sets_raise():
    g = builtin_graph("fig2a")
    with pytest.raises(ValueError, match="disjoint"):
        d_separated(g, {"A"}, {"Y"}, {"A"})


def test_empty_xs_raises():
    g = builtin_graph("fig2a")
    with pytest.raises(ValueError, match="nonempty"):
        d_separated(g, set(), {"Y"}, set())


# -- proximal structure checks ------------------------------------------------

def test_shared_text_fails_proxy_independence():
    report = check_proximal_structure(builtin_graph("fig3b"), ROLES)
    assert not report.p1_holds
    assert report.p2_holds and report.p3_holds
    witness = report.witness_paths["p1"]
    assert set(witness) == {"W", "T_pre", "Z"} and witness[1] == "T_pre"


def test_post_treatment_text_fails_both_treatment_and_outcome_conditions():
    report = check_proximal_structure(builtin_graph("fig3a"), ROLES)
    assert not report.p2_holds
    assert not report.p3_holds
    assert "p2" in report.witness_paths and "p3" in report.witness_paths


@pytest.mark.parametrize("name", ["fig3c", "fig3d", "fig5_posttreat", "fig6_actionable"])
def test_valid_designs_satisfy_all_conditions(name):
    report = check_proximal_structure(builtin_graph(name), ROLES)
    assert report.p1_holds and report.p2_holds and report.p3_holds
    assert report.p4_cardinality_ok
    assert report.witness_paths == {}


def test_failed_conditions_carry_witnesses_true_ones_none():
    report = check_proximal_structure(builtin_graph("fig3a"), ROLES)
    for key, holds in (("p1", report.p1_holds), ("p2", report.p2_holds),
                       ("p3", report.p3_holds)):
        assert (key in report.witness_paths) == (not holds)


def test_witness_path_deterministic():
    g = builtin_graph("fig3a")
    first = check_proximal_structure(g, ROLES).witness_paths
    second = check_proximal_structure(g, ROLES).witness_paths
    assert first == second


def test_cardinality_condition():
    g = builtin_graph("fig3d")
    assert check_proximal_structure(g, ROLES, u_cardinality=2).p4_cardinality_ok
    assert not check_proximal_structure(g, ROLES, u_cardinality=3).p4_cardinality_ok
    assert check_proximal_structure(
        g, ROLES, u_cardinality=3, w_cardinality=3, z_cardinality=4
    ).p4_cardinality_ok


def test_roles_must_be_distinct():
    with pytest.raises(ValueError, match="distinct"):
        RoleAssignment("A", "A", "U", ("C",), "W", "Z")


def test_roles_must_exist():
    with pytest.raises(ValueError, match="unknown"):
        check_proximal_structure(builtin_graph("fig2a"), ROLES)


# -- builtin graphs -----------------------------------------------------------

def test_builtin_fig3d_edge_set():
    g = builtin_graph("fig3d")
    expected = {
        ("C", "A"), ("C", "Y"), ("C", "U"), ("C", "T1"), ("C", "T2"),
        ("U", "A"), ("U", "Y"), ("U", "T1"), ("U", "T2"),
        ("A", "Y"), ("T1", "Z"), ("T2", "W"),
    }
    assert set(g.edges) == expected


def test_builtin_fig2a_shape():
    g = builtin_graph("fig2a")
    assert len(g.nodes) == 4
    assert len(g.edges) == 6
    assert not any(n in g.nodes for n in ("W", "Z"))


def test_builtin_fig5_has_post_treatment_edges():
    g = builtin_graph("fig5_posttreat")
    assert ("A", "T_post") in g.edges
    assert ("T_post", "Z") in g.edges


def test_builtin_fig6_has_actionable_edge():
    g = builtin_graph("fig6_actionable")
    assert ("T_act", "A") in g.edges


def test_builtin_unknown_name():
    with pytest.raises(ValueError, match="unknown graph"):
        builtin_graph("fig9z")


def test_all_builtins_are_valid_dags():
    for name in BUILTIN_GRAPH_NAMES:
        builtin_graph(name)  # constructor validates acyclicity etc.


# -- CausalDag validation ------------------------------------------------------

def test_cycle_rejected():
    with pytest.raises(ValueError, match="cycle"):
        CausalDag(("a", "b"), (("a", "b"), ("b", "a")))


def test_self_loop_rejected():
    with pytest.raises(ValueError, match="self-loop"):
        CausalDag(("a",), (("a", "a"),))


def test_duplicate_edge_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        CausalDag(("a", "b"), (("a", "b"), ("a", "b")))


def test_undeclared_endpoint_rejected():
    with pytest.raises(ValueError, match="undeclared"):
        CausalDag(("a",), (("a", "b"),))


# -- edge-list serialization ---------------------------------------------------

def test_edge_list_round_trip():
    for name in BUILTIN_GRAPH_NAMES:
        g = builtin_graph(name)
        parsed = parse_edge_list(format_edge_list(g))
        assert set(parsed.edges) == set(g.edges)
        assert set(parsed.nodes) == set(g.nodes)


def test_edge_list_isolated_nodes_and_comments():
    text = "# proxies off to the side\nA -> Y\n\nB\n"
    g = parse_edge_list(text)
    assert set(g.nodes) == {"A", "Y", "B"}
    assert g.edges == (("A", "Y"),)


def test_edge_list_malformed():
    with pytest.raises(ValueError, match="malformed"):
        parse_edge_list("A -> ")
    with pytest.raises(ValueError, match="malformed"):
        parse_edge_list("not a node line")
