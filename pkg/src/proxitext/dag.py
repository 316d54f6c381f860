"""Causal DAGs, d-separation, and structural checks for proxy designs.

``d_separated`` runs a linear-time reachability sweep (ball passing over
edge directions); the exhaustive path-enumeration oracle lives in the test
suite only. ``check_proximal_structure`` evaluates the three conditional
independences a valid proxy pair must satisfy, plus the cardinality
sufficient condition for proxy relevance, and attaches one witness path
per failed condition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CausalDag:
    """Directed acyclic graph over named nodes."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((p, c) for p, c in self.edges))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node names")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges")
        declared = set(self.nodes)
        for p, c in self.edges:
            if p == c:
                raise ValueError(f"self-loop on {p!r}")
            if p not in declared or c not in declared:
                raise ValueError(f"edge ({p!r}, {c!r}) references undeclared node")
        if not self._has_topological_order():
            raise ValueError("graph contains a cycle")

    def _has_topological_order(self) -> bool:
        indeg = {n: 0 for n in self.nodes}
        for _, c in self.edges:
            indeg[c] += 1
        queue = deque(n for n in self.nodes if indeg[n] == 0)
        seen = 0
        children = self.children_map()
        while queue:
            n = queue.popleft()
            seen += 1
            for c in children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return seen == len(self.nodes)

    def parents_map(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for p, c in self.edges:
            out[c].append(p)
        for lst in out.values():
            lst.sort()
        return out

    def children_map(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for p, c in self.edges:
            out[p].append(c)
        for lst in out.values():
            lst.sort()
        return out

    def ancestors(self, targets) -> set[str]:
        """Nodes with a directed path into ``targets``, targets included."""
        parents = self.parents_map()
        seen = set(targets)
        stack = list(targets)
        while stack:
            for p in parents[stack.pop()]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen


@dataclass(frozen=True)
class RoleAssignment:
    """Which node plays which part in the proximal setup."""

    treatment: str
    outcome: str
    unmeasured: str
    observed_covariates: tuple[str, ...]
    proxy_w: str
    proxy_z: str

    def __post_init__(self):
        object.__setattr__(self, "observed_covariates", tuple(self.observed_covariates))
        scalars = [self.treatment, self.outcome, self.unmeasured,
                   self.proxy_w, self.proxy_z]
        names = scalars + list(self.observed_covariates)
        if len(set(names)) != len(names):
            raise ValueError("role assignment must name distinct nodes")

    def validate(self, g: CausalDag) -> None:
        missing = [n for n in (self.treatment, self.outcome, self.unmeasured,
                               self.proxy_w, self.proxy_z,
                               *self.observed_covariates)
                   if n not in g.nodes]
        if missing:
            raise ValueError(f"roles reference unknown nodes: {missing}")


@dataclass(frozen=True)
class ConditionReport:
    p1_holds: bool
    p2_holds: bool
    p3_holds: bool
    p4_cardinality_ok: bool
    witness_paths: dict[str, list[str]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "p1_holds": self.p1_holds,
            "p2_holds": self.p2_holds,
            "p3_holds": self.p3_holds,
            "p4_cardinality_ok": self.p4_cardinality_ok,
            "witness_paths": dict(self.witness_paths),
        }


def _validate_query(g: CausalDag, xs, ys, zs):
    xs, ys, zs = set(xs), set(ys), set(zs)
    known = set(g.nodes)
    for label, s in (("xs", xs), ("ys", ys), ("zs", zs)):
        unknown = s - known
        if unknown:
            raise ValueError(f"{label} contains unknown nodes: {sorted(unknown)}")
    if xs & ys or xs & zs or ys & zs:
        raise ValueError("xs, ys, zs must be pairwise disjoint")
    if not xs or not ys:
        raise ValueError("xs and ys must be nonempty")
    return xs, ys, zs


def d_separated(g: CausalDag, xs, ys, zs=()) -> bool:
    """True iff every path between ``xs`` and ``ys`` is blocked given ``zs``."""
    xs, ys, zs = _validate_query(g, xs, ys, zs)
    parents = g.parents_map()
    children = g.children_map()
    anc_z = g.ancestors(zs)

    # states: (node, came_from_child). A node entered against an arrow acts
    # as a chain/fork (blocked iff conditioned on); entered along an arrow
    # it also acts as a collider (open iff it or a descendant is in zs).
    queue = deque((x, True) for x in xs)
    visited = set(queue)
    while queue:
        node, from_child = queue.popleft()
        if node in ys:
            return False
        moves = []
        if from_child:
            if node not in zs:
                moves += [(p, True) for p in parents[node]]
                moves += [(c, False) for c in children[node]]
        else:
            if node not in zs:
                moves += [(c, False) for c in children[node]]
            if node in anc_z:
                moves += [(p, True) for p in parents[node]]
        for state in moves:
            if state not in visited:
                visited.add(state)
                queue.append(state)
    return True


def find_open_path(g: CausalDag, xs, ys, zs=()) -> list[str] | None:
    """First open path in deterministic node-name order, or None.

    Used for witness reporting; depth-first over the skeleton with sorted
    adjacency so the same query always yields the same path.
    """
    xs, ys, zs = _validate_query(g, xs, ys, zs)
    anc_z = g.ancestors(zs)
    parents = g.parents_map()
    children = g.children_map()
    neighbors = {n: sorted(set(parents[n]) | set(children[n])) for n in g.nodes}
    edge_set = set(g.edges)

    def path_is_open(path: list[str]) -> bool:
        for i in range(1, len(path) - 1):
            prev, v, nxt = path[i - 1], path[i], path[i + 1]
            is_collider = (prev, v) in edge_set and (nxt, v) in edge_set
            if is_collider:
                if v not in anc_z:
                    return False
            elif v in zs:
                return False
        return True

    def dfs(path: list[str], on_path: set[str]) -> list[str] | None:
        node = path[-1]
        if node in ys:
            return path if path_is_open(path) else None
        for nb in neighbors[node]:
            if nb in on_path or (nb in xs and len(path) > 1):
                continue
            on_path.add(nb)
            path.append(nb)
            found = dfs(path, on_path)
            if found is not None:
                return found
            path.pop()
            on_path.remove(nb)
        return None

    for x in sorted(xs):
        found = dfs([x], {x})
        if found is not None:
            return found
    return None


def check_proximal_structure(
    g: CausalDag,
    roles: RoleAssignment,
    u_cardinality: int = 2,
    w_cardinality: int = 2,
    z_cardinality: int = 2,
) -> ConditionReport:
    """Evaluate the proxy independence conditions plus relevance cardinality.

    P1: W independent of Z given the unmeasured confounder and covariates.
    P2: W independent of treatment given the same set.
    P3: Z independent of outcome given treatment, confounder, covariates.
    The cardinality check is the sufficient condition for completeness:
    min(|supp Z|, |supp W|) >= |supp U|. Defaults assume everything binary.
    """
    roles.validate(g)
    cov = set(roles.observed_covariates)
    u_and_cov = {roles.unmeasured} | cov
    checks = {
        "p1": ({roles.proxy_w}, {roles.proxy_z}, u_and_cov),
        "p2": ({roles.proxy_w}, {roles.treatment}, u_and_cov),
        "p3": ({roles.proxy_z}, {roles.outcome}, {roles.treatment} | u_and_cov),
    }
    holds = {}
    witnesses: dict[str, list[str]] = {}
    for key, (xs, ys, zs) in checks.items():
        ok = d_separated(g, xs, ys, zs)
        holds[key] = ok
        if not ok:
            path = find_open_path(g, xs, ys, zs)
            assert path is not None  # d-connection implies an open path
            witnesses[key] = path
    return ConditionReport(
        p1_holds=holds["p1"],
        p2_holds=holds["p2"],
        p3_holds=holds["p3"],
        p4_cardinality_ok=min(z_cardinality, w_cardinality) >= u_cardinality,
        witness_paths=witnesses,
    )


_CORE = [("C", "U"), ("C", "A"), ("C", "Y"), ("U", "A"), ("U", "Y"), ("A", "Y")]

_BUILTIN: dict[str, tuple[tuple[str, ...], list[tuple[str, str]]]] = {
    "fig2a": (("A", "Y", "U", "C"), _CORE),
    "fig2b": (
        ("A", "Y", "U", "C", "Z", "W"),
        _CORE + [("U", "Z"), ("U", "W"), ("C", "Z"), ("C", "W")],
    ),
    "fig3a": (
        ("A", "Y", "U", "C", "T", "Z", "W"),
        _CORE + [("C", "T"), ("U", "T"), ("Y", "T"), ("T", "Z"), ("T", "W")],
    ),
    "fig3b": (
        ("A", "Y", "U", "C", "T_pre", "Z", "W"),
        _CORE + [("C", "T_pre"), ("U", "T_pre"), ("T_pre", "Z"), ("T_pre", "W")],
    ),
    "fig3c": (
        ("A", "Y", "U", "C", "T1", "T2", "Z", "W"),
        _CORE + [("C", "T1"), ("U", "T1"), ("C", "T2"), ("U", "T2"),
                 ("T1", "Z"), ("T2", "W")],
    ),
    "fig3d": (
        ("A", "Y", "U", "C", "T1", "T2", "Z", "W"),
        _CORE + [("C", "T1"), ("U", "T1"), ("C", "T2"), ("U", "T2"),
                 ("T1", "Z"), ("T2", "W")],
    ),
    "fig5_posttreat": (
        ("A", "Y", "U", "C", "T_pre", "T_post", "Z", "W"),
        _CORE + [("C", "T_pre"), ("C", "T_post"), ("U", "T_pre"), ("U", "T_post"),
                 ("A", "T_post"), ("T_post", "Z"), ("T_pre", "W")],
    ),
    "fig6_actionable": (
        ("A", "Y", "U", "C", "T_pre", "T_act", "Z", "W"),
        _CORE + [("C", "T_pre"), ("C", "T_act"), ("U", "T_pre"), ("U", "T_act"),
                 ("T_act", "A"), ("T_act", "Z"), ("T_pre", "W")],
    ),
}

BUILTIN_GRAPH_NAMES = tuple(_BUILTIN)


def builtin_graph(name: str) -> CausalDag:
    """One of the canonical proxy-design graphs, by identifier."""
    try:
        nodes, edges = _BUILTIN[name]
    except KeyError:
        raise ValueError(
            f"unknown graph {name!r}; choose from {BUILTIN_GRAPH_NAMES}"
        ) from None
    return CausalDag(nodes, tuple(edges))


def parse_edge_list(text: str) -> CausalDag:
    """Read a graph from plain text: one ``parent -> child`` per line.

    Lines without an arrow declare isolated nodes; blank lines and lines
    starting with ``#`` are skipped. Node order follows first appearance.
    """
    nodes: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str]] = []

    def add(node: str):
        if node not in seen:
            seen.add(node)
            nodes.append(node)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" in line:
            left, _, right = line.partition("->")
            parent, child = left.strip(), right.strip()
            if not parent or not child:
                raise ValueError(f"malformed edge line: {raw!r}")
            add(parent)
            add(child)
            edges.append((parent, child))
        else:
            if any(ch.isspace() for ch in line):
                raise ValueError(f"malformed node line: {raw!r}")
            add(line)
    return CausalDag(tuple(nodes), tuple(edges))


def format_edge_list(g: CausalDag) -> str:
    """Inverse of :func:`parse_edge_list`."""
    touched = {n for e in g.edges for n in e}
    lines = [f"{p} -> {c}" for p, c in g.edges]
    lines += [n for n in g.nodes if n not in touched]
    return "\n".join(lines) + "\n"
