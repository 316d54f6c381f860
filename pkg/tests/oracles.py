"""Independent test oracles, kept apart from the production algorithms."""

from __future__ import annotations

import numpy as np

from proxitext.dag import CausalDag


def descendants_or_self(g: CausalDag, node: str) -> set[str]:
    children = g.children_map()
    seen = {node}
    stack = [node]
    while stack:
        for c in children[stack.pop()]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def all_simple_paths(g: CausalDag, src: str, dst: set[str]):
    adjacency = {n: set() for n in g.nodes}
    for p, c in g.edges:
        adjacency[p].add(c)
        adjacency[c].add(p)
    path = [src]

    def walk():
        node = path[-1]
        if node in dst and len(path) > 1:
            yield list(path)
            return
        for nxt in adjacency[node]:
            if nxt not in path:
                path.append(nxt)
                yield from walk()
                path.pop()

    yield from walk()


def dsep_brute_force(g: CausalDag, xs, ys, zs, desc=None) -> bool:
    """Enumerate every simple path and apply the blocking rules directly."""
    xs, ys, zs = set(xs), set(ys), set(zs)
    edge_set = set(g.edges)
    if desc is None:
        desc = {n: descendants_or_self(g, n) for n in g.nodes}
    for x in xs:
        for path in all_simple_paths(g, x, ys):
            open_path = True
            for i in range(1, len(path) - 1):
                prev, v, nxt = path[i - 1], path[i], path[i + 1]
                if (prev, v) in edge_set and (nxt, v) in edge_set:
                    if not desc[v] & zs:
                        open_path = False
                        break
                elif v in zs:
                    open_path = False
                    break
            if open_path:
                return False
    return True


def random_dag(rng: np.random.Generator, max_nodes: int = 6,
               edge_prob: float = 0.4) -> CausalDag:
    k = int(rng.integers(2, max_nodes + 1))
    names = [f"n{i}" for i in range(k)]
    order = list(rng.permutation(names))
    edges = [
        (order[i], order[j])
        for i in range(k)
        for j in range(i + 1, k)
        if rng.random() < edge_prob
    ]
    return CausalDag(tuple(names), tuple(edges))


def weighted_logistic_loglik(x_aug, y, w, beta) -> float:
    eta = x_aug @ beta
    softplus = np.maximum(eta, 0.0) + np.log1p(np.exp(-np.abs(eta)))
    return float(np.sum(w * (y * eta - softplus)))


def central_difference_gradient(fn, beta, h=1e-6) -> np.ndarray:
    grad = np.zeros_like(beta)
    for j in range(beta.size):
        up = beta.copy()
        dn = beta.copy()
        up[j] += h
        dn[j] -= h
        grad[j] = (fn(up) - fn(dn)) / (2.0 * h)
    return grad
