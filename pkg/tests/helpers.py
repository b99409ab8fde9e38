"""Shared oracles and generators for the test suite.

Everything here is written from scratch with explicit loops and dense
numpy so the oracles cannot share a code path (or a bug) with the library:
the Laplacian is assembled entry by entry, the boundary reduction uses
np.linalg.solve, spectra come from np.linalg.eigvalsh, and resistance from
np.linalg.pinv.
"""

import numpy as np

from steklov import BoundaryGraph, Immersion, build_boundary_graph


def dense_laplacian(n, edges):
    L = np.zeros((n, n))
    for u, v in edges:
        L[u, u] += 1.0
        L[v, v] += 1.0
        L[u, v] -= 1.0
        L[v, u] -= 1.0
    return L


def dtn_oracle(n, edges, boundary):
    """Boundary reduction of the Laplacian via an explicit dense solve."""
    L = dense_laplacian(n, edges)
    b = sorted(boundary)
    inner = [x for x in range(n) if x not in set(b)]
    Lbb = L[np.ix_(b, b)]
    if not inner:
        return Lbb
    Lbi = L[np.ix_(b, inner)]
    Lii = L[np.ix_(inner, inner)]
    return Lbb - Lbi @ np.linalg.solve(Lii, Lbi.T)


def spectrum_oracle(n, edges, boundary):
    S = dtn_oracle(n, edges, boundary)
    return np.linalg.eigvalsh((S + S.T) / 2.0)


def resistance_oracle(n, edges, u, v):
    pinv = np.linalg.pinv(dense_laplacian(n, edges))
    e = np.zeros(n)
    e[u], e[v] = 1.0, -1.0
    return float(e @ pinv @ e)


def tangency_error(cp, edges):
    """Max relative deviation of center distances from radius sums."""
    worst = 0.0
    for u, v in edges:
        d = float(np.linalg.norm(cp.centers[u] - cp.centers[v]))
        target = float(cp.radii[u] + cp.radii[v])
        worst = max(worst, abs(d - target) / target)
    return worst


def random_connected_graph(rng, n_max=50, n_min=2):
    """Random tree plus random extra edges; always connected."""
    n = int(rng.integers(n_min, n_max + 1))
    edges = set()
    for v in range(1, n):
        p = int(rng.integers(0, v))
        edges.add((p, v))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return n, tuple(sorted(edges))


def random_boundary(rng, n, min_size=2):
    size = int(rng.integers(min_size, n + 1))
    return tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))


def _tree_path(adj, a, b):
    """Unique a-b path in a tree, by BFS parent backtracking."""
    from collections import deque

    parent = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return tuple(path)


def subdivision_immersion(rng, g: BoundaryGraph) -> Immersion:
    """Split each edge of g into a path of 1..3 host edges; xi = 1."""
    host_edges = []
    path_map = {}
    next_vertex = g.n
    ell = 1
    for u, v in g.edges:
        t = int(rng.integers(1, 4))
        chain = [u] + [next_vertex + i for i in range(t - 1)] + [v]
        next_vertex += t - 1
        for a, b in zip(chain, chain[1:]):
            host_edges.append((min(a, b), max(a, b)))
        path_map[(u, v)] = tuple(chain)
        ell = max(ell, t)
    host = build_boundary_graph(next_vertex, host_edges, g.boundary)
    return Immersion(source=g, host=host, vertex_map=tuple(range(g.n)),
                     path_map=path_map, xi=1, ell=ell)


def tree_immersion(rng, g: BoundaryGraph) -> Immersion:
    """Route every edge of g along a random spanning tree of g.

    The host is the tree (same vertex ids, same boundary); congestion on
    tree edges gives xi > 1 for most graphs.
    """
    order = rng.permutation(g.n).tolist()
    in_tree = {order[0]}
    tree_edges = []
    adj = {v: [] for v in range(g.n)}
    remaining = set(order[1:])
    # grow the tree by repeatedly attaching any remaining vertex with a
    # neighbour inside; falls back to graph order, stays within g's edges
    while remaining:
        for v in list(order):
            if v not in remaining:
                continue
            anchors = [u for u in g.neighbors[v] if u in in_tree]
            if anchors:
                u = anchors[int(rng.integers(0, len(anchors)))]
                tree_edges.append((min(u, v), max(u, v)))
                adj[u].append(v)
                adj[v].append(u)
                in_tree.add(v)
                remaining.discard(v)
    host = build_boundary_graph(g.n, tree_edges, g.boundary)
    path_map = {}
    usage = {}
    ell = 1
    for u, v in g.edges:
        path = _tree_path(adj, u, v)
        path_map[(u, v)] = path
        ell = max(ell, len(path) - 1)
        for a, b in zip(path, path[1:]):
            e = (min(a, b), max(a, b))
            usage[e] = usage.get(e, 0) + 1
    return Immersion(source=g, host=host, vertex_map=tuple(range(g.n)),
                     path_map=path_map, xi=max(usage.values()), ell=ell)
