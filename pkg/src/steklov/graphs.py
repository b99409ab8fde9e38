"""Core graph model: boundary graphs, rotation systems, faces and genus.

A :class:`BoundaryGraph` is a finite simple graph on vertices ``0..n-1``
together with a distinguished non-empty set of boundary vertices.  A
:class:`RotationGraph` additionally fixes a cyclic order of neighbours at
every vertex, which determines an embedding into an orientable surface via
face tracing.

Vertex ids are dense and 0-based throughout.  Both types are immutable;
construct them through :func:`build_boundary_graph` /
:func:`build_rotation_graph`, which normalise and validate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse

from .errors import (
    Disconnected,
    DuplicateEdge,
    EmptyBoundary,
    IndexOutOfRange,
    MalformedRotation,
    SelfLoop,
)

#: Above this vertex count the Laplacian is returned in sparse CSR form.
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class BoundaryGraph:
    """Simple graph with a distinguished boundary vertex set.

    Fields are canonical: ``edges`` holds ``(u, v)`` pairs with ``u < v``,
    sorted lexicographically; ``boundary`` is sorted and duplicate-free.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    boundary: tuple[int, ...]

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @cached_property
    def interior(self) -> tuple[int, ...]:
        b = set(self.boundary)
        return tuple(v for v in range(self.n) if v not in b)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an (E, 2) int array (empty graphs give shape (0, 2))."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_set

    @property
    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return int(self.degrees.max(initial=0))


@dataclass(frozen=True)
class RotationGraph:
    """A boundary graph plus a rotation system (cyclic neighbour orders).

    ``rotation[v]`` lists the neighbours of ``v`` in cyclic order.  Together
    with the face-tracing convention below this fixes an embedding into an
    orientable surface of a definite genus.
    """

    base: BoundaryGraph
    rotation: tuple[tuple[int, ...], ...]

    @cached_property
    def successor(self) -> tuple[dict[int, int], ...]:
        """Per-vertex map: neighbour w -> next neighbour after w in the
        cyclic order."""
        out = []
        for ring in self.rotation:
            d = len(ring)
            out.append({ring[i]: ring[(i + 1) % d] for i in range(d)})
        return tuple(out)

    # Convenience pass-throughs.
    @property
    def n(self) -> int:
        return self.base.n

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self.base.edges

    @property
    def boundary(self) -> tuple[int, ...]:
        return self.base.boundary


def _check_vertex(x, n: int, what: str):
    if not isinstance(x, (int, np.integer)):
        raise IndexOutOfRange(f"{what}: expected an integer vertex id, got {x!r}")
    if not 0 <= x < n:
        raise IndexOutOfRange(f"{what}: vertex {x} outside [0, {n})")
    return int(x)


def build_boundary_graph(
    n: int,
    edges: Iterable[Sequence[int]],
    boundary: Iterable[int],
) -> BoundaryGraph:
    """Validate and canonicalise a boundary graph.

    Raises SelfLoop / DuplicateEdge / IndexOutOfRange / EmptyBoundary on bad
    input.  Edges are stored with the smaller endpoint first, sorted;
    the boundary is sorted with duplicates removed.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise IndexOutOfRange(f"vertex count must be a positive integer, got {n!r}")
    n = int(n)

    canon: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for e in edges:
        if len(e) != 2:
            raise SelfLoop(f"edge {e!r}: expected exactly two endpoints")
        u = _check_vertex(e[0], n, f"edge {tuple(e)!r}")
        v = _check_vertex(e[1], n, f"edge {tuple(e)!r}")
        if u == v:
            raise SelfLoop(f"edge ({u}, {v}) is a self-loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed more than once")
        seen.add(key)
        canon.append(key)
    canon.sort()

    bset = {_check_vertex(b, n, "boundary") for b in boundary}
    if not bset:
        raise EmptyBoundary("boundary vertex set must be non-empty")

    return BoundaryGraph(n=n, edges=tuple(canon), boundary=tuple(sorted(bset)))


def with_boundary(g, boundary: Iterable[int]):
    """Return a copy of a BoundaryGraph or RotationGraph with a new boundary."""
    if isinstance(g, RotationGraph):
        new_base = build_boundary_graph(g.base.n, g.base.edges, boundary)
        return RotationGraph(base=new_base, rotation=g.rotation)
    return build_boundary_graph(g.n, g.edges, boundary)


def build_rotation_graph(g: BoundaryGraph, rotation: Iterable[Iterable[int]]) -> RotationGraph:
    """Attach a rotation system to ``g`` after validating it.

    ``rotation[v]`` must be a permutation of the neighbours of ``v``
    (MalformedRotation otherwise).
    """
    rot = tuple(tuple(int(w) for w in ring) for ring in rotation)
    if len(rot) != g.n:
        raise MalformedRotation(
            f"rotation has {len(rot)} rows, graph has {g.n} vertices"
        )
    for v in range(g.n):
        if tuple(sorted(rot[v])) != g.neighbors[v]:
            raise MalformedRotation(
                f"rotation at vertex {v} is not a permutation of its neighbours"
            )
    rg = RotationGraph(base=g, rotation=rot)
    # Orientable maps always have even Euler characteristic; cheap sanity net.
    chi = g.n - len(g.edges) + len(trace_faces(rg))
    if chi % 2 != 0:
        raise MalformedRotation(f"face trace gave odd Euler characteristic {chi}")
    return rg


def laplacian(g: BoundaryGraph):
    """Combinatorial Laplacian L = D - A.

    Dense ndarray for n <= DENSE_LIMIT, scipy CSR above.  Either way row
    sums are exactly zero (integer-valued arithmetic in float64).
    """
    if g.n <= DENSE_LIMIT:
        L = np.zeros((g.n, g.n))
        for u, v in g.edges:
            L[u, v] -= 1.0
            L[v, u] -= 1.0
            L[u, u] += 1.0
            L[v, v] += 1.0
        return L
    ea = g.edge_array
    rows = np.concatenate([ea[:, 0], ea[:, 1], np.arange(g.n)])
    cols = np.concatenate([ea[:, 1], ea[:, 0], np.arange(g.n)])
    vals = np.concatenate([
        -np.ones(len(ea)), -np.ones(len(ea)), g.degrees.astype(float),
    ])
    return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def trace_faces(rg: RotationGraph) -> tuple[tuple[int, ...], ...]:
    """Face boundary walks of the embedding described by the rotation system.

    Convention: the directed edge following ``(u, v)`` within a face is
    ``(v, w)`` where ``w`` is the successor of ``u`` in the rotation at
    ``v``.  Every directed edge lies on exactly one face; each face is
    reported as the cyclic vertex sequence ``(w0, w1, ..., w_{L-1})`` whose
    directed edges are ``(w_i, w_{i+1 mod L})``.  Order of faces is
    deterministic (first unvisited dart in vertex/rotation order).
    """
    succ = rg.successor
    visited: set[tuple[int, int]] = set()
    faces: list[tuple[int, ...]] = []
    for u in range(rg.n):
        for v in rg.rotation[u]:
            if (u, v) in visited:
                continue
            walk = []
            cur = (u, v)
            while cur not in visited:
                visited.add(cur)
                walk.append(cur[0])
                a, b = cur
                cur = (b, succ[b][a])
            faces.append(tuple(walk))
    return tuple(faces)


def is_connected(g: BoundaryGraph) -> bool:
    if g.n == 0:
        return True
    seen = np.zeros(g.n, dtype=bool)
    q = deque([0])
    seen[0] = True
    count = 1
    while q:
        x = q.popleft()
        for y in g.neighbors[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                q.append(y)
    return count == g.n


def genus(rg: RotationGraph) -> int:
    """Genus of the orientable surface determined by the rotation system.

    This is the genus of the *given* embedding, not the minimum over
    embeddings.  Computed from the Euler characteristic
    V - E + F = 2 - 2g; requires a connected graph.
    """
    if not is_connected(rg.base):
        raise Disconnected("genus is only defined for connected graphs")
    chi = rg.n - len(rg.edges) + len(trace_faces(rg))
    g2 = 2 - chi
    # chi is even for orientable maps, and <= 2 when connected.
    return g2 // 2


def is_fully_triangulated(rg: RotationGraph) -> bool:
    """True when every face of the embedding is a triangle."""
    return all(len(f) == 3 for f in trace_faces(rg))
