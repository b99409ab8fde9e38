"""Graph families, JSON interchange, and the main-bound experiment sweep.

Generators produce fully triangulated rotation graphs of known genus:
spheres by repeatedly hex-subdividing an icosahedron, tori as diagonal
wraparound grids, and higher genus by inserting handles into a torus (an
extra edge drawn between two far-apart triangular faces merges them and
raises the genus by one; retriangulating restores the triangle-only
invariant).  The sweep builds the genus family, assigns a boundary by
policy, and records lambda_2 * |boundary| / g per genus as CSV rows.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateEdge,
    MalformedRotation,
    NonCycleFace,
    SchemaError,
    TooSmall,
    ValidationError,
)
from .graphs import (
    BoundaryGraph,
    RotationGraph,
    build_boundary_graph,
    build_rotation_graph,
    genus,
    trace_faces,
    with_boundary,
)
from .refine import fully_triangulate, hex_subdivide
from .spectrum import lambda_k

_log = logging.getLogger("steklov.harness")

_DEFAULT_MAX_N = 20_000


def max_instance_size() -> int:
    """Vertex cap from the STEKLOV_MAX_N environment variable."""
    raw = os.environ.get("STEKLOV_MAX_N", "")
    if not raw:
        return _DEFAULT_MAX_N
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"STEKLOV_MAX_N must be an integer, got {raw!r}")
    if cap < 1:
        raise ValidationError(f"STEKLOV_MAX_N must be positive, got {cap}")
    return cap


def _enforce_cap(n: int, what: str) -> None:
    cap = max_instance_size()
    if n > cap:
        raise ValidationError(f"{what} has {n} vertices, over the cap of {cap} "
                              "(raise STEKLOV_MAX_N to allow this)")


def _positive_int(x, what: str, minimum: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
        raise ValidationError(f"{what} must be an integer, got {x!r}")
    x = int(x)
    if x < minimum:
        raise ValidationError(f"{what} must be at least {minimum}, got {x}")
    return x


# ---------------------------------------------------------------------------
# JSON interchange


@dataclass(frozen=True)
class GraphDocument:
    """Canonical file form of a graph: counts, edges, boundary, and
    optionally a rotation system and free-form metadata."""

    n: int
    edges: tuple[tuple[int, int], ...]
    boundary: tuple[int, ...]
    rotation: tuple[tuple[int, ...], ...] | None = None
    meta: dict | None = None


def _schema_int(value, where: str, *, low=None, high=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}: expected an integer, got {value!r}")
    if low is not None and value < low:
        raise SchemaError(f"{where}: {value} is below the minimum {low}")
    if high is not None and value >= high:
        raise SchemaError(f"{where}: {value} is out of range (must be < {high})")
    return value


def parse_document(text: str) -> GraphDocument:
    """Parse and strictly validate the JSON graph format.

    Every violation is reported with the offending position, e.g.
    ``edges[4]: endpoints must satisfy u < v``.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from exc
    if not isinstance(obj, dict):
        raise SchemaError(f"top level: expected an object, got {type(obj).__name__}")
    allowed = {"n", "edges", "boundary", "rotation", "meta"}
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"unexpected key {key!r}")
    for key in ("n", "edges", "boundary"):
        if key not in obj:
            raise SchemaError(f"missing required key {key!r}")

    n = _schema_int(obj["n"], "n", low=1)
    _enforce_cap(n, "document")

    raw_edges = obj["edges"]
    if not isinstance(raw_edges, list):
        raise SchemaError("edges: expected a list")
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for i, e in enumerate(raw_edges):
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError(f"edges[{i}]: expected a pair [u, v]")
        u = _schema_int(e[0], f"edges[{i}][0]", low=0, high=n)
        v = _schema_int(e[1], f"edges[{i}][1]", low=0, high=n)
        if u >= v:
            raise SchemaError(f"edges[{i}]: endpoints must satisfy u < v, got {e}")
        if (u, v) in seen:
            raise SchemaError(f"edges[{i}]: duplicate of edges[{seen[(u, v)]}]")
        seen[(u, v)] = i
        edges.append((u, v))

    raw_boundary = obj["boundary"]
    if not isinstance(raw_boundary, list) or not raw_boundary:
        raise SchemaError("boundary: expected a non-empty list")
    boundary: list[int] = []
    for i, b in enumerate(raw_boundary):
        b = _schema_int(b, f"boundary[{i}]", low=0, high=n)
        if boundary and b <= boundary[-1]:
            raise SchemaError(f"boundary[{i}]: entries must be strictly increasing")
        boundary.append(b)

    rotation = None
    if "rotation" in obj and obj["rotation"] is not None:
        raw_rot = obj["rotation"]
        if not isinstance(raw_rot, list) or len(raw_rot) != n:
            raise SchemaError(f"rotation: expected a list of {n} neighbour rings")
        rings = []
        for v, ring in enumerate(raw_rot):
            if not isinstance(ring, list):
                raise SchemaError(f"rotation[{v}]: expected a list")
            rings.append(tuple(
                _schema_int(w, f"rotation[{v}][{i}]", low=0, high=n)
                for i, w in enumerate(ring)
            ))
        rotation = tuple(rings)

    meta = None
    if "meta" in obj and obj["meta"] is not None:
        if not isinstance(obj["meta"], dict):
            raise SchemaError("meta: expected an object")
        meta = obj["meta"]

    return GraphDocument(n=n, edges=tuple(edges), boundary=tuple(boundary),
                         rotation=rotation, meta=meta)


def serialize_document(doc: GraphDocument) -> str:
    """Deterministic JSON text; parse(serialize(doc)) == doc."""
    obj: dict = {
        "n": doc.n,
        "edges": [list(e) for e in doc.edges],
        "boundary": list(doc.boundary),
    }
    if doc.rotation is not None:
        obj["rotation"] = [list(r) for r in doc.rotation]
    if doc.meta is not None:
        obj["meta"] = doc.meta
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def document_to_graph(doc: GraphDocument):
    """Materialize a BoundaryGraph, or a RotationGraph when the document
    carries a rotation system."""
    g = build_boundary_graph(doc.n, doc.edges, doc.boundary)
    if doc.rotation is not None:
        return build_rotation_graph(g, doc.rotation)
    return g


def graph_to_document(g, meta: dict | None = None) -> GraphDocument:
    if isinstance(g, RotationGraph):
        return GraphDocument(n=g.n, edges=g.edges, boundary=g.boundary,
                             rotation=g.rotation, meta=meta)
    return GraphDocument(n=g.n, edges=g.edges, boundary=g.boundary, meta=meta)


# ---------------------------------------------------------------------------
# Generators


def _solid(coords: np.ndarray, edge_len2: float) -> RotationGraph:
    """Rotation graph of a convex solid: connect vertex pairs at the given
    squared distance and order each neighbour ring by angle in the tangent
    plane, which yields a consistent orientation of the sphere."""
    n = len(coords)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if abs(float(((coords[i] - coords[j]) ** 2).sum()) - edge_len2) < 1e-9:
                edges.append((i, j))
    g = build_boundary_graph(n, edges, range(n))
    rotation = []
    for v in range(n):
        p = coords[v] / np.linalg.norm(coords[v])
        a = np.array([1.0, 0.0, 0.0]) if abs(p[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = a - (a @ p) * p
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(p, e1)
        ring = []
        for u in g.neighbors[v]:
            w = coords[u] - coords[v]
            ring.append((math.atan2(float(w @ e2), float(w @ e1)), u))
        rotation.append([u for _, u in sorted(ring)])
    return build_rotation_graph(g, rotation)


def tetrahedron() -> RotationGraph:
    coords = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], float)
    return _solid(coords, 8.0)


def octahedron() -> RotationGraph:
    coords = np.array([(1, 0, 0), (-1, 0, 0), (0, 1, 0),
                       (0, -1, 0), (0, 0, 1), (0, 0, -1)], float)
    return _solid(coords, 2.0)


def icosahedron() -> RotationGraph:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    coords = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            coords.append((0.0, s1, s2 * phi))
            coords.append((s1, s2 * phi, 0.0))
            coords.append((s1 * phi, 0.0, s2))
    return _solid(np.array(coords), 4.0)


def gen_sphere(level: int) -> RotationGraph:
    """Icosahedron refined ``level`` times: genus 0, max degree 6,
    (V, E, F) = (12, 30, 20), (42, 120, 80), (162, 480, 320), ..."""
    level = _positive_int(level, "level", minimum=0)
    rg = icosahedron()
    for _ in range(level):
        _enforce_cap(rg.n + len(rg.edges), "subdivided sphere")
        rg = hex_subdivide(rg)
    return rg


def gen_torus(n: int, m: int) -> RotationGraph:
    """n-by-m wraparound grid with one diagonal per square: V = nm,
    E = 3nm, F = 2nm, genus 1, every vertex of degree 6."""
    n = _positive_int(n, "n", minimum=1)
    m = _positive_int(m, "m", minimum=1)
    if n < 3 or m < 3:
        raise TooSmall(f"torus grid needs n, m >= 3, got ({n}, {m})")
    _enforce_cap(n * m, "torus grid")

    def vid(i: int, j: int) -> int:
        return (i % n) * m + (j % m)

    edges = set()
    rotation = []
    for i in range(n):
        for j in range(m):
            ring = [vid(i, j + 1), vid(i - 1, j), vid(i - 1, j - 1),
                    vid(i, j - 1), vid(i + 1, j), vid(i + 1, j + 1)]
            rotation.append(ring)
            for u in (ring[0], ring[4], ring[5]):
                edges.add((min(vid(i, j), u), max(vid(i, j), u)))
    g = build_boundary_graph(n * m, sorted(edges), range(n * m))
    return build_rotation_graph(g, rotation)


def _attach_handle(rg: RotationGraph, fa, fb) -> RotationGraph:
    """Draw an edge through a new handle joining faces fa and fb.

    With the new darts inserted at the corners of fa and fb, the two
    triangles merge into one octagonal walk (Euler characteristic drops by
    2); retriangulating the walk restores a triangulation one genus up.
    """
    va, xa, ya = fa
    vb, xb, yb = fb
    rot = [list(r) for r in rg.rotation]
    rot[va].insert(rot[va].index(ya) + 1, vb)
    rot[vb].insert(rot[vb].index(yb) + 1, va)
    edges = list(rg.base.edges) + [(min(va, vb), max(va, vb))]
    g2 = build_boundary_graph(rg.n, edges, rg.boundary)
    return fully_triangulate(build_rotation_graph(g2, rot))


def _add_handle(rg: RotationGraph) -> RotationGraph:
    """Insert one handle between the first admissible far-apart face pair.

    Admissible means vertex-disjoint with no edges between the two
    triangles, so the retriangulation of the merged walk has room for its
    chords.  The scan order is deterministic.
    """
    faces = [f for f in trace_faces(rg) if len(f) == 3]
    eset = rg.base.edge_set
    target = genus(rg) + 1
    for ia in range(len(faces)):
        fa = faces[ia]
        sa = set(fa)
        for ib in range(ia + 1, len(faces)):
            fb = faces[ib]
            if sa & set(fb):
                continue
            if any((min(a, b), max(a, b)) in eset for a in fa for b in fb):
                continue
            for ra in range(3):
                for rb in range(3):
                    try:
                        out = _attach_handle(rg, fa[ra:] + fa[:ra], fb[rb:] + fb[:rb])
                    except (NonCycleFace, DuplicateEdge, MalformedRotation):
                        continue
                    if genus(out) == target:
                        return out
    raise TooSmall("no face pair is far enough apart to attach a handle; "
                   "increase the resolution")


def gen_genus(g: int, resolution: int = 5) -> RotationGraph:
    """Torus grid with g - 1 handles: fully triangulated, genus exactly g.

    Each handle adds a single edge between two far-apart triangles plus
    the chords retriangulating the merged face, so the degree stays
    bounded by a small constant over the base grid's 6.
    """
    g = _positive_int(g, "g", minimum=1)
    resolution = _positive_int(resolution, "resolution", minimum=1)
    rg = gen_torus(resolution, resolution)
    for _ in range(g - 1):
        rg = _add_handle(rg)
    return rg


# ---------------------------------------------------------------------------
# Sweep


@dataclass(frozen=True)
class SweepRecord:
    family: str
    g: int
    D: int
    boundary_size: int
    lambda2: float
    product: float
    product_over_g: float


CSV_HEADER = "family,g,D,boundary_size,lambda2,product,product_over_g"


def _policy_boundary(rg: RotationGraph, policy: str) -> list[int]:
    if policy == "all-vertices":
        return list(range(rg.n))
    if policy == "single-face":
        return sorted(set(trace_faces(rg)[0]))
    if policy.startswith("random-fraction:"):
        parts = policy.split(":")
        if len(parts) != 3:
            raise ValidationError(
                f"random-fraction policy must look like 'random-fraction:P:SEED', got {policy!r}")
        try:
            p = float(parts[1])
            seed = int(parts[2])
        except ValueError:
            raise ValidationError(f"could not parse policy parameters in {policy!r}")
        if not 0.0 < p <= 1.0:
            raise ValidationError(f"fraction must lie in (0, 1], got {p}")
        rng = np.random.Generator(np.random.Philox(np.uint64(seed)))
        mask = rng.random(rg.n) < p
        return [v for v in range(rg.n) if mask[v]]
    raise ValidationError(f"unknown boundary policy {policy!r}")


def sweep_main_bound(g_max: int, resolution: int,
                     boundary_policy: str = "all-vertices") -> list[SweepRecord]:
    """Per genus 1..g_max: build the genus family, pick the boundary by
    policy, and record lambda_2 * |boundary| / g.  Instances whose policy
    leaves fewer than two boundary vertices are skipped with a logged
    diagnostic (lambda_2 needs a two-point spectrum)."""
    g_max = _positive_int(g_max, "g_max", minimum=1)
    records: list[SweepRecord] = []
    for gg in range(1, g_max + 1):
        rg = gen_genus(gg, resolution)
        chosen = _policy_boundary(rg, boundary_policy)
        if len(chosen) < 2:
            _log.warning("genus %d: policy %r selected %d boundary vertices; "
                         "skipping (lambda_2 needs at least 2)",
                         gg, boundary_policy, len(chosen))
            continue
        gb = with_boundary(rg, chosen)
        lam2 = lambda_k(gb, 2)
        product = lam2 * len(chosen)
        records.append(SweepRecord(
            family="genus",
            g=gg,
            D=gb.base.max_degree,
            boundary_size=len(chosen),
            lambda2=lam2,
            product=product,
            product_over_g=product / max(gg, 1),
        ))
    return records


def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(f"{r.family},{r.g},{r.D},{r.boundary_size},"
                     f"{r.lambda2:.12g},{r.product:.12g},{r.product_over_g:.12g}")
    return "\n".join(lines) + "\n"


def sweep_svg(records) -> str:
    """Scatter of product_over_g against genus, as a standalone SVG."""
    width, height, margin = 480, 320, 50.0
    xs = [r.g for r in records]
    ys = [r.product_over_g for r in records]
    x_lo, x_hi = (min(xs) - 0.5, max(xs) + 0.5) if xs else (0.0, 1.0)
    y_hi = 1.1 * max(ys) if ys else 1.0

    def px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def py(y: float) -> float:
        return height - margin - y / y_hi * (height - 2 * margin)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'  <line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="#000"/>',
        f'  <line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="#000"/>',
        f'  <text x="{width / 2:.1f}" y="{height - 12}" font-size="12" '
        'text-anchor="middle">genus</text>',
        f'  <text x="14" y="{height / 2:.1f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {height / 2:.1f})">lambda2*|bdry|/g</text>',
    ]
    for r in records:
        lines.append(f'  <circle cx="{px(r.g):.2f}" cy="{py(r.product_over_g):.2f}" '
                     'r="4" fill="#2060c0"/>')
        lines.append(f'  <text x="{px(r.g):.2f}" y="{height - margin + 16:.2f}" '
                     f'font-size="11" text-anchor="middle">{r.g}</text>')
    for frac in (0.0, 0.5, 1.0):
        yv = frac * y_hi
        lines.append(f'  <text x="{margin - 6:.2f}" y="{py(yv) + 4:.2f}" '
                     f'font-size="11" text-anchor="end">{yv:.3g}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
