"""Planar circle packings and the geometric eigenvalue certificate.

``circle_pack`` realizes a genus-0 triangulation as tangent circles: one
face is treated as the outer boundary with its radii pinned to 1, and the
remaining radii are iterated until the angle sum at every interior vertex
is 2*pi, after which centers are laid out face by face.  The centers lift
to the unit sphere by inverse stereographic projection, a Möbius
transformation recenters the boundary points, and the resulting unit
vectors feed the vector-valued Rayleigh quotient, giving a certified upper
bound for the second Steklov eigenvalue.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import (
    ConvergenceFailure,
    Disconnected,
    EmptyBoundary,
    NonzeroGenus,
    NormalizationFailure,
    NotTriangulated,
    TooSmall,
)
from .graphs import RotationGraph, genus, trace_faces, with_boundary
from .spectrum import lambda_k, vector_rayleigh_bound

# The iteration drives the max angle-sum defect well below the declared
# residual so that the face-by-face layout (which accumulates roundoff
# linearly in the face count) still meets the tangency tolerance.
_ANGLE_TARGET = 5e-13
_RESIDUAL_TOL = 1e-8
_MAX_SWEEPS = 100_000
_CENTROID_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class CirclePacking:
    """Radii and planar centers realizing a triangulation by tangencies.

    ``residual`` is the max over interior vertices of |angle sum - 2*pi|;
    ``outer_face`` lists the pinned (radius 1) vertices.
    """

    radii: np.ndarray
    centers: np.ndarray
    residual: float
    boundary: tuple[int, ...]
    outer_face: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SphereConfiguration:
    """Unit vectors per vertex, with a distinguished boundary subset."""

    points: np.ndarray
    boundary: tuple[int, ...]

    @property
    def boundary_centroid(self) -> np.ndarray:
        return self.points[list(self.boundary)].mean(axis=0)


def _wedge_angles(rv, ra, rb):
    return 2.0 * np.arcsin(np.sqrt(ra * rb / ((rv + ra) * (rv + rb))))


def circle_pack(rg: RotationGraph) -> CirclePacking:
    """Pack a genus-0 triangulation (or near-triangulation) with circles.

    If every face is a triangle, the first traced face is taken as the
    outer one; if exactly one face is larger, that face is the outer one
    (so a disk-like input such as a wheel keeps its natural rim).  Outer
    radii are pinned to 1.  More than one big face raises NotTriangulated,
    positive genus NonzeroGenus, and an angle-sum residual that will not
    drop below 1e-8 ConvergenceFailure.
    """
    if genus(rg) != 0:
        raise NonzeroGenus("circle packing is only computed for genus-0 embeddings")
    if rg.n < 4:
        raise TooSmall("circle packing needs at least 4 vertices")
    faces = trace_faces(rg)
    big = [i for i, f in enumerate(faces) if len(f) != 3]
    if len(big) > 1:
        raise NotTriangulated(
            f"{len(big)} faces are not triangles; only the outer face may be larger"
        )
    outer_pos = big[0] if big else 0
    outer = faces[outer_pos]
    pinned = set(outer)
    interior = np.array(
        [v for v in range(rg.n) if v not in pinned], dtype=np.int64
    )

    radii = np.ones(rg.n)
    residual = 0.0
    if interior.size:
        slot = np.full(rg.n, -1, dtype=np.int64)
        slot[interior] = np.arange(interior.size)
        wv, wvert, wa, wb = [], [], [], []
        for fi, f in enumerate(faces):
            if fi == outer_pos:
                continue
            x, y, z = f
            for v, a, b in ((x, y, z), (y, z, x), (z, x, y)):
                if slot[v] >= 0:
                    wv.append(slot[v])
                    wvert.append(v)
                    wa.append(a)
                    wb.append(b)
        wv = np.asarray(wv)
        wvert = np.asarray(wvert)
        wa = np.asarray(wa)
        wb = np.asarray(wb)
        k = np.bincount(wv, minlength=interior.size).astype(float)
        delta = np.sin(np.pi / k)
        two_pi = 2.0 * np.pi

        def angle_sums(r):
            ang = _wedge_angles(r[wvert], r[wa], r[wb])
            return np.bincount(wv, weights=ang, minlength=interior.size)

        theta = angle_sums(radii)
        err = float(np.abs(theta - two_pi).max())
        lam_prev = None
        sweeps = 0
        while err > _ANGLE_TARGET and sweeps < _MAX_SWEEPS:
            beta = np.sin(theta / (2.0 * k))
            rhat = beta * radii[interior] / (1.0 - beta)
            rnew = rhat * (1.0 - delta) / delta
            cand = radii.copy()
            cand[interior] = rnew
            theta_new = angle_sums(cand)
            err_new = float(np.abs(theta_new - two_pi).max())
            lam = err_new / err if err > 0 else 0.0
            if (
                lam_prev is not None
                and lam < 1.0
                and abs(lam - lam_prev) < 0.1 * (1.0 - lam)
            ):
                # error ratio has stabilized: extrapolate along the last step
                factor = min(lam / (1.0 - lam), 1e4)
                rtry = rnew + factor * (rnew - radii[interior])
                if np.all(rtry > 0):
                    cand2 = radii.copy()
                    cand2[interior] = rtry
                    theta2 = angle_sums(cand2)
                    err2 = float(np.abs(theta2 - two_pi).max())
                    if err2 < err_new:
                        cand, theta_new, err_new = cand2, theta2, err2
                        lam = None
            radii, theta, err, lam_prev = cand, theta_new, err_new, lam
            sweeps += 1
        if err > _RESIDUAL_TOL:
            raise ConvergenceFailure(
                f"angle-sum residual {err:.3e} after {sweeps} sweeps"
            )
        residual = err

    centers = _layout(rg, faces, outer_pos, radii)
    return CirclePacking(
        radii=radii,
        centers=centers,
        residual=residual,
        boundary=rg.boundary,
        outer_face=outer,
    )


def _layout(rg: RotationGraph, faces, outer_pos: int, radii) -> np.ndarray:
    """Breadth-first placement of centers over the faces inside the outer one.

    Each face is laid out in its traced cyclic order with the same turning
    sign, which keeps adjacent apexes on opposite sides of their shared
    edge; the angle sums being 2*pi makes the placements globally
    consistent.
    """
    dart_face: dict[tuple[int, int], int] = {}
    for fi, f in enumerate(faces):
        m = len(f)
        for i in range(m):
            dart_face[(f[i], f[(i + 1) % m])] = fi

    outer = faces[outer_pos]
    seed = None
    for i in range(len(outer)):
        a0, b0 = outer[i], outer[(i + 1) % len(outer)]
        fj = dart_face[(b0, a0)]
        if fj != outer_pos:
            seed = (fj, b0, a0)
            break
    if seed is None:
        raise Disconnected("no triangle is adjacent to the outer face")

    centers = np.full((rg.n, 2), np.nan)
    fi, p, q = seed
    cyc = faces[fi]
    j = cyc.index(p)
    s = cyc[(j + 2) % 3]
    centers[p] = (0.0, 0.0)
    centers[q] = (radii[p] + radii[q], 0.0)
    _place_apex(p, q, s, centers, radii)

    visited = {fi}
    queue = deque([fi])
    while queue:
        f = faces[queue.popleft()]
        for i in range(3):
            a, b = f[i], f[(i + 1) % 3]
            fj = dart_face[(b, a)]
            if fj in visited or fj == outer_pos:
                continue
            visited.add(fj)
            cyc = faces[fj]
            s = next(t for t in cyc if t != a and t != b)
            if np.isnan(centers[s]).any():
                j = cyc.index(s)
                _place_apex(cyc[(j + 1) % 3], cyc[(j + 2) % 3], s, centers, radii)
            queue.append(fj)

    if len(visited) != len(faces) - 1 or np.isnan(centers).any():
        raise Disconnected(
            "faces other than the outer one do not form a connected layout"
        )
    return centers


def _place_apex(p, q, s, centers, radii):
    alpha = _wedge_angles(radii[p], radii[q], radii[s])
    u = centers[q] - centers[p]
    u /= np.hypot(u[0], u[1])
    ca, sa = np.cos(alpha), np.sin(alpha)
    direction = np.array([ca * u[0] - sa * u[1], sa * u[0] + ca * u[1]])
    centers[s] = centers[p] + (radii[p] + radii[s]) * direction


def lift_to_sphere(cp: CirclePacking) -> SphereConfiguration:
    """Inverse stereographic projection of the centers from the plane.

    (x, y) maps to (2x, 2y, x^2 + y^2 - 1) / (1 + x^2 + y^2): the origin
    goes to the south pole and the unit circle to the equator.
    """
    x, y = cp.centers[:, 0], cp.centers[:, 1]
    d = 1.0 + x * x + y * y
    pts = np.stack([2.0 * x / d, 2.0 * y / d, (x * x + y * y - 1.0) / d], axis=1)
    return SphereConfiguration(points=pts, boundary=cp.boundary)


def _ball_map(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Möbius automorphism of the unit ball sending w to 0, applied to the
    rows of x; restricts to a conformal map of the unit sphere."""
    wn2 = float(w @ w)
    diff = x - w
    d2 = np.einsum("ij,ij->i", diff, diff)
    denom = 1.0 - 2.0 * (x @ w) + np.einsum("ij,ij->i", x, x) * wn2
    return ((1.0 - wn2) * diff - d2[:, None] * w) / denom[:, None]


def _y_to_w(y: np.ndarray) -> np.ndarray:
    nrm = float(np.linalg.norm(y))
    if nrm == 0.0:
        return np.zeros(3)
    return y / nrm * np.tanh(nrm)


def mobius_normalize(sc: SphereConfiguration, subset=None) -> SphereConfiguration:
    """Recenter: find a sphere Möbius map making the subset centroid ~0.

    The map is parameterized by a point w in the open unit ball (via an
    unconstrained tanh chart), seeded on a coarse grid of directions and
    radii and polished with a root solver.  Returns the input unchanged
    when it is already centered.  Raises NormalizationFailure when no map
    reaches centroid norm 1e-7 — which is the expected outcome when one
    point carries at least half of the subset.
    """
    sub_idx = list(sc.boundary if subset is None else subset)
    if not sub_idx:
        raise EmptyBoundary("cannot normalize over an empty subset")
    pts = np.asarray(sc.points, dtype=float)
    sub = pts[sub_idx]
    if float(np.linalg.norm(sub.mean(axis=0))) <= _CENTROID_TOL:
        return sc
    if float(np.max(np.linalg.norm(sub - sub[0], axis=1))) < 1e-12:
        raise NormalizationFailure(
            "all subset points coincide; no Möbius map can center them"
        )

    def centroid_of(w: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return _ball_map(w, sub).mean(axis=0)

    def objective(y: np.ndarray) -> np.ndarray:
        return centroid_of(_y_to_w(y))

    c_dir = sub.mean(axis=0)
    c_dir /= np.linalg.norm(c_dir)
    dirs = [c_dir, -c_dir]
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        dirs.extend([e, -e])
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for sz in (-1.0, 1.0):
                dirs.append(np.array([sx, sy, sz]) / np.sqrt(3.0))

    seeds = []
    for d in dirs:
        for rad in (0.35, 0.7, 0.9, 0.975):
            w = rad * d
            score = float(np.linalg.norm(centroid_of(w)))
            if np.isfinite(score):
                seeds.append((score, w))
    seeds.sort(key=lambda t: t[0])

    best_norm, best_w = np.inf, None
    for _, w0 in seeds[:6]:
        y0 = w0 / np.linalg.norm(w0) * np.arctanh(min(np.linalg.norm(w0), 0.999999))
        with np.errstate(all="ignore"):
            sol = scipy.optimize.root(objective, y0, method="hybr", tol=1e-14)
        w = _y_to_w(np.asarray(sol.x, dtype=float))
        res = float(np.linalg.norm(centroid_of(w)))
        if np.isfinite(res) and res < best_norm:
            best_norm, best_w = res, w
        if best_norm <= 1e-9:
            break

    if best_w is None or best_norm > _CENTROID_TOL:
        raise NormalizationFailure(
            f"Möbius search stalled with centroid norm {best_norm:.3e}"
        )
    with np.errstate(all="ignore"):
        out = _ball_map(best_w, pts)
    out /= np.linalg.norm(out, axis=1)[:, None]
    if float(np.linalg.norm(out[sub_idx].mean(axis=0))) > _CENTROID_TOL:
        raise NormalizationFailure("renormalized points lost the centered property")
    return SphereConfiguration(points=out, boundary=sc.boundary)


def certify_planar_bound(rg: RotationGraph, boundary=None) -> dict:
    """Pack, lift, recenter, and evaluate the vector Rayleigh bound.

    Returns a certificate with the computed lambda_2, the geometric bound
    (which must dominate lambda_2 — a failure here means the numerics are
    broken and raises ConvergenceFailure), and the 8*D/|boundary|
    comparison value with a flag saying whether the geometric bound beats
    it.
    """
    g2 = with_boundary(rg, boundary) if boundary is not None else rg
    cp = circle_pack(g2)
    sc = mobius_normalize(lift_to_sphere(cp))
    b_geom = vector_rayleigh_bound(g2, sc.points)
    lam2 = lambda_k(g2, 2)
    nb = len(g2.boundary)
    dmax = g2.base.max_degree
    if lam2 > b_geom + 1e-8:
        raise ConvergenceFailure(
            f"certificate unsound: lambda2 {lam2:.12g} exceeds bound {b_geom:.12g}"
        )
    return {
        "lambda2": lam2,
        "geometric_bound": b_geom,
        "degree_bound": 8.0 * dmax / nb,
        "boundary_size": nb,
        "max_degree": dmax,
        "product": lam2 * nb,
        "within_degree_bound": bool(b_geom <= 8.0 * dmax / nb),
        "packing_residual": cp.residual,
        "centroid_norm": float(np.linalg.norm(sc.points[list(g2.boundary)].mean(axis=0))),
    }


def packing_svg(cp: CirclePacking) -> str:
    """Render the packing as an SVG document (1 unit = 100 px).

    Boundary circles are stroked red, the rest dark grey; output is a
    deterministic function of the packing.
    """
    scale = 100.0
    r = cp.radii * scale
    cx = cp.centers[:, 0] * scale
    cy = cp.centers[:, 1] * scale
    pad = 0.05 * max(float((cx + r).max() - (cx - r).min()), 1.0)
    x0, x1 = float((cx - r).min()) - pad, float((cx + r).max()) + pad
    y0, y1 = float((cy - r).min()) - pad, float((cy + r).max()) + pad
    bset = set(cp.boundary)
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0:.2f} {y0:.2f} {x1 - x0:.2f} {y1 - y0:.2f}">'
    ]
    for v in range(len(cp.radii)):
        color = "#c02020" if v in bset else "#303030"
        lines.append(
            f'  <circle cx="{cx[v]:.4f}" cy="{cy[v]:.4f}" r="{r[v]:.4f}" '
            f'fill="none" stroke="{color}" stroke-width="1"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
