"""Steklov spectra via the Dirichlet-to-Neumann (DtN) matrix.

For a graph with boundary B and interior I, order the Laplacian in blocks

    L = [[L_BB, L_BI],
         [L_IB, L_II]]

The DtN matrix is the Schur complement  S = L_BB - L_BI L_II^{-1} L_IB.
Its eigenvalues 0 = l_1 <= l_2 <= ... <= l_{|B|} are the Steklov
eigenvalues of the pair (G, B); eigenvectors extend harmonically into the
interior.  When B is all of V there is no interior block and S = L.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import (
    CentroidNotZero,
    ConvergenceFailure,
    IndexOutOfRange,
    SingularInterior,
    ZeroBoundaryNorm,
)
from .graphs import BoundaryGraph, RotationGraph, laplacian

# Interior solves: dense Cholesky up to this size, Jacobi-preconditioned CG above.
_DENSE_INTERIOR = 4096
_CG_TOL = 1e-12
# Relative residual allowed for the symmetric eigensolve.
_EIG_TOL = 1e-9
# |l_1| below this multiple of the top eigenvalue is clamped to exactly 0.
_KERNEL_CLAMP = 1e-9
# Preconditions on vector-valued Rayleigh data.
_CENTROID_PRE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DtNMatrix:
    """Dense DtN (Schur complement) matrix over the listed boundary vertices."""

    matrix: np.ndarray
    boundary: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SteklovSpectrum:
    """Eigenvalues (ascending) and harmonically extended eigenfunctions.

    ``eigenfunctions[:, k]`` is the function on all of V whose restriction to
    the boundary is the k-th eigenvector; columns are orthonormal on the
    boundary.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    boundary: tuple[int, ...]


def _base(g) -> BoundaryGraph:
    return g.base if isinstance(g, RotationGraph) else g


def _check_interior_reaches_boundary(g: BoundaryGraph):
    """Every component must contain a boundary vertex, else L_II is singular."""
    seen = np.zeros(g.n, dtype=bool)
    q = deque(g.boundary)
    seen[list(g.boundary)] = True
    while q:
        x = q.popleft()
        for y in g.neighbors[x]:
            if not seen[y]:
                seen[y] = True
                q.append(y)
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise SingularInterior(
            f"vertex {missing} lies in a component with no boundary vertex"
        )


def _schur_with_extension(g: BoundaryGraph):
    """Return (S, ext) where S is the DtN matrix and ext maps boundary values
    to the interior values of their harmonic extension (ext = -L_II^{-1} L_IB).
    """
    _check_interior_reaches_boundary(g)
    b = list(g.boundary)
    i = list(g.interior)
    if not i:
        L = laplacian(g)
        S = L.toarray() if scipy.sparse.issparse(L) else L.copy()
        return S, np.zeros((0, len(b)))

    L = laplacian(g)
    if scipy.sparse.issparse(L):
        L = L.tocsr()
        L_bb = L[b][:, b].toarray()
        L_ib = L[i][:, b].toarray()
        L_ii = L[i][:, i].tocsc()
        X = np.empty_like(L_ib)
        diag = L_ii.diagonal()
        M = scipy.sparse.diags(1.0 / diag)
        for col in range(L_ib.shape[1]):
            x, info = _cg(L_ii, L_ib[:, col], M=M)
            if info != 0:
                raise ConvergenceFailure(
                    f"interior CG solve failed for boundary column {col} (info={info})"
                )
            X[:, col] = x
    else:
        L_bb = L[np.ix_(b, b)]
        L_ib = L[np.ix_(i, b)]
        L_ii = L[np.ix_(i, i)]
        if len(i) <= _DENSE_INTERIOR:
            try:
                cf = scipy.linalg.cho_factor(L_ii, check_finite=False)
            except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded above
                raise SingularInterior(str(exc)) from exc
            X = scipy.linalg.cho_solve(cf, L_ib, check_finite=False)
        else:  # pragma: no cover - dense graphs this large are not produced
            X = np.linalg.solve(L_ii, L_ib)
    S = L_bb - L_ib.T @ X
    S = 0.5 * (S + S.T)
    return S, -X


def _cg(A, rhs, M=None):
    """scipy CG across the rtol/tol API change."""
    try:
        return scipy.sparse.linalg.cg(A, rhs, rtol=_CG_TOL, atol=0.0, M=M)
    except TypeError:  # older scipy
        return scipy.sparse.linalg.cg(A, rhs, tol=_CG_TOL, atol=0.0, M=M)


def dtn_matrix(g) -> DtNMatrix:
    """Dirichlet-to-Neumann matrix of (G, boundary).

    Symmetric positive semidefinite with the all-ones vector in its kernel
    when G is connected.  With full boundary this is just the Laplacian.
    """
    base = _base(g)
    S, _ = _schur_with_extension(base)
    return DtNMatrix(matrix=S, boundary=base.boundary)


def steklov_spectrum(g) -> SteklovSpectrum:
    """Full Steklov spectrum with harmonically extended eigenfunctions."""
    base = _base(g)
    S, ext = _schur_with_extension(base)
    try:
        w, Q = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolve failed: {exc}") from exc
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    resid = float(np.abs(S @ Q - Q * w).max(initial=0.0))
    if resid > _EIG_TOL * scale:
        raise ConvergenceFailure(
            f"eigensolve residual {resid:.3e} above {_EIG_TOL:.0e} * {scale:.3e}"
        )
    if abs(w[0]) < _KERNEL_CLAMP * scale:
        w = w.copy()
        w[0] = 0.0

    F = np.empty((base.n, len(base.boundary)))
    F[list(base.boundary), :] = Q
    if base.interior:
        F[list(base.interior), :] = ext @ Q
    return SteklovSpectrum(eigenvalues=w, eigenfunctions=F, boundary=base.boundary)


def lambda_k(g, k: int) -> float:
    """k-th Steklov eigenvalue, 1-indexed (lambda_1 = 0 for connected G)."""
    base = _base(g)
    if not 1 <= k <= len(base.boundary):
        raise IndexOutOfRange(
            f"k={k} outside 1..{len(base.boundary)} (= boundary size)"
        )
    return float(steklov_spectrum(base).eigenvalues[k - 1])


def rayleigh_quotient(g, f) -> float:
    """Edge energy of f divided by its squared norm on the boundary."""
    base = _base(g)
    f = np.asarray(f, dtype=float)
    if f.shape != (base.n,):
        raise IndexOutOfRange(f"expected shape ({base.n},), got {f.shape}")
    den = float(np.sum(f[list(base.boundary)] ** 2))
    if den == 0.0:
        raise ZeroBoundaryNorm("test function vanishes on the boundary")
    ea = base.edge_array
    diff = f[ea[:, 0]] - f[ea[:, 1]]
    return float(diff @ diff) / den


def vector_rayleigh_bound(g, v) -> float:
    """Upper bound on lambda_2 from a vector-valued test map V -> R^d.

    Requires the boundary values to sum to ~0 (CentroidNotZero otherwise);
    the residual centroid is subtracted exactly before evaluating, which
    leaves the numerator unchanged and can only increase the quotient, so
    the returned value is a true upper bound for lambda_2 by the min-max
    characterisation applied coordinatewise.
    """
    base = _base(g)
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != base.n:
        raise IndexOutOfRange(f"expected shape ({base.n}, d), got {v.shape}")
    bidx = list(base.boundary)
    c = v[bidx].sum(axis=0)
    bnorm = float(np.sqrt(np.sum(v[bidx] ** 2)))
    if float(np.linalg.norm(c)) > _CENTROID_PRE_TOL * max(1.0, bnorm):
        raise CentroidNotZero(
            f"boundary values sum to {c} (norm {np.linalg.norm(c):.3e})"
        )
    w = v - c / len(bidx)
    den = float(np.sum(w[bidx] ** 2))
    if den == 0.0:
        raise ZeroBoundaryNorm("test map vanishes on the boundary after centering")
    ea = base.edge_array
    diff = w[ea[:, 0]] - w[ea[:, 1]]
    return float(np.sum(diff * diff)) / den
