"""Finitely presented normed spaces and the LP primitives everything runs on.

A space is one of six presentations:

  facet     norm(x) = max_j |r_j . x|, rows r_j spanning the dual
  vertex    unit ball = conv{+-r_i}, norm = gauge of that polytope
  lp        the l_p norm, 1 <= p <= inf
  sum_inf   max-combination of component spaces
  sum_1     sum-combination of component spaces
  quotient  parent modulo span(kernel rows), in complement coordinates

Polytopal presentations (facet, vertex, lp with p in {1, inf}, and sums /
quotients built from them) admit exact linear programming: norms, dual
norms, support functions and region diameters are LP values. Smooth balls
fall back to deterministic sampling and are tagged approximate.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.spatial import QhullError

from .config import TOL, VERTEX_ENUM_MAX_COUNT, VERTEX_ENUM_MAX_DIM
from .errors import (
    BadExponent,
    BanachGeomError,
    DegeneratePresentation,
    DimensionMismatch,
    Infeasible,
    NotPolytopal,
    VertexEnumerationTooLarge,
)
from . import kernels

__all__ = [
    "PresentedSpace",
    "Functional",
    "LinmaxResult",
    "facet_space",
    "vertex_space",
    "lp_space",
    "sum_inf",
    "sum_1",
    "quotient_space",
    "construct_space",
    "builtin_space",
    "norm_eval",
    "norm_eval_many",
    "dual_norm_eval",
    "dual_norm_eval_many",
    "ball_vertices",
    "dual_ball_vertices",
    "sample_ball_vertices",
    "linmax",
    "lexmin_argmax",
    "is_polytopal",
    "norming_functional",
    "dual_space",
    "coordinate_extents",
]

_KINDS = ("facet", "vertex", "lp", "sum_inf", "sum_1", "quotient")


class PresentedSpace:
    """Immutable presentation record; derived data is cached lazily."""

    def __init__(self, kind, dim, rows=None, p=None, parts=None, parent=None, kernel=None):
        self.kind = kind
        self.dim = int(dim)
        self.rows = None if rows is None else _freeze(np.asarray(rows, dtype=np.float64))
        self.p = p
        self.parts = None if parts is None else tuple(parts)
        self.parent = parent
        self.kernel = None if kernel is None else _freeze(np.asarray(kernel, dtype=np.float64))
        self._cache = {}

    def label(self):
        if self.kind == "lp":
            p = "inf" if np.isinf(self.p) else f"{self.p:g}"
            return f"l{p}^{self.dim}"
        if self.kind in ("sum_inf", "sum_1"):
            inner = "+".join(part.label() for part in self.parts)
            tag = "inf" if self.kind == "sum_inf" else "1"
            return f"sum{tag}({inner})"
        if self.kind == "quotient":
            return f"quot({self.parent.label()},k={self.kernel.shape[0]})"
        return f"{self.kind}^{self.dim}[{self.rows.shape[0]}]"

    def __repr__(self):
        return f"PresentedSpace({self.label()})"


class Functional:
    """A coordinate functional on a presented space.

    `normalized` marks a functional whose dual norm has been scaled to 1.
    """

    def __init__(self, coords, normalized=False):
        self.coords = _freeze(np.asarray(coords, dtype=np.float64))
        self.normalized = bool(normalized)

    def __repr__(self):
        return f"Functional({self.coords.tolist()}, normalized={self.normalized})"


class LinmaxResult(NamedTuple):
    value: float
    argmax: np.ndarray
    exact: bool


def _freeze(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def as_vector(x, dim):
    v = np.asarray(getattr(x, "coords", x), dtype=np.float64).ravel()
    if v.shape[0] != dim:
        raise DimensionMismatch(f"expected length {dim}, got {v.shape[0]}")
    return v


# ---------------------------------------------------------------------------
# constructors


def facet_space(rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    dim = rows.shape[1]
    if np.linalg.matrix_rank(rows, tol=1e-10) < dim:
        raise DegeneratePresentation("facet functionals do not span the dual")
    return PresentedSpace("facet", dim, rows=rows)


def vertex_space(rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    dim = rows.shape[1]
    if np.linalg.matrix_rank(rows, tol=1e-10) < dim:
        raise DegeneratePresentation("ball generators do not span the space")
    return PresentedSpace("vertex", dim, rows=rows)


def lp_space(p, dim):
    p = float(p)
    if p < 1:
        raise BadExponent(f"lp exponent must be >= 1, got {p}")
    return PresentedSpace("lp", dim, p=p)


def sum_inf(parts):
    parts = tuple(parts)
    return PresentedSpace("sum_inf", sum(s.dim for s in parts), parts=parts)


def sum_1(parts):
    parts = tuple(parts)
    return PresentedSpace("sum_1", sum(s.dim for s in parts), parts=parts)


def quotient_space(parent, kernel_rows):
    kernel = np.atleast_2d(np.asarray(kernel_rows, dtype=np.float64))
    k, n = kernel.shape
    if n != parent.dim:
        raise DimensionMismatch("kernel vectors must live in the parent space")
    if np.linalg.matrix_rank(kernel, tol=1e-10) < k:
        raise DegeneratePresentation("kernel basis is linearly dependent")
    if k >= parent.dim:
        raise DegeneratePresentation("kernel swallows the whole space")
    return PresentedSpace("quotient", parent.dim - k, parent=parent, kernel=kernel)


def construct_space(spec):
    """Build a space from a descriptor dict (the parsed spec-file form)."""
    kind = spec.get("kind")
    if kind == "facet":
        return facet_space(spec["rows"])
    if kind == "vertex":
        return vertex_space(spec["rows"])
    if kind == "lp":
        return lp_space(spec["p"], spec["dim"])
    if kind in ("sum_inf", "sum_1"):
        parts = [construct_space(s) for s in spec["parts"]]
        return sum_inf(parts) if kind == "sum_inf" else sum_1(parts)
    if kind == "quotient":
        return quotient_space(construct_space(spec["parent"]), spec["kernel"])
    raise BanachGeomError(f"unknown presentation kind {kind!r}")


def builtin_space(name):
    """Named builtins: linf:n, l1:n, l2:n, lp:p:n."""
    parts = name.split(":")
    tag = parts[0]
    if tag == "linf":
        return lp_space(np.inf, int(parts[1]))
    if tag == "l1":
        return lp_space(1, int(parts[1]))
    if tag == "l2":
        return lp_space(2, int(parts[1]))
    if tag == "lp":
        return lp_space(float(parts[1]), int(parts[2]))
    raise BanachGeomError(f"unknown builtin space {name!r}")


# ---------------------------------------------------------------------------
# quotient plumbing


def _quotient_maps(space):
    """(C, K, P): rep = C y, kernel matrix K, projection y = P x_parent."""
    if "qmaps" not in space._cache:
        K = space.kernel.T  # (n, k)
        C = null_space(space.kernel)  # (n, n-k), orthonormal
        M = np.hstack([C, K])
        P = np.linalg.inv(M)[: space.dim]
        space._cache["qmaps"] = (C, K, P)
    return space._cache["qmaps"]


# ---------------------------------------------------------------------------
# polytopality and norms


def is_polytopal(space):
    if space.kind in ("facet", "vertex"):
        return True
    if space.kind == "lp":
        return space.dim == 1 or space.p in (1.0, np.inf)
    if space.kind in ("sum_inf", "sum_1"):
        return all(is_polytopal(s) for s in space.parts)
    return is_polytopal(space.parent)


def _lp_norm(x, p, axis=None):
    if np.isinf(p):
        return np.abs(x).max(axis=axis)
    if p == 1.0:
        return np.abs(x).sum(axis=axis)
    if p == 2.0:
        return np.sqrt((x * x).sum(axis=axis))
    return (np.abs(x) ** p).sum(axis=axis) ** (1.0 / p)


def _split(space, x):
    out, at = [], 0
    for part in space.parts:
        out.append(x[..., at : at + part.dim])
        at += part.dim
    return out


def norm_eval(space, x):
    """Norm of x; exact for facet/lp, LP-exact (dual-vertex) for the rest."""
    x = as_vector(x, space.dim)
    return float(norm_eval_many(space, x[None, :])[0])


def norm_eval_many(space, X):
    """Vectorised norms for the rows of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != space.dim:
        raise DimensionMismatch(f"expected width {space.dim}, got {X.shape[-1]}")
    if space.kind == "facet":
        return np.abs(X @ space.rows.T).max(axis=-1)
    if space.kind == "lp":
        return _lp_norm(X, space.p, axis=-1)
    if space.kind == "sum_inf":
        return np.max([norm_eval_many(s, b) for s, b in zip(space.parts, _split(space, X))], axis=0)
    if space.kind == "sum_1":
        return np.sum([norm_eval_many(s, b) for s, b in zip(space.parts, _split(space, X))], axis=0)
    if space.kind == "vertex":
        dv = dual_ball_vertices(space)
        return np.abs(X @ dv.T).max(axis=-1)
    # quotient
    if is_polytopal(space):
        dv = dual_ball_vertices(space)
        return np.abs(X @ dv.T).max(axis=-1)
    return np.array([_quotient_norm_smooth(space, x) for x in np.atleast_2d(X)])


def _quotient_norm_smooth(space, y):
    C, K, _ = _quotient_maps(space)
    parent = space.parent
    rep = C @ y
    if parent.kind == "lp" and parent.p == 2.0:
        w, *_ = np.linalg.lstsq(K, rep, rcond=None)
        return float(np.linalg.norm(rep - K @ w))
    from scipy.optimize import minimize

    res = minimize(lambda w: norm_eval(parent, rep + K @ w), np.zeros(K.shape[1]), method="Nelder-Mead")
    return float(res.fun)


def dual_norm_eval(space, f):
    """Dual norm of a coordinate functional."""
    f = as_vector(f, space.dim)
    return float(dual_norm_eval_many(space, f[None, :])[0])


def dual_norm_eval_many(space, F):
    F = np.asarray(F, dtype=np.float64)
    if F.shape[-1] != space.dim:
        raise DimensionMismatch(f"expected width {space.dim}, got {F.shape[-1]}")
    if space.kind == "vertex":
        return np.abs(F @ space.rows.T).max(axis=-1)
    if space.kind == "lp":
        return _lp_norm(F, _conjugate(space.p), axis=-1)
    if space.kind == "sum_inf":
        return np.sum([dual_norm_eval_many(s, b) for s, b in zip(space.parts, _split(space, F))], axis=0)
    if space.kind == "sum_1":
        return np.max([dual_norm_eval_many(s, b) for s, b in zip(space.parts, _split(space, F))], axis=0)
    if space.kind == "quotient":
        # Lift f to the parent dual: C^T F = f, K^T F = 0.
        C, K, _ = _quotient_maps(space)
        M = np.vstack([C.T, K.T])
        F2 = np.atleast_2d(F)
        rhs = np.hstack([F2, np.zeros((F2.shape[0], K.shape[1]))])
        lifted = np.linalg.solve(M, rhs.T).T
        return dual_norm_eval_many(space.parent, lifted)
    # facet: support over the unit ball = gauge of conv{+-rows}
    F2 = np.atleast_2d(F)
    if space.dim <= VERTEX_ENUM_MAX_DIM:
        verts = ball_vertices(space)
        return np.abs(F2 @ verts.T).max(axis=-1)
    return np.array([_facet_dual_norm_lp(space, f) for f in F2])


def _conjugate(p):
    if np.isinf(p):
        return 1.0
    if p == 1.0:
        return np.inf
    return p / (p - 1.0)


def _facet_dual_norm_lp(space, f):
    # gauge of conv{+-rows}: min sum(lmb) with [R^T, -R^T] lmb = f, lmb >= 0
    R = space.rows
    m = R.shape[0]
    A_eq = np.hstack([R.T, -R.T])
    res = linprog(np.ones(2 * m), A_eq=A_eq, b_eq=f, bounds=[(0, None)] * (2 * m), method="highs")
    if res.status != 0:
        raise BanachGeomError(f"dual gauge LP failed: {res.message}")
    return float(res.fun)


# ---------------------------------------------------------------------------
# vertex enumeration


def _unique_rows(pts, decimals=9):
    rounded = np.round(pts, decimals)
    _, idx = np.unique(rounded, axis=0, return_index=True)
    return pts[np.sort(idx)]


def _extreme_points(pts):
    pts = _unique_rows(pts)
    dim = pts.shape[1]
    if dim == 1:
        return np.array([[pts.min()], [pts.max()]])
    if pts.shape[0] <= dim + 1:
        return pts
    try:
        hull = ConvexHull(pts)
    except QhullError:
        hull = ConvexHull(pts, qhull_options="QJ")
    return pts[np.sort(hull.vertices)]


def _halfspace_vertices(A, b):
    """Vertices of {x : A x <= b} for a bounded polytope containing 0."""
    dim = A.shape[1]
    if dim == 1:
        lo = max(b[i] / A[i, 0] for i in range(len(b)) if A[i, 0] < 0)
        hi = min(b[i] / A[i, 0] for i in range(len(b)) if A[i, 0] > 0)
        return np.array([[lo], [hi]])
    halfspaces = np.hstack([A, -b[:, None]])
    hs = HalfspaceIntersection(halfspaces, np.zeros(dim))
    return _extreme_points(hs.intersections)


def ball_vertices(space):
    """All extreme points of the unit ball (polytopal presentations only)."""
    if "vertices" in space._cache:
        return space._cache["vertices"]
    verts = _freeze(_ball_vertices_uncached(space))
    space._cache["vertices"] = verts
    return verts


def _ball_vertices_uncached(space):
    if not is_polytopal(space):
        raise NotPolytopal(f"{space.label()} has a smooth ball")
    if space.kind == "lp" and space.dim == 1:
        return np.array([[-1.0], [1.0]])
    if space.kind == "lp" and space.p == 1.0:
        eye = np.eye(space.dim)
        return np.vstack([eye, -eye])
    if space.kind == "lp":  # p == inf
        if 2**space.dim > VERTEX_ENUM_MAX_COUNT:
            raise VertexEnumerationTooLarge(f"2^{space.dim} cube corners")
        return _sign_patterns(space.dim).astype(np.float64)
    if space.kind == "vertex":
        return _extreme_points(np.vstack([space.rows, -space.rows]))
    if space.kind == "facet":
        if space.dim > VERTEX_ENUM_MAX_DIM:
            raise VertexEnumerationTooLarge(f"facet enumeration in dim {space.dim}")
        A = np.vstack([space.rows, -space.rows])
        return _halfspace_vertices(A, np.ones(A.shape[0]))
    if space.kind == "sum_inf":
        blocks = [ball_vertices(s) for s in space.parts]
        total = int(np.prod([len(b) for b in blocks]))
        if total > VERTEX_ENUM_MAX_COUNT:
            raise VertexEnumerationTooLarge(f"{total} product vertices")
        out = blocks[0]
        for blk in blocks[1:]:
            out = np.hstack([np.repeat(out, len(blk), axis=0), np.tile(blk, (len(out), 1))])
        return out
    if space.kind == "sum_1":
        out, at = [], 0
        for part in space.parts:
            vb = ball_vertices(part)
            emb = np.zeros((len(vb), space.dim))
            emb[:, at : at + part.dim] = vb
            out.append(emb)
            at += part.dim
        return _extreme_points(np.vstack(out))
    # quotient: image of the parent ball under the quotient map
    _, _, P = _quotient_maps(space)
    return _extreme_points(ball_vertices(space.parent) @ P.T)


def _sign_patterns(dim):
    n = 2**dim
    out = np.empty((n, dim))
    for i in range(n):
        for d in range(dim):
            out[i, d] = 1.0 if (i >> d) & 1 else -1.0
    return out


def dual_ball_vertices(space):
    """Extreme points of the dual unit ball (polytopal presentations only)."""
    if "dual_vertices" in space._cache:
        return space._cache["dual_vertices"]
    verts = _freeze(_dual_ball_vertices_uncached(space))
    space._cache["dual_vertices"] = verts
    return verts


def _dual_ball_vertices_uncached(space):
    if not is_polytopal(space):
        raise NotPolytopal(f"{space.label()} has a smooth dual ball")
    if space.kind == "lp" and space.dim == 1:
        return np.array([[-1.0], [1.0]])
    if space.kind == "lp" and space.p == 1.0:
        if 2**space.dim > VERTEX_ENUM_MAX_COUNT:
            raise VertexEnumerationTooLarge(f"2^{space.dim} dual corners")
        return _sign_patterns(space.dim).astype(np.float64)
    if space.kind == "lp":  # p == inf, dual is l1
        eye = np.eye(space.dim)
        return np.vstack([eye, -eye])
    if space.kind == "facet":
        return _extreme_points(np.vstack([space.rows, -space.rows]))
    if space.kind == "vertex":
        A = np.vstack([space.rows, -space.rows])
        if space.dim > VERTEX_ENUM_MAX_DIM:
            raise VertexEnumerationTooLarge(f"dual enumeration in dim {space.dim}")
        return _halfspace_vertices(A, np.ones(A.shape[0]))
    if space.kind == "sum_inf":  # dual = 1-sum of duals
        out, at = [], 0
        for part in space.parts:
            dv = dual_ball_vertices(part)
            emb = np.zeros((len(dv), space.dim))
            emb[:, at : at + part.dim] = dv
            out.append(emb)
            at += part.dim
        return _extreme_points(np.vstack(out))
    if space.kind == "sum_1":  # dual = inf-sum of duals
        blocks = [dual_ball_vertices(s) for s in space.parts]
        total = int(np.prod([len(b) for b in blocks]))
        if total > VERTEX_ENUM_MAX_COUNT:
            raise VertexEnumerationTooLarge(f"{total} dual product vertices")
        out = blocks[0]
        for blk in blocks[1:]:
            out = np.hstack([np.repeat(out, len(blk), axis=0), np.tile(blk, (len(out), 1))])
        return out
    # quotient: H-representation from its own ball vertices
    verts = ball_vertices(space)
    if space.dim == 1:
        hi = np.abs(verts).max()
        return np.array([[-1.0 / hi], [1.0 / hi]])
    return _halfspace_vertices(verts, np.ones(len(verts)))


def sample_ball_vertices(space, count, skip=0):
    """Deterministic subset of ball vertices, safe in high dimension.

    Falls back to Halton sign patterns for big hypercubes so checkers can
    keep grids bounded above VERTEX_ENUM_MAX_COUNT.
    """
    if space.kind == "lp" and np.isinf(space.p) and 2**space.dim > count:
        u = kernels.halton(count, space.dim, skip=skip)
        return np.where(u >= 0.5, 1.0, -1.0)
    try:
        verts = ball_vertices(space)
    except VertexEnumerationTooLarge:
        u = kernels.halton(count, space.dim, skip=skip)
        pts = 2.0 * u - 1.0
        norms = norm_eval_many(space, pts)
        return pts / np.maximum(norms, TOL)[:, None]
    if len(verts) <= count:
        return verts
    pick = np.unique((kernels.halton(count, 1, skip=skip)[:, 0] * len(verts)).astype(int))
    return verts[pick]


# ---------------------------------------------------------------------------
# linear programming over the ball


class _Encoding(NamedTuple):
    nvars: int
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray | None
    b_eq: np.ndarray | None
    bounds: list
    E: np.ndarray  # x = E @ vars


def _encoding(space):
    if "encoding" in space._cache:
        return space._cache["encoding"]
    enc = _build_encoding(space)
    space._cache["encoding"] = enc
    return enc


def _build_encoding(space):
    d = space.dim
    if space.kind == "facet":
        A = np.vstack([space.rows, -space.rows])
        return _Encoding(d, A, np.ones(len(A)), None, None, [(None, None)] * d, np.eye(d))
    if space.kind == "lp" and np.isinf(space.p):
        return _Encoding(d, np.empty((0, d)), np.empty(0), None, None, [(-1.0, 1.0)] * d, np.eye(d))
    if space.kind == "lp" and space.p == 1.0:
        A = np.ones((1, 2 * d))
        E = np.hstack([np.eye(d), -np.eye(d)])
        return _Encoding(2 * d, A, np.ones(1), None, None, [(0, None)] * (2 * d), E)
    if space.kind == "lp" and d == 1:
        return _Encoding(1, np.empty((0, 1)), np.empty(0), None, None, [(-1.0, 1.0)], np.eye(1))
    if space.kind == "vertex":
        G = np.vstack([space.rows, -space.rows])
        m = len(G)
        return _Encoding(
            m, np.empty((0, m)), np.empty(0), np.ones((1, m)), np.ones(1), [(0, None)] * m, G.T
        )
    if space.kind == "sum_inf":
        encs = [_encoding(s) for s in space.parts]
        nv = sum(e.nvars for e in encs)
        A_ub = _block_diag([e.A_ub for e in encs], nv)
        b_ub = np.concatenate([e.b_ub for e in encs])
        eqs = [(e.A_eq, e.b_eq) for e in encs if e.A_eq is not None]
        A_eq = _block_eq(encs, nv)
        b_eq = np.concatenate([e.b_eq for e in encs if e.A_eq is not None]) if eqs else None
        bounds = [b for e in encs for b in e.bounds]
        E = _block_diag([e.E for e in encs], nv)
        return _Encoding(nv, A_ub, b_ub, A_eq, b_eq, bounds, E)
    if space.kind in ("sum_1", "quotient"):
        if space.kind == "quotient":
            penc = _encoding(space.parent)
            _, _, P = _quotient_maps(space)
            return _Encoding(
                penc.nvars, penc.A_ub, penc.b_ub, penc.A_eq, penc.b_eq, penc.bounds, P @ penc.E
            )
        # 1-sum: convex hull of the embedded ball vertices
        G = ball_vertices(space)
        m = len(G)
        return _Encoding(
            m, np.empty((0, m)), np.empty(0), np.ones((1, m)), np.ones(1), [(0, None)] * m, G.T
        )
    raise NotPolytopal(f"no LP encoding for {space.label()}")


def _block_diag(mats, nv):
    rows = sum(m.shape[0] for m in mats)
    out = np.zeros((rows, nv))
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out

def _block_eq(encs, nv):
    blocks, offs, at = [], [], 0
    for e in encs:
        if e.A_eq is not None:
            blocks.append(e.A_eq)
            offs.append(at)
        at += e.nvars
    if not blocks:
        return None
    rows = sum(b.shape[0] for b in blocks)
    out = np.zeros((rows, nv))
    r = 0
    for b, off in zip(blocks, offs):
        out[r : r + b.shape[0], off : off + b.shape[1]] = b
        r += b.shape[0]
    return out


def _as_constraints(constraints):
    if constraints is None:
        return []
    out = []
    for a, b in constraints:
        out.append((np.asarray(getattr(a, "coords", a), dtype=np.float64).ravel(), float(b)))
    return out


def linmax(space, objective, constraints=None):
    """Maximize objective over B_X intersected with a . x <= b constraints.

    Exact (LP) for polytopal balls; deterministic sampling, tagged
    approximate, otherwise. Raises Infeasible on an empty region.
    """
    c = as_vector(objective, space.dim)
    cons = _as_constraints(constraints)
    if is_polytopal(space):
        enc = _encoding(space)
        A_ub, b_ub = enc.A_ub, enc.b_ub
        if cons:
            A_extra = np.array([a @ enc.E for a, _ in cons])
            b_extra = np.array([b for _, b in cons])
            A_ub = np.vstack([A_ub, A_extra]) if len(A_ub) else A_extra
            b_ub = np.concatenate([b_ub, b_extra]) if len(b_ub) else b_extra
        res = linprog(
            -(c @ enc.E),
            A_ub=A_ub if len(A_ub) else None,
            b_ub=b_ub if len(b_ub) else None,
            A_eq=enc.A_eq,
            b_eq=enc.b_eq,
            bounds=enc.bounds,
            method="highs",
        )
        if res.status == 2:
            raise Infeasible("region is empty")
        if res.status != 0:
            raise BanachGeomError(f"LP solver failure: {res.message}")
        x = enc.E @ res.x
        return LinmaxResult(float(-res.fun), x, True)
    return _linmax_sampling(space, c, cons)


def _linmax_sampling(space, c, cons, budget=20000):
    pts = _smooth_candidates(space, budget)
    ok = np.ones(len(pts), dtype=bool)
    for a, b in cons:
        ok &= pts @ a <= b + TOL
    if not ok.any():
        raise Infeasible("no sample point satisfies the constraints")
    vals = pts[ok] @ c
    best = int(np.argmax(vals))
    return LinmaxResult(float(vals[best]), pts[ok][best], False)


def _smooth_candidates(space, budget):
    if "smooth_pts" in space._cache and len(space._cache["smooth_pts"]) >= budget:
        return space._cache["smooth_pts"][:budget]
    d = space.dim
    u = 2.0 * kernels.halton(budget, d, skip=11) - 1.0
    norms = norm_eval_many(space, u)
    keep = norms > TOL
    sphere = u[keep] / norms[keep][:, None]
    interior = u[norms <= 1.0 + TOL]
    pts = np.vstack([sphere, interior, np.zeros((1, d))])
    space._cache["smooth_pts"] = pts
    return pts


def lexmin_argmax(space, objective, constraints=None):
    """Witness polish: lexicographically smallest optimizer of linmax."""
    base = linmax(space, objective, constraints)
    if not base.exact:
        return base
    obj = as_vector(objective, space.dim)
    current = list(constraints or [])
    current.append((-obj, -(base.value - 1e-9)))
    x = base.argmax
    for i in range(space.dim):
        e = np.zeros(space.dim)
        e[i] = 1.0
        step = linmax(space, -e, current)
        current.append((e, -step.value + 1e-12))
        x = step.argmax
    return LinmaxResult(base.value, x, True)


def norming_functional(space, x):
    """A dual-ball functional attaining f(x) = norm(x)."""
    x = as_vector(x, space.dim)
    nx = norm_eval(space, x)
    if nx <= TOL:
        return np.zeros(space.dim)
    if space.kind == "lp":
        p = space.p
        if np.isinf(p):
            i = int(np.argmax(np.abs(x)))
            f = np.zeros(space.dim)
            f[i] = np.sign(x[i])
            return f
        if p == 1.0:
            return np.sign(x)
        g = np.sign(x) * np.abs(x / nx) ** (p - 1.0)
        return g / max(dual_norm_eval(space, g), TOL)
    if space.kind == "sum_inf":
        blocks = _split(space, x)
        norms = [norm_eval(s, b) for s, b in zip(space.parts, blocks)]
        i = int(np.argmax(norms))
        f = np.zeros(space.dim)
        at = sum(s.dim for s in space.parts[:i])
        f[at : at + space.parts[i].dim] = norming_functional(space.parts[i], blocks[i])
        return f
    if space.kind == "sum_1":
        return np.concatenate(
            [norming_functional(s, b) for s, b in zip(space.parts, _split(space, x))]
        )
    dv = dual_ball_vertices(space)
    return dv[int(np.argmax(dv @ x))]


def dual_space(space):
    """The dual as a presented space, where the presentation swaps neatly."""
    if space.kind == "facet":
        return vertex_space(space.rows)
    if space.kind == "vertex":
        return facet_space(space.rows)
    if space.kind == "lp":
        return lp_space(_conjugate(space.p), space.dim)
    if space.kind == "sum_inf":
        return sum_1([dual_space(s) for s in space.parts])
    if space.kind == "sum_1":
        return sum_inf([dual_space(s) for s in space.parts])
    # quotient dual = annihilator subspace; present it by its vertex set
    return vertex_space(dual_ball_vertices(space))


def coordinate_extents(space):
    """Per-coordinate reach of the unit ball (bounding box radii)."""
    if space.kind == "lp":
        return np.ones(space.dim)
    if space.kind in ("sum_inf", "sum_1"):
        return np.concatenate([coordinate_extents(s) for s in space.parts])
    try:
        return np.abs(ball_vertices(space)).max(axis=0)
    except (NotPolytopal, VertexEnumerationTooLarge):
        out = np.empty(space.dim)
        for i in range(space.dim):
            e = np.zeros(space.dim)
            e[i] = 1.0
            out[i] = linmax(space, e).value
        return out
