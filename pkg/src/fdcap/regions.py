"""Downward-closed rate-region geometry in 2 or 3 dimensions.

A region is a union of polytopes, each given by halfspaces w . r <= b with
nonnegative weights (so every polytope is downward closed).  Polytopes that
share a weight pattern are stored as one group (W, B) with W the (m, k)
pattern matrix and B an (n, m) table of bounds, one row per member; this is
what makes parameter-grid unions with hundreds of thousands of members cheap
to query.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-9
DEFAULT_HULL_DIRECTIONS = {2: 64, 3: 512}
DEFAULT_GAP_FAN = {2: 64, 3: 512}
DEFAULT_VERTEX_CAP = 4096


class UnboundedGapError(ValueError):
    """Raised when the inner region is empty so no finite gap exists."""


@dataclass(frozen=True)
class Halfspace:
    """One inequality weights . r <= bound.  A negative bound marks an empty region."""

    weights: tuple
    bound: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) not in (2, 3):
            raise ValueError("halfspace weights must be a 2- or 3-vector")
        if np.any(w < 0) or not np.any(w > 0):
            raise ValueError("weights must be nonnegative with at least one positive entry")


@dataclass(frozen=True)
class GapResult:
    """Outcome of a constant-gap computation."""

    delta: float
    witness: np.ndarray
    lambda_star: float | None = None
    rho_star: float | None = None
    meta: dict = field(default_factory=dict)


class RateRegion:
    """Union (optionally convex hull) of downward-closed polytopes."""

    def __init__(self, groups, hull_enabled: bool = False, hull_directions: int | None = None):
        self.groups = []
        dim = None
        for w, b in groups:
            w = np.atleast_2d(np.asarray(w, dtype=float))
            b = np.atleast_2d(np.asarray(b, dtype=float))
            if b.shape[1] != w.shape[0]:
                raise ValueError("bound table width must match the number of pattern rows")
            if dim is None:
                dim = w.shape[1]
            elif w.shape[1] != dim:
                raise ValueError("all groups must share the same dimension")
            self.groups.append((w, b))
        if dim is None:
            raise ValueError("a region needs at least one polytope")
        self._dim = dim
        self.hull_enabled = hull_enabled
        self.hull_directions = hull_directions or DEFAULT_HULL_DIRECTIONS[dim]
        self._hull_region = None

    # ----- construction helpers -------------------------------------------------

    @classmethod
    def from_halfspaces(cls, halfspaces, **kw) -> "RateRegion":
        """Single polytope from a list of Halfspace (or (weights, bound) pairs)."""
        rows, bounds = [], []
        for h in halfspaces:
            if isinstance(h, Halfspace):
                rows.append(h.weights)
                bounds.append(h.bound)
            else:
                rows.append(h[0])
                bounds.append(h[1])
        w = np.asarray(rows, dtype=float)
        b = np.asarray(bounds, dtype=float).reshape(1, -1)
        return cls([(w, b)], **kw)

    @classmethod
    def from_bound_table(cls, pattern, bounds, **kw) -> "RateRegion":
        """Union of polytopes sharing one weight pattern; bounds is (n, m)."""
        return cls([(pattern, bounds)], **kw)

    @classmethod
    def from_polytopes(cls, polytopes, **kw) -> "RateRegion":
        regions = [cls.from_halfspaces(p) for p in polytopes]
        out = regions[0]
        for r in regions[1:]:
            out = out.union(r)
        if kw:
            return cls(out.groups, **kw)
        return out

    def union(self, other: "RateRegion") -> "RateRegion":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch in region union")
        return RateRegion(self.groups + other.groups, hull_enabled=self.hull_enabled,
                          hull_directions=self.hull_directions)

    def with_hull(self, enabled: bool = True, directions: int | None = None) -> "RateRegion":
        return RateRegion(self.groups, hull_enabled=enabled,
                          hull_directions=directions or self.hull_directions)

    # ----- basic queries ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n_polytopes(self) -> int:
        return sum(b.shape[0] for _, b in self.groups)

    def iter_polytopes(self):
        """Yield (W, b) per member polytope."""
        for w, b in self.groups:
            for row in b:
                yield w, row

    def _query_region(self) -> "RateRegion":
        if self.hull_enabled:
            if self._hull_region is None:
                self._hull_region = support_hull([self], directions=self.hull_directions)
            return self._hull_region
        return self

    def membership(self, point, tol: float = FEAS_TOL) -> bool:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ValueError(f"point must have dimension {self.dim}")
        reg = self._query_region()
        for w, b in reg.groups:
            v = w @ point
            if np.any(np.all(b >= v - tol, axis=1)):
                return True
        return False

    def contains_points(self, points, tol: float = FEAS_TOL) -> np.ndarray:
        """Vectorized membership for an (n, k) array of points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(points), dtype=bool)
        reg = self._query_region()
        for w, b in reg.groups:
            v = points @ w.T  # (n, m)
            ok = (b[None, :, :] >= v[:, None, :] - tol).all(axis=2).any(axis=1)
            out |= ok
        return out

    def is_empty(self, tol: float = FEAS_TOL) -> bool:
        return not self.membership(np.zeros(self.dim), tol=tol)

    # ----- ray shooting and linear objectives ------------------------------------

    def ray_exit(self, direction, base=None) -> float:
        """Largest t with base + t * direction inside the region (exact per member).

        Returns -inf if no member is feasible at the base point.
        """
        direction = np.asarray(direction, dtype=float)
        base = np.zeros(self.dim) if base is None else np.asarray(base, dtype=float)
        best = -math.inf
        reg = self._query_region()
        for w, b in reg.groups:
            wd = w @ direction  # (m,)
            wb = w @ base
            slack = b - wb[None, :]  # (n, m)
            moving = wd > 1e-15
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(moving[None, :], slack / np.maximum(wd[None, :], 1e-300), math.inf)
            # rows that do not move along the direction must already be satisfied
            blocked = (~moving[None, :]) & (slack < -FEAS_TOL)
            t = np.where(blocked, -math.inf, t)
            tm = t.min(axis=1)
            if tm.size:
                best = max(best, float(tm.max()))
        return best

    def max_weighted(self, objective) -> float:
        """Maximum of objective . r over the region (2D and 3D, via member vertices)."""
        objective = np.asarray(objective, dtype=float)
        best = -math.inf
        reg = self._query_region()
        for w, b in reg.groups:
            verts, member = _group_vertices(w, b)
            if len(verts):
                best = max(best, float((verts @ objective).max()))
        return best

    # ----- vertex enumeration ------------------------------------------------------

    def all_vertices(self) -> list[tuple[int, np.ndarray]]:
        """(polytope_id, vertex) for every member, ids in iteration order."""
        out = []
        pid = 0
        for w, b in self.groups:
            verts, member = _group_vertices(w, b)
            for v, m in zip(verts, member):
                out.append((pid + int(m), v))
            pid += b.shape[0]
        return out


def membership(region: RateRegion, point, tol: float = FEAS_TOL) -> bool:
    return region.membership(point, tol=tol)


def _subset_candidates(w_full: np.ndarray):
    """Row index k-subsets with an invertible submatrix, plus cached inverses."""
    m, k = w_full.shape
    subsets = []
    for idx in itertools.combinations(range(m), k):
        sub = w_full[list(idx)]
        if abs(np.linalg.det(sub)) > 1e-12:
            subsets.append((idx, np.linalg.inv(sub)))
    return subsets


def _group_vertices(w: np.ndarray, b: np.ndarray, tol: float = FEAS_TOL):
    """Vertices of every member of a (W, B) group, nonnegative orthant included.

    Returns (vertices (v, k), member_index (v,)).  The axis planes r_i = 0 are
    appended as extra constraint rows with zero bound so corners on the axes
    are found; the shared pattern means each k-subset inverse is reused across
    all members.
    """
    n, m = b.shape
    k = w.shape[1]
    w_full = np.vstack([w, np.eye(k)])
    b_full = np.hstack([b, np.zeros((n, k))])  # (n, m + k)
    verts_list, member_list = [], []
    for idx, inv in _subset_candidates(w_full):
        rhs = b_full[:, list(idx)]  # (n, k)
        pts = rhs @ inv.T  # (n, k)
        feas = (pts @ w.T <= b + tol).all(axis=1) & (pts >= -tol).all(axis=1)
        if feas.any():
            verts_list.append(np.clip(pts[feas], 0.0, None))
            member_list.append(np.nonzero(feas)[0])
    if not verts_list:
        return np.zeros((0, k)), np.zeros(0, dtype=int)
    verts = np.vstack(verts_list)
    member = np.concatenate(member_list)
    # dedupe per member
    key = np.round(verts / max(tol, 1e-12)).astype(np.int64)
    _, keep = np.unique(np.column_stack([member, key]), axis=0, return_index=True)
    return verts[keep], member[keep]


def vertices(halfspaces, tol: float = FEAS_TOL) -> list[np.ndarray]:
    """Extreme points of one polytope intersected with the nonnegative orthant.

    Accepts a list of Halfspace or (weights, bound) pairs, dimension 2 or 3,
    at most 12 halfspaces.  An empty polytope yields an empty list.
    """
    rows, bounds = [], []
    for h in halfspaces:
        if isinstance(h, Halfspace):
            rows.append(h.weights)
            bounds.append(h.bound)
        else:
            rows.append(h[0])
            bounds.append(h[1])
    w = np.asarray(rows, dtype=float)
    if w.ndim != 2 or w.shape[1] not in (2, 3):
        raise ValueError("vertices needs 2D or 3D halfspaces")
    if w.shape[0] > 12:
        raise ValueError("vertex enumeration is limited to 12 halfspaces")
    b = np.asarray(bounds, dtype=float).reshape(1, -1)
    if np.any(b < 0):
        return []
    verts, _ = _group_vertices(w, b, tol=tol)
    order = np.lexsort(verts.T[::-1])
    return [verts[i] for i in order]


def fan_directions(dim: int, count: int) -> np.ndarray:
    """Fan of nonnegative unit directions covering the positive orthant."""
    if dim == 2:
        ang = np.linspace(0.0, math.pi / 2.0, max(count, 2))
        return np.column_stack([np.cos(ang), np.sin(ang)])
    side = max(int(math.ceil(math.sqrt(count))), 2)
    theta = np.linspace(0.0, math.pi / 2.0, side)  # polar from +z
    phi = np.linspace(0.0, math.pi / 2.0, side)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.column_stack([
        (np.sin(t) * np.cos(p)).ravel(),
        (np.sin(t) * np.sin(p)).ravel(),
        np.cos(t).ravel(),
    ])
    dirs = np.vstack([dirs, np.eye(3)])
    dirs = np.unique(np.round(dirs, 12), axis=0)
    keep = dirs.max(axis=1) > 1e-12
    return dirs[keep]


def support_hull(regions, directions: int | None = None) -> RateRegion:
    """Time-sharing hull via support functions over a direction fan.

    The result is a single polytope {w . r <= h(w)} over the fan, where h(w)
    is the largest support value among all member-polytope vertices.  It
    contains every input region exactly; refining the fan only shrinks it.
    """
    if isinstance(regions, RateRegion):
        regions = [regions]
    dim = regions[0].dim
    if any(r.dim != dim for r in regions):
        raise ValueError("dimension mismatch in support_hull")
    if directions is None:
        directions = DEFAULT_HULL_DIRECTIONS[dim]
    minimum = 16 if dim == 2 else 128
    if directions < minimum:
        raise ValueError(f"need at least {minimum} directions in {dim}D")
    dirs = fan_directions(dim, directions)
    verts = []
    for r in regions:
        for _, v in r.all_vertices():
            verts.append(v)
    if not verts:
        return RateRegion.from_halfspaces([(tuple(np.ones(dim)), 0.0)])
    v = np.asarray(verts)
    h = (dirs @ v.T).max(axis=1)
    return RateRegion.from_bound_table(dirs, h.reshape(1, -1))


def pareto_prune_rows(table: np.ndarray, block: int = 512) -> np.ndarray:
    """Drop rows dominated componentwise by another row (blocked, vectorized).

    A dominated bound vector describes a polytope contained in its
    dominator's, so pruning leaves the union unchanged.
    """
    t = np.unique(np.asarray(table, dtype=float), axis=0)
    t = t[np.argsort(-t.sum(axis=1))]
    n, d = t.shape
    kept = np.empty_like(t)
    cnt = 0
    for i0 in range(0, n, block):
        blk = t[i0:i0 + block]
        if cnt:
            dom = (kept[None, :cnt, :] >= blk[:, None, :]).all(axis=2).any(axis=1)
            blk = blk[~dom]
        if len(blk) > 1:
            ge = (blk[None, :, :] >= blk[:, None, :]).all(axis=2)
            ne = (blk[None, :, :] != blk[:, None, :]).any(axis=2)
            blk = blk[~(ge & ne).any(axis=1)]
        kept[cnt:cnt + len(blk)] = blk
        cnt += len(blk)
    return kept[:cnt].copy()


def pareto_maximal(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Indices of points not dominated componentwise by another point."""
    pts = np.asarray(points, dtype=float)
    n, k = pts.shape
    order = np.argsort(-pts.sum(axis=1))
    buf = np.empty((n, k))
    kept: list[int] = []
    cnt = 0
    for i in order:
        p = pts[i]
        if cnt:
            dom = np.all(buf[:cnt] >= p - tol, axis=1) & np.any(buf[:cnt] > p + tol, axis=1)
            if dom.any():
                continue
        kept.append(i)
        buf[cnt] = p
        cnt += 1
    return np.asarray(sorted(kept), dtype=int)


def sample_outer_boundary(region: RateRegion, fan: int | None = None,
                          vertex_cap: int = DEFAULT_VERTEX_CAP) -> np.ndarray:
    """Boundary points of a region for gap evaluation: member vertices (when the
    member count is manageable) plus ray-fan exits, reduced to Pareto-maximal points."""
    dim = region.dim
    fan = fan or DEFAULT_GAP_FAN[dim]
    pts = []
    reg = region._query_region()
    if reg.n_polytopes <= vertex_cap:
        for _, v in reg.all_vertices():
            pts.append(v)
    for u in fan_directions(dim, fan):
        t = reg.ray_exit(u)
        if math.isfinite(t) and t > 0:
            pts.append(t * u)
    if not pts:
        return np.zeros((1, dim))
    pts = np.unique(np.round(np.asarray(pts), 9), axis=0)
    return pts[pareto_maximal(pts)]


def shift_needed(region: RateRegion, points: np.ndarray, tol: float = FEAS_TOL,
                 chunk: int = 64) -> np.ndarray:
    """Exact minimal per-point shift d with ((r_i - d)^+) inside the region.

    For a halfspace (w, beta) the shifted load h(d) = sum_i w_i (r_i - d)^+ is
    convex, decreasing and piecewise linear in d with knots {0, r_i}, hence
    equal to the max of its affine pieces; h(d) <= beta inverts to
    d >= knot_k + (beta - h_k) / slope_k over the decreasing pieces.  A
    member's shift is the max over its rows, the region's the min over
    members, all evaluated as batched array expressions.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    reg = region._query_region()
    n_pts = len(points)
    out = np.full(n_pts, math.inf)
    knots_all = np.sort(np.hstack([np.zeros((n_pts, 1)), points]), axis=1)
    for w, b in reg.groups:
        n, m = b.shape
        n_pieces = knots_all.shape[1] - 1
        for p0 in range(0, n_pts, chunk):
            sl = slice(p0, min(p0 + chunk, n_pts))
            kn = knots_all[sl]  # (p, K)
            r = points[sl]
            p = kn.shape[0]
            loads = np.clip(r[:, None, :] - kn[:, :, None], 0.0, None) @ w.T  # (p, K, m)
            dk = np.diff(kn, axis=1)  # (p, K-1)
            need = np.zeros((p, n))
            dj = np.empty((p, n))
            for j in range(m):
                h = loads[:, :, j]
                dh = np.diff(h, axis=1)
                valid = (dk > 1e-15) & (dh < -1e-15)
                slope = np.where(valid, dh / np.where(dk > 1e-15, dk, 1.0), -1.0)
                beta = b[:, j]
                dj.fill(-math.inf)
                for k in range(n_pieces):
                    term = (beta[None, :] - h[:, k, None]) / slope[:, k, None] \
                        + kn[:, k, None]
                    term[~valid[:, k], :] = -math.inf
                    np.maximum(dj, term, out=dj)
                np.clip(dj, 0.0, None, out=dj)
                dj[:, beta < -tol] = math.inf
                np.maximum(need, dj, out=need)
            out[sl] = np.minimum(out[sl], need.min(axis=1))
    return out


def constant_gap(outer: RateRegion, inner: RateRegion, *, fan: int | None = None,
                 vertex_cap: int = DEFAULT_VERTEX_CAP, bisect_tol: float = 1e-4,
                 method: str = "exact") -> GapResult:
    """Constant gap delta: smallest uniform shift taking every sampled outer
    boundary point (componentwise clamped at 0) into the inner region.

    method "exact" uses the piecewise-linear inversion in shift_needed;
    "bisect" brackets each point's shift by membership bisection at bisect_tol.
    Ties among witnesses break by lexicographic coordinate order.
    """
    if outer.dim != inner.dim:
        raise ValueError("dimension mismatch between outer and inner regions")
    if inner.is_empty():
        raise UnboundedGapError("inner region is empty; the gap is unbounded")
    if outer.is_empty():
        raise ValueError("outer region is empty")
    pts = sample_outer_boundary(outer, fan=fan, vertex_cap=vertex_cap)
    if method == "exact":
        deltas = shift_needed(inner, pts)
    elif method == "bisect":
        deltas = np.array([_bisect_shift(inner, p, bisect_tol) for p in pts])
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(deltas)):
        raise UnboundedGapError("inner region cannot absorb an outer point at any shift")
    deltas = np.clip(deltas, 0.0, None)
    best = deltas.max()
    tie = np.nonzero(deltas >= best - 1e-12)[0]
    order = np.lexsort(pts[tie].T[::-1])
    witness = pts[tie[order[0]]]
    return GapResult(delta=float(best), witness=witness,
                     meta={"n_boundary_points": len(pts), "method": method})


def _bisect_shift(inner: RateRegion, point: np.ndarray, tol: float) -> float:
    if inner.membership(point):
        return 0.0
    lo, hi = 0.0, float(point.max())
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inner.membership(np.clip(point - mid, 0.0, None)):
            hi = mid
        else:
            lo = mid
    return hi


def region_to_csv(region: RateRegion, fileobj=None) -> str:
    """Dump one row per vertex per member polytope: polytope_id, R1, R2[, R3]."""
    buf = fileobj or io.StringIO()
    cols = ["polytope_id"] + [f"R{i + 1}" for i in range(region.dim)]
    buf.write(",".join(cols) + "\n")
    for pid, v in region.all_vertices():
        buf.write(",".join([str(pid)] + [f"{x:.12g}" for x in v]) + "\n")
    if fileobj is None:
        return buf.getvalue()
    return ""
