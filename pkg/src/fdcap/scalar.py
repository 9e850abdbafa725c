"""Scalar-Gaussian rate regions: rate-splitting inner bounds, genie-aided outer
bounds, exact capacity in the very-strong regime, and the baseline schemes.

Every builder evaluates the closed-form bound expressions for one parameter
tuple (returning a single-polytope region) or for a whole parameter grid
(returning a shared-pattern union), always in bit/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ScalarChannel, capacity_fn
from .regions import RateRegion, pareto_prune_rows

# constraint weight patterns reused by the grid unions
PATTERN_NO_D2D = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
PATTERN_D2D_SPLIT = np.array(
    [[1, 0, 0], [0, 1, 0], [1, 0, 1], [1, 1, 1], [1, 1, 1]], dtype=float)
PATTERN_UPLINK_SPLIT = np.array(
    [[0, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=float)
PATTERN_OUTER_D2D = np.array(
    [[1, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1],
     [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=float)

DEFAULT_SCHEME_GRID = 21
DEFAULT_RHO_GRID = 41
DEFAULT_ALPHA_GRID = 21
DEFAULT_BETA_GRID = 21


@dataclass(frozen=True)
class SchemeParams:
    """Power-split fractions of the rate-splitting schemes."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d, self.e)
        if any(v < -1e-12 for v in vals):
            raise ValueError("scheme parameters must be nonnegative")
        if self.a + self.b + self.c > 1.0 + 1e-9:
            raise ValueError("a + b + c must not exceed 1")
        if self.d + self.e > 1.0 + 1e-9:
            raise ValueError("d + e must not exceed 1")


@dataclass(frozen=True)
class ConverseParams:
    """Input correlation rho and the genie entropy-split parameters."""

    rho: float
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not -1.0 - 1e-12 <= self.rho <= 1.0 + 1e-12:
            raise ValueError("rho must lie in [-1, 1]")
        if not 0.0 <= self.alpha <= 1.0 or not 0.0 <= self.beta <= 1.0:
            raise ValueError("alpha and beta must lie in [0, 1]")


def _log2p1(x):
    """Vectorized log2(1 + x) with tiny negative roundoff clipped."""
    return np.log2(1.0 + np.clip(x, 0.0, None))


# --------------------------------------------------------------------------
# inner bounds
# --------------------------------------------------------------------------

def _bounds_no_d2d(ch: ScalarChannel, a, b, c, d, e) -> np.ndarray:
    """Bound columns (R1, R2, R1+R2) of the no-D2D rate-splitting region."""
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    r1 = _log2p1((b + c) * h21 / s2)
    r2 = _log2p1(e * h32 / (s2 + c * h31))
    rsum = _log2p1(((a + b) * h31 + h32 + j * np.sqrt(np.clip(np.asarray(a) * np.asarray(d), 0.0, None))) / (s2 + c * h31)) \
        + _log2p1(c * h21 / s2)
    return np.stack(np.broadcast_arrays(r1, r2, rsum), axis=-1)


def inner_no_d2d(ch: ScalarChannel, sp: SchemeParams) -> RateRegion:
    """Uplink rate-splitting inner bound without D2D (three inequalities)."""
    b = _bounds_no_d2d(ch, sp.a, sp.b, sp.c, sp.d, sp.e)
    return RateRegion.from_bound_table(PATTERN_NO_D2D, b.reshape(1, -1))


def capacity_very_strong(ch: ScalarChannel) -> RateRegion | None:
    """Exact capacity box in the very strong interference regime, else None."""
    if abs(ch.g31) ** 2 < abs(ch.g21) ** 2 * (1.0 + abs(ch.g32) ** 2):
        return None
    return RateRegion.from_halfspaces([
        ((1.0, 0.0), capacity_fn(ch.snr)),
        ((0.0, 1.0), capacity_fn(ch.downlink_snr)),
    ])


def _bounds_d2d_split(ch: ScalarChannel, a, b, c, d, e) -> np.ndarray:
    """Bound columns (R1, R2, R1+R3, sum, sum) of the D2D rate-splitting region."""
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    r1 = _log2p1(b * h21 / (s2 + c * h21))
    r2 = _log2p1(e * h32 / s2)
    r13 = r1 + _log2p1(c * h31 / s2)
    sum_a = _log2p1((h31 + h32 + j * np.sqrt(np.clip(np.asarray(a) * np.asarray(d), 0.0, None))) / s2)
    sum_b = _log2p1((c * h31 + e * h32) / s2) + r1
    return np.stack(np.broadcast_arrays(r1, r2, r13, sum_a, sum_b), axis=-1)


def inner_d2d_split(ch: ScalarChannel, sp: SchemeParams) -> RateRegion:
    """D2D rate-splitting inner bound; the min{} sum pair becomes two halfspaces."""
    b = _bounds_d2d_split(ch, sp.a, sp.b, sp.c, sp.d, sp.e)
    return RateRegion.from_bound_table(PATTERN_D2D_SPLIT, b.reshape(1, -1))


def _bounds_uplink_split(ch: ScalarChannel, a, b, c, d, e) -> np.ndarray:
    """Bound columns (R2, R1+R3, R2+R3, sum) of the uplink rate-splitting region."""
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    r2 = _log2p1(e * h32 / (s2 + c * h31))
    r13 = _log2p1((b + c) * h21 / s2)
    r23 = _log2p1(((a + b) * h31 + h32 + j * np.sqrt(np.clip(np.asarray(a) * np.asarray(d), 0.0, None))) / (s2 + c * h31))
    rsum = r23 + _log2p1(c * h21 / s2)
    return np.stack(np.broadcast_arrays(r2, r13, r23, rsum), axis=-1)


def inner_uplink_split(ch: ScalarChannel, sp: SchemeParams) -> RateRegion:
    """Uplink rate-splitting inner bound for the D2D model (four inequalities).

    Its R3 = 0 slice reproduces inner_no_d2d exactly.
    """
    b = _bounds_uplink_split(ch, sp.a, sp.b, sp.c, sp.d, sp.e)
    return RateRegion.from_bound_table(PATTERN_UPLINK_SPLIT, b.reshape(1, -1))


# --------------------------------------------------------------------------
# outer bounds
# --------------------------------------------------------------------------

def _bounds_outer_no_d2d(ch: ScalarChannel, rho) -> np.ndarray:
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    om = 1.0 - np.asarray(rho) ** 2
    r1 = _log2p1(om * h21 / s2)
    r2 = _log2p1(om * h32 / s2)
    rsum = _log2p1((h31 + h32 + j * np.asarray(rho)) / s2) \
        + _log2p1(om * h21 / (s2 + om * h31))
    return np.stack(np.broadcast_arrays(r1, r2, rsum), axis=-1)


def outer_no_d2d(ch: ScalarChannel, cp: ConverseParams) -> RateRegion:
    """Genie-aided converse without D2D for one correlation coefficient."""
    b = _bounds_outer_no_d2d(ch, cp.rho)
    return RateRegion.from_bound_table(PATTERN_NO_D2D, b.reshape(1, -1))


def _bounds_outer_d2d(ch: ScalarChannel, rho, alpha, beta) -> np.ndarray:
    """Bound columns (R1a, R1b, R2, R3a, R3b, R1+R3, R2+R3, sum)."""
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    rho = np.asarray(rho, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    om = 1.0 - rho ** 2
    both = (h21 + h31)
    r1a = _log2p1(om * h21 / (s2 + alpha * om * h21))
    r1b = _log2p1(beta * om * both / s2)
    r2 = _log2p1(om * h32 / s2)
    r3a = _log2p1(alpha * om * both / s2)
    r3b = _log2p1(om * both / (s2 + beta * om * both))
    r13 = _log2p1(om * both / s2)
    r23 = _log2p1((h31 + h32 + j * rho) / s2)
    rsum = r23 + _log2p1(om * h21 / (s2 + om * h31))
    return np.stack(np.broadcast_arrays(r1a, r1b, r2, r3a, r3b, r13, r23, rsum), axis=-1)


def outer_d2d(ch: ScalarChannel, cp: ConverseParams) -> RateRegion:
    """Genie-aided converse with D2D for one (rho, alpha, beta).

    The two min{} groups are expanded into pairs of halfspaces.
    """
    b = _bounds_outer_d2d(ch, cp.rho, cp.alpha, cp.beta)
    return RateRegion.from_bound_table(PATTERN_OUTER_D2D, b.reshape(1, -1))


def outer_relaxed(ch: ScalarChannel) -> RateRegion:
    """Parameter-free relaxation of the D2D converse (five inequalities)."""
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    return RateRegion.from_halfspaces([
        ((1.0, 0.0, 0.0), capacity_fn(h21 / s2)),
        ((0.0, 1.0, 0.0), capacity_fn(h32 / s2)),
        ((1.0, 0.0, 1.0), capacity_fn((h21 + h31) / s2)),
        ((0.0, 1.0, 1.0), capacity_fn((h31 + h32 + j) / s2)),
        ((1.0, 1.0, 1.0), capacity_fn((h31 + h32 + j) / s2)
         + capacity_fn(h21 / (s2 + h31))),
    ])


def cutset_no_d2d(ch: ScalarChannel, cp: ConverseParams) -> RateRegion:
    """Cut-set box without D2D: the converse with the sum constraint removed."""
    b = _bounds_outer_no_d2d(ch, cp.rho)
    return RateRegion.from_bound_table(np.eye(2), b.reshape(1, -1)[:, :2])


def cutset_d2d(ch: ScalarChannel, cp: ConverseParams) -> RateRegion:
    """Cut-set inequalities of the D2D model (no genie terms, no sum bound)."""
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    om = 1.0 - cp.rho ** 2
    return RateRegion.from_halfspaces([
        ((1.0, 0.0, 0.0), capacity_fn(om * h21 / s2)),
        ((0.0, 1.0, 0.0), capacity_fn(om * h32 / s2)),
        ((1.0, 0.0, 1.0), capacity_fn(om * (h21 + h31) / s2)),
        ((0.0, 1.0, 1.0), capacity_fn((h31 + h32 + j * cp.rho) / s2)),
    ])


# --------------------------------------------------------------------------
# baselines
# --------------------------------------------------------------------------

def baseline_half_duplex(ch: ScalarChannel, with_d2d: bool = False) -> RateRegion:
    """Orthogonal time sharing across uplink, downlink (and D2D) phases.

    The hull over all phase fractions is exactly one halfspace
    sum_i r_i / C_i <= 1 over the per-phase capacities C_i, with r_i = 0
    forced where C_i = 0.
    """
    caps = [capacity_fn(ch.snr), capacity_fn(ch.downlink_snr)]
    if with_d2d:
        caps.append(capacity_fn(ch.inr))
    dim = len(caps)
    rows, bounds = [], []
    share = np.zeros(dim)
    for i, c in enumerate(caps):
        if c > 0:
            share[i] = 1.0 / c
        else:
            w = np.zeros(dim)
            w[i] = 1.0
            rows.append(w)
            bounds.append(0.0)
    if share.any():
        rows.append(share)
        bounds.append(1.0)
    return RateRegion.from_halfspaces(list(zip(rows, bounds)))


def baseline_tin(ch: ScalarChannel) -> RateRegion:
    """Full-duplex with interference treated as noise at the downlink user."""
    return RateRegion.from_halfspaces([
        ((1.0, 0.0), capacity_fn(ch.snr)),
        ((0.0, 1.0), capacity_fn(abs(ch.g32) ** 2 * ch.p2
                                 / (ch.sigma2 + abs(ch.g31) ** 2 * ch.p1))),
    ])


def baseline_split_no_relay(ch: ScalarChannel, sp: SchemeParams) -> RateRegion:
    """Uplink splitting with the relay path disabled (a = d = 0 enforced)."""
    if sp.a != 0 or sp.d != 0:
        raise ValueError("split-no-relay requires a = 0 and d = 0")
    return inner_no_d2d(ch, sp)


def baseline_decode_forward(ch: ScalarChannel, sp: SchemeParams) -> RateRegion:
    """Decode-and-forward benchmark: uplink splitting with no private part (c = 0)."""
    if sp.c != 0:
        raise ValueError("decode-forward requires c = 0")
    return inner_uplink_split(ch, sp)


# --------------------------------------------------------------------------
# parameter grids (shared-pattern unions)
# --------------------------------------------------------------------------

def _simplex_pairs(n: int):
    """(b, c) grid points with b + c <= 1."""
    v = np.linspace(0.0, 1.0, n)
    b, c = np.meshgrid(v, v, indexing="ij")
    keep = b + c <= 1.0 + 1e-12
    return b[keep], c[keep]


def appendix_gap_c_fraction(ch: ScalarChannel, scheme: str) -> float:
    """Closed-form private-power fraction from the constant-gap proof:
    c = min(1, sigma^2 / (|g|^2 P1)) with g = g21 for the D2D split and
    g = g31 for the uplink split."""
    g = ch.g21 if scheme == "d2d-split" else ch.g31
    denom = abs(g) ** 2 * ch.p1
    if denom <= 0:
        return 1.0
    return min(1.0, ch.sigma2 / denom)


def appendix_gap_params(ch: ScalarChannel, scheme: str) -> SchemeParams:
    """The a=d=0, e=1, b=1-c setting used by the constant-gap proof."""
    c = appendix_gap_c_fraction(ch, scheme)
    return SchemeParams(a=0.0, b=1.0 - c, c=c, d=0.0, e=1.0)


def strong_coupled_params(rho: float) -> SchemeParams:
    """Strong-interference coupling a = d = rho^2, b = e = 1 - rho^2, c = 0."""
    r2 = min(rho * rho, 1.0)
    return SchemeParams(a=r2, b=1.0 - r2, c=0.0, d=r2, e=1.0 - r2)


def grid_inner_no_d2d(ch: ScalarChannel, n: int = DEFAULT_SCHEME_GRID,
                      rho_grid: np.ndarray | None = None) -> RateRegion:
    """Union of the no-D2D inner bound over the scheme-parameter grid.

    Since a and d only help (they enter monotonically through the coherent
    term and the relayed power), the grid keeps a = 1 - b - c and d = 1 - e.
    The proof's closed-form tuples (the Appendix-gap setting and, for each
    outer rho, the strong-interference coupling) are appended so the
    theoretical gap guarantees carry over to the grid search exactly.
    """
    b, c = _simplex_pairs(n)
    e = np.linspace(0.0, 1.0, n)
    bb = np.repeat(b, n)
    cc = np.repeat(c, n)
    ee = np.tile(e, len(b))
    aa = 1.0 - bb - cc
    dd = 1.0 - ee
    extras = [appendix_gap_params(ch, "uplink-split"), appendix_gap_params(ch, "d2d-split")]
    if rho_grid is None:
        rho_grid = np.linspace(-1.0, 1.0, DEFAULT_RHO_GRID)
    extras.extend(strong_coupled_params(r) for r in rho_grid)
    aa = np.concatenate([aa, [p.a for p in extras]])
    bb = np.concatenate([bb, [p.b for p in extras]])
    cc = np.concatenate([cc, [p.c for p in extras]])
    dd = np.concatenate([dd, [p.d for p in extras]])
    ee = np.concatenate([ee, [p.e for p in extras]])
    bounds = pareto_prune_rows(_bounds_no_d2d(ch, aa, bb, cc, dd, ee))
    return RateRegion.from_bound_table(PATTERN_NO_D2D, bounds)


def grid_inner_d2d_split(ch: ScalarChannel, n: int = DEFAULT_SCHEME_GRID) -> RateRegion:
    """Union of the D2D-splitting bound over its grid (a = 1-b-c, d = 1-e kept:
    both enter only through the coherent term)."""
    b, c = _simplex_pairs(n)
    e = np.linspace(0.0, 1.0, n)
    bb = np.repeat(b, n)
    cc = np.repeat(c, n)
    ee = np.tile(e, len(b))
    aa = 1.0 - bb - cc
    dd = 1.0 - ee
    p = appendix_gap_params(ch, "d2d-split")
    aa = np.concatenate([aa, [p.a]])
    bb = np.concatenate([bb, [p.b]])
    cc = np.concatenate([cc, [p.c]])
    dd = np.concatenate([dd, [p.d]])
    ee = np.concatenate([ee, [p.e]])
    bounds = pareto_prune_rows(_bounds_d2d_split(ch, aa, bb, cc, dd, ee))
    return RateRegion.from_bound_table(PATTERN_D2D_SPLIT, bounds)


def grid_inner_uplink_split(ch: ScalarChannel, n: int = DEFAULT_SCHEME_GRID) -> RateRegion:
    """Union of the uplink-splitting bound over its grid.  Every bound is
    nondecreasing in b (through b+c and a+b) and, for fixed (b, c), in a, so
    the saturated a = 1 - b - c family covers the whole frontier; d = 1 - e
    likewise."""
    b, c = _simplex_pairs(n)
    e = np.linspace(0.0, 1.0, n)
    bb = np.repeat(b, n)
    cc = np.repeat(c, n)
    ee = np.tile(e, len(b))
    aa = 1.0 - bb - cc
    dd = 1.0 - ee
    p = appendix_gap_params(ch, "uplink-split")
    aa = np.concatenate([aa, [p.a]])
    bb = np.concatenate([bb, [p.b]])
    cc = np.concatenate([cc, [p.c]])
    dd = np.concatenate([dd, [p.d]])
    ee = np.concatenate([ee, [p.e]])
    bounds = pareto_prune_rows(_bounds_uplink_split(ch, aa, bb, cc, dd, ee))
    return RateRegion.from_bound_table(PATTERN_UPLINK_SPLIT, bounds)


def grid_outer_no_d2d(ch: ScalarChannel, n_rho: int = DEFAULT_RHO_GRID) -> RateRegion:
    rho = np.linspace(-1.0, 1.0, n_rho)
    bounds = _bounds_outer_no_d2d(ch, rho)
    return RateRegion.from_bound_table(PATTERN_NO_D2D, bounds)


def grid_outer_d2d(ch: ScalarChannel, n_rho: int = DEFAULT_RHO_GRID,
                   n_alpha: int = DEFAULT_ALPHA_GRID, n_beta: int = DEFAULT_BETA_GRID,
                   prune: bool = True) -> RateRegion:
    """Union of the D2D converse over the (rho, alpha, beta) grid.

    Within a rho slice only the R1 and R3 bounds depend on (alpha, beta), so
    members whose (R1, R3) bound pair is dominated add nothing to the union
    and are dropped when prune is set.
    """
    rho = np.linspace(-1.0, 1.0, n_rho)
    alpha = np.linspace(0.0, 1.0, n_alpha)
    beta = np.linspace(0.0, 1.0, n_beta)
    tables = []
    ag, bg = np.meshgrid(alpha, beta, indexing="ij")
    ag, bg = ag.ravel(), bg.ravel()
    for r in rho:
        bounds = _bounds_outer_d2d(ch, r, ag, bg)
        if prune:
            r1 = np.minimum(bounds[:, 0], bounds[:, 1])
            r3 = np.minimum(bounds[:, 3], bounds[:, 4])
            keep = _pareto2_keep(r1, r3)
            bounds = bounds[keep]
        tables.append(bounds)
    table = np.vstack(tables)
    if prune:
        table = pareto_prune_rows(table)
    return RateRegion.from_bound_table(PATTERN_OUTER_D2D, table)


def _pareto2_keep(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the Pareto-maximal (x, y) pairs (staircase)."""
    order = np.lexsort((-y, -x))
    keep = []
    best_y = -math.inf
    for i in order:
        if y[i] > best_y + 1e-15:
            keep.append(i)
            best_y = y[i]
    return np.asarray(sorted(keep), dtype=int)


def grid_baseline_split_no_relay(ch: ScalarChannel, n: int = DEFAULT_SCHEME_GRID) -> RateRegion:
    b, c = _simplex_pairs(n)
    e = np.linspace(0.0, 1.0, n)
    bb = np.repeat(b, n)
    cc = np.repeat(c, n)
    ee = np.tile(e, len(b))
    bounds = _bounds_no_d2d(ch, 0.0, bb, cc, 0.0, ee)
    return RateRegion.from_bound_table(PATTERN_NO_D2D, bounds)


def grid_baseline_decode_forward(ch: ScalarChannel, n: int = DEFAULT_SCHEME_GRID) -> RateRegion:
    a = np.linspace(0.0, 1.0, n)
    e = np.linspace(0.0, 1.0, n)
    aa = np.repeat(a, n)
    ee = np.tile(e, len(a))
    bb = 1.0 - aa
    dd = 1.0 - ee
    bounds = _bounds_uplink_split(ch, aa, bb, 0.0, dd, ee)
    return RateRegion.from_bound_table(PATTERN_UPLINK_SPLIT, bounds)
