"""Constant-gap analysis: exhaustive-search gaps between the inner and outer
regions, the strong/very-strong regime results, the closed-form proof
parameters, and SNR/INR gap maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import scalar
from .channel import ScalarChannel, capacity_fn
from .regions import GapResult, RateRegion, constant_gap

SCHEME_D2D = "d2d-split"
SCHEME_UPLINK = "uplink-split"


@dataclass(frozen=True)
class GridConfig:
    """Grid resolutions for the exhaustive parameter searches."""

    scheme: int = scalar.DEFAULT_SCHEME_GRID
    rho: int = scalar.DEFAULT_RHO_GRID
    alpha: int = scalar.DEFAULT_ALPHA_GRID
    beta: int = scalar.DEFAULT_BETA_GRID
    fan: int | None = None

    def __post_init__(self):
        if min(self.scheme, self.rho, self.alpha, self.beta) < 2:
            raise ValueError("every parameter grid needs at least 2 points")


@dataclass(frozen=True)
class GapMapCell:
    snr_db: float
    inr_db: float
    gap_bits: float
    scheme_selector: str


def scheme_by_condition(ch: ScalarChannel) -> str:
    """Pick the rate-splitting scheme from the channel condition |g31| >= |g21|."""
    return SCHEME_D2D if abs(ch.g31) >= abs(ch.g21) else SCHEME_UPLINK


def strong_interference_constant() -> float:
    """Gap value 1/2 + 1/2 log2((sqrt(2)+1)/2) of the strong-interference regime."""
    return 0.5 + 0.5 * math.log2((math.sqrt(2.0) + 1.0) / 2.0)


def thm8_lambda(ch: ScalarChannel) -> float:
    j = ch.coherent_j
    if j <= 0:
        raise ValueError("lambda is undefined when the coherent term J is zero")
    return (abs(ch.g31) ** 2 * ch.p1 + abs(ch.g32) ** 2 * ch.p2 + ch.sigma2) / j


def thm8_gap_bound(ch: ScalarChannel, rho: float) -> float:
    """Strong-interference gap bound (1 + log2((lambda+rho)/(lambda+rho^2))) / 2.

    Requires |g31| >= |g21|.  With J = 0 the coherent term vanishes
    identically and the rho = 0 value 1/2 is returned.
    """
    if abs(ch.g31) < abs(ch.g21):
        raise ValueError("the strong-interference bound needs |g31| >= |g21|")
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    if ch.coherent_j <= 0:
        return 0.5
    lam = thm8_lambda(ch)
    return 0.5 * (1.0 + math.log2((lam + rho) / (lam + rho * rho)))


def thm8_optimal_rho(lam: float) -> float:
    """Maximizer of (lambda + rho)/(lambda + rho^2) over rho in [-1, 1]."""
    return min(1.0, math.sqrt(lam * lam + lam) - lam)


def channel_from_snr(snr_db: float, inr_db: float, ratio: float = 1.0) -> ScalarChannel:
    """Unit-power channel with the given uplink SNR/INR (dB) and
    downlink-to-uplink received power ratio |g32|^2 P2 = ratio * |g21|^2 P1."""
    snr = 10.0 ** (snr_db / 10.0)
    inr = 10.0 ** (inr_db / 10.0)
    return ScalarChannel(g21=math.sqrt(snr), g31=math.sqrt(inr),
                         g32=math.sqrt(ratio * snr), p1=1.0, p2=1.0, sigma2=1.0)


def build_inner_region(ch: ScalarChannel, with_d2d: bool, grids: GridConfig,
                       schemes=(SCHEME_D2D, SCHEME_UPLINK), hull: bool = False) -> RateRegion:
    if not with_d2d:
        region = scalar.grid_inner_no_d2d(ch, grids.scheme,
                                          rho_grid=np.linspace(-1, 1, grids.rho))
    else:
        parts = []
        if SCHEME_D2D in schemes:
            parts.append(scalar.grid_inner_d2d_split(ch, grids.scheme))
        if SCHEME_UPLINK in schemes:
            parts.append(scalar.grid_inner_uplink_split(ch, grids.scheme))
        if not parts:
            raise ValueError("at least one rate-splitting scheme must be enabled")
        region = parts[0]
        for p in parts[1:]:
            region = region.union(p)
    return region.with_hull(True) if hull else region


def build_outer_region(ch: ScalarChannel, with_d2d: bool, grids: GridConfig) -> RateRegion:
    if with_d2d:
        return scalar.grid_outer_d2d(ch, grids.rho, grids.alpha, grids.beta)
    return scalar.grid_outer_no_d2d(ch, grids.rho)


def optimized_gap(ch: ScalarChannel, with_d2d: bool, grids: GridConfig | None = None,
                  schemes=(SCHEME_D2D, SCHEME_UPLINK), hull: bool = False) -> GapResult:
    """Constant gap between the grid-optimized outer and inner regions."""
    grids = grids or GridConfig()
    if grids.scheme < 2:
        raise ValueError("empty parameter grid")
    inner = build_inner_region(ch, with_d2d, grids, schemes=schemes, hull=hull)
    outer = build_outer_region(ch, with_d2d, grids)
    res = constant_gap(outer, inner, fan=grids.fan)
    lam = rho = None
    if not with_d2d and abs(ch.g31) >= abs(ch.g21) and ch.coherent_j > 0:
        lam = thm8_lambda(ch)
        rho = thm8_optimal_rho(lam)
    return GapResult(delta=res.delta, witness=res.witness,
                     lambda_star=lam, rho_star=rho, meta=res.meta)


# --------------------------------------------------------------------------
# per-inequality slack report for the closed-form proof parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SlackEntry:
    label: str
    outer_bound: float
    inner_bound: float
    n_rates: int

    @property
    def per_rate_slack(self) -> float:
        return (self.outer_bound - self.inner_bound) / self.n_rates


@dataclass(frozen=True)
class AppendixGapReport:
    scheme: str
    params: scalar.SchemeParams
    entries: tuple

    @property
    def max_per_rate_slack(self) -> float:
        return max(e.per_rate_slack for e in self.entries)


def appendix_c_check(ch: ScalarChannel) -> AppendixGapReport:
    """Evaluate the proof's closed-form parameters against the relaxed outer
    bound and report the per-rate slack of each matched inequality pair."""
    scheme = scheme_by_condition(ch)
    params = scalar.appendix_gap_params(ch, scheme)
    h21 = abs(ch.g21) ** 2 * ch.p1
    h31 = abs(ch.g31) ** 2 * ch.p1
    h32 = abs(ch.g32) ** 2 * ch.p2
    s2 = ch.sigma2
    j = ch.coherent_j
    # relaxed outer bounds: R1, R2, R1+R3, R2+R3, sum
    o1 = capacity_fn(h21 / s2)
    o2 = capacity_fn(h32 / s2)
    o3 = capacity_fn((h21 + h31) / s2)
    o4 = capacity_fn((h31 + h32 + j) / s2)
    o5 = o4 + capacity_fn(h21 / (s2 + h31))
    if scheme == SCHEME_D2D:
        b = scalar._bounds_d2d_split(ch, params.a, params.b, params.c,
                                     params.d, params.e).ravel()
        entries = (
            SlackEntry("R1", o1, float(b[0]), 1),
            SlackEntry("R2", o2, float(b[1]), 1),
            SlackEntry("R1+R3", o3, float(b[2]), 2),
            SlackEntry("R1+R2+R3", o5, float(min(b[3], b[4])), 3),
        )
    else:
        b = scalar._bounds_uplink_split(ch, params.a, params.b, params.c,
                                        params.d, params.e).ravel()
        entries = (
            SlackEntry("R2", o2, float(b[0]), 1),
            SlackEntry("R1+R3", o3, float(b[1]), 2),
            SlackEntry("R2+R3", o4, float(b[2]), 2),
            SlackEntry("R1+R2+R3", o5, float(b[3]), 3),
        )
    return AppendixGapReport(scheme=scheme, params=params, entries=entries)


def appendix_c_gap(ch: ScalarChannel, with_d2d: bool = True,
                   grids: GridConfig | None = None) -> GapResult:
    """Gap when the inner region is pinned to the closed-form proof parameters."""
    grids = grids or GridConfig()
    scheme = scheme_by_condition(ch)
    params = scalar.appendix_gap_params(ch, scheme)
    if with_d2d:
        inner = (scalar.inner_d2d_split(ch, params) if scheme == SCHEME_D2D
                 else scalar.inner_uplink_split(ch, params))
    else:
        inner = scalar.inner_no_d2d(ch, scalar.appendix_gap_params(ch, SCHEME_UPLINK))
    outer = build_outer_region(ch, with_d2d, grids)
    return constant_gap(outer, inner, fan=grids.fan)


def parse_ratio(text: str) -> float:
    """Parse a downlink:uplink strength ratio like '5:1' into a float."""
    if isinstance(text, (int, float)):
        return float(text)
    left, _, right = text.partition(":")
    if not right:
        return float(left)
    return float(left) / float(right)


@dataclass(frozen=True)
class CellGaps:
    """Gaps of one channel cell: the scheme union plus each scheme alone."""

    union: float
    d2d_only: float
    uplink_only: float

    def for_scheme(self, scheme: str) -> float:
        return self.d2d_only if scheme == SCHEME_D2D else self.uplink_only


def d2d_cell_gaps(ch: ScalarChannel, grids: GridConfig | None = None) -> CellGaps:
    """Union and per-scheme D2D gaps from a single outer boundary pass.

    The union's needed shift at each boundary point is the pointwise minimum
    of the two schemes' shifts, so all three gaps come from one sweep.
    """
    from .regions import sample_outer_boundary, shift_needed

    grids = grids or GridConfig()
    outer = build_outer_region(ch, True, grids)
    pts = sample_outer_boundary(outer, fan=grids.fan)
    s_d2d = shift_needed(scalar.grid_inner_d2d_split(ch, grids.scheme), pts)
    s_up = shift_needed(scalar.grid_inner_uplink_split(ch, grids.scheme), pts)
    if not (np.all(np.isfinite(s_d2d)) and np.all(np.isfinite(s_up))):
        raise ValueError("inner regions could not absorb an outer boundary point")
    return CellGaps(union=float(np.minimum(s_d2d, s_up).max()),
                    d2d_only=float(s_d2d.max()), uplink_only=float(s_up.max()))


def gap_map(snr_range_db, inr_range_db, ratio=1.0, with_d2d: bool = False,
            grids: GridConfig | None = None, isolate_condition_scheme: bool = False):
    """Grid of optimized gaps over (SNR, INR) dB axes at a fixed downlink ratio.

    With isolate_condition_scheme the inner union is restricted to the scheme
    selected by the channel condition, which is how the per-condition
    constant-gap statement is verified cell by cell.
    """
    snr_range_db = np.atleast_1d(np.asarray(snr_range_db, dtype=float))
    inr_range_db = np.atleast_1d(np.asarray(inr_range_db, dtype=float))
    if snr_range_db.size == 0 or inr_range_db.size == 0:
        raise ValueError("gap map ranges must be nonempty")
    ratio = parse_ratio(ratio)
    grids = grids or GridConfig()
    cells = []
    for snr_db in snr_range_db:
        for inr_db in inr_range_db:
            ch = channel_from_snr(snr_db, inr_db, ratio)
            if with_d2d:
                selector = scheme_by_condition(ch)
                g = d2d_cell_gaps(ch, grids)
                gap = g.for_scheme(selector) if isolate_condition_scheme else g.union
            else:
                selector = "n/a"
                gap = optimized_gap(ch, False, grids).delta
            cells.append(GapMapCell(snr_db=float(snr_db), inr_db=float(inr_db),
                                    gap_bits=max(gap, 0.0),
                                    scheme_selector=selector))
    return cells
