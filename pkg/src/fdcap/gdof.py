"""Symmetric generalized-degrees-of-freedom curves.

GDoF is measured numerically at a large finite SNR: for each kappa the channel
is built with INR = SNR^kappa and a matched downlink (|g32|^2 P2 = |g21|^2 P1),
the scheme's region is maximized along the symmetric ray, and the result is
normalized by log2 SNR.  Power-split fractions are searched on an
SNR-exponent grid c = SNR^(-t) since that is the scale on which the
high-SNR tradeoffs live.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scalar
from .channel import ScalarChannel
from .regions import RateRegion

DEFAULT_SNR_DB = 180.0
DEFAULT_SAMPLES = 81
DEFAULT_KAPPA_MAX = 4.0
_EXPONENT_STEP = 0.02

GDOF_SCHEMES = ("proposed", "d2d-split", "uplink-split", "df", "hd",
                "tin", "split-norelay", "cutset")
_3D_CAPABLE = set(GDOF_SCHEMES)


@dataclass(frozen=True)
class GdofPoint:
    kappa: float
    d_sym: float
    scheme: str
    snr_db_used: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if not -1e-9 <= self.d_sym <= 1.5 + 1e-9:
            raise ValueError(f"d_sym out of range: {self.d_sym}")


def gdof_channel(kappa: float, snr_db: float) -> ScalarChannel:
    """Channel with SNR = 10^(snr_db/10), INR = SNR^kappa, matched downlink."""
    snr = 10.0 ** (snr_db / 10.0)
    return ScalarChannel(g21=math.sqrt(snr), g31=snr ** (kappa / 2.0),
                         g32=math.sqrt(snr), p1=1.0, p2=1.0, sigma2=1.0)


def _exponent_fractions(snr: float, t_max: float) -> np.ndarray:
    """Private-power fractions SNR^-t on a dense exponent grid, plus 0 and 1."""
    t = np.arange(0.0, t_max + _EXPONENT_STEP, _EXPONENT_STEP)
    c = snr ** (-t)
    return np.unique(np.concatenate([[0.0, 1.0], c]))


def _region_uplink_split(ch: ScalarChannel, kappa: float) -> RateRegion:
    c = _exponent_fractions(ch.snr, kappa + 2.0)
    bounds = scalar._bounds_uplink_split(ch, 0.0, 1.0 - c, c, 0.0, 1.0)
    return RateRegion.from_bound_table(scalar.PATTERN_UPLINK_SPLIT, bounds)


def _region_d2d_split(ch: ScalarChannel, kappa: float) -> RateRegion:
    c = _exponent_fractions(ch.snr, kappa + 2.0)
    bounds = scalar._bounds_d2d_split(ch, 0.0, 1.0 - c, c, 0.0, 1.0)
    return RateRegion.from_bound_table(scalar.PATTERN_D2D_SPLIT, bounds)


def _region_df(ch: ScalarChannel, kappa: float) -> RateRegion:
    bounds = scalar._bounds_uplink_split(ch, 0.0, 1.0, 0.0, 0.0, 1.0)
    return RateRegion.from_bound_table(scalar.PATTERN_UPLINK_SPLIT, bounds.reshape(1, -1))


def _tdm_extend(region2d: RateRegion, ch: ScalarChannel, n_tau: int = 41) -> RateRegion:
    """Extend a 2D cellular scheme to (R1, R2, R3) by time sharing with a pure
    D2D phase of rate C(inr)."""
    d2d_cap = math.log2(1.0 + ch.inr)
    taus = np.linspace(0.0, 1.0, n_tau)
    groups = []
    for w, b in region2d.groups:
        w3 = np.zeros((w.shape[0] + 1, 3))
        w3[:-1, :2] = w
        w3[-1, 2] = 1.0
        tables = [np.hstack([b * t, np.full((b.shape[0], 1), (1.0 - t) * d2d_cap)])
                  for t in taus]
        groups.append((w3, np.vstack(tables)))
    return RateRegion(groups)


def scheme_region(scheme: str, kappa: float, snr_db: float) -> RateRegion:
    """3D region of a named scheme at the GDoF channel for (kappa, snr_db)."""
    ch = gdof_channel(kappa, snr_db)
    if scheme == "proposed":
        return _region_uplink_split(ch, kappa).union(_region_d2d_split(ch, kappa))
    if scheme == "uplink-split":
        return _region_uplink_split(ch, kappa)
    if scheme == "d2d-split":
        return _region_d2d_split(ch, kappa)
    if scheme == "df":
        return _region_df(ch, kappa)
    if scheme == "hd":
        return scalar.baseline_half_duplex(ch, with_d2d=True)
    if scheme == "tin":
        return _tdm_extend(scalar.baseline_tin(ch), ch)
    if scheme == "split-norelay":
        c = _exponent_fractions(ch.snr, kappa + 2.0)
        bounds = scalar._bounds_no_d2d(ch, 0.0, 1.0 - c, c, 0.0, 1.0)
        region2d = RateRegion.from_bound_table(scalar.PATTERN_NO_D2D, bounds)
        return _tdm_extend(region2d, ch)
    if scheme == "cutset":
        return scalar.cutset_d2d(ch, scalar.ConverseParams(rho=0.0))
    raise ValueError(f"scheme {scheme!r} has no D2D-capable GDoF region")


def symmetric_gdof(scheme: str, kappa: float, snr_db: float = DEFAULT_SNR_DB) -> GdofPoint:
    """Max-min symmetric GDoF of one scheme at one kappa."""
    if snr_db < 60:
        raise ValueError("snr_db must be at least 60 for the asymptotic proxy")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if scheme not in _3D_CAPABLE:
        raise ValueError(f"scheme {scheme!r} does not support the D2D rate R3")
    region = scheme_region(scheme, kappa, snr_db)
    t = region.ray_exit(np.ones(3))
    d = max(t, 0.0) / (snr_db / 10.0 * math.log2(10.0))
    return GdofPoint(kappa=kappa, d_sym=min(d, 1.5), scheme=scheme, snr_db_used=snr_db)


def gdof_curve(scheme: str, kappas, snr_db: float = DEFAULT_SNR_DB) -> np.ndarray:
    return np.array([symmetric_gdof(scheme, float(k), snr_db).d_sym for k in kappas])


def optimal_curve_breakpoints(snr_db: float = DEFAULT_SNR_DB, samples: int = DEFAULT_SAMPLES,
                              kappa_max: float = DEFAULT_KAPPA_MAX,
                              slope_jump: float = 0.15) -> list[float]:
    """Slope-change points of the proposed curve on [0, kappa_max].

    Finite differences of d_sym over the kappa grid; a breakpoint is reported
    where consecutive slopes jump by more than slope_jump (the true segments
    have slopes 0, -1/3, +1/3, 0).  Runs of adjacent detections collapse to
    their midpoint.
    """
    if snr_db < 120:
        raise ValueError("breakpoint detection needs snr_db >= 120")
    if samples < 41:
        raise ValueError("breakpoint detection needs at least 41 kappa samples")
    kappas = np.linspace(0.0, kappa_max, samples)
    d = gdof_curve("proposed", kappas, snr_db)
    slopes = np.diff(d) / np.diff(kappas)
    jumps = np.abs(np.diff(slopes))
    hits = np.nonzero(jumps > slope_jump)[0]
    breakpoints = []
    run = []
    for i in hits:
        if run and i > run[-1] + 1:
            breakpoints.append(float(np.mean(kappas[np.asarray(run) + 1])))
            run = []
        run.append(i)
    if run:
        breakpoints.append(float(np.mean(kappas[np.asarray(run) + 1])))
    return breakpoints
