"""Channel instances: scalar Gaussian, vector Gaussian, and link-budget construction.

All powers are linear watts per Hz of bandwidth; rates downstream come out in
bit/s/Hz.  dB/dBm conversions live here so every experiment uses the same
link budget arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


def capacity_fn(x: float) -> float:
    """Shannon rate log2(1 + x) for a nonnegative SNR-like argument."""
    if x < 0:
        raise ValueError(f"capacity argument must be nonnegative, got {x}")
    return math.log2(1.0 + x)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError("dB conversion needs a positive value")
    return 10.0 * math.log10(x)


def dbm_per_hz_to_watts(x_dbm: float) -> float:
    """dBm/Hz to W/Hz (per-Hz normalization, so rates are per Hz)."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def pathloss_db(distance_km: float) -> float:
    """Urban pathloss at the given distance in km, returned as a (negative) gain in dB."""
    if distance_km <= 0:
        raise ValueError(f"distance must be positive, got {distance_km} km")
    return -128.1 - 37.6 * math.log10(distance_km)


@dataclass(frozen=True)
class ScalarChannel:
    """One scalar Gaussian network instance.

    g21: uplink gain (user 1 -> BS), g31: cross gain (user 1 -> user 3),
    g32: downlink gain (BS -> user 3).  p1, p2 are the node transmit powers
    and sigma2 the common receiver noise power.
    """

    g21: complex
    g31: complex
    g32: complex
    p1: float
    p2: float
    sigma2: float

    def __post_init__(self):
        if not (self.p1 > 0 and self.p2 > 0 and self.sigma2 > 0):
            raise ValueError("p1, p2, sigma2 must all be positive")
        for name in ("g21", "g31", "g32"):
            g = getattr(self, name)
            if not math.isfinite(abs(g)):
                raise ValueError(f"{name} must be finite")

    @property
    def snr(self) -> float:
        """Uplink SNR |g21|^2 P1 / sigma^2."""
        return abs(self.g21) ** 2 * self.p1 / self.sigma2

    @property
    def inr(self) -> float:
        """Cross-link INR |g31|^2 P1 / sigma^2."""
        return abs(self.g31) ** 2 * self.p1 / self.sigma2

    @property
    def downlink_snr(self) -> float:
        """Downlink SNR |g32|^2 P2 / sigma^2."""
        return abs(self.g32) ** 2 * self.p2 / self.sigma2

    @property
    def coherent_j(self) -> float:
        """Coherent-combining power term J = 2 |g31 g32| sqrt(P1 P2)."""
        return 2.0 * abs(self.g31) * abs(self.g32) * math.sqrt(self.p1 * self.p2)

    def to_dict(self) -> dict:
        return {
            "g21": [self.g21.real, self.g21.imag],
            "g31": [self.g31.real, self.g31.imag],
            "g32": [self.g32.real, self.g32.imag],
            "p1": self.p1,
            "p2": self.p2,
            "sigma2": self.sigma2,
        }


@dataclass(frozen=True)
class MimoChannel:
    """Vector Gaussian instance.  Antenna counts are implied by matrix shapes."""

    g21: np.ndarray  # (L2_rx, L1_tx)
    g31: np.ndarray  # (L3_rx, L1_tx)
    g32: np.ndarray  # (L3_rx, L2_tx)
    p1: float
    p2: float
    sigma2: float

    def __post_init__(self):
        g21 = np.atleast_2d(np.asarray(self.g21, dtype=complex))
        g31 = np.atleast_2d(np.asarray(self.g31, dtype=complex))
        g32 = np.atleast_2d(np.asarray(self.g32, dtype=complex))
        object.__setattr__(self, "g21", g21)
        object.__setattr__(self, "g31", g31)
        object.__setattr__(self, "g32", g32)
        if not (self.p1 > 0 and self.p2 > 0 and self.sigma2 > 0):
            raise ValueError("p1, p2, sigma2 must all be positive")
        if g21.shape[1] != g31.shape[1]:
            raise ValueError("g21 and g31 must agree on the node-1 antenna count")
        if g31.shape[0] != g32.shape[0]:
            raise ValueError("g31 and g32 must agree on the node-3 antenna count")
        if min(g21.shape + g31.shape + g32.shape) < 1:
            raise ValueError("all antenna counts must be >= 1")

    @property
    def l1_tx(self) -> int:
        return self.g21.shape[1]

    @property
    def l2_rx(self) -> int:
        return self.g21.shape[0]

    @property
    def l2_tx(self) -> int:
        return self.g32.shape[1]

    @property
    def l3_rx(self) -> int:
        return self.g31.shape[0]


@dataclass(frozen=True)
class LinkBudget:
    """Cellular deployment geometry plus PSD levels, all in dB units."""

    bs_user_distance_km: float
    user_user_distance_km: float
    tx_psd_dbm_hz: float = -47.0
    noise_psd_dbm_hz: float = -169.0

    def __post_init__(self):
        if self.bs_user_distance_km <= 0 or self.user_user_distance_km <= 0:
            raise ValueError("distances must be positive")


def build_from_link_budget(lb: LinkBudget) -> ScalarChannel:
    """Scalar channel for the standard topology: both users at the BS distance,
    cross link at the user-to-user distance, real nonnegative gains."""
    g_bs = math.sqrt(db_to_linear(pathloss_db(lb.bs_user_distance_km)))
    g_uu = math.sqrt(db_to_linear(pathloss_db(lb.user_user_distance_km)))
    p = dbm_per_hz_to_watts(lb.tx_psd_dbm_hz)
    sigma2 = dbm_per_hz_to_watts(lb.noise_psd_dbm_hz)
    return ScalarChannel(g21=g_bs, g31=g_uu, g32=g_bs, p1=p, p2=p, sigma2=sigma2)


def _complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    raise ValueError(f"cannot parse complex gain from {v!r}")


def scalar_channel_from_dict(data: dict) -> ScalarChannel:
    """Parse the JSON channel description: either explicit gains/powers or a
    link_budget object with the four LinkBudget fields."""
    if "link_budget" in data:
        return build_from_link_budget(LinkBudget(**data["link_budget"]))
    return ScalarChannel(
        g21=_complex_from_json(data["g21"]),
        g31=_complex_from_json(data["g31"]),
        g32=_complex_from_json(data["g32"]),
        p1=float(data["p1"]),
        p2=float(data["p2"]),
        sigma2=float(data["sigma2"]),
    )


def scalar_channel_from_json(path: str) -> ScalarChannel:
    with open(path) as f:
        return scalar_channel_from_dict(json.load(f))
