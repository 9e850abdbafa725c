"""Rate-region bounds, constant-gap analysis, and GDoF curves for a
full-duplex cellular network whose base station also acts as a relay."""

from .channel import (LinkBudget, MimoChannel, ScalarChannel,
                      build_from_link_budget, capacity_fn, pathloss_db,
                      scalar_channel_from_dict)
from .gaps import (GapMapCell, GridConfig, appendix_c_check, gap_map,
                   optimized_gap, scheme_by_condition,
                   strong_interference_constant, thm8_gap_bound)
from .gdof import GdofPoint, optimal_curve_breakpoints, symmetric_gdof
from .regions import (GapResult, Halfspace, RateRegion, UnboundedGapError,
                      constant_gap, membership, support_hull, vertices)
from .scalar import ConverseParams, SchemeParams

__version__ = "0.1.0"

__all__ = [
    "LinkBudget", "MimoChannel", "ScalarChannel", "build_from_link_budget",
    "capacity_fn", "pathloss_db", "scalar_channel_from_dict",
    "GapMapCell", "GridConfig", "appendix_c_check", "gap_map", "optimized_gap",
    "scheme_by_condition", "strong_interference_constant", "thm8_gap_bound",
    "GdofPoint", "optimal_curve_breakpoints", "symmetric_gdof",
    "GapResult", "Halfspace", "RateRegion", "UnboundedGapError", "constant_gap",
    "membership", "support_hull", "vertices",
    "ConverseParams", "SchemeParams",
]
