"""RSS-derived collision risk indices, a kinematic traffic simulator and
Monte Carlo experiments relating risk to simulated collisions."""

from .geometry import PairGap, VehicleState, in_collision, pair_gap, pair_states
from .rss_core import (
    LateralPairState,
    LateralParams,
    LateralResponseVelocities,
    LongitudinalPairState,
    LongitudinalParams,
    RiskBreakdown,
    RiskParams,
    d_lat_min,
    d_lat_min_brake,
    d_lon_min,
    d_lon_min_brake,
    r_lat,
    r_lon,
    risk_breakdown,
    unified_risk,
)

__version__ = "0.1.0"
