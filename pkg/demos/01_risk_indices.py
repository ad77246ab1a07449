"""
Risk indices for one vehicle pair
=================================

Safe distances, the longitudinal and lateral ramps and the combined index.
"""

from rssrisk import (LateralPairState, LateralParams, LongitudinalPairState, LongitudinalParams,
                     RiskParams, risk_breakdown)

lon = LongitudinalParams(rho=1.0, a_max_accel=2.0, a_min_brake=4.0, a_max_brake=8.0, a_cap_brake=10.0)
lat = LateralParams(rho=0.5, a_lat_max_accel=1.0, a_lat_min_brake=2.0, a_lat_cap_brake=4.0)

# a car at 20 m/s behind one at 10 m/s, same lane (lateral gap 0)
lateral = LateralPairState(v_left=0.0, v_right=0.0, d_lat=0.0)
for gap in (100.0, 75.25, 57.1, 38.95, 20.0):
    br = risk_breakdown(LongitudinalPairState(20.0, 10.0, gap), lateral, lon, lat, RiskParams())
    print(f"gap {gap:6.2f} m  d_min {br.d_lon_min:.2f}  d_min_brake {br.d_lon_min_brake:.2f}  r {br.r:.3f}")

# beta, gamma below 1 make the index more cautious
for beta in (0.5, 1.0, 2.0):
    br = risk_breakdown(LongitudinalPairState(20.0, 10.0, 57.1), LateralPairState(1.0, -1.0, 2.09375),
                        lon, lat, RiskParams(beta, beta))
    print(f"beta = gamma = {beta}: r_lon {br.r_lon:.3f}  r_lat {br.r_lat:.3f}  r {br.r:.3f}")
