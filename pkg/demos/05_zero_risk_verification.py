"""
Can a zero-risk pair still collide?
===================================

Brute force over piecewise-constant acceleration profiles allowed by the
assumptions, first on random zero-risk states, then on a parameter set where
the rear car must brake harder than the front one can.
"""

import numpy as np

from rssrisk import LongitudinalParams, VehicleState
from rssrisk.config import default_config
from rssrisk.experiments import verify_samples, verify_zero_risk

sc = default_config().scenario
rep = verify_samples(sc.lon, sc.lat, sc.risk, 200, np.random.default_rng(0))
print(f"{rep.zero_risk} zero-risk states, {rep.verified} verified, {len(rep.counterexamples)} counterexamples")

# a_min_brake > a_max_brake: the safe distance only protects the final gap
weak = LongitudinalParams(rho=0.5, a_max_accel=2.0, a_min_brake=10.0, a_max_brake=1.0, a_cap_brake=12.0)
rear, front = VehicleState("rear", 0.0, 0.0, 20.0), VehicleState("front", 12.5, 0.0, 10.0)
res = verify_zero_risk(rear, front, weak, sc.lat)
print("verified:", res.verified, " contact at t =", res.t_contact)
for t, pos in res.counterexample[-3:]:
    print(f"  t {t:4.1f}  rear x {pos['rear'][0]:6.2f}  front x {pos['front'][0]:6.2f}")
