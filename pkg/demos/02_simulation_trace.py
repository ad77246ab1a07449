"""
Simulating the default two-lane scene
=====================================

One run of the built-in scenario, printed every second, then written as CSV.
"""

import sys

import numpy as np

from rssrisk.config import default_config
from rssrisk.experiments import randomize_scenario
from rssrisk.io import write_trace
from rssrisk.simulator import run_scenario

cfg = default_config()
scenario = randomize_scenario(cfg.scenario, np.random.default_rng(0))
result = run_scenario(scenario)

# positions and the largest pairwise risk, once per simulated second
every = int(round(1.0 / scenario.dt))
for sample in result.trace[::every]:
    ego = next(s for s in sample.states if s.id == "ego")
    print(f"t {sample.t:5.1f}  ego x {ego.x:7.1f}  v {ego.v_x:5.2f}  scene risk {sample.scene_risk:.3f}")

print("status:", result.status, " max risk:", result.max_risk)
if len(sys.argv) > 1:
    write_trace(sys.argv[1], result)
