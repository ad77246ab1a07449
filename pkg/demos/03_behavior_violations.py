"""
Behavior violations: traffic breaking the assumptions
===================================================

Traffic vehicles now and then brake, accelerate or swerve harder than the
assumed bounds. Does the episode's peak risk tell collisions apart?
"""

import sys

from rssrisk.config import default_config
from rssrisk.experiments import run_campaign

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 60
cfg = default_config()
res = run_campaign(cfg.scenario, cfg.behavior, episodes, master_seed=0)

print(f"{res.episodes} episodes, {res.collisions} collisions")
print(f"point-biserial {res.point_biserial:.3f}  AUC {res.auc:.3f}  permutation p {res.permutation_p:.4f}")

# the peak risk of crashed and clean episodes side by side
crashed = sorted(r.max_risk for r in res.records if r.collision)
clean = sorted(r.max_risk for r in res.records if not r.collision)
print("median peak risk, crashed:", crashed[len(crashed) // 2] if crashed else None)
print("median peak risk, clean:  ", clean[len(clean) // 2] if clean else None)
