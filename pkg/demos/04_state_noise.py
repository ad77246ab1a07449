"""
State noise: noisy perception
=============================

Every controller acts on a noisy copy of the scene (0.5 m, 0.5 m/s), while
collisions and recorded risk use the true states.
"""

import sys

from rssrisk.config import default_config
from rssrisk.experiments import run_campaign

episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 60
cfg = default_config()

res = run_campaign(cfg.scenario, cfg.noise, episodes, master_seed=0)
print(f"noisy:    {res.collisions}/{res.episodes} collisions, "
      f"AUC {res.auc:.3f}, p {res.permutation_p:.4f}")

# without noise the compliant scene never leaves zero risk
base = run_campaign(cfg.scenario, None, episodes, master_seed=0)
print(f"baseline: {base.collisions}/{base.episodes} collisions, "
      f"peak risk {max(r.max_risk for r in base.records)}, degenerate {base.degenerate}")
