# coding: utf-8

# # Comparing estimators on identical draws
#
# Every method sees the same test points and the same noise, so the gaps
# between them come from the estimators alone.

# In[1]:

import numpy as np

from doalf.config import load_config
from doalf.experiments import common_grid, ErrorStats, simulate_errors

config = load_config("fig9")
config.values["experiment"]["num_test_points"] = "500"
errors, points = simulate_errors(config.experiment())


# Summary statistics.

# In[2]:

grid = common_grid(errors)
for label, e in errors.items():
    s = ErrorStats.from_errors(e, grid)
    print("%-6s mean %6.3f  p50 %6.3f  p90 %6.3f" % (label, s.mean, s.p50, s.p90))


# Empirical CDF at a few thresholds.

# In[3]:

for threshold in (1, 2, 5, 10, 20):
    row = ["%5.2f" % np.mean(e <= threshold) for e in errors.values()]
    print("P(E <= %2d m):" % threshold, " ".join(row))


# The same comparison across the two radio presets, RSSI only.

# In[4]:

config = load_config("fig11")
config.values["experiment"]["num_test_points"] = "500"
errors, _ = simulate_errors(config.experiment())
for label, e in errors.items():
    print("%-16s %.3f m" % (label, e.mean()))
