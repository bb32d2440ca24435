# coding: utf-8

# # Parameter sweeps
#
# Each sweep reruns the DoA-LF experiment with one parameter changed and the
# same master seed. A small test-point count keeps this quick.

# In[1]:

from doalf.config import load_config
from doalf.experiments import sweep

config = load_config("fig9")
config.values["match"]["methods"] = "doalf"
config.values["experiment"]["num_test_points"] = "300"
base = config.experiment()


# In[2]:

for axis, values in [("rp_interval", [5, 6, 7, 8]), ("ap_count", [3, 4, 5, 6]),
                     ("doa_std", [1, 2, 5, 10])]:
    result = sweep(base, axis, values)
    means = result.mean_errors("doalf")
    print("%-12s" % axis, "  ".join("%g: %.2f m (crlb %.3f m2)" % (v, m, c)
                                    for v, m, c in zip(values, means, result.mean_crlb)))


# Neighbor count for plain WKNN on both presets.

# In[3]:

config = load_config("figk")
config.values["experiment"]["num_test_points"] = "300"
result = sweep(config.experiment(), "k", [1, 2, 4, 6, 8, 12])
for label in result.stats:
    print("%-14s" % label, " ".join("%.2f" % m for m in result.mean_errors(label)))
