# coding: utf-8

# # Building a fingerprint database and locating one device
#
# The offline phase averages many noisy samples at each reference point (RP).
# The online phase matches one fresh measurement against those rows.

# In[1]:

import numpy as np

from doalf.fingerprint import Scenario, build_database, default_grid, place_aps, save_database, load_database
from doalf.geometry import Point
from doalf.matching import MatchConfig, estimate, k_nearest
from doalf.experiments import measure
from doalf.radio import DoaModel, mw_to_dbm, preset

scenario = Scenario(100, 100, tuple(place_aps(100, 100, 4)), 5.0, mw_to_dbm(30),
                    preset("mmwave60"), DoaModel.from_degrees(2.0))
grid = default_grid(scenario)
print(len(grid), "reference points;", scenario.q, "access points")


# RPs that coincide with an access point are left out, because the path-loss
# curve is not defined closer than the reference distance.

# In[2]:

db = build_database(scenario, grid, samples_per_rp=100, rng=20190601)
print(db.rssi.shape, db.doa.shape)
print("row 0:", db.rps[0], db.rssi[0].round(2), np.degrees(db.doa[0]).round(2))


# Save and reload: the file holds the metadata needed to rebuild the scenario.

# In[3]:

save_database(db, "/tmp/demo_db.csv")
again = load_database("/tmp/demo_db.csv")
print("identical RSSI after reload:", np.array_equal(again.rssi, db.rssi))


# A device at (37.2, 61.8) takes one measurement.

# In[4]:

truth = Point(37.2, 61.8)
rng = np.random.default_rng(3)
query = measure(scenario, truth, rng.standard_normal(4), rng.standard_normal(4))

for method in ("nn", "knn", "wknn", "doalf"):
    est = estimate(db, query, MatchConfig(method, 4))
    print("%-6s (%.2f, %.2f)  error %.2f m" % (method, est.x, est.y, np.hypot(est.x - truth.x, est.y - truth.y)))


# The neighbors DoA-LF picked, with their feature distances.

# In[5]:

for n in k_nearest(db, query, MatchConfig("doalf", 4)):
    print(n.index, (n.rp.x, n.rp.y), round(n.feature_distance, 3))
