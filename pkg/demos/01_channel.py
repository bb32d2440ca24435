# coding: utf-8

# # Channel model walkthrough
#
# Two radio presets ship with the library. Each one is a log-distance path
# loss curve with Gaussian shadowing in dB. Here we look at mean RSSI and at
# how much a single noisy sample wanders around it.

# In[1]:

import numpy as np

from doalf.radio import DoaModel, mean_rssi, mw_to_dbm, preset, sample_rssi, sample_doa

tx = mw_to_dbm(30)
print("transmit power: %.4f dBm" % tx)


# Mean RSSI against distance for both presets. The intercepts are kept
# exactly as configured, so the absolute levels sit above the transmit power.

# In[2]:

d = np.array([1, 2, 5, 10, 20, 50, 100.0])
for name in ("mmwave60", "wifi24"):
    model = preset(name)
    print(name, np.round(mean_rssi(model, tx, d), 2))


# The slope is what matters for fingerprinting: doubling the distance costs
# 10 n log10(2) dB.

# In[3]:

for name in ("mmwave60", "wifi24"):
    model = preset(name)
    print("%-9s %.3f dB per doubling, shadowing std %.3f dB"
          % (name, 10 * model.exponent * np.log10(2), model.shadow_std_db))


# Shadowing in practice: 10,000 draws at 25 m.

# In[4]:

rng = np.random.default_rng(1)
model = preset("mmwave60")
draws = sample_rssi(model, tx, np.full(10_000, 25.0), rng)
print("mean %.3f (model %.3f), std %.3f" % (draws.mean(), mean_rssi(model, tx, 25.0), draws.std()))


# DoA noise is a wrapped Gaussian on the bearing.

# In[5]:

doa = DoaModel.from_degrees(2.0)
angles = sample_doa(np.full(5, 0.01), doa, rng)
print(np.degrees(angles).round(3))
