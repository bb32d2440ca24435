# coding: utf-8

# # Cramer-Rao bound over the floor
#
# The Fisher information combines a radial term from RSSI and a tangential
# term from DoA for every access point.

# In[1]:

import math

import numpy as np

from doalf.crlb import CrlbParams, crlb, crlb_closed_form, crlb_numeric, fim, fim_printed, sampled_fim
from doalf.exceptions import SingularFim, SingularTerm

aps = np.array([(0, 0), (100, 0), (100, 100), (0, 100)], float)
params = CrlbParams(1.68, math.sqrt(2.45), math.radians(2.0), aps, 1e4)
print("eta = %.4f" % params.eta)


# The bound on a coarse grid, in square meters.

# In[2]:

xs = np.arange(10, 100, 20.0)
for y in xs[::-1]:
    print(" ".join("%7.3f" % crlb((x, y), params) for x in xs))


# The analytic matrix against a Monte Carlo average of the exact Hessian.

# In[3]:

theta = (30.0, 70.0)
print(fim(theta, params).matrix)
print(sampled_fim(theta, params, 100_000, np.random.default_rng(0)))


# The textbook variant with the DoA cross term added. For a single access
# point it collapses at bearings of 45 degrees, and there it agrees with the
# per-AP closed form everywhere else.

# In[4]:

one = CrlbParams(2.0, 2.0, math.radians(2.0), np.array([[10.0, 4.0]]))
print(crlb_numeric(fim_printed((0, 0), one)), crlb_closed_form((0, 0), one))
diag = CrlbParams(2.0, 2.0, math.radians(2.0), np.array([[10.0, 10.0]]))
try:
    crlb_numeric(fim_printed((0, 0), diag))
except SingularFim as exc:
    print("printed form:", exc)
try:
    crlb_closed_form((0, 0), diag)
except SingularTerm as exc:
    print("closed form:", exc)
print("exact form:", crlb((0, 0), diag))
