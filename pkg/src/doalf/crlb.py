"""Likelihood, Fisher information and Cramer-Rao bounds for hybrid RSSI + DoA positioning.

Observation model, per AP ``i``, for a device at ``theta = (x, y)``:

* log-distance RSSI, which after inversion reads
  ``ln d_ir = ln d_itheta + N(0, 1 / (2 eta))``, with
  ``eta = (10 n / (sqrt(2) sigma_s ln 10))**2``;
* DoA ``phi_ir = phi_itheta + N(0, sigma_phi**2)``.

The log-likelihood is::

    sum_i  ln kappa - eta * ln(d_ir / d_itheta)**2 - (phi_ir - phi_itheta)**2 / (2 sigma_phi**2)

with ``kappa = 1 / (2 pi |A| sigma_s sigma_phi)``. Because ``kappa`` is
additive, it drops out of every derivative and bound.

Two Fisher matrices are available:

``fim``
    The expected negative Hessian of the likelihood above. Per AP it is
    ``R(phi) diag(2 eta, 1 / sigma_phi**2) R(phi)^T / d**2``, which is
    never singular for a single AP.
``fim_printed``
    The textbook closed form whose cross term carries the DoA
    contribution with a ``+`` sign. Its determinant for one AP is
    ``2 eta cos(2 phi)**2 / (sigma_phi**2 d**4)``. This is the matrix
    the per-AP closed-form bound :func:`crlb_closed_form` is exact for.

:func:`crlb_numeric` accepts either matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateGeometry, InvalidParameter, SingularFim, SingularTerm
from .geometry import COINCIDENCE_TOL, TWO_PI, angular_diff, as_xy, canonical_angle
from .rng import as_generator

LN10 = math.log(10.0)
SINGULAR_DET_TOL = 1e-12
# |cos 2phi| below this makes a per-AP closed-form term undefined
SINGULAR_TERM_TOL = 1e-12


@dataclass(frozen=True)
class CrlbParams:
    exponent: float
    shadow_std_db: float
    doa_std_rad: float
    aps: np.ndarray
    area_m2: float = 1.0

    def __post_init__(self):
        if not self.shadow_std_db > 0:
            raise InvalidParameter("shadow_std_db must be > 0 for the bound to exist")
        if not self.doa_std_rad > 0:
            raise InvalidParameter("doa_std_rad must be > 0 for the bound to exist")
        if not self.area_m2 > 0:
            raise InvalidParameter("area must be positive")
        aps = np.array(as_xy(self.aps), dtype=float).reshape(-1, 2)
        aps.flags.writeable = False
        object.__setattr__(self, "aps", aps)

    @classmethod
    def from_scenario(cls, scenario) -> "CrlbParams":
        return cls(
            scenario.radio.exponent,
            scenario.radio.shadow_std_db,
            scenario.doa.doa_std_rad,
            scenario.ap_array,
            scenario.area_width_m * scenario.area_height_m,
        )

    @property
    def eta(self) -> float:
        return eta(self.exponent, self.shadow_std_db)

    @property
    def log_kappa(self) -> float:
        return -math.log(TWO_PI * self.area_m2 * self.shadow_std_db * self.doa_std_rad)

    def scaled(self, factor: float) -> "CrlbParams":
        """Same model with AP coordinates (and area) dilated by ``factor``."""
        return CrlbParams(self.exponent, self.shadow_std_db, self.doa_std_rad,
                          self.aps * factor, self.area_m2 * factor**2)


@dataclass(frozen=True)
class FisherInfo:
    j_xx: float
    j_xy: float
    j_yy: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.j_xx, self.j_xy], [self.j_xy, self.j_yy]])

    @property
    def det(self) -> float:
        return self.j_xx * self.j_yy - self.j_xy * self.j_xy


@dataclass(frozen=True)
class Observation:
    """Per-AP observed distances ``d_ir`` (meters) and DoAs ``phi_ir`` (radians)."""

    dist: np.ndarray
    doa: np.ndarray


def eta(n: float, sigma_s: float) -> float:
    if not sigma_s > 0:
        raise InvalidParameter("shadow standard deviation must be > 0")
    return (10.0 * n / (math.sqrt(2.0) * sigma_s * LN10)) ** 2


def _geometry(theta, aps):
    """Distances, cos and sin of the bearings from ``theta`` to each AP."""
    t = as_xy(theta)
    dx = aps[:, 0] - t[0]
    dy = aps[:, 1] - t[1]
    d = np.hypot(dx, dy)
    if np.any(d < COINCIDENCE_TOL):
        raise DegenerateGeometry(f"point {tuple(t)} coincides with an AP")
    return d, dx / d, dy / d


def observation_at(point, params: CrlbParams) -> Observation:
    """Noise-free observation of a device at ``point``."""
    d, c, s = _geometry(point, params.aps)
    return Observation(d, canonical_angle(np.arctan2(s, c)))


def observation_from_rssi(rssi, doa, radio, tx_power_dbm: float) -> Observation:
    """Invert the mean path-loss curve to turn RSSI into the distances it implies."""
    rssi = np.asarray(rssi, dtype=float)
    d = radio.ref_distance_m * 10.0 ** ((tx_power_dbm - radio.pl_ref_db - rssi) / (10.0 * radio.exponent))
    return Observation(d, canonical_angle(np.asarray(doa, dtype=float)))


def sample_observations(theta, params: CrlbParams, size: int, rng) -> Observation:
    """``size`` independent observations at ``theta``; arrays of shape ``(size, Q)``."""
    gen = as_generator(rng)
    d, c, s = _geometry(theta, params.aps)
    q = len(d)
    log_sd = 1.0 / math.sqrt(2.0 * params.eta)
    dist = d * np.exp(log_sd * gen.standard_normal((size, q)))
    doa = canonical_angle(np.arctan2(s, c) + params.doa_std_rad * gen.standard_normal((size, q)))
    return Observation(dist, doa)


def _residuals(obs: Observation, theta, params):
    d, c, s = _geometry(theta, params.aps)
    log_ratio = np.log(np.asarray(obs.dist) / d)
    dphi = angular_diff(obs.doa, np.arctan2(s, c))
    return d, c, s, log_ratio, dphi


def log_likelihood(obs: Observation, theta, params: CrlbParams):
    _, _, _, log_ratio, dphi = _residuals(obs, theta, params)
    q = len(params.aps)
    terms = params.eta * log_ratio**2 + dphi**2 / (2.0 * params.doa_std_rad**2)
    out = q * params.log_kappa - np.sum(terms, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def score(theta, obs: Observation, params: CrlbParams) -> np.ndarray:
    """Gradient of :func:`log_likelihood` with respect to ``theta``.

    For one AP at bearing ``phi``, ``d phi / dx = sin(phi) / d`` and
    ``d phi / dy = -cos(phi) / d``.
    """
    d, c, s, log_ratio, dphi = _residuals(obs, theta, params)
    et, var = params.eta, params.doa_std_rad**2
    rssi_part = 2.0 * et * log_ratio / d  # times -cos, -sin
    ang_part = dphi / (var * d)
    gx = np.sum(-rssi_part * c + ang_part * s, axis=-1)
    gy = np.sum(-rssi_part * s - ang_part * c, axis=-1)
    return np.stack([gx, gy], axis=-1)


def hessian(theta, obs: Observation, params: CrlbParams) -> np.ndarray:
    """Exact second derivatives of :func:`log_likelihood`, shape ``(..., 2, 2)``."""
    d, c, s, log_ratio, dphi = _residuals(obs, theta, params)
    et, var = params.eta, params.doa_std_rad**2
    d2 = d * d
    lr2 = 2.0 * log_ratio
    c2, s2, sin2, cos2 = c * c, s * s, 2 * s * c, c * c - s * s
    hxx = -2 * et * c2 / d2 + et * lr2 * (1 - 2 * c2) / d2 + (-s2 + dphi * sin2) / (var * d2)
    hyy = -2 * et * s2 / d2 + et * lr2 * (1 - 2 * s2) / d2 + (-c2 - dphi * sin2) / (var * d2)
    hxy = -et * sin2 / d2 - et * lr2 * sin2 / d2 + (s * c - dphi * cos2) / (var * d2)
    hxx, hxy, hyy = (np.sum(h, axis=-1) for h in (hxx, hxy, hyy))
    return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)


def fim(theta, params: CrlbParams) -> FisherInfo:
    """Expected information: the zero-mean residual terms of the Hessian dropped."""
    d, c, s = _geometry(theta, params.aps)
    et, var = params.eta, params.doa_std_rad**2
    d2 = d * d
    sin2 = 2 * s * c
    return FisherInfo(
        float(np.sum(2 * et * c * c / d2 + s * s / (var * d2))),
        float(np.sum(et * sin2 / d2 - sin2 / (2 * var * d2))),
        float(np.sum(2 * et * s * s / d2 + c * c / (var * d2))),
    )


def fim_printed(theta, params: CrlbParams) -> FisherInfo:
    """Closed-form FIM with the DoA cross term added rather than subtracted."""
    d, c, s = _geometry(theta, params.aps)
    et, var = params.eta, params.doa_std_rad**2
    d2 = d * d
    sin2 = 2 * s * c
    return FisherInfo(
        float(np.sum(2 * et * c * c / d2 + s * s / (var * d2))),
        float(np.sum(et * sin2 / d2 + sin2 / (2 * var * d2))),
        float(np.sum(2 * et * s * s / d2 + c * c / (var * d2))),
    )


def crlb_numeric(info: FisherInfo, theta=None, aps=None) -> float:
    """Trace of the inverse FIM, in m^2.

    ``theta`` and ``aps`` only annotate the error raised for a singular matrix.
    """
    det = info.det
    if not det > SINGULAR_DET_TOL:
        raise SingularFim(
            f"FIM determinant {det:.3e} <= {SINGULAR_DET_TOL:g}"
            + (f" at theta={tuple(float(v) for v in as_xy(theta))}" if theta is not None else ""),
            theta=theta, aps=aps, det=det,
        )
    return (info.j_xx + info.j_yy) / det


def crlb_closed_form(theta, params: CrlbParams) -> float:
    """Per-AP sum ``d^2 (1 + 2 eta sigma_phi^2) / (2 eta cos(2 phi)^2)``, in m^2."""
    d, c, s = _geometry(theta, params.aps)
    cos2 = c * c - s * s
    if np.any(np.abs(cos2) < SINGULAR_TERM_TOL):
        raise SingularTerm(
            f"an AP lies at an odd multiple of pi/4 from theta={tuple(float(v) for v in as_xy(theta))}"
        )
    et, var = params.eta, params.doa_std_rad**2
    return float(np.sum(d * d * (1 + 2 * et * var) / (2 * et * cos2**2)))


def crlb(theta, params: CrlbParams) -> float:
    """Bound from the expected information matrix."""
    return crlb_numeric(fim(theta, params), theta=theta, aps=params.aps)


def sampled_fim(theta, params: CrlbParams, n: int, rng) -> np.ndarray:
    """Monte Carlo mean of the negative exact Hessian over ``n`` sampled observations."""
    obs = sample_observations(theta, params, n, rng)
    return -hessian(theta, obs, params).mean(axis=0)
