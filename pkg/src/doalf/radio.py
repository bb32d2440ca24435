"""Log-distance channel model and the Gaussian DoA measurement model.

RSSI at distance ``d`` from an AP transmitting ``P_t`` dBm is::

    s(d) = P_t - PL(d0) - 10 n log10(d / d0) - X,   X ~ N(0, sigma_s^2)

and a DoA measurement is the true bearing plus ``N(0, sigma_phi^2)``,
wrapped back to ``[0, 2*pi)``.

The two NLOS presets keep their printed intercepts, negative signs
included. Estimators only see RSSI differences, so the intercept never
changes a position estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameter, OutOfModelRange
from .geometry import canonical_angle
from .rng import as_generator

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class RadioModel:
    pl_ref_db: float
    exponent: float
    shadow_std_db: float
    ref_distance_m: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        if not self.ref_distance_m > 0:
            raise InvalidParameter(f"ref_distance_m must be > 0, got {self.ref_distance_m}")
        if not self.shadow_std_db >= 0:
            raise InvalidParameter(f"shadow_std_db must be >= 0, got {self.shadow_std_db}")
        if not math.isfinite(self.exponent):
            raise InvalidParameter("exponent must be finite")

    def replace(self, **changes) -> "RadioModel":
        fields = dict(
            pl_ref_db=self.pl_ref_db,
            exponent=self.exponent,
            shadow_std_db=self.shadow_std_db,
            ref_distance_m=self.ref_distance_m,
            name=self.name,
        )
        fields.update(changes)
        return RadioModel(**fields)


@dataclass(frozen=True)
class DoaModel:
    doa_std_rad: float

    def __post_init__(self):
        if not self.doa_std_rad >= 0:
            raise InvalidParameter(f"doa_std_rad must be >= 0, got {self.doa_std_rad}")

    @classmethod
    def from_degrees(cls, std_deg: float) -> "DoaModel":
        return cls(math.radians(std_deg))

    @property
    def doa_std_deg(self) -> float:
        return math.degrees(self.doa_std_rad)


PRESETS: dict[str, RadioModel] = {
    # 60 GHz: PL = -75.3 + 16.8 log10(d) + N(0, 2.45)
    "mmwave60": RadioModel(-75.3, 1.68, math.sqrt(2.45), 1.0, "mmwave60"),
    # 2.4 GHz: PL = -48.5 + 20.5 log10(d) + N(0, 3.04)
    "wifi24": RadioModel(-48.5, 2.05, math.sqrt(3.04), 1.0, "wifi24"),
}


def preset(name: str) -> RadioModel:
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParameter(
            f"unknown radio preset {name!r}; choose from {', '.join(PRESETS)}"
        ) from None


def mw_to_dbm(power_mw: float) -> float:
    if power_mw <= 0:
        raise InvalidParameter("power must be positive")
    return 10.0 * math.log10(power_mw)


def free_space_reference(wavelength_m: float, d0: float = 1.0) -> float:
    """Free-space loss ``20 log10(4 pi d0 / lambda)`` in dB."""
    if not (wavelength_m > 0 and d0 > 0):
        raise InvalidParameter("wavelength and reference distance must be positive")
    return 20.0 * math.log10(4.0 * math.pi * d0 / wavelength_m)


def _check_range(model: RadioModel, d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if np.any(d < model.ref_distance_m):
        raise OutOfModelRange(
            f"distance {float(np.min(d)):.6g} m below reference distance {model.ref_distance_m} m"
        )
    return d


def mean_path_loss(model: RadioModel, d):
    d = _check_range(model, d)
    pl = model.pl_ref_db + 10.0 * model.exponent * np.log10(d / model.ref_distance_m)
    return float(pl) if pl.ndim == 0 else pl


def path_loss(model: RadioModel, d, rng=None):
    """Path loss in dB; adds one shadowing draw per distance when ``rng`` is given."""
    pl = mean_path_loss(model, d)
    if rng is None:
        return pl
    noise = as_generator(rng).normal(0.0, model.shadow_std_db, size=np.shape(pl))
    out = pl + noise
    return float(out) if np.ndim(out) == 0 else out


def mean_rssi(model: RadioModel, tx_power_dbm: float, d):
    return tx_power_dbm - mean_path_loss(model, d)


def sample_rssi(model: RadioModel, tx_power_dbm: float, d, rng):
    return tx_power_dbm - path_loss(model, d, rng)


def rssi_from_normals(model: RadioModel, tx_power_dbm: float, d, z):
    """RSSI given pre-drawn standard normals ``z`` (broadcast against ``d``).

    Lets several models consume one draw, which is how paired comparisons
    between presets are run.
    """
    return mean_rssi(model, tx_power_dbm, d) - model.shadow_std_db * np.asarray(z)


def sample_doa(true_bearing, doa: DoaModel, rng):
    if doa.doa_std_rad == 0:
        return canonical_angle(true_bearing)
    noise = as_generator(rng).normal(0.0, doa.doa_std_rad, size=np.shape(true_bearing))
    return canonical_angle(np.asarray(true_bearing) + noise)


def doa_from_normals(true_bearing, doa: DoaModel, z):
    return canonical_angle(np.asarray(true_bearing) + doa.doa_std_rad * np.asarray(z))
