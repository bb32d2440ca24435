"""Online matching: feature-space distance, K-nearest selection and NN/KNN/WKNN/DoA-LF estimates.

The DoA-LF estimator is WKNN run over the joint RSSI + DoA feature space.
NN, KNN and WKNN here are the RSSI-only baselines.

By default the feature distance concatenates raw dB values with DoA
differences in degrees. Nothing fixes the relative weighting of the two
feature groups; ``feature_scaling="per_dimension_std"`` is the
unit-free alternative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, InvalidParameter
from .fingerprint import Fingerprint, FingerprintDatabase, circular_mean
from .geometry import Point, angular_diff

METHODS = ("nn", "knn", "wknn", "doalf")
SCALINGS = ("raw", "per_dimension_std")
ANGLE_UNITS = ("degrees", "radians")


@dataclass(frozen=True)
class MatchConfig:
    method: str = "doalf"
    k: int = 4
    epsilon: float = 1e-6
    gamma: float = 1.0
    feature_scaling: str = "raw"
    angle_unit_for_distance: str = "degrees"

    def __post_init__(self):
        method = self.method.lower()
        object.__setattr__(self, "method", method)
        if method not in METHODS:
            raise InvalidParameter(f"unknown method {self.method!r}; choose from {'|'.join(METHODS)}")
        if method == "nn":
            object.__setattr__(self, "k", 1)
        if self.k < 1:
            raise InvalidParameter(f"k must be >= 1, got {self.k}")
        if not self.epsilon > 0:
            raise InvalidParameter("epsilon must be positive")
        if not self.gamma > 0:
            raise InvalidParameter("gamma must be positive")
        if self.feature_scaling not in SCALINGS:
            raise InvalidParameter(f"feature_scaling must be one of {SCALINGS}")
        if self.angle_unit_for_distance not in ANGLE_UNITS:
            raise InvalidParameter(f"angle unit must be one of {ANGLE_UNITS}")

    @property
    def use_doa(self) -> bool:
        return self.method == "doalf"

    @property
    def angle_scale(self) -> float:
        return 180.0 / math.pi if self.angle_unit_for_distance == "degrees" else 1.0


@dataclass(frozen=True)
class Neighbor:
    index: int
    feature_distance: float
    rp: Point


def dimension_scales(db: FingerprintDatabase, cfg: MatchConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature divisors: ones for raw scaling, database column spreads otherwise."""
    q = db.q
    if cfg.feature_scaling == "raw":
        return np.ones(q), np.ones(q)
    s_std = db.rssi.std(axis=0)
    centre = circular_mean(db.doa, axis=0)
    phi_std = (angular_diff(db.doa, centre) * cfg.angle_scale).std(axis=0)
    s_std[s_std == 0] = 1.0
    phi_std[phi_std == 0] = 1.0
    return s_std, phi_std


def _squared_terms(rssi_a, doa_a, rssi_b, doa_b, cfg, scales):
    s_scale, phi_scale = scales
    ds = (np.asarray(rssi_a) - np.asarray(rssi_b)) / s_scale
    total = np.sum(ds * ds, axis=-1)
    if cfg.use_doa:
        dphi = angular_diff(doa_a, doa_b) * cfg.angle_scale / phi_scale
        total = total + np.sum(dphi * dphi, axis=-1)
    return total


def feature_distance(a: Fingerprint, b: Fingerprint, cfg: MatchConfig, scales=None) -> float:
    if a.q != b.q:
        raise DimensionError(f"fingerprints have Q={a.q} and Q={b.q}")
    if scales is None:
        scales = (np.ones(a.q), np.ones(a.q))
    return float(math.sqrt(_squared_terms(a.rssi, a.doa, b.rssi, b.doa, cfg, scales)))


def feature_distances(db: FingerprintDatabase, query: Fingerprint, cfg: MatchConfig, scales=None) -> np.ndarray:
    """Distance from ``query`` to every database row, shape ``(M,)``."""
    if query.q != db.q:
        raise DimensionError(f"query has Q={query.q}, database has Q={db.q}")
    if scales is None:
        scales = dimension_scales(db, cfg)
    return np.sqrt(_squared_terms(db.rssi, db.doa, query.rssi, query.doa, cfg, scales))


def _select(dist: np.ndarray, k: int) -> np.ndarray:
    if k > dist.size:
        raise InvalidParameter(f"K={k} exceeds database size M={dist.size}")
    # stable sort: equal distances keep row order
    return np.argsort(dist, kind="stable")[:k]


def k_nearest(db: FingerprintDatabase, query: Fingerprint, cfg: MatchConfig, scales=None) -> list[Neighbor]:
    dist = feature_distances(db, query, cfg, scales)
    idx = _select(dist, cfg.k)
    return [Neighbor(int(i), float(dist[i]), Point(*db.rps[i])) for i in idx]


def combine(rps: np.ndarray, dist: np.ndarray, cfg: MatchConfig) -> np.ndarray:
    """Position from the selected RPs (rows of ``rps``) and their feature distances."""
    if cfg.method == "nn" or len(rps) == 1:
        return rps[0].copy()
    if cfg.method == "knn":
        return rps.mean(axis=0)
    w = cfg.gamma / (dist + cfg.epsilon)
    return (w[:, None] * rps).sum(axis=0) / w.sum()


def estimate_xy(db: FingerprintDatabase, query: Fingerprint, cfg: MatchConfig, scales=None) -> np.ndarray:
    dist = feature_distances(db, query, cfg, scales)
    idx = _select(dist, cfg.k)
    return combine(db.rps[idx], dist[idx], cfg)


def estimate(db: FingerprintDatabase, query: Fingerprint, cfg: MatchConfig, scales=None) -> Point:
    return Point(*estimate_xy(db, query, cfg, scales))
