"""Monte Carlo harness: paired method comparisons, error CDFs and parameter sweeps.

Trial ``t`` draws its test point and its measurement noise from substream
``(master_seed, TRIAL, t)``. Every compared method, and every radio preset,
consumes the same standard-normal draws, so differences between methods
come from the estimators only. Results do not depend on the number of
worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as rngmod
from .crlb import CrlbParams, crlb
from .exceptions import DoalfError, InvalidParameter
from .fingerprint import (
    Fingerprint, FingerprintDatabase, Scenario, build_database, default_grid,
    noiseless_fingerprints, place_aps,
)
from .geometry import as_xy, distances
from .matching import MatchConfig, combine, dimension_scales, feature_distances, _select
from .radio import DoaModel, doa_from_normals, preset, rssi_from_normals

log = logging.getLogger(__name__)

CDF_POINTS = 200
AXES = ("rp_interval", "ap_count", "exponent", "shadow_std", "doa_std", "k")


@dataclass(frozen=True)
class MethodSpec:
    """One compared curve: an estimator, optionally run on a different radio preset."""

    match: MatchConfig
    radio: str | None = None
    label: str = ""

    def __post_init__(self):
        if not self.label:
            label = self.match.method if self.radio is None else f"{self.match.method}@{self.radio}"
            object.__setattr__(self, "label", label)

    @classmethod
    def parse(cls, token: str, k: int = 4, **match_kwargs) -> "MethodSpec":
        """``"wknn"`` or ``"wknn@wifi24"``."""
        method, _, radio = token.strip().partition("@")
        if radio:
            preset(radio)  # validate early
        return cls(MatchConfig(method, k, **match_kwargs), radio or None, token.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    methods: tuple[MethodSpec, ...]
    num_test_points: int = 2000
    samples_per_rp: int = 100
    master_seed: int = rngmod.DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise InvalidParameter("at least one method is required")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise InvalidParameter(f"duplicate method labels: {labels}")
        if self.num_test_points < 1:
            raise InvalidParameter("num_test_points must be >= 1")
        if self.samples_per_rp < 1:
            raise InvalidParameter("samples_per_rp must be >= 1")

    def scenario_for(self, spec: MethodSpec) -> Scenario:
        if spec.radio is None or spec.radio == self.scenario.radio.name:
            return self.scenario
        return self.scenario.replace(radio=preset(spec.radio))


@dataclass(frozen=True, eq=False)
class ErrorStats:
    errors: np.ndarray
    mean: float
    cdf_grid: np.ndarray
    cdf_values: np.ndarray
    p50: float
    p90: float
    p95: float

    @classmethod
    def from_errors(cls, errors, grid=None) -> "ErrorStats":
        errors = np.asarray(errors, dtype=float)
        if errors.size == 0:
            raise InvalidParameter("no errors to summarise")
        if grid is None:
            grid = np.linspace(0.0, float(errors.max()), CDF_POINTS)
        p50, p90, p95 = np.percentile(errors, [50, 90, 95])
        return cls(errors, float(errors.mean()), grid, cdf(errors, grid),
                   float(p50), float(p90), float(p95))


@dataclass(frozen=True)
class SweepResult:
    """Mean errors along one axis; ``stats[label][i]`` belongs to ``values[i]``."""

    axis: str
    values: tuple
    stats: dict
    mean_crlb: tuple

    def mean_errors(self, label: str | None = None) -> np.ndarray:
        if label is None:
            label = next(iter(self.stats))
        return np.array([s.mean for s in self.stats[label]])


def cdf(errors, grid) -> np.ndarray:
    """Right-continuous empirical CDF, ``P(E <= e)``, evaluated at each grid point."""
    errors = np.sort(np.asarray(errors, dtype=float))
    if errors.size == 0:
        raise InvalidParameter("errors must be nonempty")
    return np.searchsorted(errors, np.asarray(grid, dtype=float), side="right") / errors.size


def sample_test_point(scenario: Scenario, gen: np.random.Generator) -> np.ndarray:
    """Uniform point in the area, resampled while inside an AP's reference radius."""
    min_d = max(scenario.radio.ref_distance_m, 1e-9)
    for _ in range(10_000):
        p = gen.uniform((0.0, 0.0), (scenario.area_width_m, scenario.area_height_m))
        if np.all(distances(p, scenario.aps) >= min_d):
            return p
    raise DoalfError("could not place a test point away from the APs")


def _trial_draws(seed: int, t: int, scenario: Scenario):
    gen = rngmod.substream(seed, rngmod.TRIAL, t)
    p = sample_test_point(scenario, gen)
    z_s = gen.standard_normal(scenario.q)
    z_phi = gen.standard_normal(scenario.q)
    return p, z_s, z_phi


def measure(scenario: Scenario, point, z_s, z_phi) -> Fingerprint:
    """One online fingerprint at ``point`` from standard-normal draws."""
    _, true_doa = noiseless_fingerprints(scenario, point)
    d = distances(point, scenario.aps)
    return Fingerprint(
        rssi_from_normals(scenario.radio, scenario.tx_power_dbm, d, z_s),
        doa_from_normals(true_doa, scenario.doa, z_phi),
    )


def run_trial(db: FingerprintDatabase, scenario: Scenario, test_point, cfg: MatchConfig, rng) -> float:
    """Error distance of one single-draw online fix at ``test_point``."""
    gen = rngmod.as_generator(rng)
    z_s = gen.standard_normal(scenario.q)
    z_phi = gen.standard_normal(scenario.q)
    query = measure(scenario, as_xy(test_point), z_s, z_phi)
    dist = feature_distances(db, query, cfg)
    idx = _select(dist, cfg.k)
    est = combine(db.rps[idx], dist[idx], cfg)
    return float(math.hypot(*(est - as_xy(test_point))))


def _run_chunk(args):
    cfg, dbs, trial_ids = args
    scales = {
        m.label: dimension_scales(dbs[m.label], m.match) for m in cfg.methods
    }
    out = np.empty((len(cfg.methods), len(trial_ids)))
    points = np.empty((len(trial_ids), 2))
    for col, t in enumerate(trial_ids):
        p, z_s, z_phi = _trial_draws(cfg.master_seed, t, cfg.scenario)
        points[col] = p
        queries = {}
        for row, m in enumerate(cfg.methods):
            sc = cfg.scenario_for(m)
            key = sc.radio.name, sc.radio
            if key not in queries:
                queries[key] = measure(sc, p, z_s, z_phi)
            db = dbs[m.label]
            dist = feature_distances(db, queries[key], m.match, scales[m.label])
            idx = _select(dist, m.match.k)
            est = combine(db.rps[idx], dist[idx], m.match)
            out[row, col] = math.hypot(est[0] - p[0], est[1] - p[1])
    return out, points


def build_databases(cfg: ExperimentConfig) -> dict[str, FingerprintDatabase]:
    """One database per distinct radio model, shared by the methods using it."""
    cache: dict = {}
    dbs = {}
    handle = rngmod.RngHandle(cfg.master_seed)
    for m in cfg.methods:
        sc = cfg.scenario_for(m)
        key = sc.radio
        if key not in cache:
            cache[key] = build_database(sc, default_grid(sc), cfg.samples_per_rp, handle)
        dbs[m.label] = cache[key]
    return dbs


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(parts)]


def simulate_errors(cfg: ExperimentConfig, dbs=None) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Per-method error arrays (ordered by trial index) and the test points used."""
    if dbs is None:
        dbs = build_databases(cfg)
    for m in cfg.methods:
        if m.match.k > len(dbs[m.label]):
            raise InvalidParameter(f"K={m.match.k} exceeds database size {len(dbs[m.label])}")
    n = cfg.num_test_points
    chunks = _chunks(n, cfg.workers if cfg.workers > 1 else 1)
    jobs = [(cfg, dbs, list(c)) for c in chunks]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]
    errors = np.concatenate([r[0] for r in results], axis=1)
    points = np.concatenate([r[1] for r in results], axis=0)
    return {m.label: errors[i] for i, m in enumerate(cfg.methods)}, points


def common_grid(errors: dict[str, np.ndarray], points: int = CDF_POINTS) -> np.ndarray:
    top = max(float(e.max()) for e in errors.values())
    return np.linspace(0.0, top, points)


def run_experiment(cfg: ExperimentConfig) -> dict[str, ErrorStats]:
    """Paired comparison of all configured methods; CDFs share one grid."""
    errors, _ = simulate_errors(cfg)
    grid = common_grid(errors)
    return {label: ErrorStats.from_errors(e, grid) for label, e in errors.items()}


def mean_crlb(scenario: Scenario, points) -> float | None:
    """Mean bound over ``points``; None when the model has no noise to bound."""
    if scenario.radio.shadow_std_db <= 0 or scenario.doa.doa_std_rad <= 0:
        return None
    params = CrlbParams.from_scenario(scenario)
    vals = []
    for p in as_xy(points):
        try:
            vals.append(crlb(p, params))
        except DoalfError:
            continue
    return float(np.mean(vals)) if vals else None


def apply_axis(cfg: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    """Config with one parameter set to ``value``."""
    sc = cfg.scenario
    if axis == "rp_interval":
        return replace(cfg, scenario=sc.replace(rp_interval_m=float(value)))
    if axis == "ap_count":
        aps = place_aps(sc.area_width_m, sc.area_height_m, int(value))
        return replace(cfg, scenario=sc.replace(aps=tuple(aps)))
    if axis == "exponent":
        return _with_radio(cfg, exponent=float(value))
    if axis == "shadow_std":
        return _with_radio(cfg, shadow_std_db=float(value))
    if axis == "doa_std":
        return replace(cfg, scenario=sc.replace(doa=DoaModel.from_degrees(float(value))))
    if axis == "k":
        methods = tuple(replace(m, match=replace(m.match, k=int(value))) for m in cfg.methods)
        return replace(cfg, methods=methods)
    raise InvalidParameter(f"unknown sweep axis {axis!r}; valid axes: {', '.join(AXES)}")


def _with_radio(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    if any(m.radio is not None and m.radio != cfg.scenario.radio.name for m in cfg.methods):
        raise InvalidParameter("radio-parameter sweeps need all methods on the base radio model")
    sc = cfg.scenario
    return replace(cfg, scenario=sc.replace(radio=sc.radio.replace(**changes)))


def sweep(cfg: ExperimentConfig, axis: str, values) -> SweepResult:
    """Rerun the experiment at each axis value with the same master seed."""
    values = tuple(values)
    if axis not in AXES:
        raise InvalidParameter(f"unknown sweep axis {axis!r}; valid axes: {', '.join(AXES)}")
    if not values:
        raise InvalidParameter("sweep needs at least one value")
    stats = {m.label: [] for m in cfg.methods}
    crlbs = []
    for v in values:
        sub = apply_axis(cfg, axis, v)
        errors, points = simulate_errors(sub)
        for label, e in errors.items():
            stats[label].append(ErrorStats.from_errors(e))
        crlbs.append(mean_crlb(sub.scenario, points))
        log.info("sweep %s=%s: %s", axis, v,
                 ", ".join(f"{k}={stats[k][-1].mean:.3f}" for k in stats))
    return SweepResult(axis, values, stats, tuple(crlbs))


def count_violations(series, increasing: bool) -> int:
    """Adjacent pairs that break the expected monotone direction."""
    diffs = np.diff(np.asarray(series, dtype=float))
    return int(np.sum(diffs < 0) if increasing else np.sum(diffs > 0))
