"""Scenario layout, offline fingerprint database construction and CSV persistence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .exceptions import DegenerateGeometry, InvalidParameter, ParseError
from .geometry import COINCIDENCE_TOL, Point, as_xy, bearings, canonical_angle, distances, to_points
from .radio import DoaModel, RadioModel, doa_from_normals, mean_rssi, rssi_from_normals

FILE_MAGIC = "doalf fingerprint database v1"


@dataclass(frozen=True)
class Scenario:
    area_width_m: float
    area_height_m: float
    aps: tuple[Point, ...]
    rp_interval_m: float
    tx_power_dbm: float
    radio: RadioModel
    doa: DoaModel

    def __post_init__(self):
        object.__setattr__(self, "aps", tuple(to_points(self.aps)))
        if not self.aps:
            raise InvalidParameter("a scenario needs at least one AP")
        if not (self.area_width_m > 0 and self.area_height_m > 0):
            raise InvalidParameter("area dimensions must be positive")
        if not self.rp_interval_m > 0:
            raise InvalidParameter("rp_interval_m must be positive")
        for ap in self.aps:
            if not self.contains(ap):
                raise InvalidParameter(f"AP {tuple(ap)} lies outside the area")

    @property
    def q(self) -> int:
        return len(self.aps)

    @property
    def ap_array(self) -> np.ndarray:
        return as_xy(self.aps)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.area_width_m, self.area_height_m)

    def contains(self, p, tol: float = 1e-9) -> bool:
        x, y = as_xy(p)
        return -tol <= x <= self.area_width_m + tol and -tol <= y <= self.area_height_m + tol

    def replace(self, **changes) -> "Scenario":
        fields = {
            name: getattr(self, name)
            for name in (
                "area_width_m", "area_height_m", "aps", "rp_interval_m",
                "tx_power_dbm", "radio", "doa",
            )
        }
        fields.update(changes)
        return Scenario(**fields)


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """Q RSSI values (dBm) and Q DoA values (radians, canonical)."""

    rssi: np.ndarray
    doa: np.ndarray

    def __post_init__(self):
        rssi = np.asarray(self.rssi, dtype=float).reshape(-1)
        doa = canonical_angle(np.asarray(self.doa, dtype=float).reshape(-1))
        if rssi.shape != np.shape(doa):
            raise InvalidParameter(
                f"rssi and doa must have equal length, got {rssi.size} and {np.size(doa)}"
            )
        object.__setattr__(self, "rssi", rssi)
        object.__setattr__(self, "doa", np.atleast_1d(doa))

    @property
    def q(self) -> int:
        return self.rssi.size

    @classmethod
    def from_degrees(cls, rssi, doa_deg) -> "Fingerprint":
        return cls(rssi, np.radians(np.asarray(doa_deg, dtype=float)))

    def __eq__(self, other):
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return np.array_equal(self.rssi, other.rssi) and np.array_equal(self.doa, other.doa)


@dataclass(frozen=True, eq=False)
class FingerprintDatabase:
    """Offline radio map: one row per RP, ``2Q`` features per row.

    ``rssi`` and ``doa`` are ``(M, Q)`` arrays (dBm, radians); ``rps`` is
    ``(M, 2)``. Arrays are made read-only on construction.
    """

    scenario: Scenario
    rps: np.ndarray
    rssi: np.ndarray
    doa: np.ndarray
    samples_per_rp: int
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rps = np.array(self.rps, dtype=float).reshape(-1, 2)
        rssi = np.array(self.rssi, dtype=float)
        doa = np.array(self.doa, dtype=float)
        m, q = len(rps), self.scenario.q
        if m < 1:
            raise InvalidParameter("database must hold at least one RP")
        if rssi.shape != (m, q) or doa.shape != (m, q):
            raise InvalidParameter(
                f"feature arrays must be ({m}, {q}); got {rssi.shape} and {doa.shape}"
            )
        for arr in (rps, rssi, doa):
            arr.flags.writeable = False
        object.__setattr__(self, "rps", rps)
        object.__setattr__(self, "rssi", rssi)
        object.__setattr__(self, "doa", doa)

    def __len__(self):
        return len(self.rps)

    @property
    def q(self) -> int:
        return self.scenario.q

    def row(self, i: int) -> tuple[Point, Fingerprint]:
        return Point(*self.rps[i]), Fingerprint(self.rssi[i], self.doa[i])

    def rows(self):
        for i in range(len(self)):
            yield self.row(i)


def deploy_grid(width: float, height: float, interval: float) -> list[Point]:
    """Square RP grid anchored at the origin, both boundary rows included.

    Row-major: x varies fastest.
    """
    if not interval > 0 or interval > min(width, height):
        raise InvalidParameter(
            f"interval must be in (0, {min(width, height)}], got {interval}"
        )
    nx = int(math.floor(width / interval + 1e-9)) + 1
    ny = int(math.floor(height / interval + 1e-9)) + 1
    return [Point(i * interval, j * interval) for j in range(ny) for i in range(nx)]


def place_aps(width: float, height: float, count: int) -> list[Point]:
    """APs on the area boundary.

    Four APs go in the corners. Any other count is spread at equal
    arc-length along the perimeter, counterclockwise from the origin.
    """
    if count < 1:
        raise InvalidParameter("need at least one AP")
    if count == 4:
        return [Point(0.0, 0.0), Point(width, 0.0), Point(width, height), Point(0.0, height)]
    perimeter = 2.0 * (width + height)
    out = []
    for k in range(count):
        s = k * perimeter / count
        if s <= width:
            p = (s, 0.0)
        elif s <= width + height:
            p = (width, s - width)
        elif s <= 2 * width + height:
            p = (width - (s - width - height), height)
        else:
            p = (0.0, height - (s - 2 * width - height))
        out.append(Point(float(p[0]), float(p[1])))
    return out


def exclude_near(points, aps, min_distance: float) -> list[Point]:
    """Drop points closer than ``min_distance`` to any AP."""
    pts = as_xy(points).reshape(-1, 2)
    keep = np.all(distances(pts, aps) >= min_distance, axis=-1)
    return to_points(pts[keep])


def default_grid(scenario: Scenario) -> list[Point]:
    """The scenario's RP grid minus points inside the path-loss reference radius of an AP."""
    grid = deploy_grid(scenario.area_width_m, scenario.area_height_m, scenario.rp_interval_m)
    return exclude_near(grid, scenario.aps, scenario.radio.ref_distance_m)


def noiseless_fingerprints(scenario: Scenario, points) -> tuple[np.ndarray, np.ndarray]:
    """Mean RSSI and true bearings at ``points``; arrays of shape ``(..., Q)``."""
    pts = as_xy(points)
    d = distances(pts, scenario.aps)
    if np.any(d < COINCIDENCE_TOL):
        raise DegenerateGeometry("a measurement point coincides with an AP")
    return mean_rssi(scenario.radio, scenario.tx_power_dbm, d), bearings(pts, scenario.aps)


def noiseless_fingerprint(scenario: Scenario, point) -> Fingerprint:
    rssi, doa = noiseless_fingerprints(scenario, point)
    return Fingerprint(rssi, doa)


def circular_mean(angles, axis=0):
    """Direction of the mean unit vector, canonical."""
    angles = np.asarray(angles)
    return canonical_angle(np.arctan2(np.mean(np.sin(angles), axis=axis),
                                      np.mean(np.cos(angles), axis=axis)))


def build_database(scenario: Scenario, grid, samples_per_rp: int, rng) -> FingerprintDatabase:
    """Average ``samples_per_rp`` noisy fingerprints at each RP.

    RSSI samples are averaged arithmetically, DoA samples circularly. Row
    ``i`` draws from substream ``(seed, DATABASE, i)``, so any subset or
    ordering of rows reproduces the same values.
    """
    if samples_per_rp < 1:
        raise InvalidParameter("samples_per_rp must be >= 1")
    handle = rng if isinstance(rng, rngmod.RngHandle) else rngmod.RngHandle(int(rng))
    rps = as_xy(grid).reshape(-1, 2)
    truth_rssi, truth_doa = noiseless_fingerprints(scenario, rps)
    d = distances(rps, scenario.aps)
    q = scenario.q
    rssi = truth_rssi.copy()
    doa = truth_doa.copy()
    noisy_s = scenario.radio.shadow_std_db > 0
    noisy_phi = scenario.doa.doa_std_rad > 0
    for i in range(len(rps)):
        gen = handle.child(rngmod.DATABASE, i).generator()
        z_s = gen.standard_normal((samples_per_rp, q))
        z_phi = gen.standard_normal((samples_per_rp, q))
        if noisy_s:
            rssi[i] = rssi_from_normals(
                scenario.radio, scenario.tx_power_dbm, d[i], z_s
            ).mean(axis=0)
        if noisy_phi:
            doa[i] = circular_mean(doa_from_normals(truth_doa[i], scenario.doa, z_phi), axis=0)
    return FingerprintDatabase(
        scenario, rps, rssi, doa, samples_per_rp, seed=handle.seed,
    )


# ---------------------------------------------------------------------------
# CSV persistence


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _radians_matching(deg: np.ndarray) -> np.ndarray:
    """Radians whose conversion back to degrees reproduces ``deg`` exactly."""
    rad = np.radians(deg)
    for idx in np.ndindex(rad.shape):
        r = rad[idx]
        target = deg[idx]
        if np.degrees(r) == target:
            continue
        direction = np.inf if np.degrees(r) < target else -np.inf
        for _ in range(8):
            r = np.nextafter(r, direction)
            if np.degrees(r) == target:
                rad[idx] = r
                break
    return rad


def save_database(db: FingerprintDatabase, path) -> None:
    sc = db.scenario
    q = sc.q
    lines = [
        f"# {FILE_MAGIC}",
        f"# area_width_m={_fmt(sc.area_width_m)}",
        f"# area_height_m={_fmt(sc.area_height_m)}",
        f"# q={q}",
        "# aps=" + ";".join(f"{_fmt(p.x)}:{_fmt(p.y)}" for p in sc.aps),
        f"# rp_interval_m={_fmt(sc.rp_interval_m)}",
        f"# tx_power_dbm={_fmt(sc.tx_power_dbm)}",
        f"# radio={sc.radio.name}",
        f"# pl_ref_db={_fmt(sc.radio.pl_ref_db)}",
        f"# exponent={_fmt(sc.radio.exponent)}",
        f"# shadow_std_db={_fmt(sc.radio.shadow_std_db)}",
        f"# ref_distance_m={_fmt(sc.radio.ref_distance_m)}",
        f"# doa_std_deg={_fmt(sc.doa.doa_std_deg)}",
        f"# seed={'' if db.seed is None else db.seed}",
        f"# samples_per_rp={db.samples_per_rp}",
        ",".join(["x", "y"] + [f"s_{j + 1}" for j in range(q)] + [f"phi_{j + 1}" for j in range(q)]),
    ]
    doa_deg = np.degrees(db.doa)
    for i in range(len(db)):
        vals = [db.rps[i, 0], db.rps[i, 1], *db.rssi[i], *doa_deg[i]]
        lines.append(",".join(_fmt(v) for v in vals))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_REQUIRED_META = (
    "area_width_m", "area_height_m", "q", "aps", "rp_interval_m", "tx_power_dbm",
    "radio", "pl_ref_db", "exponent", "shadow_std_db", "ref_distance_m",
    "doa_std_deg", "seed", "samples_per_rp",
)


def load_database(path) -> FingerprintDatabase:
    text = Path(path).read_text(encoding="utf-8")
    meta: dict[str, str] = {}
    header = None
    header_line = 0
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = line.split(",")
            header_line = lineno
            continue
        rows.append((lineno, line.split(",")))

    missing = [k for k in _REQUIRED_META if k not in meta]
    if missing:
        raise ParseError(f"missing metadata: {', '.join(missing)}")
    try:
        q = int(meta["q"])
        aps = []
        for item in meta["aps"].split(";"):
            x, y = item.split(":")
            aps.append(Point(float(x), float(y)))
        radio = RadioModel(
            pl_ref_db=float(meta["pl_ref_db"]),
            exponent=float(meta["exponent"]),
            shadow_std_db=float(meta["shadow_std_db"]),
            ref_distance_m=float(meta["ref_distance_m"]),
            name=meta["radio"],
        )
        scenario = Scenario(
            float(meta["area_width_m"]), float(meta["area_height_m"]), tuple(aps),
            float(meta["rp_interval_m"]), float(meta["tx_power_dbm"]), radio,
            DoaModel.from_degrees(float(meta["doa_std_deg"])),
        )
        seed = int(meta["seed"]) if meta["seed"] else None
        samples = int(meta["samples_per_rp"])
    except (ValueError, InvalidParameter) as exc:
        raise ParseError(f"bad metadata: {exc}") from None
    if len(aps) != q:
        raise ParseError(f"metadata q={q} but {len(aps)} AP coordinates given")

    width = 2 + 2 * q
    if header is None:
        raise ParseError("no column header found")
    if len(header) != width:
        raise ParseError(f"header has {len(header)} columns, expected {width}", header_line)
    if not rows:
        raise ParseError("database has no rows (need at least one RP)")
    data = np.empty((len(rows), width))
    for k, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise ParseError(f"row has {len(cells)} columns, expected {width}", lineno)
        try:
            data[k] = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"non-numeric value in row: {','.join(cells)}", lineno) from None
    doa = _radians_matching(data[:, 2 + q:])
    return FingerprintDatabase(
        scenario, data[:, :2], data[:, 2:2 + q], doa, samples, seed=seed, meta=meta,
    )
