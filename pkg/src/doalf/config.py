"""Run configuration: INI-style ``key = value`` files and the named figure presets.

Grammar (every section and key optional; defaults shown)::

    [scenario]
    width = 100              ; meters
    height = 100
    ap_count = 4             ; corners for 4, perimeter spacing otherwise
    aps =                    ; explicit "x:y;x:y;..." overrides ap_count
    rp_interval = 5          ; meters
    tx_power_mw = 30         ; or tx_power_dbm = ...

    [radio]
    preset = mmwave60        ; mmwave60 | wifi24
    exponent =               ; optional overrides of the preset
    shadow_std_db =
    pl_ref_db =
    ref_distance_m =

    [doa]
    std_deg = 2

    [match]
    methods = doalf          ; comma list of method[@preset], method in nn|knn|wknn|doalf
    k = 4
    epsilon = 1e-6
    gamma = 1
    feature_scaling = raw    ; raw | per_dimension_std
    angle_unit = degrees     ; degrees | radians

    [experiment]
    preset =                 ; start from a named preset, then apply this file
    kind = compare           ; compare | rssi
    num_test_points = 2000
    samples_per_rp = 100
    seed = 20190601

    [sweep]
    axis =                   ; rp_interval | ap_count | exponent | shadow_std | doa_std | k
    values =                 ; comma list
    series_axis =            ; optional second axis, one output table per value
    series_values =

    [crlb]
    grid_step = 10
    fim = exact              ; exact | printed

Lines starting with ``#`` or ``;`` are comments.
"""

from __future__ import annotations

import configparser
import copy
from dataclasses import dataclass
from pathlib import Path

from .exceptions import DoalfError
from .experiments import AXES, ExperimentConfig, MethodSpec
from .fingerprint import Scenario, place_aps
from .geometry import Point
from .radio import DoaModel, mw_to_dbm, preset
from .rng import DEFAULT_SEED


class ConfigError(DoalfError, ValueError):
    pass


DEFAULTS: dict[str, dict[str, str]] = {
    "scenario": {
        "width": "100", "height": "100", "ap_count": "4", "aps": "",
        "rp_interval": "5", "tx_power_mw": "30", "tx_power_dbm": "",
    },
    "radio": {
        "preset": "mmwave60", "exponent": "", "shadow_std_db": "", "pl_ref_db": "",
        "ref_distance_m": "",
    },
    "doa": {"std_deg": "2"},
    "match": {
        "methods": "doalf", "k": "4", "epsilon": "1e-6", "gamma": "1",
        "feature_scaling": "raw", "angle_unit": "degrees",
    },
    "experiment": {
        "preset": "", "kind": "compare", "num_test_points": "2000",
        "samples_per_rp": "100", "seed": str(DEFAULT_SEED),
    },
    "sweep": {"axis": "", "values": "", "series_axis": "", "series_values": ""},
    "crlb": {"grid_step": "10", "fim": "exact"},
}

_RSSI_ONLY_BOTH = "nn@mmwave60,knn@mmwave60,wknn@mmwave60,nn@wifi24,knn@wifi24,wknn@wifi24"

PRESETS: dict[str, dict[str, dict[str, str]]] = {
    # mmWave vs WiFi, RSSI-only estimators, K = 6
    "fig5": {"match": {"methods": _RSSI_ONLY_BOTH, "k": "6"}},
    "fig6": {"match": {"methods": _RSSI_ONLY_BOTH, "k": "6"}},
    # RSSI of both presets at every RP
    "fig7": {"experiment": {"kind": "rssi"}},
    # DoA-LF against the RSSI-only estimators on mmWave, K = 4
    "fig8": {"match": {"methods": "nn,knn,wknn,doalf", "k": "4"}},
    "fig9": {"match": {"methods": "nn,knn,wknn,doalf", "k": "4"}},
    # DoA-LF (mmWave) vs WKNN on both presets, K = 6
    "fig10": {"match": {"methods": "doalf@mmwave60,wknn@mmwave60,wknn@wifi24", "k": "6"}},
    "fig11": {"match": {"methods": "doalf@mmwave60,wknn@mmwave60,wknn@wifi24", "k": "6"}},
    "fig12": {"sweep": {"axis": "rp_interval", "values": "5,6,7,8",
                        "series_axis": "ap_count", "series_values": "3,4,5,6"}},
    "fig13": {"sweep": {"axis": "ap_count", "values": "3,4,5,6",
                        "series_axis": "rp_interval", "series_values": "5,6,7,8"}},
    "fig14": {"sweep": {"axis": "exponent", "values": "1.5,2.0,2.5,3.0"}},
    "fig15": {"sweep": {"axis": "shadow_std", "values": "1,2,3"}},
    "fig16": {"sweep": {"axis": "doa_std", "values": "1,2,5,10"}},
    "figk": {"match": {"methods": "wknn@mmwave60,wknn@wifi24"},
             "sweep": {"axis": "k", "values": "1,2,3,4,5,6,7,8,9,10,11,12"}},
}


def _merge(base: dict, overrides: dict) -> None:
    for section, items in overrides.items():
        if section not in base:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in items.items():
            if key not in base[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            base[section][key] = str(value).strip()


@dataclass
class RunConfig:
    """Resolved settings; ``values`` is the full section -> key -> string table."""

    values: dict[str, dict[str, str]]
    source: str = "<defaults>"

    def get(self, section: str, key: str) -> str:
        return self.values[section][key]

    def _num(self, section, key, kind=float):
        raw = self.get(section, key)
        try:
            return kind(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {kind.__name__}") from None

    @property
    def seed(self) -> int:
        return self._num("experiment", "seed", int)

    def with_seed(self, seed: int | None) -> "RunConfig":
        if seed is None:
            return self
        values = copy.deepcopy(self.values)
        values["experiment"]["seed"] = str(seed)
        return RunConfig(values, self.source)

    def scenario(self) -> Scenario:
        width = self._num("scenario", "width")
        height = self._num("scenario", "height")
        if self.get("scenario", "aps"):
            try:
                aps = [Point(*map(float, item.split(":")))
                       for item in self.get("scenario", "aps").split(";") if item.strip()]
            except (TypeError, ValueError):
                raise ConfigError("[scenario] aps must look like 'x:y;x:y'") from None
        else:
            aps = place_aps(width, height, self._num("scenario", "ap_count", int))
        if self.get("scenario", "tx_power_dbm"):
            tx = self._num("scenario", "tx_power_dbm")
        else:
            tx = mw_to_dbm(self._num("scenario", "tx_power_mw"))
        radio = preset(self.get("radio", "preset"))
        changes = {
            key: self._num("radio", key)
            for key in ("exponent", "shadow_std_db", "pl_ref_db", "ref_distance_m")
            if self.get("radio", key)
        }
        if changes:
            radio = radio.replace(**changes)
        return Scenario(width, height, tuple(aps), self._num("scenario", "rp_interval"), tx,
                        radio, DoaModel.from_degrees(self._num("doa", "std_deg")))

    def methods(self) -> list[MethodSpec]:
        tokens = [t for t in self.get("match", "methods").split(",") if t.strip()]
        if not tokens:
            raise ConfigError("[match] methods is empty")
        kwargs = dict(
            epsilon=self._num("match", "epsilon"),
            gamma=self._num("match", "gamma"),
            feature_scaling=self.get("match", "feature_scaling"),
            angle_unit_for_distance=self.get("match", "angle_unit"),
        )
        k = self._num("match", "k", int)
        return [MethodSpec.parse(t, k, **kwargs) for t in tokens]

    def experiment(self, workers: int = 1) -> ExperimentConfig:
        return ExperimentConfig(
            self.scenario(), tuple(self.methods()),
            num_test_points=self._num("experiment", "num_test_points", int),
            samples_per_rp=self._num("experiment", "samples_per_rp", int),
            master_seed=self.seed,
            workers=workers,
        )

    def sweep_axis(self) -> tuple[str, list[float]]:
        return self._axis("axis", "values")

    def series_axis(self) -> tuple[str, list[float]] | None:
        if not self.get("sweep", "series_axis"):
            return None
        return self._axis("series_axis", "series_values")

    def _axis(self, axis_key, values_key):
        axis = self.get("sweep", axis_key)
        if axis not in AXES:
            raise ConfigError(f"unknown sweep axis {axis!r}; valid axes: {', '.join(AXES)}")
        return axis, parse_values(self.get("sweep", values_key))

    def header_lines(self) -> list[str]:
        lines = [f"config_source={self.source}"]
        for section, items in self.values.items():
            for key, value in items.items():
                lines.append(f"[{section}] {key}={value}")
        return lines


def parse_values(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse value list {text!r}") from None
    if not values:
        raise ConfigError("value list is empty")
    return values


def from_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    values = copy.deepcopy(DEFAULTS)
    _merge(values, PRESETS[name])
    values["experiment"]["preset"] = name
    return RunConfig(values, f"preset:{name}")


def load_config(source) -> RunConfig:
    """Read a config file, or resolve a bare preset name like ``fig9``."""
    path = Path(source)
    if not path.exists():
        if str(source) in PRESETS:
            return from_preset(str(source))
        raise ConfigError(f"config file not found: {source}")
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=(";",),
    )
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    overrides = {s: dict(parser.items(s, raw=True)) for s in parser.sections()}
    base_name = overrides.get("experiment", {}).get("preset", "").strip()
    config = from_preset(base_name) if base_name else RunConfig(copy.deepcopy(DEFAULTS))
    try:
        _merge(config.values, overrides)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    config.source = str(path)
    return config
