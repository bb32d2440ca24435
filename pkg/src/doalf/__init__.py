"""Hybrid RSSI + direction-of-arrival fingerprint positioning.

Synthetic radio scenarios, offline fingerprint databases, NN/KNN/WKNN and
DoA-LF estimators, Cramer-Rao bounds and a Monte Carlo harness.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: F401
    DegenerateGeometry, DimensionError, DoalfError, InvalidParameter, OutOfModelRange,
    ParseError, SingularFim, SingularTerm,
)
from .geometry import Point, angular_diff, bearing, distance  # noqa: F401
from .radio import DoaModel, RadioModel, PRESETS, preset  # noqa: F401
from .fingerprint import (  # noqa: F401
    Fingerprint, FingerprintDatabase, Scenario, build_database, deploy_grid, load_database,
    place_aps, save_database,
)
from .matching import MatchConfig, estimate, k_nearest  # noqa: F401
from .crlb import CrlbParams, FisherInfo, crlb, crlb_closed_form, crlb_numeric, fim  # noqa: F401
from .experiments import ExperimentConfig, MethodSpec, run_experiment, sweep  # noqa: F401
