"""Command-line front end.

Subcommands: ``build-db``, ``locate``, ``simulate``, ``sweep``, ``crlb-map``.
Exit codes: 0 success, 2 usage or config error, 3 I/O error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .crlb import CrlbParams, crlb_closed_form, crlb_numeric, fim, fim_printed
from .exceptions import DegenerateGeometry, DoalfError, SingularFim, SingularTerm
from .experiments import (
    ErrorStats, ExperimentConfig, apply_axis, common_grid, simulate_errors, sweep,
)
from .fingerprint import (
    Fingerprint, build_database, default_grid, deploy_grid, load_database, noiseless_fingerprints,
    save_database,
)
from .matching import MatchConfig, estimate, k_nearest
from .radio import preset

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("doalf")


class NumericFailure(DoalfError):
    pass


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".10g")


def write_csv(path: Path, header: list[str], columns: list[str], rows) -> None:
    lines = [f"# {h}" for h in header]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(path: Path, config: RunConfig, outputs: list[Path], command: str) -> None:
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "seed": config.seed,
        "config": config.values,
        "config_source": config.source,
        "outputs": {p.name: sha256(p) for p in outputs},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _header(config: RunConfig, command: str) -> list[str]:
    return [f"doalf {__version__} {command}", f"seed={config.seed}", *config.header_lines()]


# ---------------------------------------------------------------------------
# commands


def cmd_build_db(args) -> int:
    config = load_config(args.config).with_seed(args.seed)
    out = Path(args.out or "fingerprints.csv")
    exp = config.experiment()
    sc = exp.scenario
    db = build_database(sc, default_grid(sc), exp.samples_per_rp, exp.master_seed)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_database(db, out)
    write_manifest(out.with_name(out.name + ".manifest.json"), config, [out], "build-db")
    print(f"wrote {len(db)} RPs x {2 * db.q} features to {out}")
    return EXIT_OK


def cmd_locate(args) -> int:
    db = load_database(args.db)
    try:
        values = [float(v) for v in args.measurement.replace(" ", "").split(",") if v]
    except ValueError:
        raise ConfigError(f"cannot parse measurement {args.measurement!r}") from None
    if len(values) != 2 * db.q:
        raise ConfigError(
            f"measurement has {len(values)} values; database expects 2Q = {2 * db.q} "
            f"({db.q} RSSI in dBm then {db.q} DoA in degrees)"
        )
    query = Fingerprint.from_degrees(values[:db.q], values[db.q:])
    cfg = MatchConfig(args.method, args.k)
    if cfg.k > len(db):
        raise ConfigError(f"k={cfg.k} exceeds database size {len(db)}")
    est = estimate(db, query, cfg)
    print("x_hat,y_hat")
    print(f"{_fmt(est.x)},{_fmt(est.y)}")
    print("index,x,y,feature_distance")
    for n in k_nearest(db, query, cfg):
        print(f"{n.index},{_fmt(n.rp.x)},{_fmt(n.rp.y)},{_fmt(n.feature_distance)}")
    return EXIT_OK


def _simulate_rssi(config: RunConfig, exp: ExperimentConfig, out_dir: Path) -> list[Path]:
    sc = exp.scenario
    grid = np.array([tuple(p) for p in default_grid(sc)])
    rows = []
    columns = ["x", "y", "ap"]
    presets = ("mmwave60", "wifi24")
    per_preset = [noiseless_fingerprints(sc.replace(radio=preset(name)), grid)[0] for name in presets]
    columns += [f"rssi_{name}_dbm" for name in presets]
    for i, (x, y) in enumerate(grid):
        for j in range(sc.q):
            rows.append([x, y, j + 1] + [r[i, j] for r in per_preset])
    path = out_dir / "rssi_comparison.csv"
    write_csv(path, _header(config, "simulate"), columns, rows)
    return [path]


def cmd_simulate(args) -> int:
    config = load_config(args.config).with_seed(args.seed)
    out_dir = Path(args.out or "results")
    exp = config.experiment(workers=args.workers)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.get("experiment", "kind") == "rssi":
        outputs = _simulate_rssi(config, exp, out_dir)
    else:
        errors, _ = simulate_errors(exp)
        grid = common_grid(errors)
        stats = {label: ErrorStats.from_errors(e, grid) for label, e in errors.items()}
        header = _header(config, "simulate")
        summary = out_dir / "summary.csv"
        write_csv(summary, header, ["method", "mean_error_m", "p50", "p90", "p95"],
                  [[label, s.mean, s.p50, s.p90, s.p95] for label, s in stats.items()])
        cdf_path = out_dir / "cdf.csv"
        labels = list(stats)
        write_csv(cdf_path, header, ["error_m"] + labels,
                  [[e] + [stats[l].cdf_values[i] for l in labels] for i, e in enumerate(grid)])
        outputs = [summary, cdf_path]
        for label, s in stats.items():
            print(f"{label:>18}: mean {s.mean:.3f} m  p50 {s.p50:.3f}  p90 {s.p90:.3f}  p95 {s.p95:.3f}")
    write_manifest(out_dir / "manifest.json", config, outputs, "simulate")
    return EXIT_OK


def _label_value(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


def cmd_sweep(args) -> int:
    config = load_config(args.config).with_seed(args.seed)
    if args.axis:
        config.values["sweep"]["axis"] = args.axis
    if args.values:
        config.values["sweep"]["values"] = args.values
    axis, values = config.sweep_axis()
    series = config.series_axis()
    out_dir = Path(args.out or "results")
    out_dir.mkdir(parents=True, exist_ok=True)
    base = config.experiment(workers=args.workers)
    runs = [("", base)]
    if series is not None:
        s_axis, s_values = series
        runs = [(f"_{s_axis}={_label_value(v)}", apply_axis(base, s_axis, v)) for v in s_values]
    header = _header(config, "sweep")
    outputs = []
    for suffix, exp in runs:
        result = sweep(exp, axis, values)
        for label, stats in result.stats.items():
            tag = suffix + (f"_{label}" if len(result.stats) > 1 else "")
            path = out_dir / f"sweep_{axis}{tag}.csv"
            columns = ["axis_value", "mean_error_m", "mean_crlb_m2"]
            rows = [[v, s.mean, c] for v, s, c in zip(values, stats, result.mean_crlb)]
            if axis == "rp_interval":
                columns.append("error_minus_interval_m")
                rows = [r + [r[1] - r[0]] for r in rows]
            write_csv(path, header, columns, rows)
            outputs.append(path)
            print(f"{path.name}: " + ", ".join(f"{_label_value(v)}->{s.mean:.3f}" for v, s in zip(values, stats)))
    write_manifest(out_dir / "manifest.json", config, outputs, "sweep")
    return EXIT_OK


def cmd_crlb_map(args) -> int:
    config = load_config(args.config).with_seed(args.seed)
    step = args.step if args.step is not None else float(config.get("crlb", "grid_step"))
    if not step > 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    form = config.get("crlb", "fim")
    if form not in ("exact", "printed"):
        raise ConfigError("[crlb] fim must be 'exact' or 'printed'")
    sc = config.scenario()
    params = CrlbParams.from_scenario(sc)
    info_fn = fim if form == "exact" else fim_printed
    rows = []
    n_numeric = 0
    for p in deploy_grid(sc.area_width_m, sc.area_height_m, step):
        numeric = closed = float("nan")
        try:
            numeric = crlb_numeric(info_fn(p, params), theta=p, aps=params.aps)
            n_numeric += 1
        except (SingularFim, DegenerateGeometry):
            pass
        try:
            closed = crlb_closed_form(p, params)
        except (SingularTerm, DegenerateGeometry):
            pass
        flag = int(math.isnan(numeric) or math.isnan(closed))
        rows.append([p.x, p.y, numeric, closed, flag])
    out = Path(args.out or "crlb_map.csv")
    write_csv(out, _header(config, "crlb-map") + [f"fim={form}", f"grid_step={step}"],
              ["x", "y", "crlb_numeric", "crlb_closed", "singular_flag"], rows)
    write_manifest(out.with_name(out.name + ".manifest.json"), config, [out], "crlb-map")
    print(f"wrote {len(rows)} grid points to {out} ({len(rows) - n_numeric} without a numeric bound)")
    if n_numeric == 0:
        raise NumericFailure("the FIM is singular at every grid point")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default: the config's, itself defaulting to a fixed constant)")
    common.add_argument("--workers", type=int, default=1, help="worker processes; outputs do not depend on it")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="doalf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-db", parents=[common], help="build and save an offline database")
    p.add_argument("config", help="config file or preset name")
    p.add_argument("out_path", nargs="?", help="database CSV (same as --out)")
    p.set_defaults(func=cmd_build_db)

    p = sub.add_parser("locate", parents=[common], help="estimate a position from one measurement")
    p.add_argument("db", help="database CSV")
    p.add_argument("--measurement", "-m", required=True,
                   help="2Q comma-separated values: Q RSSI (dBm) then Q DoA (degrees)")
    p.add_argument("--method", default="doalf", choices=("nn", "knn", "wknn", "doalf"))
    p.add_argument("--k", type=int, default=4)
    p.set_defaults(func=cmd_locate)

    p = sub.add_parser("simulate", parents=[common], help="paired Monte Carlo comparison")
    p.add_argument("config", help="config file or preset name (fig5 ... fig11)")
    p.add_argument("out_dir", nargs="?", help="output directory (same as --out)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="mean error along one parameter axis")
    p.add_argument("config", help="config file or preset name (fig12 ... fig16, figk)")
    p.add_argument("out_dir", nargs="?", help="output directory (same as --out)")
    p.add_argument("--axis", default=None)
    p.add_argument("--values", default=None, help="comma-separated axis values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("crlb-map", parents=[common], help="CRLB over a grid of positions")
    p.add_argument("config", help="config file or preset name")
    p.add_argument("out_path", nargs="?", help="output CSV (same as --out)")
    p.add_argument("--step", type=float, default=None, help="grid step in meters")
    p.set_defaults(func=cmd_crlb_map)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    for positional in ("out_path", "out_dir"):
        if getattr(args, positional, None) and not args.out:
            args.out = getattr(args, positional)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except NumericFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DoalfError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
