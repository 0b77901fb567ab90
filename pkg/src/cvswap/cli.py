"""``cvswap`` command-line driver.

    cvswap <subcommand> [--config PATH] [--out PATH] [--format json|csv]
           [--squeezing-db DB] [--anti-squeezing-db DB] [--gain G|optimal]
           [--eta ETA|START:STOP:STEP]

Exit status: 0 on success, 1 on configuration/input errors, 2 on numerical
failure (for example a non-physical state).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .experiments import EXPERIMENTS, ExperimentConfig, Sweep, run
from .gaussian import SqueezerSpec, UnphysicalStateError

SIG_DIGITS = 12


class ConfigError(ValueError):
    pass


def _field(name, value, kind):
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {name!r}: {exc}") from None


def _parse_squeezer(raw) -> SqueezerSpec:
    if not isinstance(raw, dict):
        raise ConfigError("field 'squeezer': expected an object")
    try:
        if "squeezing_db" in raw or "anti_squeezing_db" in raw:
            return SqueezerSpec.from_db(float(raw["squeezing_db"]), float(raw["anti_squeezing_db"]))
        return SqueezerSpec(float(raw["v_sq"]), float(raw["v_anti"]))
    except KeyError as exc:
        raise ConfigError(f"field 'squeezer': missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'squeezer': {exc}") from None


def _parse_gain(raw):
    if raw is None or raw == "optimal":
        return raw
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"field 'gain': expected a number or 'optimal', got {raw!r}")
    if raw < 0:
        raise ConfigError("field 'gain': must be >= 0")
    return float(raw)


def _parse_eta(raw):
    if raw is None:
        return None
    if isinstance(raw, dict):
        try:
            return Sweep(float(raw["start"]), float(raw["stop"]), float(raw["step"]))
        except KeyError as exc:
            raise ConfigError(f"field 'eta': sweep missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'eta': {exc}") from None
    if isinstance(raw, str) and ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"field 'eta': expected START:STOP:STEP, got {raw!r}")
        try:
            return Sweep(*(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"field 'eta': {exc}") from None
    eta = _field("eta", raw, float)
    if not 0.0 <= eta <= 1.0:
        raise ConfigError(f"field 'eta': must lie in [0, 1], got {eta}")
    return eta


def parse_config(data: dict, experiment: str | None = None) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {"experiment", "squeezer", "gain", "eta", "output", "path"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    exp = data.get("experiment", experiment) or "swap_ghz_ghz"
    if experiment is not None and exp != experiment:
        raise ConfigError(f"field 'experiment': config says {exp!r} but subcommand is {experiment!r}")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"field 'experiment': unknown experiment {exp!r}")
    cfg = ExperimentConfig(experiment=exp)
    if "squeezer" in data:
        cfg.squeezer = _parse_squeezer(data["squeezer"])
    cfg.gain = _parse_gain(data.get("gain"))
    cfg.eta = _parse_eta(data.get("eta"))
    out = data.get("output") or {}
    if not isinstance(out, dict):
        raise ConfigError("field 'output': expected an object with 'path' and 'format'")
    cfg.output_path = out.get("path")
    fmt = out.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"field 'output.format': expected 'json' or 'csv', got {fmt!r}")
    cfg.output_format = fmt
    cfg.path = data.get("path")
    return cfg


def load_config(path: str, experiment: str | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse_config(data, experiment)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _round(x):
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{SIG_DIGITS}g}")
    return x


def to_json(report: dict) -> str:
    return json.dumps(_round(report), indent=2) + "\n"


def _flatten(prefix, x, out):
    if isinstance(x, dict):
        for k, v in x.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(x, list) and x and isinstance(x[0], dict) and "name" in x[0]:
        for item in x:
            _flatten(f"{prefix}.{item['name']}", {k: v for k, v in item.items() if k != "name"}, out)
    elif isinstance(x, list):
        for i, v in enumerate(x):
            _flatten(f"{prefix}.{i}", v, out)
    else:
        out.append((prefix, x))


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def to_csv(report: dict) -> str:
    """Sweep-style reports become one record per row, others key/value pairs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    report = _round(report)
    if "rows" in report:
        cols = report["columns"]
        writer.writerow(cols)
        for row in report["rows"]:
            writer.writerow([_cell(row[c]) for c in cols])
    else:
        pairs = []
        _flatten("", report, pairs)
        writer.writerow(["key", "value"])
        for k, v in pairs:
            writer.writerow([k, _cell(v)])
    return buf.getvalue()


def _error(msg: str) -> None:
    print(f"cvswap: error: {msg}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvswap", description="Gaussian entanglement-swapping simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for exp in EXPERIMENTS:
        p = sub.add_parser(exp.replace("_", "-"), help=exp.replace("_", " "))
        if exp in ("ppt_file", "tomography_roundtrip"):
            p.add_argument("path", nargs="?" if exp == "tomography_roundtrip" else None,
                           help="covariance JSON" if exp == "ppt_file" else "measurement-set JSON")
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--squeezing-db", type=float)
        p.add_argument("--anti-squeezing-db", type=float)
        p.add_argument("--gain", help="classical-channel gain or 'optimal'")
        p.add_argument("--eta", help="channel efficiency or START:STOP:STEP")
        p.set_defaults(experiment=exp)
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> None:
    if args.squeezing_db is not None or args.anti_squeezing_db is not None:
        sq_db = args.squeezing_db if args.squeezing_db is not None else -10 * np.log10(cfg.squeezer.v_sq)
        anti_db = args.anti_squeezing_db if args.anti_squeezing_db is not None \
            else 10 * np.log10(cfg.squeezer.v_anti)
        cfg.squeezer = SqueezerSpec.from_db(sq_db, anti_db)
    if args.gain is not None:
        cfg.gain = "optimal" if args.gain == "optimal" else _parse_gain(_field("gain", args.gain, float))
    if args.eta is not None:
        cfg.eta = _parse_eta(args.eta)
    if args.format is not None:
        cfg.output_format = args.format
    if args.out is not None:
        cfg.output_path = args.out
    if getattr(args, "path", None):
        cfg.path = args.path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config, args.experiment)
        else:
            cfg = ExperimentConfig(experiment=args.experiment)
        _apply_overrides(cfg, args)
        if cfg.experiment == "ppt_file" and not cfg.path:
            raise ConfigError("ppt-file needs a covariance file path")
        if cfg.path is not None and cfg.experiment in ("ppt_file", "tomography_roundtrip"):
            try:
                open(cfg.path).close()
            except OSError as exc:
                raise ConfigError(f"{cfg.path}: {exc.strerror}") from None
    except (ConfigError, UnphysicalStateError, ValueError) as exc:
        _error(str(exc))
        return 1

    try:
        report = run(cfg)
    except UnphysicalStateError as exc:
        _error(f"numerical failure: {exc}")
        return 2
    except (json.JSONDecodeError, KeyError) as exc:
        _error(f"{cfg.path}: malformed input: {exc}")
        return 1
    except np.linalg.LinAlgError as exc:
        _error(f"numerical failure: {exc}")
        return 2
    except ValueError as exc:
        # bad file contents are input errors; anything else is numerical
        if cfg.path is not None:
            _error(str(exc))
            return 1
        _error(f"numerical failure: {exc}")
        return 2

    text = to_csv(report) if cfg.output_format == "csv" else to_json(report)
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            _error(f"{cfg.output_path}: {exc.strerror}")
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
