"""Command-line front end.

::

    qnetsim list [--json]
    qnetsim run teleportation --ensemble 250 --seed 7 --out t.csv
    qnetsim run shor --message Hello --seed 1 --out shor.csv
    qnetsim run superdense --config run.json

Settings are layered: built-in defaults, then a JSON config file
(``--config``), then ``QNETSIM_*`` environment variables, then flags.
With ``--format csv`` the results table goes to ``--out`` and the full
report (clocks, counters) to the same path with suffix ``.report.json``;
``--format json`` writes both into one document.

Exit status: 0 on success, 1 for configuration errors, 2 when the
simulation itself fails.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import SPEED_OF_LIGHT_KM_S, Attenuation, RandomUnitary
from .errors import ConfigurationError, QNetSimError
from .protocols import (
    BitStream, run_interception, run_shor_demo, run_superdense, run_teleportation,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUN = 0, 1, 2

DEMOS = {
    "teleportation": {
        "description": "Teleport RX(theta)|0> for evenly spaced theta in [0, 2pi]; table of expected vs observed |1> fraction.",
        "parameters": {"ensemble": "systems per angle (default 250)", "points": "number of angles (default 9)",
                       "length_km": "Alice-Bob distance (default 0)"},
    },
    "superdense": {
        "description": "Charlie distributes Bell pairs; Alice sends two bits per qubit to Bob over attenuating fiber.",
        "parameters": {"bits": "random bits to send (default 1000)", "input": "file whose bytes are sent instead",
                       "length_km": "Alice-Bob distance, Charlie at the midpoint (default 1.0)",
                       "attenuation_db_per_km": "fiber loss (default 0.16)"},
    },
    "interception": {
        "description": "Superdense coding with Eve measuring and re-sending every qubit on the Alice-Bob link.",
        "parameters": {"bits": "random bits to send (default 1000)", "input": "file whose bytes are sent instead",
                       "length_km": "Alice-Bob distance (default 0)",
                       "attenuation_db_per_km": "fiber loss (default 0)"},
    },
    "shor": {
        "description": "Send a message Shor-encoded and bare through a channel corrupting one qubit in every nine.",
        "parameters": {"message": "text to send (default 'Hello')", "p_error": "chance a group of nine is corrupted (default 1.0)"},
    },
}

ENV_PREFIX = "QNETSIM_"


@dataclass
class ChannelConfig:
    length_km: float | None = None
    attenuation_db_per_km: float | None = None
    signal_speed: float = SPEED_OF_LIGHT_KM_S
    pulse_ns: float = 1.0
    capacity: int | None = None
    error: dict | None = None


@dataclass
class RunConfig:
    demo: str | None = None
    ensemble: int = 250
    seed: int | None = None
    precision: str = "double"
    progress: bool = False
    points: int = 9
    bits: int = 1000
    input: str | None = None
    message: str = "Hello"
    p_error: float = 1.0
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    out: str | None = None
    format: str = "csv"

    def validate(self):
        if self.demo not in DEMOS:
            raise ConfigurationError(f"unknown demo {self.demo!r}; choose from {sorted(DEMOS)}")
        if self.ensemble < 1:
            raise ConfigurationError("ensemble must be at least 1")
        if self.precision not in ("single", "double"):
            raise ConfigurationError("precision must be 'single' or 'double'")
        if self.format not in ("csv", "json"):
            raise ConfigurationError("format must be 'csv' or 'json'")
        if self.bits < 0 or self.bits % 2:
            raise ConfigurationError("bits must be a non-negative even number")
        if self.points < 1:
            raise ConfigurationError("points must be at least 1")
        if not 0 <= self.p_error <= 1:
            raise ConfigurationError("p_error must lie in [0, 1]")
        ch = self.channel
        if ch.length_km is not None and ch.length_km < 0:
            raise ConfigurationError("length_km must be non-negative")
        if ch.capacity is not None and ch.capacity < 1:
            raise ConfigurationError("capacity must be at least 1")
        if ch.signal_speed <= 0 or ch.pulse_ns < 0:
            raise ConfigurationError("signal_speed must be positive and pulse_ns non-negative")
        if ch.error is not None and ch.error.get("type") not in ("none", "attenuation", "random_unitary"):
            raise ConfigurationError(f"unknown channel error type {ch.error.get('type')!r}")
        return self


_FIELD_TYPES = {"ensemble": int, "seed": int, "precision": str, "progress": bool, "points": int,
                "bits": int, "input": str, "message": str, "p_error": float, "out": str, "format": str,
                "demo": str}
_CHANNEL_TYPES = {"length_km": float, "attenuation_db_per_km": float, "signal_speed": float,
                  "pulse_ns": float, "capacity": int, "error": dict}


def _coerce(name, value, kind):
    if value is None:
        return None
    if kind is bool:
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("1", "true", "yes", "on"):
            return True
        if str(value).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{name}: expected a boolean, got {value!r}")
    if kind is dict:
        if not isinstance(value, dict):
            raise ConfigurationError(f"{name}: expected a table")
        unknown = set(value) - {"type", "params"}
        if unknown:
            raise ConfigurationError(f"{name}: unknown keys {sorted(unknown)}")
        return value
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name}: expected {kind.__name__}, got {value!r}") from None


def apply_mapping(cfg: RunConfig, data: dict, source: str) -> RunConfig:
    for key, value in data.items():
        if key == "channel":
            if not isinstance(value, dict):
                raise ConfigurationError(f"{source}: 'channel' must be a table")
            for ckey, cval in value.items():
                if ckey == "kind":
                    continue
                if ckey not in _CHANNEL_TYPES:
                    raise ConfigurationError(f"{source}: unknown channel key {ckey!r}")
                setattr(cfg.channel, ckey, _coerce(f"channel.{ckey}", cval, _CHANNEL_TYPES[ckey]))
        elif key == "output":
            if not isinstance(value, dict) or set(value) - {"path", "format"}:
                raise ConfigurationError(f"{source}: 'output' takes only 'path' and 'format'")
            if "path" in value:
                cfg.out = _coerce("output.path", value["path"], str)
            if "format" in value:
                cfg.format = _coerce("output.format", value["format"], str)
        elif key in _FIELD_TYPES:
            setattr(cfg, key, _coerce(key, value, _FIELD_TYPES[key]))
        elif key in _CHANNEL_TYPES:
            setattr(cfg.channel, key, _coerce(key, value, _CHANNEL_TYPES[key]))
        else:
            raise ConfigurationError(f"{source}: unknown key {key!r}")
    return cfg


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return data


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for key in list(_FIELD_TYPES) + [k for k in _CHANNEL_TYPES if k != "error"]:
        name = ENV_PREFIX + key.upper()
        if name in environ:
            out[key] = environ[name]
    return out


def build_config(args, environ=None) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        apply_mapping(cfg, load_config_file(args.config), args.config)
    apply_mapping(cfg, env_overrides(environ), "environment")
    flags = {
        "demo": args.demo, "ensemble": args.ensemble, "seed": args.seed, "precision": args.precision,
        "progress": args.progress, "points": args.points, "bits": args.bits, "input": args.input,
        "message": args.message, "p_error": args.p_error, "out": args.out, "format": args.format,
        "length_km": args.length_km, "attenuation_db_per_km": args.attenuation_db_per_km,
        "signal_speed": args.signal_speed, "pulse_ns": args.pulse_ns,
    }
    apply_mapping(cfg, {k: v for k, v in flags.items() if v is not None}, "command line")
    return cfg.validate()


def _error_factory(ch: ChannelConfig, default_alpha: float):
    err = ch.error
    if err is None:
        alpha = default_alpha if ch.attenuation_db_per_km is None else ch.attenuation_db_per_km
        return (lambda: Attenuation(alpha)) if alpha > 0 else None
    params = err.get("params", {}) or {}
    if err["type"] == "none":
        return None
    if err["type"] == "attenuation":
        alpha = float(params.get("alpha_db_per_km", ch.attenuation_db_per_km or default_alpha))
        return lambda: Attenuation(alpha)
    p = float(params.get("p_error", 1.0))
    return lambda: RandomUnitary(p)


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.10f}"
    return str(x)


def execute(cfg: RunConfig):
    """Run the configured demo; returns ``(columns, rows, report_dict)``."""
    ch = cfg.channel
    pulse = ch.pulse_ns * 1e-9
    if cfg.demo == "teleportation":
        angles = np.linspace(0.0, 2 * math.pi, cfg.points)
        fractions, report = run_teleportation(angles, cfg.ensemble, cfg.seed, cfg.precision,
                                              ch.length_km or 0.0, pulse, cfg.progress)
        rows = [(float(t), float(np.sin(t / 2) ** 2), float(f)) for t, f in zip(angles, fractions)]
        return ["theta", "expected", "observed"], rows, report.to_dict()

    if cfg.demo in ("superdense", "interception"):
        try:
            data = BitStream.from_file(cfg.input) if cfg.input else BitStream.generate(cfg.bits, cfg.seed)
        except OSError as exc:
            raise ConfigurationError(f"cannot read input {cfg.input}: {exc}") from None
        if len(data) % 2:
            raise ConfigurationError("input must hold an even number of bits")
        pairs = data.pairs()
        if cfg.demo == "superdense":
            length = 1.0 if ch.length_km is None else ch.length_km
            received, report = run_superdense(data, length, 0.0, cfg.seed, pulse, cfg.precision, cfg.progress,
                                              error_model=_error_factory(ch, 0.16), signal_speed=ch.signal_speed,
                                              capacity=ch.capacity)
            got = received.reshape(-1, 2)
            rows = [(i, int(a), int(b), int(c), int(d)) for i, ((a, b), (c, d)) in enumerate(zip(pairs, got))]
            return ["pair", "sent_b1", "sent_b2", "received_b1", "received_b2"], rows, report.to_dict()
        length = 0.0 if ch.length_km is None else ch.length_km
        eve, bob, report = run_interception(data, cfg.seed, length, 0.0, pulse, cfg.precision, cfg.progress,
                                            error_model=_error_factory(ch, 0.0), signal_speed=ch.signal_speed,
                                            capacity=ch.capacity)
        got = bob.reshape(-1, 2)
        rows = [(i, int(a), int(b), int(e), int(c), int(d))
                for i, ((a, b), e, (c, d)) in enumerate(zip(pairs, eve, got))]
        return ["pair", "sent_b1", "sent_b2", "eve", "bob_b1", "bob_b2"], rows, report.to_dict()

    data = BitStream.from_text(cfg.message)
    protected, unprotected, report = run_shor_demo(data, cfg.seed, cfg.p_error, precision=cfg.precision,
                                                   pulse_length=pulse, progress=cfg.progress)
    rows = [(i, int(s), int(p), int(u)) for i, (s, p, u) in enumerate(zip(data.bits, protected, unprotected))]
    result = report.to_dict()
    result["messages"] = {
        "sent": cfg.message,
        "protected": BitStream(protected).to_text(),
        "unprotected": BitStream(unprotected).to_text(),
    }
    result["corruption_records"] = {
        link: [{"group": g, "qubit": i, "unitary": np.stack([u.real, u.imag], -1).tolist()} for g, i, u in recs]
        for link, recs in report.counters["corruption_records"].items()
    }
    result["counters"].pop("corruption_records", None)
    return ["index", "sent", "protected", "unprotected"], rows, result


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _config_dict(cfg: RunConfig):
    d = dataclasses.asdict(cfg)
    d.pop("out", None)
    d.pop("progress", None)
    return d


def write_outputs(cfg: RunConfig, columns, rows, report):
    document = {"demo": cfg.demo, "config": _config_dict(cfg), "report": report}
    if cfg.format == "json":
        document["table"] = {"columns": columns, "rows": [list(r) for r in rows]}
        text = json.dumps(document, indent=2, sort_keys=True) + "\n"
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
        return
    table = render_csv(columns, rows)
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(table)
        out.with_suffix(".report.json").write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(table)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def make_parser():
    parser = _Parser(prog="qnetsim", description="Quantum network simulation demos.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    lst = sub.add_parser("list", help="list the available demos")
    lst.add_argument("--json", action="store_true", help="machine-readable output")

    run = sub.add_parser("run", help="run a demo")
    run.add_argument("demo", nargs="?", help=f"one of {', '.join(DEMOS)} (or set 'demo' in --config)")
    run.add_argument("--config", help="JSON run configuration")
    run.add_argument("--ensemble", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--length-km", type=float)
    run.add_argument("--attenuation-db-per-km", type=float)
    run.add_argument("--signal-speed", type=float, help="km/s")
    run.add_argument("--pulse-ns", type=float)
    run.add_argument("--points", type=int, help="teleportation: number of angles")
    run.add_argument("--bits", type=int, help="superdense/interception: random bits to send")
    run.add_argument("--input", help="superdense/interception: file to send")
    run.add_argument("--message", help="shor: text to send")
    run.add_argument("--p-error", type=float, help="shor: corruption probability per group")
    run.add_argument("--out")
    run.add_argument("--format", choices=["csv", "json"])
    run.add_argument("--progress", action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--precision", choices=["single", "double"])
    return parser


def cmd_list(as_json=False):
    if as_json:
        print(json.dumps({"demos": DEMOS, "config_keys": sorted(list(_FIELD_TYPES) + ["channel", "output"])},
                         indent=2, sort_keys=True))
        return EXIT_OK
    for name, info in DEMOS.items():
        print(f"{name}: {info['description']}")
        for p, desc in info["parameters"].items():
            print(f"    --{p.replace('_', '-')}: {desc}")
    print("\nCustom runs: pass --config FILE with a JSON object using the keys above,")
    print('e.g. {"demo": "superdense", "seed": 3, "channel": {"length_km": 2.0}}.')
    return EXIT_OK


def cmd_run(args, environ=None):
    try:
        cfg = build_config(args, environ)
        columns, rows, report = execute(cfg)
    except ConfigurationError as exc:
        print(f"qnetsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QNetSimError, ValueError) as exc:
        print(f"qnetsim: run failed: {exc}", file=sys.stderr)
        return EXIT_RUN
    try:
        write_outputs(cfg, columns, rows, report)
    except OSError as exc:
        print(f"qnetsim: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None, environ=None):
    args = make_parser().parse_args(argv)
    if args.command == "list":
        return cmd_list(args.json)
    return cmd_run(args, environ)


if __name__ == "__main__":
    sys.exit(main())
