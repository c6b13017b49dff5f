"""Command-line front end: ``seriesdesign <subcommand> --config cfg.json --out dir``.

Every file written embeds the fully resolved config (including the seed), so a
run can be repeated from its own output. Exit status is 0 on success, 2 for a
bad config and 3 for a numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, published
from .basis import basis_from_config, model_from_name
from .design import COMPARATIVE_DESIGNS, DesignGrid, criterion, named_design, optimize_design
from .errors import ContractViolation, SeriesDesignError
from .estimator import SeriesEstimator
from .kernel import kernel_from_config
from .numerics import PsoConfig, QuadratureRule
from .oracle import oracle_measure, oracle_mise, verify_optimality
from .simulator import ESTIMATORS, SimulationConfig, run_mise

log = logging.getLogger("seriesdesign")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SUBCOMMANDS = ("optimize", "simulate", "estimate", "oracle", "reproduce-paper")

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kernel": {
            "type": "object",
            "properties": {
                "type": {"enum": ["exponential", "brownian"]},
                "L": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["type"],
            "additionalProperties": False,
        },
        "basis": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["cosine", "trig", "trig-full"]},
                "J": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "model": {"type": "string"},
        "n": {"type": "integer", "minimum": 3},
        "min_gap": {"type": "number", "minimum": 0, "exclusiveMaximum": 0.5},
        "design": {
            "oneOf": [
                {"enum": ["optimal", *COMPARATIVE_DESIGNS]},
                {"type": "array", "items": {"type": "number"}, "minItems": 2},
            ]
        },
        "estimators": {
            "type": "array",
            "items": {"enum": list(ESTIMATORS)},
            "minItems": 1,
            "uniqueItems": True,
        },
        "S": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "quadrature": {
            "type": "object",
            "properties": {
                "order": {"type": "integer", "minimum": 1},
                "panels": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "pso": {
            "type": "object",
            "properties": {
                "swarm_size": {"type": "integer", "minimum": 2},
                "iterations": {"type": "integer", "minimum": 1},
                "inertia": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "cognitive": {"type": "number", "exclusiveMinimum": 0},
                "social": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "data": {"type": "string"},
        "grid_size": {"type": "integer", "minimum": 2},
        "reproduce": {
            "type": "object",
            "properties": {
                "kernels": {
                    "type": "array",
                    "items": {"enum": list(published.KERNELS)},
                    "minItems": 1,
                    "uniqueItems": True,
                },
                "n": {"type": "array", "items": {"type": "integer", "minimum": 3}, "minItems": 1},
                "models": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "S": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
    },
}

REQUIRED = {
    "optimize": ["kernel"],
    "simulate": ["kernel", "model", "design", "estimators"],
    "estimate": ["kernel"],
    "oracle": ["kernel", "model"],
    "reproduce-paper": [],
}

DEFAULTS = {
    "basis": {"kind": "cosine", "J": 3},
    "min_gap": 1e-3,
    "S": 1000,
    "seed": 0,
    "quadrature": {"order": 16, "panels": 16},
    "pso": {"swarm_size": 40, "iterations": 300, "inertia": 0.729, "cognitive": 1.494, "social": 1.494},
    "grid_size": 101,
}

REPRODUCE_DEFAULTS = {
    "kernels": list(published.KERNELS),
    "n": [4, 7],
    "models": ["4t(t-1)", "sqrt(t(1-t))"],
    "S": 1000,
}


class ConfigError(Exception):
    """Invalid configuration; reported with exit status 2."""


def _path(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def resolve_config(raw: dict, command: str, seed: int | None = None) -> dict:
    """Validate ``raw`` against the schema and fill in defaults."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"config error at {_path(e)}: {e.message}")
    missing = [k for k in REQUIRED[command] if k not in raw]
    if missing:
        raise ConfigError(f"config error at <root>: missing required field(s) {missing} for {command!r}")
    if command == "simulate" and raw["design"] == "optimal" and "n" not in raw:
        raise ConfigError("config error at n: required when design is 'optimal'")

    cfg = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key] = {**cfg[key], **value}
        else:
            cfg[key] = copy.deepcopy(value)
    if command == "reproduce-paper":
        cfg["reproduce"] = {**REPRODUCE_DEFAULTS, **raw.get("reproduce", {})}
    if seed is not None:
        cfg["seed"] = int(seed)
    if "kernel" in cfg and cfg["kernel"]["type"] == "exponential":
        cfg["kernel"].setdefault("L", 1.0)
    # model names fail fast as config errors rather than numeric ones
    for name in [cfg.get("model")] + list(cfg.get("reproduce", {}).get("models", [])):
        if name is not None:
            try:
                model_from_name(name)
            except SeriesDesignError as exc:
                raise ConfigError(f"config error at model: {exc}") from None
    return cfg


def load_config(path: str | None, command: str, seed: int | None = None) -> dict:
    if path is None:
        raw = {}
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config error at <root>: invalid JSON ({exc.msg}, line {exc.lineno})") from None
        if not isinstance(raw, dict):
            raise ConfigError("config error at <root>: expected a JSON object")
    return resolve_config(raw, command, seed)


# ---------------------------------------------------------------- output helpers

def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, payload: dict, cfg: dict) -> None:
    body = {"version": __version__, "config": cfg, "seed": cfg["seed"], **payload}
    _atomic_write(path, json.dumps(body, indent=2, sort_keys=False) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list], cfg: dict) -> None:
    """CSV with the resolved config as a leading ``#`` comment line."""
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(cfg, sort_keys=True, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    _atomic_write(path, buf.getvalue())


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


# ---------------------------------------------------------------- building blocks

def _rule(cfg: dict) -> QuadratureRule:
    return QuadratureRule(**cfg["quadrature"])


def _pso(cfg: dict) -> PsoConfig:
    return PsoConfig(**cfg["pso"], seed=cfg["seed"])


def _kernel_L(spec: dict):
    return spec.get("L", "") if spec["type"] == "exponential" else ""


def _optimize(kernel_spec: dict, basis_spec: dict, n: int, cfg: dict) -> tuple[DesignGrid, float]:
    kernel = kernel_from_config(kernel_spec)
    basis = basis_from_config(basis_spec)
    return optimize_design(kernel, basis, n, _pso(cfg), cfg["min_gap"], _rule(cfg))


def _resolve_design(cfg: dict) -> tuple[DesignGrid, str, float | None]:
    design = cfg["design"]
    if design == "optimal":
        grid, value = _optimize(cfg["kernel"], cfg["basis"], cfg["n"], cfg)
        return grid, "optimal", value
    if isinstance(design, str):
        return named_design(design), design, None
    return DesignGrid(design), "custom", None


# ---------------------------------------------------------------- subcommands

def cmd_optimize(cfg: dict, out: Path, args) -> dict:
    n = args.n if args.n is not None else cfg["n"]
    cfg["n"] = n
    if args.min_gap is not None:
        cfg["min_gap"] = args.min_gap
    grid, value = _optimize(cfg["kernel"], cfg["basis"], n, cfg)
    payload = {"points": grid.points.tolist(), "criterion": value}
    write_json(out / "optimize.json", payload, cfg)
    header = ["kernel", "L", "J", "n", "seed", "criterion"] + [f"t{i + 1}" for i in range(n)]
    row = [cfg["kernel"]["type"], _kernel_L(cfg["kernel"]), cfg["basis"]["J"], n, cfg["seed"], value]
    write_csv(out / "optimize.csv", header, [row + grid.points.tolist()], cfg)
    return payload


SIM_HEADER = ["kernel", "L", "J", "n", "design_name", "estimator", "S", "seed", "mise", "stderr"]


def _sim_rows(cfg: dict, report) -> list[list]:
    return [
        [cfg["kernel"]["type"], _kernel_L(cfg["kernel"]), cfg["basis"]["J"], len(report.design_points),
         report.design_name, name, report.S, report.seed, r.mise, r.stderr]
        for name, r in report.results.items()
    ]


def cmd_simulate(cfg: dict, out: Path, args) -> dict:
    grid, name, value = _resolve_design(cfg)
    sim = SimulationConfig(
        kernel=kernel_from_config(cfg["kernel"]),
        basis=basis_from_config(cfg["basis"]),
        model=model_from_name(cfg["model"]),
        design=grid,
        design_name=name,
        estimators=tuple(cfg["estimators"]),
        S=cfg["S"],
        seed=cfg["seed"],
        rule=_rule(cfg),
        criterion=value,
    )
    report = run_mise(sim, threads=args.threads)
    payload = report.to_dict()
    write_json(out / "simulate.json", payload, cfg)
    write_csv(out / "simulate.csv", SIM_HEADER, _sim_rows(cfg, report), cfg)
    return payload


def read_observations(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Two-column CSV of (t, Y); a non-numeric first row is taken as a header."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read data {path}: {exc.strerror}") from None
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    try:
        arr = np.array([[float(r[0]), float(r[1])] for r in rows])
    except (ValueError, IndexError):
        raise ConfigError(f"config error at data: {path} must hold numeric (t, Y) pairs") from None
    if arr.shape[0] < 2:
        raise ConfigError(f"config error at data: {path} needs at least two rows")
    order = np.argsort(arr[:, 0], kind="stable")
    return arr[order, 0], arr[order, 1]


def cmd_estimate(cfg: dict, out: Path, args) -> dict:
    path = args.data or cfg.get("data")
    if path is None:
        raise ConfigError("config error at data: estimate needs a CSV of (t, Y) pairs (--data or 'data')")
    cfg["data"] = str(path)
    t, y = read_observations(path)
    try:
        grid = DesignGrid(t)
    except SeriesDesignError as exc:
        raise ConfigError(f"config error at data: {exc}") from None
    est = SeriesEstimator(kernel_from_config(cfg["kernel"]), basis_from_config(cfg["basis"]), grid, _rule(cfg))
    res = est.estimate(y)
    payload = {
        "design_points": t.tolist(),
        "theta_blue": res.theta_blue.tolist(),
        "theta_shrunk": res.theta_shrunk.tolist(),
        "shrink_factor": res.shrink_factor,
        "case": res.case,
        "c_or_m": res.c_or_m if np.isfinite(res.c_or_m) else None,
    }
    write_json(out / "estimate.json", payload, cfg)
    return payload


def cmd_oracle(cfg: dict, out: Path, args) -> dict:
    kernel = kernel_from_config(cfg["kernel"])
    model = model_from_name(cfg["model"])
    rule = _rule(cfg)
    m = oracle_measure(kernel, model, rule=rule)
    grid = np.linspace(0.0, 1.0, cfg["grid_size"])
    residual = None if m.case == "C" else verify_optimality(m, kernel, model, grid, rule)
    payload = {
        "case": m.case,
        "c": m.c,
        "P0": m.P0,
        "P1": m.P1,
        "p": {"t": grid.tolist(), "value": np.asarray(m.p(grid), float).tolist()},
        "mise": oracle_mise(kernel, model, rule),
        "residual": residual,
    }
    write_json(out / "oracle.json", payload, cfg)
    print(json.dumps({k: v for k, v in payload.items() if k != "p"}, indent=2))
    return payload


def reproduce_plan(cfg: dict) -> tuple[list[tuple], list[tuple]]:
    rep = cfg["reproduce"]
    designs = [(label, n) for label in rep["kernels"] for n in rep["n"]]
    sims = []
    for label, n in designs:
        comparative = f"comparative-n{n}"
        kinds = ["optimal"] + ([comparative] if comparative in COMPARATIVE_DESIGNS else [])
        for model in rep["models"]:
            for kind in kinds:
                sims.append((label, n, model, kind))
    return designs, sims


def cmd_reproduce(cfg: dict, out: Path, args) -> dict:
    designs, sims = reproduce_plan(cfg)
    S = cfg["reproduce"]["S"]
    if args.dry_run:
        print(f"planned design optimizations ({len(designs)}):")
        for label, n in designs:
            print(f"  optimize  kernel={label} J={cfg['basis']['J']} n={n} seed={cfg['seed']}")
        print(f"planned simulations ({len(sims)}), S={S}, estimators=shrunk,blue:")
        for label, n, model, kind in sims:
            print(f"  simulate  kernel={label} n={n} model={model} design={kind}")
        return {"designs": designs, "simulations": sims}

    basis = basis_from_config(cfg["basis"])
    rule = _rule(cfg)

    def optimize_one(job):
        label, n = job
        return _optimize(published.KERNELS[label], cfg["basis"], n, cfg)

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        optimal = dict(zip(designs, pool.map(optimize_one, designs)))

    design_rows = []
    for (label, n), (grid, value) in optimal.items():
        kernel = kernel_from_config(published.KERNELS[label])
        ref = published.DESIGNS.get(label, {}).get(n)
        ref_value = criterion(kernel, basis, DesignGrid(ref), rule) if ref else ""
        design_rows.append([label, n, cfg["seed"], " ".join(f"{x:.4f}" for x in grid.points), value,
                            " ".join(f"{x:.2f}" for x in ref) if ref else "", ref_value])

    def simulate_one(job):
        label, n, model, kind = job
        grid = optimal[(label, n)][0] if kind == "optimal" else named_design(kind)
        sim = SimulationConfig(
            kernel=kernel_from_config(published.KERNELS[label]), basis=basis,
            model=model_from_name(model), design=grid, design_name=kind,
            estimators=("shrunk", "blue"), S=S, seed=cfg["seed"], rule=rule,
            criterion=optimal[(label, n)][1] if kind == "optimal" else None)
        return run_mise(sim)

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        reports = list(pool.map(simulate_one, sims))

    mise_rows = []
    for (label, n, model, kind), report in zip(sims, reports):
        for est, r in report.results.items():
            ref = published.MISE.get((label, model, n, "optimal" if kind == "optimal" else "comparative", est))
            mise_rows.append([label, n, model, kind, est, S, cfg["seed"],
                              "" if ref is None else ref, r.mise, r.stderr])

    design_header = ["kernel", "n", "seed", "computed_points", "computed_criterion",
                     "published_points", "criterion_at_published"]
    mise_header = ["kernel", "n", "model", "design", "estimator", "S", "seed",
                   "published_mise", "computed_mise", "stderr"]
    write_csv(out / "designs.csv", design_header, design_rows, cfg)
    write_csv(out / "mise.csv", mise_header, mise_rows, cfg)
    payload = {
        "designs": [dict(zip(design_header, r)) for r in design_rows],
        "mise": [dict(zip(mise_header, r)) for r in mise_rows],
    }
    write_json(out / "reproduce.json", payload, cfg)
    _print_table(design_header, design_rows)
    print()
    _print_table(mise_header, mise_rows)
    return payload


def _print_table(header, rows):
    cells = [[str(h) for h in header]] + [
        [f"{x:.4f}" if isinstance(x, float) else str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())


COMMANDS = {
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "oracle": cmd_oracle,
    "reproduce-paper": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seriesdesign",
        description="Optimal designs and shrinkage series estimators under Markovian errors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--dry-run", action="store_true", help="print the plan without computing")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "optimize":
            p.add_argument("--n", type=int, help="number of design points (overrides config)")
            p.add_argument("--min-gap", type=float, help="minimum gap between points")
        if name == "estimate":
            p.add_argument("--data", help="CSV of (t, Y) pairs")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("config error at seed: must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads < 1:
        print("config error at threads: must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.command, args.seed)
        if args.command == "optimize" and args.n is not None:
            cfg["n"] = args.n
        if args.command == "optimize" and "n" not in cfg:
            raise ConfigError("config error at n: optimize needs n (config or --n)")
        if args.dry_run and args.command != "reproduce-paper":
            print(json.dumps({"command": args.command, "config": cfg}, indent=2))
            return EXIT_OK
        COMMANDS[args.command](cfg, Path(args.out), args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except ContractViolation as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SeriesDesignError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
