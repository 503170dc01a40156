"""Command-line front end: report, check, and sweep.

Exit codes: 0 success, 2 configuration/usage error, 3 enumeration-cap
refusal, 1 internal failure. All uncertainties default to nats; ``--units
bits`` converts displayed values only. Outputs are byte-identical for
identical (config, seed).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .aggregate import expected_report, pointwise_report
from .errors import (
    AgentUQError,
    ConfigurationError,
    EnumerationCapError,
    ParameterError,
)
from .evaluate import bound_suite, desideratum_check, failure_auroc
from .measures import entropy_of_probs, renyi_entropy, tsallis_entropy, to_bits
from .scenario import BUILTIN_SCENARIOS, builtin_scenario, load_scenario
from .simulate import enumerate_trajectories, sample_trajectories

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_ENUM_CAP = 3

KNOWN_AGGREGATORS = (
    "exact",
    "gated",
    "sum",
    "max",
    "weighted.length-normalized",
    "weighted.tail",
)


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation parameters shared by the subcommands."""

    scenario: str | None
    builtin: str | None
    aggregators: tuple[str, ...]
    measure: str
    mode: str
    seed: int | None
    samples: int | None
    horizon: int | None
    out: str | None
    fmt: str
    units: str

    def __post_init__(self):
        if (self.scenario is None) == (self.builtin is None):
            raise ConfigurationError("exactly one of --scenario/--builtin is required")
        for a in self.aggregators:
            if a not in KNOWN_AGGREGATORS:
                raise ConfigurationError(
                    f"unknown aggregator {a!r}; known: {', '.join(KNOWN_AGGREGATORS)}"
                )
        if self.mode not in ("exact", "sampled"):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and (self.seed is None or self.samples is None):
            raise ConfigurationError("sampled mode requires --seed and --samples")
        if self.fmt not in ("json", "csv"):
            raise ConfigurationError(f"unknown format {self.fmt!r}")
        if self.units not in ("nats", "bits"):
            raise ConfigurationError(f"unknown units {self.units!r}")


def _load_system(config: RunConfig):
    if config.builtin is not None:
        return builtin_scenario(config.builtin)
    path = Path(config.scenario)
    if not path.exists():
        raise ConfigurationError(f"scenario file not found: {path}")
    return load_scenario(path)


def _scale(units: str) -> float:
    return 1.0 if units == "nats" else to_bits(1.0)


def _measure_columns(system, config: RunConfig) -> dict:
    """Supplementary leaf-distribution values for a non-Shannon measure."""
    if config.measure == "shannon":
        return {}
    leaves = enumerate_trajectories(system, horizon=config.horizon)
    leaf_probs = [p for _, p in leaves]
    initial_probs = [p for _, _, p in system.initial_pairs if p > 0.0]
    kind, _, param = config.measure.partition(":")
    if kind == "renyi":
        alpha = float(param)
        fn = lambda probs: renyi_entropy(_pseudo_dist(probs), alpha)
    elif kind == "tsallis":
        q = float(param)
        fn = lambda probs: tsallis_entropy(_pseudo_dist(probs), q)
    elif kind == "informational-energy":
        fn = lambda probs: sum(p * p for p in probs)
    else:
        raise ConfigurationError(f"unknown measure {config.measure!r}")
    return {
        "measure": config.measure,
        "trajectory_distribution": fn(leaf_probs),
        "initial_distribution": fn(initial_probs),
    }


def _pseudo_dist(probs):
    from .dist import Alphabet, Dist

    return Dist(Alphabet("values", tuple(f"v{i}" for i in range(len(probs)))), tuple(probs))


def _emit(doc: dict, config: RunConfig) -> None:
    if config.fmt == "json":
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        lines = ["section,key,value"]
        for section, payload in sorted(doc.items()):
            for key, value in _flatten(payload):
                lines.append(f"{section},{key},{_csv_value(value)}")
        text = "\n".join(lines) + "\n"
    if config.out:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)


def _flatten(value, prefix=""):
    if isinstance(value, dict):
        for k, v in sorted(value.items()):
            yield from _flatten(v, f"{prefix}{k}." if prefix == "" else f"{prefix}{k}.")
        return
    if isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}{i}.")
        return
    yield prefix.rstrip("."), value


def _csv_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def cmd_report(config: RunConfig) -> int:
    system = _load_system(config)
    top = {
        "scenario": system.name,
        "mode": config.mode,
        "units": config.units,
        "aggregators": list(config.aggregators),
    }
    classifier = system.classifier if "gated" in config.aggregators else None
    if config.mode == "exact":
        report = expected_report(system, classifier, horizon=config.horizon)
        doc = report.to_json_dict(units=config.units)
        doc["totals"] = {
            k: v for k, v in doc["totals"].items() if k in config.aggregators
        }
        top["report"] = doc
    else:
        trajs = sample_trajectories(system, config.samples, config.seed, config.horizon)
        top["samples"] = [
            pointwise_report(system, t, system.classifier).to_json_dict(config.units)
            for t in trajs
        ]
    extra = _measure_columns(system, config)
    if extra:
        top["measure_values"] = extra
    _emit(top, config)
    return EXIT_OK


def cmd_check(config: RunConfig, n_suite: int | None = None) -> int:
    n = n_suite if n_suite is not None else (config.samples or 100)
    seed = config.seed if config.seed is not None else 0
    suite = bound_suite(n_systems=n, seed=seed)
    lines = [
        f"bound-suite systems={suite.n_systems} checks={suite.checks} "
        f"violations={len(suite.violations)}",
    ]
    ok = suite.passed
    system = _load_system(config)
    try:
        if config.mode == "sampled":
            result = desideratum_check(
                system, "gated", mode="sampled", n=config.samples, seed=config.seed
            )
        else:
            result = desideratum_check(system, "gated", mode="exact")
        lines.append(
            "desideratum aggregator=gated ordering="
            f"{'ok' if result.ordering_satisfied else 'VIOLATED'} "
            f"gap={result.gap:.6f} auroc={result.auroc:.6f}"
        )
        ok = ok and result.ordering_satisfied
        if config.mode == "exact":
            auroc_gated = failure_auroc(system, "gated")
            auroc_avg = failure_auroc(system, "weighted.length-normalized")
            better = auroc_gated > auroc_avg
            lines.append(
                f"auroc gated={auroc_gated:.6f} length-normalized={auroc_avg:.6f} "
                f"{'ok' if better else 'VIOLATED'}"
            )
            ok = ok and better
    except AgentUQError as e:
        lines.append(f"desideratum skipped: {e}")
    for v in suite.violations:
        lines.append(f"violation kind={v.kind} seed={v.spec.seed} {v.detail}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_INTERNAL


def cmd_sweep(config: RunConfig, parameter: str, grid: list[float]) -> int:
    if not grid:
        raise ConfigurationError("sweep grid is empty")
    if parameter not in ("alpha", "q"):
        raise ConfigurationError(f"sweep parameter must be alpha or q, got {parameter!r}")
    for value in grid:
        if parameter == "alpha" and (value <= 0 or value == 1.0):
            raise ConfigurationError(f"alpha grid value {value} outside domain (>0, !=1)")
        if parameter == "q" and value == 1.0:
            raise ConfigurationError("q grid value 1 outside domain (!=1)")
    system = _load_system(config)
    leaves = enumerate_trajectories(system, horizon=config.horizon)
    leaf_probs = [p for _, p in leaves]
    initial_probs = [p for _, _, p in system.initial_pairs if p > 0.0]
    scale = _scale(config.units)
    shannon_leaf = entropy_of_probs(leaf_probs) * scale
    shannon_initial = entropy_of_probs(initial_probs) * scale
    fn = renyi_entropy if parameter == "alpha" else tsallis_entropy
    rows = []
    for value in grid:
        rows.append(
            {
                "value": value,
                "trajectory": fn(_pseudo_dist(leaf_probs), value) * scale,
                "initial": fn(_pseudo_dist(initial_probs), value) * scale,
                "trajectory_shannon": shannon_leaf,
                "initial_shannon": shannon_initial,
            }
        )
    header = ["value", "trajectory", "initial", "trajectory_shannon", "initial_shannon"]
    lines = [",".join([parameter] + header[1:])]
    for row in rows:
        lines.append(",".join(_csv_value(row[k]) for k in header))
    text = "\n".join(lines) + "\n"
    if config.out:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agentuq",
        description="Uncertainty reports for finite-state interactive agent scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("report", "check", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--scenario", help="path to a scenario file")
        p.add_argument(
            "--builtin",
            choices=sorted(BUILTIN_SCENARIOS),
            help="name of a built-in scenario",
        )
        p.add_argument(
            "--aggregators",
            default="exact,gated",
            help="comma-separated totals to include",
        )
        p.add_argument("--measure", default="shannon")
        p.add_argument("--mode", default="exact", choices=("exact", "sampled"))
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--out")
        p.add_argument("--format", dest="fmt", default="json", choices=("json", "csv"))
        p.add_argument("--units", default="nats", choices=("nats", "bits"))
        if name == "sweep":
            p.add_argument("--param", required=True, choices=("alpha", "q"))
            p.add_argument("--grid", required=True, help="comma-separated values")
    return parser


def _config_from_args(args) -> RunConfig:
    aggregators = tuple(a for a in args.aggregators.split(",") if a)
    config = RunConfig(
        scenario=args.scenario,
        builtin=args.builtin,
        aggregators=aggregators,
        measure=args.measure,
        mode=args.mode,
        seed=args.seed,
        samples=args.samples,
        horizon=args.horizon,
        out=args.out,
        fmt=args.fmt,
        units=args.units,
    )
    if config.horizon is not None:
        system = _load_system(config)
        if config.horizon > system.t_max or config.horizon < 1:
            raise ConfigurationError(
                f"horizon {config.horizon} outside [1, t_max={system.t_max}]"
            )
    return config


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "report":
            return cmd_report(config)
        if args.command == "check":
            return cmd_check(config)
        if args.command == "sweep":
            try:
                grid = [float(v) for v in args.grid.split(",") if v.strip()]
            except ValueError as e:
                raise ConfigurationError(f"bad grid value: {e}") from None
            return cmd_sweep(config, args.param, grid)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except EnumerationCapError as e:
        sys.stderr.write(f"error[enum-cap]: {e}\n")
        return EXIT_ENUM_CAP
    except AgentUQError as e:
        sys.stderr.write(f"error[config]: {e}\n")
        return EXIT_CONFIG
    except Exception as e:  # pragma: no cover - unexpected failures
        sys.stderr.write(f"error[internal]: {type(e).__name__}: {e}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
