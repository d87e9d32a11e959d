"""Batch front door: config files in, reports and CSV artifacts out.

One experiment is described by a JSON :class:`ExperimentSpec`.  ``slln run``
loads it, applies flag overrides, executes the requested sections
(hypothesis checks, series-bound calculus, ensemble simulation) and writes
``report.json`` (embedding the fully resolved spec for provenance),
``deviations.csv``, ``calculus.csv`` and optionally ``plot.svg``.  Exit
status 0 means every requested section passed.

Numbers in CSV files carry 17 significant digits so a re-run from the
embedded spec reproduces them byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .calculus import DEFAULT_PS, bound_suite
from .diagnostics import (
    DEFAULT_CHECKPOINTS,
    DEFAULT_EPSILONS,
    ConvergenceReport,
    Verdict,
    run_ensemble,
)
from .errors import BoundViolation, ConfigError, ScheduleRejected, SllnLabError
from .generators import DependenceMode, TailEnvelope, XFamily
from .hypotheses import verify_hypotheses
from .mixture import DEFAULT_MEMORY_BUDGET, MixedSequenceConfig
from .schedules import (
    MomentSchedule,
    ScheduleForm,
    SparsityMode,
    SparsityPattern,
    validate_schedule,
)

_FMT = "{:.17g}"


@dataclass
class ExperimentSpec:
    """One fully resolved experiment; round-trips losslessly through JSON."""

    name: str
    seed: int
    horizon: int
    n_paths: int
    x_family: XFamily
    envelope: TailEnvelope
    dependence: DependenceMode
    schedule: MomentSchedule
    sparsity_mode: SparsityMode
    sparsity_c: float
    sparsity_alpha: tuple[int, ...] | None
    checkpoints: tuple[int, ...]
    epsilons: tuple[float, ...]
    epsilon_target: float
    fraction_target: float
    infrequency_threshold: float | None
    compensated_sum: bool
    memory_budget: int

    def to_dict(self) -> dict:
        sparsity: dict = {"mode": self.sparsity_mode.value, "c": self.sparsity_c}
        if self.sparsity_alpha is not None:
            sparsity["alpha"] = list(self.sparsity_alpha)
        schedule: dict = {"form": self.schedule.form.value}
        if self.schedule.constant_a is not None:
            schedule["constant_a"] = self.schedule.constant_a
        if self.schedule.floor_index is not None:
            schedule["floor_index"] = self.schedule.floor_index
        return {
            "name": self.name,
            "seed": self.seed,
            "horizon": self.horizon,
            "n_paths": self.n_paths,
            "x": self.x_family.to_dict(),
            "y": {"envelope": self.envelope.to_dict(), "dependence": self.dependence.value},
            "schedule": schedule,
            "sparsity": sparsity,
            "checkpoints": list(self.checkpoints),
            "epsilons": list(self.epsilons),
            "verdict": {
                "epsilon_target": self.epsilon_target,
                "fraction_target": self.fraction_target,
            },
            "infrequency_threshold": self.infrequency_threshold,
            "compensated_sum": self.compensated_sum,
            "memory_budget": self.memory_budget,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        try:
            schedule = MomentSchedule(
                form=ScheduleForm(data.get("schedule", {}).get("form", "inv_sqrt_log")),
                constant_a=data.get("schedule", {}).get("constant_a"),
                floor_index=data.get("schedule", {}).get("floor_index"),
            )
        except (ScheduleRejected, ValueError) as exc:
            raise ConfigError(f"schedule: {exc}") from exc
        try:
            x_family = XFamily.from_dict(data.get("x", {"family": "parity_rademacher"}))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"x: {exc}") from exc
        y = data.get("y", {})
        try:
            envelope = TailEnvelope.from_dict(y.get("envelope", {"kind": "pareto", "gamma": 2.0}))
            dependence = DependenceMode(y.get("dependence", "independent"))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"y: {exc}") from exc
        sparsity = data.get("sparsity", {})
        try:
            mode = SparsityMode(sparsity.get("mode", "auto"))
        except ValueError as exc:
            raise ConfigError(f"sparsity.mode: {exc}") from exc
        alpha = tuple(sparsity["alpha"]) if "alpha" in sparsity else None
        horizon = int(data.get("horizon", 10 ** 6))
        checkpoints = tuple(
            int(c) for c in data.get("checkpoints", _default_checkpoints(horizon))
        )
        epsilons = tuple(float(e) for e in data.get("epsilons", DEFAULT_EPSILONS))
        verdict_cfg = data.get("verdict", {})
        epsilon_target = float(verdict_cfg.get("epsilon_target", 0.05))
        fraction_target = float(verdict_cfg.get("fraction_target", 0.10))
        if epsilon_target not in epsilons:
            epsilons = tuple(sorted(set(epsilons) | {epsilon_target}, reverse=True))
        spec = cls(
            name=str(data.get("name", "experiment")),
            seed=int(data.get("seed", 0)),
            horizon=horizon,
            n_paths=int(data.get("n_paths", 100)),
            x_family=x_family,
            envelope=envelope,
            dependence=dependence,
            schedule=schedule,
            sparsity_mode=mode,
            sparsity_c=float(sparsity.get("c", 1.0)),
            sparsity_alpha=alpha,
            checkpoints=checkpoints,
            epsilons=epsilons,
            epsilon_target=epsilon_target,
            fraction_target=fraction_target,
            infrequency_threshold=data.get("infrequency_threshold"),
            compensated_sum=bool(data.get("compensated_sum", False)),
            memory_budget=int(data.get("memory_budget", DEFAULT_MEMORY_BUDGET)),
        )
        spec.validate()
        return spec

    def validate(self) -> None:
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.n_paths < 2:
            raise ConfigError("n_paths must be >= 2")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.sparsity_c <= 0:
            raise ConfigError("sparsity.c must be positive")
        if list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise ConfigError("checkpoints must be sorted and unique")
        if self.checkpoints[0] < 1 or self.checkpoints[-1] > self.horizon:
            raise ConfigError("checkpoints must lie in [1, horizon]")
        if not all(0 < e for e in self.epsilons):
            raise ConfigError("epsilons must be positive")
        if not 0 < self.fraction_target <= 1:
            raise ConfigError("fraction_target must lie in (0, 1]")
        try:
            validate_schedule(self.schedule, min(max(self.horizon, 3), 10 ** 5))
        except ScheduleRejected as exc:
            raise ConfigError(f"schedule: {exc}") from exc

    def pattern(self) -> SparsityPattern:
        return SparsityPattern(
            mode=self.sparsity_mode,
            c=self.sparsity_c,
            schedule=self.schedule if self.sparsity_mode is SparsityMode.AUTO else None,
            explicit=self.sparsity_alpha,
        )

    def mixed_config(self) -> MixedSequenceConfig:
        return MixedSequenceConfig(
            x_family=self.x_family,
            envelope=self.envelope,
            dependence=self.dependence,
            schedule=self.schedule,
            pattern=self.pattern(),
            horizon=self.horizon,
            master_seed=self.seed,
            compensated_sum=self.compensated_sum,
            memory_budget=self.memory_budget,
        )


def _default_checkpoints(horizon: int) -> list[int]:
    cps = [c for c in DEFAULT_CHECKPOINTS if c <= horizon]
    if not cps or cps[-1] != horizon:
        cps.append(horizon)
    return cps


def resolve_config_path(path: str) -> Path:
    """Filesystem path if it exists, else a bundled fixture of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("slln_lab").joinpath("configs", path)
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config not found: {path}")


def load_config(path: str | Path) -> ExperimentSpec:
    """Parse and validate a JSON experiment file."""
    resolved = resolve_config_path(str(path))
    try:
        data = json.loads(resolved.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{resolved}: parse error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{resolved}: top-level JSON object expected")
    return ExperimentSpec.from_dict(data)


def _csv_cell(value: float) -> str:
    return _FMT.format(float(value))


def write_deviations_csv(report: ConvergenceReport, path: Path) -> None:
    eps_cols = [f"frac_gt_{eps:g}" for eps in report.epsilons]
    lines = [",".join(["checkpoint", "median_D", "q90_D", "q99_D"] + eps_cols)]
    for i, cp in enumerate(report.checkpoints):
        row = [str(int(cp)), _csv_cell(report.median[i]), _csv_cell(report.q90[i]), _csv_cell(report.q99[i])]
        row += [_csv_cell(report.fractions_above[eps][i]) for eps in report.epsilons]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_calculus_csv(rows: Sequence[dict], path: Path) -> None:
    header = ["envelope", "p", "A", "bound_A", "B", "bound_B", "combined", "bound_combined"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                [
                    row["envelope"],
                    _csv_cell(row["p"]),
                    _csv_cell(row["A"]),
                    _csv_cell(row["bound_A"]),
                    _csv_cell(row["B"]),
                    _csv_cell(row["bound_B"]),
                    _csv_cell(row["combined"]),
                    _csv_cell(row["bound_combined"]),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")


def plot_svg(report: ConvergenceReport) -> str:
    """Minimal line chart of D quantiles vs checkpoint (log-x), as SVG text."""
    width, height, margin = 640, 400, 56
    cps = [float(c) for c in report.checkpoints]
    logs = [math.log10(c) for c in cps]
    span = max(logs[-1] - logs[0], 1e-9)
    ymax = max(float(v) for v in report.q99) * 1.05 or 1.0

    def x_at(cp_log: float) -> float:
        return margin + (cp_log - logs[0]) / span * (width - 2 * margin)

    def y_at(v: float) -> float:
        return height - margin - (v / ymax) * (height - 2 * margin)

    series = [
        ("median", report.median, "#1f77b4"),
        ("q90", report.q90, "#ff7f0e"),
        ("q99", report.q99, "#d62728"),
    ]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">checkpoint (log scale)</text>',
        f'<text x="16" y="{height / 2:.1f}" font-size="13" '
        f'transform="rotate(-90 16 {height / 2:.1f})" text-anchor="middle">suffix-sup deviation</text>',
    ]
    for i, (lg, cp) in enumerate(zip(logs, cps)):
        x = x_at(lg)
        parts.append(
            f'<line x1="{x:.2f}" y1="{height - margin}" x2="{x:.2f}" '
            f'y2="{height - margin + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{height - margin + 20}" text-anchor="middle" '
            f'font-size="11">{int(cp)}</text>'
        )
    for label, values, color in series:
        pts = " ".join(
            f"{x_at(lg):.2f},{y_at(float(v)):.2f}" for lg, v in zip(logs, values)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
    for i, (label, _, color) in enumerate(series):
        y = margin + 18 * i
        parts.append(f'<rect x="{width - margin - 90}" y="{y - 9}" width="12" height="3" fill="{color}"/>')
        parts.append(f'<text x="{width - margin - 72}" y="{y}" font-size="12">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


SUBCOMMANDS = ("hypotheses", "calculus", "simulate", "all")


def run(
    spec: ExperimentSpec,
    subcommand: str = "all",
    out_dir: str | Path = "slln_out",
    threads: int = 1,
    plot: bool = False,
) -> int:
    """Execute the requested sections; return the process exit status."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}; choose from {SUBCOMMANDS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sections: dict = {}
    status: dict[str, str] = {}
    failures: list[str] = []

    want = (
        {"hypotheses", "calculus", "simulate"} if subcommand == "all" else {subcommand}
    )
    config = spec.mixed_config()

    if "hypotheses" in want:
        report = verify_hypotheses(
            config, infrequency_threshold=spec.infrequency_threshold
        )
        sections["hypotheses"] = report.to_dict()
        ok = report.all_pass()
        status["hypotheses"] = "PASS" if ok else "FAIL"
        if not ok:
            failures.append("hypotheses")

    if "calculus" in want:
        try:
            rows = bound_suite(envelopes=[spec.envelope], ps=DEFAULT_PS)
            sections["calculus"] = {"bounds": rows, "all_hold": True}
            status["calculus"] = "PASS"
            write_calculus_csv(rows, out / "calculus.csv")
        except BoundViolation as exc:
            sections["calculus"] = {"all_hold": False, "error": str(exc)}
            status["calculus"] = "FAIL"
            failures.append("calculus")

    if "simulate" in want:
        report = run_ensemble(
            config,
            spec.n_paths,
            spec.checkpoints,
            epsilons=spec.epsilons,
            epsilon_target=spec.epsilon_target,
            fraction_target=spec.fraction_target,
            threads=threads,
        )
        sections["convergence"] = report.to_dict()
        status["convergence"] = report.verdict.value
        if report.verdict is not Verdict.CONVERGENT:
            failures.append("convergence")
        write_deviations_csv(report, out / "deviations.csv")
        if plot:
            (out / "plot.svg").write_text(plot_svg(report))

    exit_code = 0 if not failures else 1
    payload = {
        "artifact": {"name": "slln-lab", "version": __version__},
        "spec": spec.to_dict(),
        "subcommand": subcommand,
        "threads": threads,
        **sections,
        "status": status,
        "failures": failures,
        "exit_code": exit_code,
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return exit_code


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="slln",
        description="Verification lab for a strong law over sparse heavy-tailed mixtures",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment config")
    runp.add_argument("config", help="JSON config path or bundled fixture name")
    runp.add_argument("--seed", type=int, default=None, help="master seed override (u64)")
    runp.add_argument("--paths", type=int, default=None, help="ensemble size override")
    runp.add_argument("--horizon", type=int, default=None, help="horizon override")
    runp.add_argument("--threads", type=int, default=1, help="worker cap (results unaffected)")
    runp.add_argument("--out", default="slln_out", help="output directory")
    runp.add_argument(
        "--subcommand", default="all", choices=SUBCOMMANDS, help="which sections to run"
    )
    runp.add_argument("--plot", action="store_true", help="emit plot.svg")
    args = parser.parse_args(argv)

    try:
        spec = load_config(args.config)
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
        if args.paths is not None:
            spec = replace(spec, n_paths=args.paths)
        if args.horizon is not None:
            spec = replace(spec, horizon=args.horizon, checkpoints=_clip_checkpoints(spec.checkpoints, args.horizon))
        spec.validate()
        return run(spec, subcommand=args.subcommand, out_dir=args.out, threads=args.threads, plot=args.plot)
    except (ConfigError, SllnLabError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


def _clip_checkpoints(checkpoints: Sequence[int], horizon: int) -> tuple[int, ...]:
    kept = [c for c in checkpoints if c <= horizon]
    if not kept or kept[-1] != horizon:
        kept.append(horizon)
    return tuple(kept)


if __name__ == "__main__":
    sys.exit(main())
