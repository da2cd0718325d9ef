"""Scenario runner: dispatch a parsed config to the library and emit CSV series.

Every command writes deterministic CSV files (comma separated, LF endings,
12 significant digits, '#' header comments embedding the resolved config hash)
plus one ``run_report.txt`` with the resolved config echo, the truncation
actually used, worst leakage, wall time, and deduplicated warnings.  Sweep
points run in a worker pool; outputs are ordered by sweep index regardless of
completion order, so identical configs give byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ScenarioConfig, resolve_config
from .errors import ConfigError, KerrThermoError, TruncationError
from .estimation import cr_bound, perturbed_trajectories, qfi_series
from .fidelity import default_search_max, thermalization_trace
from .fock import Truncation, mean_photon_number, vacuum_state
from .dynamics import propagate, purity, steady_state
from .measurement import cfi_series, heterodyne_povm, homodyne_povm
from .presets import FIGURE_NAMES, PRESETS
from .spectral import gap_variance, spectrum

__all__ = ["run", "reproduce_figure", "main", "RunReport"]

_MAX_NCUT_DOUBLINGS = 4


@dataclass
class RunReport:
    """What actually happened during a run, for the sidecar report file."""

    command: str
    config_echo: str
    config_hash: str
    version: str = __version__
    n_cut_used: int = 0
    leakage_max: float = 0.0
    wall_time_s: float = 0.0
    warnings: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    summaries: list[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [
            "kerr-thermo run report",
            f"version: {self.version}",
            f"command: {self.command}",
            f"config hash: {self.config_hash}",
            f"n_cut used: {self.n_cut_used}",
            f"leakage max: {self.leakage_max:.3e}",
            f"wall time s: {self.wall_time_s:.2f}",
            "",
            "resolved config:",
        ]
        lines += [f"  {line}" for line in self.config_echo.strip().splitlines()]
        lines.append("")
        lines.append("outputs:")
        lines += [f"  - {name}" for name in self.outputs] or ["  (none)"]
        if self.summaries:
            lines.append("")
            lines.append("summaries:")
            lines += [f"  {line}" for line in self.summaries]
        lines.append("")
        lines.append("warnings:")
        if self.warnings:
            lines += [f"  - {w}" for w in self.warnings]
        else:
            lines.append("  (none)")
        return "\n".join(lines) + "\n"


@dataclass
class _PointResult:
    index: int
    columns: dict[str, np.ndarray]
    n_cut_used: int
    leakage_max: float
    warnings: list[str]
    summaries: list[str]


def _format_value(x: float) -> str:
    return f"{x:.11e}"


def _point_suffix(config: ScenarioConfig, point: dict[str, float]) -> str:
    swept = config.swept_fields()
    if not swept:
        return ""
    return "_" + "_".join(f"{name}{point[name]:g}" for name in swept)


def _collect_warnings(records) -> list[str]:
    return [str(rec.message) for rec in records]


def _with_truncation_retry(config: ScenarioConfig, compute):
    """Run ``compute(trunc)``, doubling n_cut when the cutoff proves too small."""
    n_cut = config.n_cut
    for attempt in range(_MAX_NCUT_DOUBLINGS + 1):
        try:
            return compute(Truncation(n_cut, config.leakage_tol)), n_cut
        except TruncationError:
            if attempt == _MAX_NCUT_DOUBLINGS:
                raise
            n_cut *= 2
    raise AssertionError("unreachable")


def _run_point(args) -> _PointResult:
    config, index = args
    point = config.sweep_points()[index]
    try:
        return _run_point_inner(config, index, point)
    except KerrThermoError as exc:
        where = ", ".join(f"{k} = {v:g}" for k, v in point.items())
        raise type(exc)(f"sweep point {index} ({where}): {exc}") from exc


def _run_point_inner(config: ScenarioConfig, index: int, point: dict) -> _PointResult:
    params = config.params_at(point)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if config.command == "thermalize":
            def compute(trunc):
                traj = propagate(vacuum_state(trunc), params, config.grid(), trunc)
                search = config.search_max
                if search is None:
                    search = default_search_max(traj.final, params.n_th)
                trace = thermalization_trace(traj, search)
                return trace, traj.leakage_max

            (trace, leakage), n_cut = _with_truncation_retry(config, compute)
            columns = {
                "gamma_t": trace.times,
                "n_eff": trace.n_eff,
                "fidelity_at_opt": trace.fidelity_at_opt,
            }
            summaries = [
                f"point{_point_suffix(config, point) or ' (single)'}: "
                f"final n_eff = {trace.n_eff[-1]:.6g}, "
                f"final fidelity = {trace.fidelity_at_opt[-1]:.6g}"
            ]
            return _PointResult(index, columns, n_cut, leakage, _collect_warnings(caught), summaries)

        if config.command == "qfi":
            def compute(trunc):
                trajectories = perturbed_trajectories(params, config.grid(), trunc, config.fd())
                series = qfi_series(
                    params, config.grid(), trunc, config.fd(), trajectories=trajectories
                )
                return series, trajectories.central.leakage_max

            (series, leakage), n_cut = _with_truncation_retry(config, compute)
            columns = {"gamma_t": series.times, "qfi": series.values}
            summaries = [
                f"point{_point_suffix(config, point) or ' (single)'}: "
                f"plateau qfi = {series.plateau:.6g}, "
                f"cr bound (mu={config.repetitions}) = "
                f"{cr_bound(series.plateau, config.repetitions):.6g}"
            ]
            return _PointResult(index, columns, n_cut, leakage, _collect_warnings(caught), summaries)

        if config.command == "cfi":
            def compute(trunc):
                grid = config.grid()
                fd = config.fd()
                trajectories = perturbed_trajectories(params, grid, trunc, fd)
                cols = {"gamma_t": trajectories.times}
                summaries = []
                q_series = qfi_series(params, grid, trunc, fd, trajectories=trajectories)
                cols["qfi"] = q_series.values
                summaries.append(f"qfi: plateau = {q_series.plateau:.6g}")
                for phi in config.homodyne_phis:
                    series = cfi_series(
                        params, grid, trunc, fd, homodyne_povm(phi, trunc), trajectories=trajectories
                    )
                    name = f"cfi_hom_phi{phi / math.pi:g}pi"
                    cols[name] = series.values
                    summaries.append(f"{name}: plateau = {series.plateau:.6g}")
                if config.heterodyne:
                    povm = heterodyne_povm(
                        trunc,
                        grid_radius=config.heterodyne_radius,
                        grid_step=config.heterodyne_step,
                        mean_photon=mean_photon_number(trajectories.central.final),
                    )
                    series = cfi_series(params, grid, trunc, fd, povm, trajectories=trajectories)
                    cols["cfi_het"] = series.values
                    summaries.append(f"cfi_het: plateau = {series.plateau:.6g}")
                return (cols, summaries, trajectories.central.leakage_max)

            (cols, summaries, leakage), n_cut = _with_truncation_retry(config, compute)
            return _PointResult(index, cols, n_cut, leakage, _collect_warnings(caught), summaries)

        if config.command == "spectrum":
            def compute(trunc):
                if trunc.n_cut < config.window_hi + 22:
                    trunc = Truncation(config.window_hi + 22, trunc.leakage_tol)
                eig = spectrum(params, trunc)
                return gap_variance(eig, config.window_lo, config.window_hi), trunc.n_cut

            (report, n_cut), _ = _with_truncation_retry(config, compute)
            columns = {name: np.array([point[name]]) for name in config.swept_fields()}
            columns["var_gap"] = np.array([report.variance])
            return _PointResult(index, columns, n_cut, 0.0, _collect_warnings(caught), [])

        if config.command in ("purity-sweep", "steady-state"):
            def compute(trunc):
                ss = steady_state(params, trunc)
                return ss, trunc.n_cut

            (ss, n_cut), _ = _with_truncation_retry(config, compute)
            columns = {name: np.array([point[name]]) for name in config.swept_fields()}
            if config.command == "purity-sweep":
                columns["purity"] = np.array([purity(ss)])
            else:
                columns["photon_number"] = np.array([mean_photon_number(ss)])
                columns["purity"] = np.array([purity(ss)])
            return _PointResult(index, columns, n_cut, 0.0, _collect_warnings(caught), [])

    raise ConfigError(f"command {config.command!r} cannot be dispatched", field="command")


def _write_csv(path: str, config: ScenarioConfig, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    length = len(next(iter(columns.values())))
    rows = [",".join(names)]
    for i in range(length):
        rows.append(",".join(_format_value(float(columns[name][i])) for name in names))
    header = (
        f"# kerr-thermo {__version__}\n"
        f"# command: {config.command}\n"
        f"# config-hash: {config.config_hash()}\n"
    )
    with open(path, "w", newline="\n") as fh:
        fh.write(header)
        fh.write("\n".join(rows))
        fh.write("\n")


def _resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        env = os.environ.get("KERR_THERMO_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise ConfigError(f"KERR_THERMO_JOBS={env!r} is not an integer")
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    return jobs


def run(config: ScenarioConfig, out_dir: str | None = None, jobs: int | None = None) -> RunReport:
    """Execute a scenario, writing CSV outputs and a run report into ``out_dir``.

    ``out_dir=None`` falls back to the config's ``output_path``.  Raises on
    the first failing sweep point after removing partial outputs.
    """
    start = time.perf_counter()
    if out_dir is None:
        out_dir = config.output_path
    jobs = _resolve_jobs(jobs)
    os.makedirs(out_dir, exist_ok=True)
    report = RunReport(
        command=config.command,
        config_echo=config.canonical_text(),
        config_hash=config.config_hash(),
        n_cut_used=config.n_cut,
    )
    points = config.sweep_points()
    tasks = [(config, i) for i in range(len(points))]
    written: list[str] = []
    try:
        if jobs == 1 or len(tasks) == 1:
            results = [_run_point(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
                results = list(pool.map(_run_point, tasks))
        results.sort(key=lambda r: r.index)

        for res in results:
            report.n_cut_used = max(report.n_cut_used, res.n_cut_used)
            report.leakage_max = max(report.leakage_max, res.leakage_max)
            for message in res.warnings:
                if message not in report.warnings:
                    report.warnings.append(message)
            report.summaries.extend(res.summaries)

        if config.command in ("spectrum", "purity-sweep", "steady-state"):
            merged: dict[str, np.ndarray] = {}
            for name in results[0].columns:
                merged[name] = np.concatenate([r.columns[name] for r in results])
            if not config.swept_fields():
                # ensure at least one labeled abscissa column for a single point
                merged = {"n_th": np.array(config.n_th), **merged}
            filename = f"{config.command.replace('-', '_')}.csv"
            _write_csv(os.path.join(out_dir, filename), config, merged)
            written.append(filename)
        else:
            for res, point in zip(results, points):
                filename = f"{config.command}{_point_suffix(config, point)}.csv"
                _write_csv(os.path.join(out_dir, filename), config, res.columns)
                written.append(filename)

        report.outputs = written
        report.wall_time_s = time.perf_counter() - start
        with open(os.path.join(out_dir, "run_report.txt"), "w", newline="\n") as fh:
            fh.write(report.render())
        return report
    except Exception:
        for name in written:
            path = os.path.join(out_dir, name)
            if os.path.exists(path):
                os.remove(path)
        raise


def _figure_checks(name: str, config: ScenarioConfig, out_dir: str) -> list[str]:
    """Re-read the emitted figure CSV and evaluate the trend checks for it."""
    checks: list[str] = []
    path = os.path.join(out_dir, f"{name}.csv")
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    data = np.array([[float(x) for x in ln.strip().split(",")] for ln in lines[1:]])
    cols = {n: data[:, i] for i, n in enumerate(names)}

    def record(label: str, ok: bool) -> None:
        checks.append(f"[{'PASS' if ok else 'FAIL'}] {label}")

    if name.startswith("fig2"):
        n_eff = cols["n_eff"]
        tail = n_eff[-max(2, len(n_eff) // 10):]
        converged = float(np.max(np.abs(tail - n_eff[-1]))) <= 1e-3 * max(abs(n_eff[-1]), 1e-12)
        record("n_eff converged over the final window", converged)
        n_th = config.n_th[0]
        record(
            f"final n_eff within 30% of n_th={n_th:g} (got {n_eff[-1]:.4g})",
            abs(n_eff[-1] - n_th) <= 0.3 * n_th,
        )
    elif name.startswith("fig3") or name.startswith("fig5"):
        series = [c for c in names if c != "gamma_t"]
        plats = [cols[c][-1] for c in series]
        record(
            "plateau qfi strictly increasing along the sweep "
            + " < ".join(f"{p:.4g}" for p in plats),
            all(a < b for a, b in zip(plats, plats[1:])),
        )
    elif name in ("fig4", "fig6"):
        record("gap variance increasing along the sweep", bool(np.all(np.diff(cols["var_gap"]) > 0)))
    elif name.startswith("fig7"):
        record("purity strictly decreasing along the sweep", bool(np.all(np.diff(cols["purity"]) < 0)))
    elif name.startswith("fig8"):
        qfi_vals = cols["qfi"]
        for col in names:
            if col.startswith("cfi"):
                ok = bool(np.all(cols[col] <= qfi_vals * (1 + 1e-6)))
                record(f"{col} <= qfi at every sampled time", ok)
    return checks


def reproduce_figure(name: str, out_dir: str | None = None, jobs: int | None = None) -> RunReport:
    """Run a named figure preset and emit one CSV per figure plus a sidecar.

    The CSV columns map onto the figure axes (one column per plotted curve);
    the sidecar lists the preset parameters, flags the inferred ones, and
    reports which trend checks passed.
    """
    if name not in PRESETS:
        raise ConfigError(
            f"unknown figure {name!r}; known: {', '.join(FIGURE_NAMES)}", field="preset"
        )
    config = resolve_config(preset=name)
    if out_dir is None:
        out_dir = config.output_path
    os.makedirs(out_dir, exist_ok=True)
    report = run(config, out_dir=out_dir, jobs=jobs)

    try:
        # fold per-point time series into a single figure CSV, one column per curve
        if config.command in ("thermalize", "qfi", "cfi"):
            points = config.sweep_points()
            swept = config.swept_fields()
            merged: dict[str, np.ndarray] = {}
            for point in points:
                suffix = _point_suffix(config, point)
                src = os.path.join(out_dir, f"{config.command}{suffix}.csv")
                with open(src) as fh:
                    lines = [ln for ln in fh if not ln.startswith("#")]
                names = lines[0].strip().split(",")
                data = np.array([[float(x) for x in ln.strip().split(",")] for ln in lines[1:]])
                for i, col in enumerate(names):
                    if col == "gamma_t":
                        merged.setdefault("gamma_t", data[:, i])
                        continue
                    label = col if not swept else f"{col}_{swept[0]}{point[swept[0]]:g}"
                    merged[label] = data[:, i]
                os.remove(src)
            _write_csv(os.path.join(out_dir, f"{name}.csv"), config, merged)
            report.outputs = [f"{name}.csv"]
        else:
            src = f"{config.command.replace('-', '_')}.csv"
            os.replace(os.path.join(out_dir, src), os.path.join(out_dir, f"{name}.csv"))
            report.outputs = [f"{name}.csv"]

        checks = _figure_checks(name, config, out_dir)
    except Exception:
        for leftover in (f"{name}.csv", f"{name}_params.txt"):
            path = os.path.join(out_dir, leftover)
            if os.path.exists(path):
                os.remove(path)
        raise
    preset = PRESETS[name]
    inferred = set(preset.get("_inferred", ()))
    sidecar = [f"{name}: parameters and checks", ""]
    sidecar.append("parameters:")
    for key, value in preset.items():
        if key.startswith("_"):
            continue
        marker = "  (inferred)" if key in inferred else ""
        sidecar.append(f"  {key} = {value}{marker}")
    sidecar.append("")
    sidecar.append("checks:")
    sidecar += [f"  {c}" for c in checks]
    sidecar_name = f"{name}_params.txt"
    with open(os.path.join(out_dir, sidecar_name), "w", newline="\n") as fh:
        fh.write("\n".join(sidecar) + "\n")
    report.outputs.append(sidecar_name)
    report.summaries.extend(checks)
    with open(os.path.join(out_dir, "run_report.txt"), "w", newline="\n") as fh:
        fh.write(report.render())
    return report


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kerr-thermo",
        description="Kerr-resonator reservoir thermometry: scenario runner",
    )
    parser.add_argument(
        "command",
        choices=[
            "thermalize",
            "qfi",
            "cfi",
            "spectrum",
            "purity-sweep",
            "steady-state",
            "reproduce-figure",
        ],
    )
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--preset", help="named preset (figure name for reproduce-figure)")
    parser.add_argument(
        "--out", default=None, help="output directory (default: config output_path or cwd)"
    )
    parser.add_argument("--jobs", type=int, default=None, help="worker pool size")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    args = parser.parse_args(argv)

    try:
        if args.command == "reproduce-figure":
            if not args.preset:
                raise ConfigError("reproduce-figure requires --preset <figure name>")
            if args.config or args.override:
                raise ConfigError("reproduce-figure takes no --config or --override")
            report = reproduce_figure(args.preset, out_dir=args.out, jobs=args.jobs)
        else:
            text = ""
            if args.config:
                with open(args.config) as fh:
                    text = fh.read()
            config = resolve_config(
                file_text=text,
                preset=args.preset,
                overrides=tuple(args.override),
                command=args.command,
            )
            report = run(config, out_dir=args.out, jobs=args.jobs)
    except (KerrThermoError, OSError, ValueError) as exc:
        print(f"kerr-thermo: error: {exc}", file=sys.stderr)
        return 1
    for line in report.summaries:
        print(line)
    dest = args.out if args.out is not None else "."
    print(f"wrote {len(report.outputs)} file(s) to {dest} in {report.wall_time_s:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
