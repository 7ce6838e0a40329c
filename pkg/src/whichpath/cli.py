"""Config-driven scenario runner.

Subcommands ``simulate | sweep | decompose | erase`` each take a scenario
config, execute the corresponding computation, and write CSV files (17
significant digits, stable ordering, so identical runs are byte-identical)
plus a JSON run summary.  ``--svg`` additionally renders one figure per
primary CSV.

Exit codes: 0 success; 2 invalid configuration (including invalid parameter
combinations discovered while building the scenario); 3 failure during
computation or output writing.  stdout carries only the summary JSON; all
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    decompose,
    envelope_pattern,
    fitted_visibility,
    marginal_pattern,
    rect_autocorrelation,
    transfer_histogram,
)
from .config import ConfigError, ScenarioConfig, parse_config
from .detectors import DetectorModel, heisenberg_model, overlap, sinc_visibility
from .eraser import eraser_patterns


def _format(value: float) -> str:
    return format(float(value), ".17g")


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for i in range(rows):
            handle.write(
                ",".join(
                    col[i] if isinstance(col[i], str) else _format(col[i]) for col in columns
                )
                + "\n"
            )


@dataclass
class RunSummary:
    """Machine-readable record of one CLI run."""

    data: dict

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"


class _Writer:
    """Collects output files and reports their byte sizes in the manifest."""

    def __init__(self, out_dir: Path, prefix: str):
        self.out_dir = out_dir
        self.prefix = prefix
        self.manifest: list[dict] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.out_dir / f"{self.prefix}{name}"

    def csv(self, name: str, header: list[str], columns: list) -> Path:
        path = self.path(name)
        _write_csv(path, header, columns)
        self.manifest.append({"path": path.name, "bytes": path.stat().st_size})
        return path

    def record(self, path: Path) -> None:
        self.manifest.append({"path": path.name, "bytes": path.stat().st_size})


def _base_summary(config: ScenarioConfig, mode: str, seed: int) -> dict:
    return {
        "tool": "whichpath",
        "version": __version__,
        "mode": mode,
        "scenario": config.scenario,
        "seed": seed,
        "config": config.echo,
    }


def _overlap_summary(model: DetectorModel) -> dict:
    o = overlap(model)
    return {
        "re": o.real,
        "im": o.imag,
        "abs": abs(o),
        "phase": float(np.angle(o)),
    }


def run_simulate(config: ScenarioConfig, writer: _Writer, seed: int, svg: bool) -> RunSummary:
    setup = config.build_setup()
    grid = config.build_grid()
    model = config.build_model()

    pattern = marginal_pattern(model, setup, grid)
    envelope = envelope_pattern(setup, grid)
    vis, phase = fitted_visibility(pattern, setup)

    writer.csv(
        "pattern.csv",
        ["p_x (1/len)", "P (len)", "envelope (len)"],
        [grid.values, pattern.values, envelope.values],
    )
    if svg:
        from .plotting import save_pattern_figure

        fig_path = writer.path("pattern.svg")
        save_pattern_figure(
            fig_path, grid.values, [("marginal", pattern.values), ("envelope", envelope.values)]
        )
        writer.record(fig_path)

    summary = _base_summary(config, "simulate", seed)
    summary.update(
        {
            "overlap": _overlap_summary(model),
            "fitted_visibility": vis,
            "fitted_phase": phase,
            "component_count": model.n_channels,
            "files": writer.manifest,
        }
    )
    return RunSummary(summary)


def _sweep_heisenberg(config: ScenarioConfig, xs: np.ndarray):
    setup = config.build_setup()
    grid = config.build_grid()
    decay = config.gamma_over_c * setup.separation / 2.0
    fitted = np.empty_like(xs)
    analytic = np.empty_like(xs)
    for i, x in enumerate(xs):
        model = heisenberg_model(
            k_gamma=float(x) / setup.separation,
            separation=setup.separation,
            gamma_over_c=config.gamma_over_c,
            dipole=config.dipole,
            quadrature=config.quadrature,
        )
        vis, phase = fitted_visibility(marginal_pattern(model, setup, grid), setup)
        # signed contrast (cosine coefficient at zero phase) so the curve can
        # track the analytic law through its sign changes
        fitted[i] = vis * np.cos(phase)
        analytic[i] = sinc_visibility(float(x), decay)
    return fitted, analytic


def _sweep_micromaser(config: ScenarioConfig, xs: np.ndarray):
    model = config.build_model()
    length = float(config.cavity_length)  # type: ignore[arg-type]
    k_x = model.metadata["k_x"]
    fitted = np.empty_like(xs)
    analytic = np.empty_like(xs)
    for i, s in enumerate(xs):
        shift = float(s) * length
        fitted[i] = float(np.sum(model.weights * np.cos(k_x * shift)))
        analytic[i] = rect_autocorrelation(length, shift)
    return fitted, analytic


def run_sweep(config: ScenarioConfig, writer: _Writer, seed: int, svg: bool) -> RunSummary:
    assert config.sweep_start is not None and config.sweep_stop is not None
    assert config.sweep_count is not None and config.sweep_parameter is not None
    xs = np.linspace(config.sweep_start, config.sweep_stop, config.sweep_count)
    if config.scenario == "heisenberg":
        fitted, analytic = _sweep_heisenberg(config, xs)
    else:
        fitted, analytic = _sweep_micromaser(config, xs)

    writer.csv(
        "sweep.csv",
        [f"{config.sweep_parameter} (dimensionless)", "v_fitted", "v_analytic"],
        [xs, fitted, analytic],
    )
    if svg:
        from .plotting import save_sweep_figure

        fig_path = writer.path("sweep.svg")
        save_sweep_figure(fig_path, xs, fitted, analytic, config.sweep_parameter)
        writer.record(fig_path)

    summary = _base_summary(config, "sweep", seed)
    summary.update(
        {
            "sweep_parameter": config.sweep_parameter,
            "points": len(xs),
            "max_abs_error": float(np.max(np.abs(fitted - analytic))),
            "files": writer.manifest,
        }
    )
    return RunSummary(summary)


def run_decompose(config: ScenarioConfig, writer: _Writer, seed: int, svg: bool) -> RunSummary:
    setup = config.build_setup()
    model = config.build_model()
    decomposition = decompose(model, setup)
    histogram = transfer_histogram(decomposition, config.histogram_bins)

    defined = decomposition.phase_defined
    writer.csv(
        "components.csv",
        [
            "label (index)",
            "mass",
            "visibility",
            "phase (rad)",
            "momentum_transfer (1/len)",
            "phase_defined",
        ],
        [
            decomposition.labels,
            decomposition.masses,
            decomposition.visibilities,
            decomposition.phases,
            decomposition.transfers,
            ["true" if flag else "false" for flag in defined],
        ],
    )
    writer.csv(
        "histogram.csv",
        ["bin_lo (1/len)", "bin_hi (1/len)", "mass"],
        [histogram.bin_edges[:-1], histogram.bin_edges[1:], histogram.masses],
    )
    if svg:
        from .plotting import save_histogram_figure

        fig_path = writer.path("histogram.svg")
        save_histogram_figure(fig_path, histogram.bin_edges, histogram.masses)
        writer.record(fig_path)

    spread = {
        "phase_iqr_rad": histogram.phase_iqr,
        "transfer_iqr": histogram.transfer_iqr,
        "transfer_iqr_times_d": histogram.transfer_iqr * setup.separation,
        "excluded_mass": histogram.excluded_mass,
        "spread_measure": histogram.metadata["spread_measure"],
    }
    if "unwrapped_phase_iqr" in histogram.metadata:
        spread["unwrapped_phase_iqr_rad"] = histogram.metadata["unwrapped_phase_iqr"]

    summary = _base_summary(config, "decompose", seed)
    summary.update(
        {
            "overlap": _overlap_summary(model),
            "component_count": decomposition.n_components,
            "spread": spread,
            "files": writer.manifest,
        }
    )
    return RunSummary(summary)


def run_erase(config: ScenarioConfig, writer: _Writer, seed: int, svg: bool) -> RunSummary:
    assert config.chi_values is not None
    setup = config.build_setup()
    grid = config.build_grid()

    rows = []
    first = None
    for index, chi in enumerate(config.chi_values):
        result = eraser_patterns(setup, grid, chi)
        if first is None:
            first = result
        residual = float(
            np.max(
                np.abs(
                    result.pattern_plus.values
                    + result.pattern_minus.values
                    - result.envelope.values
                )
            )
            / np.max(result.envelope.values)
        )
        vis, phase = fitted_visibility(result.pattern_plus, setup)
        writer.csv(
            f"erase_chi{index:03d}.csv",
            ["p_x (1/len)", "P_plus (len)", "P_minus (len)", "envelope (len)"],
            [
                grid.values,
                result.pattern_plus.values,
                result.pattern_minus.values,
                result.envelope.values,
            ],
        )
        rows.append((chi, vis, phase, residual))

    writer.csv(
        "erase_summary.csv",
        ["chi (rad)", "v_fitted", "phi_fitted (rad)", "sum_rule_residual"],
        [np.array([r[i] for r in rows]) for i in range(4)],
    )
    if svg and first is not None:
        from .plotting import save_pattern_figure

        fig_path = writer.path("erase.svg")
        save_pattern_figure(
            fig_path,
            grid.values,
            [
                ("port plus", first.pattern_plus.values),
                ("port minus", first.pattern_minus.values),
                ("envelope", first.envelope.values),
            ],
        )
        writer.record(fig_path)

    assert first is not None
    summary = _base_summary(config, "erase", seed)
    summary.update(
        {
            "chi_values": list(config.chi_values),
            "per_chi": [
                {"chi": c, "v_fitted": v, "phi_fitted": p, "sum_rule_residual": r}
                for c, v, p, r in rows
            ],
            "max_sum_rule_residual": max(r[3] for r in rows),
            "momentum_transfers_times_d": {
                "p_plus": first.p_plus * setup.separation,
                "p_minus": first.p_minus * setup.separation,
            },
            "port_convention": first.metadata,
            "files": writer.manifest,
        }
    )
    return RunSummary(summary)


_RUNNERS = {
    "simulate": run_simulate,
    "sweep": run_sweep,
    "decompose": run_decompose,
    "erase": run_erase,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whichpath",
        description=(
            "Far-field double-aperture interference with which-path detectors: "
            "patterns, visibility sweeps, fringe decompositions and quantum-eraser runs."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "Compute the marginal screen pattern for a scenario."),
        ("sweep", "Sweep a parameter and compare fitted vs analytic visibility."),
        ("decompose", "Per-channel fringe table and momentum-transfer histogram."),
        ("erase", "Quantum-eraser coincidence patterns over a phase list."),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, metavar="PATH", help="Scenario config file.")
        cmd.add_argument("--out", default=None, metavar="DIR", help="Output directory.")
        cmd.add_argument("--svg", action="store_true", help="Also render SVG figures.")
        cmd.add_argument("--seed", type=int, default=None, help="Override the config seed.")
        cmd.add_argument("--quiet", action="store_true", help="Suppress the stdout summary.")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2

    try:
        config = parse_config(text, source=args.config, mode=args.command)
        seed = args.seed if args.seed is not None else config.seed
        out_dir = Path(args.out) if args.out is not None else Path(config.out_dir or "whichpath_out")
        # fail invalid parameter combinations before any file is written
        config.build_setup()
        config.build_grid()
        if args.command in ("simulate", "decompose") or config.scenario == "micromaser":
            config.build_model()
    except (ConfigError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return 2

    try:
        writer = _Writer(out_dir, config.output_prefix)
        summary = _RUNNERS[args.command](config, writer, seed, args.svg)
        summary_path = writer.path("summary.json")
        summary_path.write_text(summary.to_json(), encoding="utf-8")
    except Exception as exc:  # computation or output failure
        print(f"run failed: {exc}", file=sys.stderr)
        return 3

    if not args.quiet:
        sys.stdout.write(summary.to_json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
