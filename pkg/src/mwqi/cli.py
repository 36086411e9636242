"""Command-line front end: ``evaluate``, ``sweep``, ``optimize`` and ``figure``.

Exit codes: 0 success, 2 unstable parameter point (or no stable point to
optimize over), 3 invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, RunConfig, load_config, preset_document
from .illumination import DetectionError, InstabilityError
from .model import DegenerateInputError, ParameterError
from .optimize import Bound, InfeasibleError, OptimizationSpec, maximize
from .presets import PRESETS, Preset, get_preset
from .sweeps import OBSERVABLES, EvaluationOptions, evaluate, sweep, sweep_best_omega

EXIT_OK = 0
EXIT_UNSTABLE = 2
EXIT_INVALID = 3

REPORT_KEYS = (
    "omega",
    "F",
    "F_opt",
    "F_max",
    "n_w",
    "n_o",
    "m_re",
    "m_im",
    "abs_m",
    "E_N",
    "E_N_normalized",
    "stable",
    "rwa_valid",
    "rwa_margin",
    "min_decay",
    "min_decay_transmitter",
    "min_decay_receiver",
    "phase_matched",
    "receiver_phi_w",
    "receiver_phi_o",
    "SNR_QI",
    "SNR_Cl",
    "SNR_QI_times_NB",
    "SNR_Cl_times_NB",
    "P_err",
    "p_err_underflow",
    "N_H0",
    "N_H1",
    "sigma_H0",
    "sigma_H1",
)
"""Keys of the ``evaluate`` JSON report, in output order."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _finite_or_none(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps_json(document: dict) -> str:
    return json.dumps(document, indent=2, allow_nan=False, default=_finite_or_none) + "\n"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if not math.isfinite(value):
        return ""
    return format(value, ".17g")


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def report_document(report) -> dict:
    data = report.as_dict()
    data["stable"] = report.stable
    return {key: _finite_or_none(data.get(key)) for key in REPORT_KEYS}


def _output_path(args, config: RunConfig) -> Optional[str]:
    return args.output if args.output is not None else config.output.path


def cmd_evaluate(args) -> int:
    config = load_config(args.config)
    report = evaluate(config.system(), config.evaluation.options())
    _write(dumps_json(report_document(report)), _output_path(args, config))
    return EXIT_OK


def _sweep_columns(config_axes, extra: Sequence[str] = ()) -> list[str]:
    return [a.name for a in config_axes] + list(extra) + list(OBSERVABLES)


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if config.sweep is None:
        raise ConfigError("the sweep command needs a 'sweep' section")
    axes = [a.to_axis() for a in config.sweep.axes]
    options = config.evaluation.options()
    rows = sweep(config.system(), axes, options, workers=args.threads)
    path = _output_path(args, config)
    _write(rows_to_csv(rows, _sweep_columns(axes)), path)
    if args.both_omega_modes or config.sweep.both_omega_modes:
        if path is None or path == "-":
            raise UsageError("the per-point frequency optimum needs an output file path")
        best = sweep_best_omega(config.system(), axes, options, workers=args.threads)
        target = Path(path)
        _write(
            rows_to_csv(best, _sweep_columns(axes, ["omega_opt_over_kappa_o"])),
            str(target.with_name(target.stem + "_omega_opt" + target.suffix)),
        )
    return EXIT_OK


def cmd_optimize(args) -> int:
    config = load_config(args.config)
    if config.optimize is None:
        raise ConfigError("the optimize command needs an 'optimize' section")
    section = config.optimize
    spec = OptimizationSpec(
        objective=section.objective,
        free=tuple(Bound(f.name, f.lower, f.upper) for f in section.free),
        grid=section.grid,
        starts=section.starts,
        max_evals=section.max_evals,
        options=config.evaluation.options(),
        seed=section.seed if args.seed is None else args.seed,
    )
    base = config.system()
    result = maximize(spec, base, workers=args.threads)
    best = base
    for name, value in result.argmax.items():
        best = best.with_param(name, value)
    document = {
        "objective": spec.objective,
        "seed": spec.seed,
        "argmax": result.argmax,
        "value": result.value,
        "grid_argmax": result.grid_argmax,
        "grid_value": result.grid_value,
        "evaluations": len(result.trace),
        "report": report_document(evaluate(best, spec.options)),
    }
    _write(dumps_json(document), _output_path(args, config))
    if args.trace:
        result.write_trace(args.trace)
    return EXIT_OK


PLOT_TEMPLATE = '''"""Plot {name}: {title}."""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

AXES = {axes!r}
SHAPE = {shape!r}
OBSERVABLE = {observable!r}


def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    cols = {{}}
    for key in rows[0]:
        cols[key] = np.array([float(r[key]) if r[key] != "" else np.nan for r in rows])
    return cols


def main(data="{csv}", out="{png}"):
    cols = load(data)
    fig, ax = plt.subplots(figsize=(5, 4))
    z = cols[OBSERVABLE]
    if len(AXES) == 1:
        ax.plot(cols[AXES[0]], z)
        ax.set_xlabel(AXES[0])
        ax.set_ylabel(OBSERVABLE)
    else:
        x = cols[AXES[0]].reshape(SHAPE)[:, 0]
        y = cols[AXES[1]].reshape(SHAPE)[0, :]
        # NaN cells (unstable points) are left white.
        mesh = ax.pcolormesh(x, y, z.reshape(SHAPE).T, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=OBSERVABLE)
        ax.set_xlabel(AXES[0])
        ax.set_ylabel(AXES[1])
    ax.set_title({title!r})
    fig.tight_layout()
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    main(*sys.argv[1:])
'''


def write_figure(preset: Preset, outdir: Path, workers: int = 1, both_omega_modes: bool = False) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    options = EvaluationOptions()
    columns = _sweep_columns(preset.axes)
    rows = sweep(preset.system, preset.axes, options, workers=workers)
    csv_path = outdir / f"{preset.name}.csv"
    csv_path.write_text(rows_to_csv(rows, columns))
    written = [csv_path]

    if both_omega_modes:
        best = sweep_best_omega(preset.system, preset.axes, options, workers=workers)
        best_path = outdir / f"{preset.name}_omega_opt.csv"
        best_path.write_text(rows_to_csv(best, _sweep_columns(preset.axes, ["omega_opt_over_kappa_o"])))
        written.append(best_path)

    script = outdir / f"{preset.name}_plot.py"
    script.write_text(
        PLOT_TEMPLATE.format(
            name=preset.name,
            title=preset.title,
            axes=tuple(a.name for a in preset.axes),
            shape=tuple(a.num for a in preset.axes),
            observable=preset.observable,
            csv=csv_path.name,
            png=f"{preset.name}.png",
        )
    )
    written.append(script)

    meta = {
        "preset": preset.name,
        "title": preset.title,
        "observable": preset.observable,
        "axes": [{"name": a.name, "start": a.start, "stop": a.stop, "num": a.num} for a in preset.axes],
        "caption_parameters": dict(preset.caption),
        "conventions": {k: str(v) for k, v in preset.conventions.items()},
        "frequency_modes": ["fixed", "per_point_optimum"] if both_omega_modes else ["fixed"],
        "config": preset_document(preset),
    }
    meta_path = outdir / f"{preset.name}_meta.json"
    meta_path.write_text(dumps_json(meta))
    written.append(meta_path)
    return written


def cmd_figure(args) -> int:
    try:
        preset = get_preset(args.preset)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    for path in write_figure(preset, Path(args.outdir), args.threads, args.both_omega_modes):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwqi", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=1, metavar="N", help="parallel workers for grids")
    common.add_argument("--seed", type=int, default=None, metavar="S", help="optimizer seed (overrides config)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", parents=[common], help="evaluate one parameter point (JSON)")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="output file (default: config output.path or stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common], help="grid sweep over 1 or 2 parameters (CSV)")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--both-omega-modes", action="store_true",
                   help="also write a sweep with F maximized over frequency at each point")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common], help="maximize an objective (JSON)")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--trace", help="write the evaluation trace to this CSV file")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("figure", parents=[common], help="reproduce a figure preset")
    p.add_argument("preset", help=", ".join(PRESETS))
    p.add_argument("--outdir", default=".")
    p.add_argument("--both-omega-modes", action="store_true")
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("mwqi: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (ConfigError, ParameterError, UsageError) as exc:
        print(f"mwqi: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InstabilityError, InfeasibleError) as exc:
        print(f"mwqi: unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (DetectionError, DegenerateInputError) as exc:
        print(f"mwqi: degenerate point: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
