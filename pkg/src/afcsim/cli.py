"""Command-line entry point.

Subcommands mirror the experiment kinds (comb, store, spinwave, t2,
fringe), plus `repro` for built-in figure-reproduction presets and `sweep`
for fanning a base configuration over one parameter with derived seeds.
Exit codes: 0 success, 2 configuration or validation failure, 3
computational failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .comb import measure_comb, parametric_comb
from .config import RunConfig, apply_overrides, load_config, parse_config
from .errors import ValidationError
from .experiments import (
    run_fringe_experiment,
    run_full_storage_experiment,
    run_spin_decay_experiment,
    run_t2_experiment,
)
from .holeburning import simulate_hole_burning
from .manifest import RunManifest
from .pulses import write_trace
from .spectral import write_profile
from .tables import write_table

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3

REPRO_FIGURES = ("fig2", "fig4", "fig5")


def _emit_json(path: Path, record: dict) -> None:
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")


def _build_profile(cfg: RunConfig):
    if cfg.burn_sequence is not None:
        _, profile = simulate_hole_burning(
            cfg.burn_sequence, cfg.scheme, cfg.line, cfg.grid
        )
        return profile
    return parametric_comb(cfg.comb, cfg.grid)


def _run_comb(cfg: RunConfig, out: Path) -> tuple[list[Path], dict]:
    profile = _build_profile(cfg)
    stats = measure_comb(profile)
    files = [out / "profile.txt"]
    write_profile(profile, files[0])
    record = {
        "experiment": "comb",
        "seed": cfg.seed,
        "comb_stats": {
            "period_mhz": stats.period_mhz,
            "tooth_fwhm_mhz": stats.tooth_fwhm_mhz,
            "peak_depth": stats.peak_depth,
            "background_depth": stats.background_depth,
            "n_teeth": stats.n_teeth,
        },
    }
    return files, record


def _run_storage(cfg: RunConfig, out: Path) -> tuple[list[Path], dict]:
    run = run_full_storage_experiment(cfg)
    files = [out / "input_trace.txt", out / "output_trace.txt",
             out / "profile.txt"]
    write_trace(run.input_pulse, files[0])
    write_trace(run.output_pulse, files[1])
    write_profile(run.profile, files[2])
    record = run.to_record()

    if cfg.experiment == "spinwave" and cfg.decay_spec is not None:
        spec = cfg.decay_spec
        series, fit = run_spin_decay_experiment(
            cfg.spin,
            np.asarray(spec.tau_s_us),
            cfg.noise,
            base_amplitude=spec.base_amplitude,
            amplitude_convention=spec.amplitude_convention,
        )
        decay_path = out / "spin_decay.txt"
        write_table(
            decay_path,
            {"tau_s_us": series[:, 0], "amplitude": series[:, 1]},
            meta={"amplitude_convention": spec.amplitude_convention},
        )
        files.append(decay_path)
        record["spin_decay_fit"] = fit.to_dict()
    return files, record


def _run_t2(cfg: RunConfig, out: Path) -> tuple[list[Path], dict]:
    spec = cfg.t2_spec
    results = run_t2_experiment(
        [t2 for _, t2 in spec.series],
        np.asarray(spec.spacings_us),
        cfg.noise,
        amplitude0=spec.amplitude0,
    )
    files: list[Path] = []
    fits = {}
    for (label, t2_true), (series, fit) in zip(spec.series, results):
        path = out / f"decay_{label}.txt"
        write_table(
            path,
            {"spacing_us": series[:, 0], "amplitude": series[:, 1]},
            meta={"label": label, "t2_true_us": t2_true},
        )
        files.append(path)
        fits[label] = {"t2_true_us": t2_true, **fit.to_dict()}
    return files, {"experiment": "t2", "seed": cfg.seed, "fits": fits}


def _run_spin_decay(cfg: RunConfig, out: Path) -> tuple[list[Path], dict]:
    spec = cfg.decay_spec
    series, fit = run_spin_decay_experiment(
        cfg.spin,
        np.asarray(spec.tau_s_us),
        cfg.noise,
        base_amplitude=spec.base_amplitude,
        amplitude_convention=spec.amplitude_convention,
    )
    path = out / "spin_decay.txt"
    write_table(
        path,
        {"tau_s_us": series[:, 0], "amplitude": series[:, 1]},
        meta={"amplitude_convention": spec.amplitude_convention},
    )
    return [path], {
        "experiment": "spin_decay",
        "seed": cfg.seed,
        "fit": fit.to_dict(),
    }


def _run_fringe(cfg: RunConfig, out: Path) -> tuple[list[Path], dict]:
    spec = cfg.fringe_spec
    series, fit = run_fringe_experiment(
        spec.i_echo,
        spec.i_ref,
        spec.overlap,
        np.deg2rad(spec.phi0_deg),
        spec.phases_rad(),
        cfg.noise,
        averages=spec.averages,
    )
    path = out / "fringe.txt"
    write_table(
        path,
        {"phi_deg": np.rad2deg(series[:, 0]), "intensity": series[:, 1]},
        meta={"averages": spec.averages},
    )
    return [path], {"experiment": "fringe", "seed": cfg.seed, "fit": fit.to_dict()}


_RUNNERS = {
    "comb": _run_comb,
    "store": _run_storage,
    "spinwave": _run_storage,
    "spin_decay": _run_spin_decay,
    "t2": _run_t2,
    "fringe": _run_fringe,
}


def _compare_targets(cfg: RunConfig, record: dict) -> list[dict]:
    targets = cfg.repro_targets or {}
    rows = []
    if cfg.experiment == "t2":
        for label, spec in targets.get("series", {}).items():
            fitted = record["fits"][label]["derived_constant"]
            rows.append({
                "name": f"t2_{label}_us",
                "fitted": fitted,
                "target": spec["value"],
                "tolerance": spec["tolerance"],
                "within": abs(fitted - spec["value"]) <= spec["tolerance"],
            })
    elif cfg.experiment == "spin_decay" and "gamma_s_mhz" in targets:
        spec = targets["gamma_s_mhz"]
        fitted = record["fit"]["derived_constant"]
        rows.append({
            "name": "gamma_s_mhz",
            "fitted": fitted,
            "target": spec["value"],
            "tolerance": spec["tolerance"],
            "within": abs(fitted - spec["value"]) <= spec["tolerance"],
        })
    elif cfg.experiment == "fringe" and "visibility" in targets:
        spec = targets["visibility"]
        fitted = record["fit"]["visibility"]
        rows.append({
            "name": "visibility",
            "fitted": fitted,
            "target": spec["value"],
            "tolerance": spec["tolerance"],
            "within": abs(fitted - spec["value"]) <= spec["tolerance"],
        })
    return rows


def _execute(cfg: RunConfig, out_dir: str | None, quiet: bool) -> Path:
    out = Path(out_dir or cfg.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    runner = _RUNNERS[cfg.experiment]
    manifest = RunManifest(cfg.to_mapping(), cfg.seed, __version__)
    files, record = runner(cfg, out)
    record_path = out / "run.json"
    _emit_json(record_path, record)
    files.append(record_path)

    if cfg.repro_targets:
        rows = _compare_targets(cfg, record)
        summary_path = out / "summary.json"
        _emit_json(summary_path, {"experiment": cfg.experiment, "comparisons": rows})
        files.append(summary_path)
        if not quiet:
            for row in rows:
                flag = "ok" if row["within"] else "MISS"
                print(
                    f"{row['name']}: fitted {row['fitted']:.6g} vs "
                    f"{row['target']:.6g} +- {row['tolerance']:.2g}  [{flag}]"
                )

    for path in files:
        manifest.add_file(path, out)
    manifest.write(out)
    if not quiet:
        print(f"wrote {len(files) + 1} files to {out}")
    return out


def _preset_config(name: str) -> dict:
    ref = resources.files("afcsim.presets") / f"{name}.yaml"
    return yaml.safe_load(ref.read_text())


def _set_nested(mapping: dict, dotted: str, value):
    keys = dotted.split(".")
    node = mapping
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value


def _parse_value(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="afcsim",
        description="Atomic-frequency-comb storage simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_parser(name: str, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--quiet", action="store_true")
        return p

    add_run_parser("comb", "emit a comb absorption profile and its statistics")
    add_run_parser("store", "two-level comb storage of a weak pulse")
    add_run_parser("spinwave", "spin-wave storage (and optional decay scan)")
    add_run_parser("t2", "two-pulse echo decay series and fits")
    add_run_parser("fringe", "phase-stepped interference scan and fit")

    p_repro = sub.add_parser("repro", help="run a built-in reproduction preset")
    p_repro.add_argument("figure", choices=REPRO_FIGURES)
    p_repro.add_argument("--seed", type=int, default=None)
    p_repro.add_argument("--out", default=None)
    p_repro.add_argument("--quiet", action="store_true")

    p_sweep = sub.add_parser("sweep", help="fan a config over one parameter")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, help="dotted key, e.g. spin.tau_s_us")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--quiet", action="store_true")

    args = parser.parse_args(argv)

    try:
        if args.command == "repro":
            data = _preset_config(args.figure)
            cfg = parse_config(data, source=f"preset {args.figure}")
            cfg = apply_overrides(cfg, seed=args.seed, output=args.out)
            _execute(cfg, args.out, args.quiet)
        elif args.command == "sweep":
            base = load_config(args.config)
            base = apply_overrides(base, seed=args.seed, output=args.out)
            values = [_parse_value(v) for v in args.values.split(",")]
            root = Path(args.out or base.output or ".")
            for i, value in enumerate(values):
                raw = yaml.safe_load(yaml.safe_dump(base.to_mapping()))
                _set_nested(raw, args.param, value)
                child_seed = int(
                    np.random.SeedSequence((base.seed, i)).generate_state(1)[0]
                )
                raw["seed"] = child_seed
                cfg = parse_config(raw, source=f"sweep[{i}]")
                _execute(cfg, str(root / f"sweep_{i:03d}"), args.quiet)
            if not args.quiet:
                print(f"sweep of {args.param} over {len(values)} values done")
        else:
            cfg = load_config(args.config)
            if cfg.experiment != args.command and not (
                args.command == "spinwave" and cfg.experiment == "spin_decay"
            ):
                raise ValidationError(
                    f"config declares experiment '{cfg.experiment}' but the "
                    f"'{args.command}' subcommand was invoked"
                )
            cfg = apply_overrides(cfg, seed=args.seed, output=args.out)
            _execute(cfg, args.out, args.quiet)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
