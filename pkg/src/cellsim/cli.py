"""Command-line front end: run scenarios, reproduce figure data, validate.

Commands
    run CONFIG          simulate a scenario described by a config file
    figure ID           reproduce the data file behind one of the four
                        reference figures (1/2 symmetric rates/interference,
                        3/4 asymmetric)
    validate SUITE      run one validation suite and report pass/fail
    print-config        print the default scenario in config-file syntax

Exit codes: 0 success, 1 validation failures, 2 usage, 3 config problems,
4 runtime failures.  CELLSIM_SEED overrides the config seed; --seed beats
the environment.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import os
import sys
import time
from pathlib import Path

from .channel import PathLossSpec
from .montecarlo import ConfigError, ScenarioConfig, run_scenario, write_curve_csv
from .scheduling import CANONICAL_ORDER
from .validation import SUITES, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

DEFAULT_SEED = 185

DESK_GRID = tuple(2**k for k in range(4, 15))
FULL_GRID = tuple(2**k for k in range(4, 17))
DESK_TRIALS = 20_000
FULL_TRIALS = 100_000


def figure_scenario(figure_id: int, scale: str = "desk") -> ScenarioConfig:
    """Scenario behind one reference figure.

    Figures 1/2 share the symmetric scenario (rates vs interference are
    just different columns of the same sweep); 3/4 share the asymmetric
    one.  Desk scale caps the grid at 2^14 and 2e4 trials per point.
    """
    if figure_id not in (1, 2, 3, 4):
        raise ConfigError(f"figure id must be 1..4, got {figure_id}")
    if scale not in ("desk", "full"):
        raise ConfigError(f"scale must be 'desk' or 'full', got {scale!r}")
    return ScenarioConfig(
        model="symmetric" if figure_id in (1, 2) else "asymmetric",
        n_grid=DESK_GRID if scale == "desk" else FULL_GRID,
        trials_per_n=DESK_TRIALS if scale == "desk" else FULL_TRIALS,
        schedulers=CANONICAL_ORDER,
        jp_enabled=True,
        master_seed=DEFAULT_SEED,
    )


# -- config file format ---------------------------------------------------------

_SCALAR_FIELDS = {
    "model": str,
    "trials_per_n": int,
    "p_dbm": float,
    "noise_dbm": float,
    "n_interferers": int,
    "cell_radius_km": float,
    "symmetric_radius_km": float,
    "jp_enabled": None,  # parsed as a boolean
    "master_seed": int,
}


def format_config(config: ScenarioConfig) -> str:
    """Render a config in the flat key = value syntax `run` accepts."""
    pl = config.path_loss
    if pl.variant == "hata":
        path_loss = f"hata {pl.offset_db!r} {pl.slope_db!r}"
    else:
        path_loss = f"generic {pl.scale!r} {pl.exponent!r}"
    lines = [
        "[scenario]",
        f"model = {config.model}",
        "n_grid = " + " ".join(str(n) for n in config.n_grid),
        f"trials_per_n = {config.trials_per_n}",
        f"p_dbm = {config.p_dbm!r}",
        f"noise_dbm = {config.noise_dbm!r}",
        f"n_interferers = {config.n_interferers}",
        f"cell_radius_km = {config.cell_radius_km!r}",
        f"symmetric_radius_km = {config.symmetric_radius_km!r}",
        f"path_loss = {path_loss}",
        "schedulers = " + " ".join(k.value for k in config.schedulers),
        f"jp_enabled = {'true' if config.jp_enabled else 'false'}",
        f"master_seed = {config.master_seed}",
    ]
    if config.interferer_gain_scale is not None:
        lines.append(
            "interferer_gain_scale = "
            + " ".join(repr(x) for x in config.interferer_gain_scale)
        )
    return "\n".join(lines) + "\n"


def _parse_path_loss(value: str) -> PathLossSpec:
    parts = value.split()
    if len(parts) != 3:
        raise ConfigError(
            f"path_loss must be 'hata OFFSET_DB SLOPE_DB' or 'generic SCALE EXPONENT', "
            f"got {value!r}"
        )
    kind, a, b = parts
    try:
        a, b = float(a), float(b)
    except ValueError:
        raise ConfigError(f"path_loss parameters must be numbers, got {value!r}") from None
    if kind == "hata":
        return PathLossSpec.hata(a, b)
    if kind == "generic":
        return PathLossSpec.generic(a, b)
    raise ConfigError(f"path_loss variant must be 'hata' or 'generic', got {kind!r}")


def parse_config(path) -> ScenarioConfig:
    """Read a scenario config file; errors name the offending key."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not parser.has_section("scenario"):
        raise ConfigError(f"{path}: missing [scenario] section")
    section = parser["scenario"]

    known = set(_SCALAR_FIELDS) | {"n_grid", "path_loss", "schedulers", "interferer_gain_scale"}
    for key in section:
        if key not in known:
            raise ConfigError(f"{path}: unknown key {key!r} in [scenario]")

    kwargs = {}
    for key, cast in _SCALAR_FIELDS.items():
        if key not in section:
            continue
        raw = section.get(key)
        try:
            if cast is None:
                kwargs[key] = section.getboolean(key)
            else:
                kwargs[key] = cast(raw)
        except ValueError:
            raise ConfigError(f"{path}: key {key!r} has invalid value {raw!r}") from None
    if "n_grid" not in section:
        raise ConfigError(f"{path}: key 'n_grid' is required")
    if "model" not in kwargs:
        raise ConfigError(f"{path}: key 'model' is required")
    if "trials_per_n" not in kwargs:
        raise ConfigError(f"{path}: key 'trials_per_n' is required")
    try:
        kwargs["n_grid"] = tuple(int(x) for x in section.get("n_grid").split())
    except ValueError:
        raise ConfigError(f"{path}: n_grid must be a list of integers") from None
    if "path_loss" in section:
        kwargs["path_loss"] = _parse_path_loss(section.get("path_loss"))
    if "schedulers" in section:
        kwargs["schedulers"] = tuple(section.get("schedulers").split())
    if "interferer_gain_scale" in section:
        raw = section.get("interferer_gain_scale").split()
        try:
            kwargs["interferer_gain_scale"] = tuple(float(x) for x in raw)
        except ValueError:
            raise ConfigError(f"{path}: interferer_gain_scale must be numbers") from None
    try:
        return ScenarioConfig(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# -- command handlers --------------------------------------------------------------


def _resolve_seed(config: ScenarioConfig, cli_seed) -> ScenarioConfig:
    seed = None
    env = os.environ.get("CELLSIM_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"CELLSIM_SEED must be an integer, got {env!r}") from None
    if cli_seed is not None:  # flag wins over environment
        seed = cli_seed
    if seed is None:
        return config
    return dataclasses.replace(config, master_seed=seed)


def _execute(config: ScenarioConfig, out_dir: Path, stem: str, workers: int) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}.resolved.cfg").write_text(format_config(config))

    def progress(point):
        print(f"  n={point.n:>6d} done", flush=True)

    started = time.time()
    points = run_scenario(config, workers=workers, progress=progress)
    csv_path = write_curve_csv(out_dir / f"{stem}.csv", points, config)
    print(f"wrote {csv_path} ({time.time() - started:.1f}s, workers={workers})")
    return csv_path


def cmd_run(args) -> int:
    config = _resolve_seed(parse_config(args.config), args.seed)
    _execute(config, Path(args.out), Path(args.config).stem, args.workers)
    return EXIT_OK


def cmd_figure(args) -> int:
    config = _resolve_seed(figure_scenario(args.id, args.scale), args.seed)
    _execute(config, Path(args.out), f"figure{args.id}", args.workers)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_suite(args.suite, workers=args.workers)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_FAILED


def cmd_print_config(args) -> int:
    sys.stdout.write(format_config(figure_scenario(1, "desk")))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellsim",
        description="Multicell downlink scheduling simulator and bound toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument(
            "--workers",
            type=int,
            default=max(1, os.cpu_count() or 1),
            help="worker processes (never affects results)",
        )

    run_p = sub.add_parser("run", help="run a scenario from a config file")
    run_p.add_argument("config", help="scenario config file")
    common(run_p)
    run_p.set_defaults(func=cmd_run)

    fig_p = sub.add_parser("figure", help="reproduce one figure's data file")
    fig_p.add_argument("id", type=int, choices=(1, 2, 3, 4))
    fig_p.add_argument("--scale", choices=("desk", "full"), default="desk")
    common(fig_p)
    fig_p.set_defaults(func=cmd_figure)

    val_p = sub.add_parser("validate", help="run a validation suite")
    val_p.add_argument("suite", choices=sorted(SUITES))
    val_p.add_argument(
        "--workers", type=int, default=max(1, os.cpu_count() or 1)
    )
    val_p.set_defaults(func=cmd_validate)

    print_p = sub.add_parser("print-config", help="print the default scenario")
    print_p.set_defaults(func=cmd_print_config)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # runtime failures get their own exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
