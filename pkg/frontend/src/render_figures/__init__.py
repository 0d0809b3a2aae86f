"""Render simulator sweep CSVs as static figures.

Reads the simulator's curve CSV contract (one row per user count n, per
scheduler ``<name>_mean_rate`` / ``<name>_rate_ci`` / ``<name>_mean_beta_norm``
/ ``<name>_beta_ci`` columns, optional ``jp_rate`` and analytic bound
columns) and draws the four reference views: mean rates (figures 1 and 3)
or normalized interference (figures 2 and 4) against n, with 95% CI bands
and dashed bound overlays.

Rendering is read-only and deterministic: the same CSV renders to
byte-identical image files, and every plotted value is a CSV cell.

Usage: render_figures <figure_id> <input_csv> <output_image> [--linear-x]
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

import numpy as np  # noqa: E402

__version__ = "0.1.0"

#: Fixed hash salt so SVG element ids do not change between runs.
SVG_HASH_SALT = "cellsim-figures"

RATE_SUFFIX = "_mean_rate"
BETA_SUFFIX = "_mean_beta_norm"

#: Bound overlays drawn per figure id (rate figures only; the bound columns
#: are empty outside the symmetric model and are then skipped with a warning).
DEFAULT_OVERLAYS = {
    1: ("lemma1_lo", "lemma1_hi", "lemma2_lo", "lemma2_hi"),
    2: (),
    3: ("lemma1_lo", "lemma1_hi", "lemma2_lo", "lemma2_hi"),
    4: (),
}

AXIS_LABELS = {
    "rate": "mean rate (bits/channel-use)",
    "beta": "selected-user interference / noise (linear)",
}


class RenderError(ValueError):
    """Input CSV does not satisfy the curve contract."""


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: which figure, from which CSV, to which file."""

    figure_id: int
    input_csv: Path
    output_image: Path
    log_x: bool = True
    overlays: tuple = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.figure_id not in (1, 2, 3, 4):
            raise RenderError(f"figure id must be 1..4, got {self.figure_id}")
        object.__setattr__(self, "input_csv", Path(self.input_csv))
        object.__setattr__(self, "output_image", Path(self.output_image))
        if self.overlays is None:
            object.__setattr__(self, "overlays", DEFAULT_OVERLAYS[self.figure_id])
        else:
            object.__setattr__(self, "overlays", tuple(self.overlays))

    @property
    def kind(self) -> str:
        return "rate" if self.figure_id in (1, 3) else "beta"


def load_curve(path: Path) -> dict[str, np.ndarray]:
    """Parse a curve CSV into named columns; empty cells become NaN."""
    path = Path(path)
    if not path.is_file():
        raise RenderError(f"input CSV not found: {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderError(f"{path}: empty file") from None
        rows = list(reader)
    if "n" not in header:
        raise RenderError(f"{path}: required column 'n' missing from header")
    if not rows:
        raise RenderError(f"{path}: no data rows")
    columns = {}
    for j, name in enumerate(header):
        cells = [row[j] if j < len(row) else "" for row in rows]
        columns[name] = np.array(
            [float(c) if c != "" else math.nan for c in cells], dtype=float
        )
    return columns


def _series_names(columns: dict, spec: FigureSpec) -> list[str]:
    suffix = RATE_SUFFIX if spec.kind == "rate" else BETA_SUFFIX
    names = [name for name in columns if name.endswith(suffix)]
    if spec.kind == "rate" and "jp_rate" in columns:
        names.append("jp_rate")
    return names


def _ci_column(name: str) -> str:
    if name == "jp_rate":
        return "jp_rate_ci"
    if name.endswith(RATE_SUFFIX):
        return name[: -len(RATE_SUFFIX)] + "_rate_ci"
    return name[: -len(BETA_SUFFIX)] + "_beta_ci"


def build_figure(spec: FigureSpec, columns: dict[str, np.ndarray]):
    """Assemble the matplotlib figure; every line's data is a CSV column."""
    series = _series_names(columns, spec)
    plotted = [s for s in series if not np.all(np.isnan(columns[s]))]
    for name in series:
        if name not in plotted:
            warnings.warn(f"column {name!r} is empty; series skipped", stacklevel=2)
    if not plotted:
        raise RenderError(
            f"no usable {spec.kind} series columns in {spec.input_csv}"
        )
    for name in spec.overlays:
        if name not in columns:
            raise RenderError(f"overlay column {name!r} missing from CSV header")

    n = columns["n"]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in plotted:
        y = columns[name]
        line = ax.plot(n, y, marker="o", markersize=3.5, label=name)[0]
        ci_name = _ci_column(name)
        if ci_name in columns and not np.all(np.isnan(columns[ci_name])):
            ci = columns[ci_name]
            ax.fill_between(n, y - ci, y + ci, alpha=0.18, color=line.get_color())
    for name in spec.overlays:
        y = columns[name]
        if np.all(np.isnan(y)):
            warnings.warn(f"overlay {name!r} has no values; skipped", stacklevel=2)
            continue
        ax.plot(n, y, linestyle="--", linewidth=1.0, color="black", label=name)

    if spec.log_x:
        ax.set_xscale("log", base=2)
    ax.set_xlabel("users per cell n")
    ax.set_ylabel(AXIS_LABELS[spec.kind])
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Render one figure to disk; returns the written path."""
    columns = load_curve(spec.input_csv)
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    fig = build_figure(spec, columns)
    spec.output_image.parent.mkdir(parents=True, exist_ok=True)
    # strip volatile metadata so repeated renders are byte-identical
    metadata = {"Date": None} if spec.output_image.suffix == ".svg" else None
    fig.savefig(spec.output_image, metadata=metadata)
    plt.close(fig)
    return spec.output_image


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figures", description="Render a simulator sweep CSV"
    )
    parser.add_argument("figure_id", type=int, choices=(1, 2, 3, 4))
    parser.add_argument("input_csv")
    parser.add_argument("output_image")
    parser.add_argument(
        "--linear-x", action="store_true", help="linear instead of log2 n axis"
    )
    args = parser.parse_args(argv)
    try:
        path = render(
            FigureSpec(
                figure_id=args.figure_id,
                input_csv=args.input_csv,
                output_image=args.output_image,
                log_x=not args.linear_x,
            )
        )
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
