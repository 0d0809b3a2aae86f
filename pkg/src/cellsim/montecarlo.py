"""Monte Carlo engine: grid sweeps, confidence intervals, verdicts, CSV.

One *trial* draws a drop of n candidate users, applies every enabled
scheduler to that same drop (common random numbers, which makes the
per-drop rate ordering exact and shrinks the variance of the rate gap),
and optionally evaluates the three-cell joint transmission.  Trials are
independent tasks keyed by ``(master_seed, n, trial)``; results are
assembled in trial order before any floating-point reduction, so output is
byte-identical for any worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .asymptotics import lemma1_bounds, lemma2_bounds, log_correction, theorem1_envelope
from .channel import (
    PAPER_HATA,
    NetworkGeometry,
    PathLossSpec,
    dbm_to_mw,
    drop_asymmetric,
    drop_symmetric,
    first_ring_geometry,
)
from .joint_processing import SingularChannelError, build_cluster_channel, jp_rate
from .rng import trial_stream
from .scheduling import CANONICAL_ORDER, SchedulerKind, schedule

#: Two-sided 95% normal quantile used for every confidence interval.
Z95 = 1.959963984540054

#: "Vanishing" level thresholds of the convergence verdict, per quantity.
VANISH_THRESHOLD = {"delta_r": 0.05, "beta": 0.1}

#: Relative size successive differences must fall below for a curve to
#: count as converged to its level.
FLATNESS_FRACTION = 0.05

_MAX_JP_REDRAWS = 100

#: Selection rule the cooperating BSs apply in their own cells.  Each BS
#: still decides alone from local CSI, but it ranks users by the SINR they
#: will see after the precoder removes in-cluster interference; ranking by
#: full-interference SINR would penalize users for interference the
#: precoder eliminates anyway.
JP_SELECTION = SchedulerKind.CLUSTER_FREE


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the field."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one experiment.

    The defaults reproduce the urban-macro reference scenario: 40 dBm per
    BS, -101 dBm noise, 2 km cells, 1 km user circle, hata(-114.5, -37.19)
    attenuation and a first ring of 6 interferers.
    """

    model: str
    n_grid: tuple
    trials_per_n: int
    p_dbm: float = 40.0
    noise_dbm: float = -101.0
    n_interferers: int = 6
    cell_radius_km: float = 2.0
    symmetric_radius_km: float = 1.0
    path_loss: PathLossSpec = PAPER_HATA
    schedulers: tuple = CANONICAL_ORDER
    jp_enabled: bool = False
    master_seed: int = 1
    interferer_gain_scale: Optional[tuple] = None

    def __post_init__(self):
        if self.model not in ("symmetric", "asymmetric"):
            raise ConfigError(f"model must be 'symmetric' or 'asymmetric', got {self.model!r}")
        grid = tuple(int(n) for n in self.n_grid)
        if len(grid) < 1:
            raise ConfigError("n_grid must not be empty")
        if grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"n_grid must be strictly increasing and >= 1, got {grid}")
        object.__setattr__(self, "n_grid", grid)
        if self.trials_per_n < 1:
            raise ConfigError(f"trials_per_n must be >= 1, got {self.trials_per_n}")
        if self.n_interferers < 1:
            raise ConfigError(f"n_interferers must be >= 1, got {self.n_interferers}")
        if self.cell_radius_km <= 0:
            raise ConfigError(f"cell_radius_km must be > 0, got {self.cell_radius_km}")
        if not 0 < self.symmetric_radius_km <= self.cell_radius_km:
            raise ConfigError(
                f"symmetric_radius_km must lie in (0, cell_radius_km], "
                f"got {self.symmetric_radius_km}"
            )
        if not isinstance(self.path_loss, PathLossSpec):
            raise ConfigError("path_loss must be a PathLossSpec")
        try:
            kinds = tuple(SchedulerKind(s) for s in self.schedulers)
        except ValueError as exc:
            raise ConfigError(f"schedulers: {exc}") from None
        if not kinds:
            raise ConfigError("schedulers must not be empty")
        # canonical order gives a stable CSV column layout
        object.__setattr__(
            self, "schedulers", tuple(k for k in CANONICAL_ORDER if k in kinds)
        )
        if self.jp_enabled and self.n_interferers < 2:
            raise ConfigError("jp_enabled requires n_interferers >= 2 (two partners)")
        if self.interferer_gain_scale is not None:
            scale = tuple(float(x) for x in self.interferer_gain_scale)
            if len(scale) != self.n_interferers:
                raise ConfigError(
                    f"interferer_gain_scale needs {self.n_interferers} entries, "
                    f"got {len(scale)}"
                )
            if any(x < 0 for x in scale):
                raise ConfigError("interferer_gain_scale entries must be >= 0")
            object.__setattr__(self, "interferer_gain_scale", scale)

    # -- derived helpers -------------------------------------------------

    def geometry(self) -> NetworkGeometry:
        return first_ring_geometry(
            self.cell_radius_km, self.n_interferers, self.symmetric_radius_km
        )

    def tx_over_noise(self) -> float:
        return dbm_to_mw(self.p_dbm) / dbm_to_mw(self.noise_dbm)

    def rho(self) -> float:
        """Direct-link mean SNR of the symmetric model (P * gain / noise)."""
        return self.tx_over_noise() * self.path_loss.gain(self.symmetric_radius_km)

    def to_dict(self) -> dict:
        if self.path_loss.variant == "hata":
            pl = {
                "variant": "hata",
                "offset_db": self.path_loss.offset_db,
                "slope_db": self.path_loss.slope_db,
            }
        else:
            pl = {
                "variant": "generic",
                "scale": self.path_loss.scale,
                "exponent": self.path_loss.exponent,
            }
        return {
            "model": self.model,
            "n_grid": list(self.n_grid),
            "trials_per_n": self.trials_per_n,
            "p_dbm": self.p_dbm,
            "noise_dbm": self.noise_dbm,
            "n_interferers": self.n_interferers,
            "cell_radius_km": self.cell_radius_km,
            "symmetric_radius_km": self.symmetric_radius_km,
            "path_loss": pl,
            "schedulers": [k.value for k in self.schedulers],
            "jp_enabled": self.jp_enabled,
            "master_seed": self.master_seed,
            "interferer_gain_scale": (
                None
                if self.interferer_gain_scale is None
                else list(self.interferer_gain_scale)
            ),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        pl = data.get("path_loss")
        if isinstance(pl, dict):
            if pl.get("variant") == "hata":
                data["path_loss"] = PathLossSpec.hata(pl["offset_db"], pl["slope_db"])
            elif pl.get("variant") == "generic":
                data["path_loss"] = PathLossSpec.generic(pl["scale"], pl["exponent"])
            else:
                raise ConfigError(f"path_loss variant unknown: {pl.get('variant')!r}")
        data["n_grid"] = tuple(data["n_grid"])
        data["schedulers"] = tuple(data.get("schedulers", [k.value for k in CANONICAL_ORDER]))
        if data.get("interferer_gain_scale") is not None:
            data["interferer_gain_scale"] = tuple(data["interferer_gain_scale"])
        return cls(**data)


@dataclass(frozen=True)
class CurvePoint:
    """Per-n sample statistics (means with 95% half-widths) plus overlays."""

    n: int
    mean_rate: dict
    rate_ci: dict
    mean_beta: dict
    beta_ci: dict
    delta_r: Optional[float]
    delta_r_ci: Optional[float]
    jp_rate: Optional[float]
    jp_rate_ci: Optional[float]
    lemma1: Optional[tuple]
    lemma2: Optional[tuple]
    theorem1: Optional[tuple]
    jp_redraws: int = 0


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Mechanical trend classification of one estimated curve."""

    quantity: str
    verdict: str
    limit_estimate: float
    limit_ci: float
    diagnostics: dict


def make_drop(config: ScenarioConfig, geometry: NetworkGeometry, n: int, stream):
    if config.model == "symmetric":
        return drop_symmetric(
            geometry,
            config.path_loss,
            config.p_dbm,
            config.noise_dbm,
            n,
            stream,
            interferer_gain_scale=config.interferer_gain_scale,
        )
    return drop_asymmetric(
        geometry,
        config.path_loss,
        config.p_dbm,
        config.noise_dbm,
        n,
        stream,
        interferer_gain_scale=config.interferer_gain_scale,
    )


def _simulate_trials(config: ScenarioConfig, n: int, start: int, stop: int) -> np.ndarray:
    """Raw per-trial values for trials [start, stop).

    Row layout: rate and selected-user interference per enabled scheduler,
    then the per-drop rate gap, the joint-processing rate and its redraw
    count (nan where not computed).
    """
    geometry = config.geometry()
    p_mw = dbm_to_mw(config.p_dbm)
    kinds = config.schedulers
    want_gap = (
        SchedulerKind.NO_INTERFERENCE in kinds and SchedulerKind.MAX_SINR in kinds
    )
    out = np.full((stop - start, 2 * len(kinds) + 3), np.nan)

    for row, trial in enumerate(range(start, stop)):
        root = trial_stream(config.master_seed, n, trial)
        drop = make_drop(config, geometry, n, root.child(0))
        decisions = {kind: schedule(drop, kind) for kind in kinds}
        for i, kind in enumerate(kinds):
            out[row, 2 * i] = decisions[kind].rate_bpcu
            out[row, 2 * i + 1] = decisions[kind].residual_beta
        if want_gap:
            out[row, -3] = (
                decisions[SchedulerKind.NO_INTERFERENCE].rate_bpcu
                - decisions[SchedulerKind.MAX_SINR].rate_bpcu
            )
        if config.jp_enabled:
            for attempt in range(_MAX_JP_REDRAWS + 1):
                drops = [
                    drop,
                    make_drop(config, geometry, n, root.child(1, attempt)),
                    make_drop(config, geometry, n, root.child(2, attempt)),
                ]
                picks = [schedule(d, JP_SELECTION).selected_index for d in drops]
                channel, beta_out = build_cluster_channel(
                    drops, picks, p_mw, root.child(3, attempt)
                )
                try:
                    out[row, -2] = jp_rate(channel, p_mw, beta_out)
                except SingularChannelError:
                    continue
                out[row, -1] = attempt
                break
            else:
                raise RuntimeError(
                    f"joint-processing channel stayed singular after "
                    f"{_MAX_JP_REDRAWS} redraws (n={n}, trial={trial})"
                )
    return out


def _simulate_star(args) -> np.ndarray:
    return _simulate_trials(*args)


def _mean_ci(values: np.ndarray) -> tuple[float, float]:
    m = float(np.mean(values))
    if values.size < 2:
        return m, 0.0
    return m, float(Z95 * np.std(values, ddof=1) / math.sqrt(values.size))


def run_point(
    config: ScenarioConfig,
    n: int,
    workers: int = 1,
    _executor: Optional[ProcessPoolExecutor] = None,
) -> CurvePoint:
    """One grid point: simulate all trials at user count n and reduce."""
    if n not in config.n_grid:
        raise ConfigError(f"n={n} is not on the configured grid {config.n_grid}")
    trials = config.trials_per_n
    if workers <= 1 or trials < 2 * workers:
        matrix = _simulate_trials(config, n, 0, trials)
    else:
        chunk = max(1, math.ceil(trials / (workers * 4)))
        jobs = [
            (config, n, lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)
        ]
        if _executor is None:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_simulate_star, jobs))
        else:
            parts = list(_executor.map(_simulate_star, jobs))
        # concatenation in submission (= trial) order keeps reductions
        # independent of the worker count
        matrix = np.vstack(parts)

    kinds = config.schedulers
    mean_rate, rate_ci, mean_beta, beta_ci = {}, {}, {}, {}
    for i, kind in enumerate(kinds):
        mean_rate[kind], rate_ci[kind] = _mean_ci(matrix[:, 2 * i])
        mean_beta[kind], beta_ci[kind] = _mean_ci(matrix[:, 2 * i + 1])

    delta = matrix[:, -3]
    delta_r = delta_r_ci = None
    if not np.all(np.isnan(delta)):
        delta_r, delta_r_ci = _mean_ci(delta)

    jp_col = matrix[:, -2]
    jp_mean = jp_ci = None
    redraws = 0
    if config.jp_enabled:
        jp_mean, jp_ci = _mean_ci(jp_col)
        redraws = int(np.nansum(matrix[:, -1]))

    lemma1 = lemma2 = theorem1 = None
    if config.model == "symmetric" and n >= 3:
        rho = config.rho()
        lemma1 = lemma1_bounds(n, rho)
        lemma2 = lemma2_bounds(n, rho, config.n_interferers)
        theorem1 = theorem1_envelope(n, config.n_interferers)

    return CurvePoint(
        n=n,
        mean_rate=mean_rate,
        rate_ci=rate_ci,
        mean_beta=mean_beta,
        beta_ci=beta_ci,
        delta_r=delta_r,
        delta_r_ci=delta_r_ci,
        jp_rate=jp_mean,
        jp_rate_ci=jp_ci,
        lemma1=lemma1,
        lemma2=lemma2,
        theorem1=theorem1,
        jp_redraws=redraws,
    )


def run_scenario(
    config: ScenarioConfig,
    workers: int = 1,
    progress: Optional[Callable[[CurvePoint], None]] = None,
) -> list[CurvePoint]:
    """Sweep the full n grid; output depends only on the config itself."""
    points = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for n in config.n_grid:
                point = run_point(config, n, workers=workers, _executor=pool)
                points.append(point)
                if progress is not None:
                    progress(point)
    else:
        for n in config.n_grid:
            point = run_point(config, n, workers=1)
            points.append(point)
            if progress is not None:
                progress(point)
    return points


# -- convergence diagnostics ----------------------------------------------


def extract_series(points: Sequence[CurvePoint], quantity: str):
    """Pull (n, value, ci) arrays for a named quantity out of a curve.

    Quantity names: ``delta_r``, ``jp_rate``, ``beta:<scheduler>`` or
    ``rate:<scheduler>``.
    """
    ns, ys, cis = [], [], []
    for pt in points:
        if quantity == "delta_r":
            y, ci = pt.delta_r, pt.delta_r_ci
        elif quantity == "jp_rate":
            y, ci = pt.jp_rate, pt.jp_rate_ci
        elif quantity.startswith("beta:"):
            kind = SchedulerKind(quantity.split(":", 1)[1])
            y, ci = pt.mean_beta.get(kind), pt.beta_ci.get(kind)
        elif quantity.startswith("rate:"):
            kind = SchedulerKind(quantity.split(":", 1)[1])
            y, ci = pt.mean_rate.get(kind), pt.rate_ci.get(kind)
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
        if y is not None:
            ns.append(pt.n)
            ys.append(y)
            cis.append(ci)
    return np.asarray(ns, dtype=float), np.asarray(ys), np.asarray(cis)


def _ols_against_correction(ns: np.ndarray, ys: np.ndarray):
    """OLS of y on the bound decay scale c(n); positive slope = decreasing."""
    x = np.array([log_correction(n) for n in ns])
    design = np.column_stack([np.ones_like(x), x])
    coef, residuals, *_ = np.linalg.lstsq(design, ys, rcond=None)
    fitted = design @ coef
    dof = max(len(ys) - 2, 1)
    sigma2 = float(np.sum((ys - fitted) ** 2)) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return coef[0], coef[1], math.sqrt(max(cov[0, 0], 0.0)), math.sqrt(max(cov[1, 1], 0.0))


def convergence_verdict(points: Sequence[CurvePoint], quantity: str) -> ConvergenceVerdict:
    """Classify a curve as vanishing, positive-limit or inconclusive.

    Decision procedure (mechanical, in order):

    1. ``vanishing`` - the final level is below the quantity's threshold,
       the trend fitted against c(n) = log2(log n)/log n is non-increasing
       in n, and the extrapolated limit's 95% CI contains zero.
    2. ``positive-limit`` - the last two successive differences are below
       5% of the final level, differences are not growing, the final
       level's 95% CI excludes zero, and the curve has not halved over the
       observed window (a curve that already halved is still traveling,
       not converged).
    3. ``inconclusive-decreasing`` / ``inconclusive`` otherwise, split on
       whether the fitted trend decreases.
    """
    ns, ys, cis = extract_series(points, quantity)
    if len(ns) < 4:
        raise ValueError(f"need >= 4 grid points for a verdict, got {len(ns)}")
    if ns[-1] / ns[0] < 100:
        raise ValueError("grid must span at least two decades of n")

    intercept, slope, intercept_se, slope_se = _ols_against_correction(ns, ys)
    decreasing = slope >= -1e-12 and ys[-1] <= ys[0] + 1e-12
    limit_ci = Z95 * intercept_se
    limit_contains_zero = abs(intercept) <= limit_ci + 1e-12

    level = float(ys[-1])
    level_ci = float(cis[-1])
    diffs = np.abs(np.diff(ys))
    rel_tail = diffs[-2:] / max(abs(level), 1e-300)
    flat_tail = bool(np.all(rel_tail < FLATNESS_FRACTION))
    diffs_shrinking = diffs[-1] <= diffs[0] + 1e-12
    decay_ratio = float(ys[0] / level) if level > 0 else math.inf

    threshold = VANISH_THRESHOLD.get(quantity.split(":", 1)[0], 0.05)
    diagnostics = {
        "slope": slope,
        "slope_se": slope_se,
        "intercept": intercept,
        "intercept_se": intercept_se,
        "last": level,
        "last_ci": level_ci,
        "tail_rel_diffs": rel_tail.tolist(),
        "decay_ratio": decay_ratio,
        "threshold": threshold,
    }

    if level < threshold and decreasing and limit_contains_zero:
        verdict = "vanishing"
        estimate, est_ci = intercept, limit_ci
    elif flat_tail and diffs_shrinking and level - level_ci > 0 and decay_ratio < 2.0:
        verdict = "positive-limit"
        estimate, est_ci = level, level_ci
    elif decreasing and ys[-1] < ys[0]:
        verdict = "inconclusive-decreasing"
        estimate, est_ci = level, level_ci
    else:
        verdict = "inconclusive"
        estimate, est_ci = level, level_ci
    return ConvergenceVerdict(
        quantity=quantity,
        verdict=verdict,
        limit_estimate=float(estimate),
        limit_ci=float(est_ci),
        diagnostics=diagnostics,
    )


def empirical_cdf_distance(samples, reference_cdf) -> float:
    """Kolmogorov-Smirnov sup-distance between samples and a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise ValueError("no samples given")
    if xs.size < 1000:
        raise ValueError(f"need >= 1000 samples for a stable distance, got {xs.size}")
    try:
        ref = np.asarray(reference_cdf(xs), dtype=float)
        if ref.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        ref = np.array([reference_cdf(x) for x in xs])
    steps = np.arange(1, xs.size + 1) / xs.size
    return float(max(np.max(steps - ref), np.max(ref - (steps - 1.0 / xs.size))))


# -- CSV output -------------------------------------------------------------

_BOUND_COLUMNS = ("lemma1_lo", "lemma1_hi", "lemma2_lo", "lemma2_hi", "thm1_lo", "thm1_hi")


def csv_header(config: ScenarioConfig) -> list[str]:
    cols = ["n"]
    for kind in config.schedulers:
        cols += [
            f"{kind.value}_mean_rate",
            f"{kind.value}_rate_ci",
            f"{kind.value}_mean_beta_norm",
            f"{kind.value}_beta_ci",
        ]
    cols += ["delta_R", "delta_R_ci", "jp_rate", "jp_rate_ci", *_BOUND_COLUMNS]
    return cols


def _fmt(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.9g}"


def csv_rows(points: Sequence[CurvePoint], config: ScenarioConfig) -> list[list[str]]:
    rows = []
    for pt in points:
        row = [str(pt.n)]
        for kind in config.schedulers:
            row += [
                _fmt(pt.mean_rate.get(kind)),
                _fmt(pt.rate_ci.get(kind)),
                _fmt(pt.mean_beta.get(kind)),
                _fmt(pt.beta_ci.get(kind)),
            ]
        row += [_fmt(pt.delta_r), _fmt(pt.delta_r_ci), _fmt(pt.jp_rate), _fmt(pt.jp_rate_ci)]
        for bounds in (pt.lemma1, pt.lemma2, pt.theorem1):
            row += ["", ""] if bounds is None else [_fmt(bounds[0]), _fmt(bounds[1])]
        rows.append(row)
    return rows


def write_curve_csv(path, points: Sequence[CurvePoint], config: ScenarioConfig) -> Path:
    """Write one scenario's curve plus a metadata sidecar; returns the path."""
    path = Path(path)
    lines = [",".join(csv_header(config))]
    lines += [",".join(row) for row in csv_rows(points, config)]
    path.write_text("\n".join(lines) + "\n")
    sidecar = path.with_suffix(".meta.json")
    sidecar.write_text(
        json.dumps(
            {"artifact": "cellsim", "version": __version__, "config": config.to_dict()},
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return path
