"""Executable validation suites: analytic claims checked against simulation.

Each criterion function measures one quantitative claim at its pinned
tolerance and returns a :class:`CriterionResult`; the CLI ``validate``
command and the acceptance test suite both consume these.  Reference
curves shared between criteria are cached per process.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .asymptotics import frechet_cdf, frechet_scale, gumbel_cdf_approx, log_correction
from .channel import PathLossSpec, drop_asymmetric, first_ring_geometry
from .joint_processing import (
    ClusterChannel,
    per_bs_normalize,
    waterfilling,
    zf_precoder,
)
from .montecarlo import (
    ScenarioConfig,
    _simulate_star,
    convergence_verdict,
    empirical_cdf_distance,
    extract_series,
    run_scenario,
    write_curve_csv,
)
from .rng import RngStream
from .scheduling import CANONICAL_ORDER, SchedulerKind

VALIDATION_SEED = 185

DESK_GRID = tuple(2**k for k in range(4, 15))
TREND_GRID = tuple(2**k for k in range(6, 15))
TREND_TRIALS = 20_000
JP_TRIALS = 1_500

RATE_SCHEDULERS = (
    SchedulerKind.NO_INTERFERENCE,
    SchedulerKind.MAX_SINR,
    SchedulerKind.MAX_GAIN,
)


@dataclass(frozen=True)
class CriterionResult:
    name: str
    measured: float
    threshold: float
    comparison: str  # how measured relates to threshold when passing
    passed: bool
    detail: str = ""
    runtime_s: float = 0.0
    threshold_low: Optional[float] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.threshold_low is not None:
            requirement = f"in [{self.threshold_low:g}, {self.threshold:g}]"
        else:
            requirement = f"{self.comparison} {self.threshold:g}"
        out = (
            f"{self.name:<34s} measured={self.measured:<12.6g} "
            f"required {requirement:<16s} {status}"
        )
        if self.detail:
            out += f"  ({self.detail})"
        return out


def _result(
    name, measured, threshold, comparison, passed, detail="", started=None, low=None
):
    runtime = 0.0 if started is None else time.time() - started
    return CriterionResult(
        name=name,
        measured=float(measured),
        threshold=float(threshold),
        comparison=comparison,
        passed=bool(passed),
        detail=detail,
        runtime_s=runtime,
        threshold_low=None if low is None else float(low),
    )


# -- shared reference curves -------------------------------------------------

_CACHE: dict = {}


def _cached(key, builder):
    if key not in _CACHE:
        _CACHE[key] = builder()
    return _CACHE[key]


def reference_curve(model: str, workers: int = 1):
    """Paper-default scenario over the trend grid, 2e4 trials per point."""

    def build():
        cfg = ScenarioConfig(
            model=model,
            n_grid=TREND_GRID,
            trials_per_n=TREND_TRIALS,
            schedulers=RATE_SCHEDULERS,
            master_seed=VALIDATION_SEED,
        )
        return cfg, run_scenario(cfg, workers=workers)

    return _cached(("reference", model), build)


def scaled_gain_curve(workers: int = 1):
    """Symmetric scenario with interferer gains scaled by fixed random
    factors in [0.25, 4]."""

    def build():
        factors = tuple(np.random.default_rng(VALIDATION_SEED).uniform(0.25, 4.0, 6))
        cfg = ScenarioConfig(
            model="symmetric",
            n_grid=TREND_GRID,
            trials_per_n=TREND_TRIALS,
            schedulers=RATE_SCHEDULERS,
            interferer_gain_scale=factors,
            master_seed=VALIDATION_SEED + 1,
        )
        return cfg, run_scenario(cfg, workers=workers)

    return _cached(("scaled",), build)


def jp_curve(model: str, workers: int = 1):
    """Joint-processing sweep over the full desk grid."""

    def build():
        cfg = ScenarioConfig(
            model=model,
            n_grid=DESK_GRID,
            trials_per_n=JP_TRIALS,
            schedulers=(SchedulerKind.CLUSTER_FREE, SchedulerKind.MAX_SINR),
            jp_enabled=True,
            master_seed=VALIDATION_SEED + 2,
        )
        return cfg, run_scenario(cfg, workers=workers)

    return _cached(("jp", model), build)


def _decrease_violation(ys, cis) -> float:
    """Largest violation of 'strictly decreasing up to CI slack' (<0 passes)."""
    worst = -math.inf
    for i in range(len(ys) - 1):
        worst = max(worst, ys[i + 1] - ys[i] + 0.0 - (cis[i] + cis[i + 1]))
    return worst


# -- criteria ------------------------------------------------------------------


def criterion_per_drop_ordering(workers: int = 1) -> CriterionResult:
    """1. rate(no_interference) >= rate(max_sinr) >= rate(max_gain), per drop."""
    started = time.time()
    violations = 0
    drops = 0
    for model in ("symmetric", "asymmetric"):
        cfg = ScenarioConfig(
            model=model,
            n_grid=(64,),
            trials_per_n=100_000,
            schedulers=CANONICAL_ORDER,
            master_seed=VALIDATION_SEED + 3,
        )
        matrix = _simulate_star((cfg, 64, 0, cfg.trials_per_n))
        r_up, r_cf, r_ms, r_mg = (matrix[:, 2 * i] for i in range(4))
        bad = (r_up < r_cf) | (r_cf < r_ms) | (r_ms < r_mg)
        violations += int(bad.sum())
        drops += matrix.shape[0]
    return _result(
        "per_drop_rate_ordering",
        violations,
        0,
        "==",
        violations == 0,
        detail=f"{drops} drops across both models",
        started=started,
    )


def criterion_gumbel_limit() -> CriterionResult:
    """2. centered maxima of n=1000 exponentials vs the double-exponential CDF."""
    started = time.time()
    n, trials = 1000, 100_000
    chunks = []
    for i in range(20):
        gen = RngStream(VALIDATION_SEED + 4, i).generator()
        block = gen.standard_exponential((trials // 20, n))
        chunks.append(block.max(axis=1))
    samples = np.concatenate(chunks) - math.log(n)
    dist = empirical_cdf_distance(samples, gumbel_cdf_approx)
    return _result(
        "gumbel_limit_ks",
        dist,
        0.01,
        "<=",
        dist <= 0.01,
        detail=f"{trials} maxima of n={n}",
        started=started,
    )


def criterion_frechet_limit() -> CriterionResult:
    """3. rescaled uniform-disc maxima vs the heavy-tail limit CDF."""
    started = time.time()
    n, trials, eps = 4096, 10_000, 4.0
    geometry = first_ring_geometry(1.0, 1, symmetric_radius_km=0.5)
    spec = PathLossSpec.generic(1.0, eps)
    maxima = np.empty(trials)
    for t in range(trials):
        drop = drop_asymmetric(
            geometry,
            spec,
            0.0,
            0.0,
            n,
            RngStream(VALIDATION_SEED + 5, t),
            interferer_gain_scale=(0.0,),
        )
        maxima[t] = drop.snr.max()
    samples = maxima / frechet_scale(n, 1.0, eps)
    dist = empirical_cdf_distance(samples, lambda t: frechet_cdf(t, eps))
    return _result(
        "frechet_limit_ks",
        dist,
        0.03,
        "<=",
        dist <= 0.03,
        detail=f"{trials} maxima of n={n}, eps={eps}",
        started=started,
    )


def criterion_rate_gap_decreasing(workers: int = 1) -> CriterionResult:
    """4a. the mean rate gap falls strictly across the grid, up to CI slack."""
    started = time.time()
    _, points = reference_curve("symmetric", workers)
    ns, ys, cis = extract_series(points, "delta_r")
    worst = _decrease_violation(ys, cis)
    return _result(
        "rate_gap_strictly_decreasing",
        worst,
        0.0,
        "<",
        worst < 0.0,
        detail=f"gap {ys[0]:.3f} -> {ys[-1]:.3f} bits over n={int(ns[0])}..{int(ns[-1])}",
        started=started,
    )


def criterion_rate_gap_fit(workers: int = 1) -> CriterionResult:
    """4b. through-origin fit of the gap against log2(log n)/log n."""
    started = time.time()
    cfg, points = reference_curve("symmetric", workers)
    ns, ys, _ = extract_series(points, "delta_r")
    c = np.array([log_correction(n) for n in ns])
    coefficient = float(np.dot(ys, c) / np.dot(c, c))
    n_int = cfg.n_interferers
    lo, hi = 0.5 * (n_int - 2), 1.5 * (n_int + 2)
    ok = lo <= coefficient <= hi
    return _result(
        "rate_gap_fit_coefficient",
        coefficient,
        hi,
        "in",
        ok,
        detail=f"envelope [N-2, N+2] widened 50%, N={n_int}",
        started=started,
        low=lo,
    )


def criterion_interference_vanishing(workers: int = 1) -> list[CriterionResult]:
    """5. symmetric residual interference: falling, halved, right verdict."""
    started = time.time()
    _, points = reference_curve("symmetric", workers)
    ns, ys, cis = extract_series(points, "beta:max_sinr")
    worst = _decrease_violation(ys, cis)
    ratio = ys[0] / ys[-1]
    verdict = convergence_verdict(points, "beta:max_sinr").verdict
    ok_verdict = verdict in ("vanishing", "inconclusive-decreasing")
    return [
        _result(
            "interference_monotone_decreasing",
            worst,
            0.0,
            "<",
            worst < 0.0,
            started=started,
        ),
        _result(
            "interference_halved_over_grid",
            ratio,
            2.0,
            ">=",
            ratio >= 2.0,
            detail=f"beta*/noise {ys[0]:.3f} -> {ys[-1]:.3f}",
        ),
        _result(
            "interference_verdict_not_limit",
            1.0 if ok_verdict else 0.0,
            1.0,
            "==",
            ok_verdict,
            detail=f"verdict: {verdict}",
        ),
    ]


def criterion_positive_limits(workers: int = 1) -> list[CriterionResult]:
    """6. asymmetric interference and rate gap settle at positive levels."""
    started = time.time()
    _, points = reference_curve("asymmetric", workers)
    _, ys, cis = extract_series(points, "beta:max_sinr")
    rel_step = abs(ys[-1] - ys[-2]) / ys[-1]
    excludes_zero = ys[-1] - cis[-1] > 0
    beta_verdict = convergence_verdict(points, "beta:max_sinr").verdict
    gap_verdict = convergence_verdict(points, "delta_r").verdict
    return [
        _result(
            "asym_interference_flattens",
            rel_step,
            0.05,
            "<",
            rel_step < 0.05 and excludes_zero,
            detail=f"level {ys[-1]:.3f}, ci {cis[-1]:.3f}",
            started=started,
        ),
        _result(
            "asym_interference_verdict",
            1.0 if beta_verdict == "positive-limit" else 0.0,
            1.0,
            "==",
            beta_verdict == "positive-limit",
            detail=f"verdict: {beta_verdict}",
        ),
        _result(
            "asym_rate_gap_verdict",
            1.0 if gap_verdict == "positive-limit" else 0.0,
            1.0,
            "==",
            gap_verdict == "positive-limit",
            detail=f"verdict: {gap_verdict}",
        ),
    ]


def criterion_scheduler_overlap(workers: int = 1) -> CriterionResult:
    """7. asymmetric: max-gain rate tracks max-sinr rate within 3%."""
    started = time.time()
    _, points = reference_curve("asymmetric", workers)
    worst = 0.0
    for pt in points:
        if pt.n < 256:
            continue
        ms = pt.mean_rate[SchedulerKind.MAX_SINR]
        mg = pt.mean_rate[SchedulerKind.MAX_GAIN]
        worst = max(worst, abs(ms - mg) / ms)
    return _result(
        "asym_scheduler_rate_overlap",
        worst,
        0.03,
        "<=",
        worst <= 0.03,
        detail="max relative gap over n >= 256",
        started=started,
    )


def criterion_jp_tracks_bound(workers: int = 1) -> CriterionResult:
    """8. joint processing performs as the cluster-free upper bound (5%)."""
    started = time.time()
    worst = 0.0
    worst_at = ""
    for model in ("symmetric", "asymmetric"):
        _, points = jp_curve(model, workers)
        for pt in points:
            bound = pt.mean_rate[SchedulerKind.CLUSTER_FREE]
            rel = abs(pt.jp_rate - bound) / bound
            if rel > worst:
                worst, worst_at = rel, f"{model} n={pt.n}"
    return _result(
        "jp_tracks_upper_bound",
        worst,
        0.05,
        "<=",
        worst <= 0.05,
        detail=f"worst at {worst_at}",
        started=started,
    )


def waterfilling_grid_oracle(gains, total_power, step=1e-3):
    """Independent optimum finder: exhaustive search on the power simplex."""
    fractions = np.arange(0.0, 1.0 + step / 2.0, step)
    f1, f2 = np.meshgrid(fractions, fractions, indexing="ij")
    keep = f1 + f2 <= 1.0 + step / 2.0
    f1, f2 = f1[keep], f2[keep]
    f3 = np.clip(1.0 - f1 - f2, 0.0, None)
    # compare products instead of log sums: same argmax, one log at the end
    products = (
        (1.0 + gains[0] * total_power * f1)
        * (1.0 + gains[1] * total_power * f2)
        * (1.0 + gains[2] * total_power * f3)
    )
    return float(np.log2(products.max()))


def criterion_waterfilling_oracle() -> CriterionResult:
    """9. waterfilling never loses to the simplex grid search."""
    started = time.time()
    rng = np.random.default_rng(VALIDATION_SEED + 6)
    shortfall = -math.inf
    budget_error = 0.0
    for _ in range(1000):
        gains = rng.uniform(0.02, 5.0, 3)
        total = rng.uniform(0.5, 8.0)
        alloc = waterfilling(gains, total)
        rate = float(np.sum(np.log2(1.0 + gains * alloc.per_stream)))
        oracle = waterfilling_grid_oracle(gains, total)
        shortfall = max(shortfall, oracle - rate)
        budget_error = max(budget_error, abs(alloc.per_stream.sum() - total) / total)
    passed = shortfall <= 1e-4 and budget_error <= 1e-12
    return _result(
        "waterfilling_vs_grid_oracle",
        shortfall,
        1e-4,
        "<=",
        passed,
        detail=f"1000 instances, budget error {budget_error:.2e}",
        started=started,
    )


def criterion_zf_correctness() -> CriterionResult:
    """10. residual cross-talk and per-BS powers of the scaled precoder."""
    started = time.time()
    rng = np.random.default_rng(VALIDATION_SEED + 7)
    worst_residual = 0.0
    worst_power = 0.0
    worst_slack = 0.0
    tested = 0
    while tested < 10_000:
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        if np.linalg.cond(h) > 1e4:
            continue
        tested += 1
        channel = ClusterChannel(h=h)
        w = zf_precoder(channel)
        hw = channel.h @ w
        diag = np.abs(np.diag(hw))
        off = np.abs(hw - np.diag(np.diag(hw))).max()
        worst_residual = max(worst_residual, off / diag.max())
        budget = float(rng.uniform(0.5, 4.0))
        alloc = waterfilling(diag**2, 3.0 * budget)
        scaled = per_bs_normalize(w, alloc, budget)
        powers = (np.abs(scaled) ** 2) @ alloc.per_stream
        worst_power = max(worst_power, (powers.max() - budget) / budget)
        worst_slack = max(worst_slack, abs(powers.max() - budget) / budget)
    passed = worst_residual <= 1e-10 and worst_power <= 1e-12 and worst_slack <= 1e-12
    return _result(
        "zf_residual_and_power",
        worst_residual,
        1e-10,
        "<=",
        passed,
        detail=f"10^4 channels, power overshoot {worst_power:.2e}",
        started=started,
    )


def criterion_scaled_gains_trend(workers: int = 1) -> CriterionResult:
    """11. the falling gap survives per-interferer gain scaling in [0.25, 4]."""
    started = time.time()
    _, points = scaled_gain_curve(workers)
    _, ys, cis = extract_series(points, "delta_r")
    worst = _decrease_violation(ys, cis)
    return _result(
        "scaled_gains_gap_decreasing",
        worst,
        0.0,
        "<",
        worst < 0.0,
        detail=f"gap {ys[0]:.3f} -> {ys[-1]:.3f} bits",
        started=started,
    )


def criterion_determinism(tmp_dir=None) -> CriterionResult:
    """12. one worker and eight workers emit byte-identical CSV."""
    import tempfile
    from pathlib import Path

    started = time.time()
    cfg = ScenarioConfig(
        model="symmetric",
        n_grid=(16, 32),
        trials_per_n=200,
        jp_enabled=True,
        master_seed=VALIDATION_SEED + 8,
    )
    with tempfile.TemporaryDirectory(dir=tmp_dir) as tmp:
        a, b = Path(tmp) / "w1.csv", Path(tmp) / "w8.csv"
        write_curve_csv(a, run_scenario(cfg, workers=1), cfg)
        write_curve_csv(b, run_scenario(cfg, workers=8), cfg)
        identical = a.read_bytes() == b.read_bytes()
    return _result(
        "worker_count_determinism",
        0.0 if identical else 1.0,
        0.0,
        "==",
        identical,
        detail="1 vs 8 workers, byte compare",
        started=started,
    )


# -- suites ---------------------------------------------------------------------


def _flat(*items):
    out = []
    for item in items:
        out.extend(item if isinstance(item, list) else [item])
    return out


SUITES: dict[str, Callable[[int], list[CriterionResult]]] = {
    "evt-cdf": lambda workers: _flat(
        criterion_gumbel_limit(),
        criterion_frechet_limit(),
    ),
    "symmetric-bounds": lambda workers: _flat(
        criterion_per_drop_ordering(workers),
        criterion_rate_gap_decreasing(workers),
        criterion_rate_gap_fit(workers),
        criterion_interference_vanishing(workers),
        criterion_scaled_gains_trend(workers),
        criterion_determinism(),
    ),
    "asymmetric-limits": lambda workers: _flat(
        criterion_positive_limits(workers),
        criterion_scheduler_overlap(workers),
    ),
    "jp-sanity": lambda workers: _flat(
        criterion_waterfilling_oracle(),
        criterion_zf_correctness(),
        criterion_jp_tracks_bound(workers),
    ),
}


def run_suite(
    name: str, workers: int = 1, emit: Optional[Callable[[str], None]] = print
) -> list[CriterionResult]:
    """Run one named suite, emitting one report line per criterion."""
    if name not in SUITES:
        raise KeyError(f"unknown validation suite {name!r}; have {sorted(SUITES)}")
    results = SUITES[name](workers)
    if emit is not None:
        for res in results:
            emit(res.line())
    return results
