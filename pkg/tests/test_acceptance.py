"""Acceptance gate: every primary criterion at its pinned tolerance.

One test per criterion; each prints the machine-readable report line(s) of
the shared validation machinery and fails if any line fails.  Reference
curves are cached inside ``cellsim.validation``, so related criteria share
one simulation.  The figure-rendering criterion lives in the frontend
package's own test suite; nothing here touches it.
"""

import os

from cellsim import validation as v

WORKERS = max(1, min(4, os.cpu_count() or 1))


def report(results, budget_s=None):
    if not isinstance(results, list):
        results = [results]
    for res in results:
        print(res.line() + (f" [{res.runtime_s:.1f}s]" if res.runtime_s else ""))
    failed = [res for res in results if not res.passed]
    assert not failed, "\n" + "\n".join(res.line() for res in failed)
    if budget_s is not None:
        total = sum(res.runtime_s for res in results)
        assert total <= budget_s, f"runtime {total:.0f}s exceeds budget {budget_s}s"


def test_criterion_01_per_drop_rate_ordering():
    report(v.criterion_per_drop_ordering(WORKERS), budget_s=60)


def test_criterion_02_gumbel_limit():
    report(v.criterion_gumbel_limit(), budget_s=120)


def test_criterion_03_frechet_limit():
    report(v.criterion_frechet_limit(), budget_s=300)


def test_criterion_04_rate_gap_trend():
    report(
        [v.criterion_rate_gap_decreasing(WORKERS), v.criterion_rate_gap_fit(WORKERS)],
        budget_s=600,
    )


def test_criterion_05_vanishing_interference():
    report(v.criterion_interference_vanishing(WORKERS))


def test_criterion_06_asymmetric_positive_limits():
    report(v.criterion_positive_limits(WORKERS), budget_s=600)


def test_criterion_07_scheduler_rate_overlap():
    report(v.criterion_scheduler_overlap(WORKERS))


def test_criterion_08_jp_tracks_upper_bound():
    report(v.criterion_jp_tracks_bound(WORKERS))


def test_criterion_09_waterfilling_oracle():
    report(v.criterion_waterfilling_oracle())


def test_criterion_10_zf_correctness():
    report(v.criterion_zf_correctness())


def test_criterion_11_scaled_interferer_gains():
    report(v.criterion_scaled_gains_trend(WORKERS))


def test_criterion_12_worker_determinism():
    report(v.criterion_determinism())
