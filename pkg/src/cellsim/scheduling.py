"""Single-cell user selection rules and the rate functionals built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .channel import Drop

#: Interferer columns treated as cooperation partners by the cluster-free
#: upper bound (the two ring neighbours adjacent to the serving BS).
DEFAULT_CLUSTER = (0, 1)


class SchedulerKind(str, Enum):
    MAX_SINR = "max_sinr"
    MAX_GAIN = "max_gain"
    NO_INTERFERENCE = "no_interference"
    CLUSTER_FREE = "cluster_free"


#: Column order used by CSV output and reports.
CANONICAL_ORDER = (
    SchedulerKind.NO_INTERFERENCE,
    SchedulerKind.CLUSTER_FREE,
    SchedulerKind.MAX_SINR,
    SchedulerKind.MAX_GAIN,
)


@dataclass(frozen=True)
class SchedulerDecision:
    """Outcome of one selection: user index, its SINR, rate and the
    interference level the rate was computed against."""

    selected_index: int
    sinr: float
    rate_bpcu: float
    residual_beta: float


def sinr(snr: float, inr: float) -> float:
    """Instantaneous SINR of a link with unit noise: snr / (1 + inr)."""
    if snr < 0 or inr < 0:
        raise ValueError(f"snr and inr must be >= 0, got ({snr}, {inr})")
    return snr / (1.0 + inr)


def _decision(index: int, value: float, residual: float) -> SchedulerDecision:
    return SchedulerDecision(
        selected_index=int(index),
        sinr=float(value),
        rate_bpcu=math.log2(1.0 + float(value)),
        residual_beta=float(residual),
    )


def schedule(
    drop: Drop,
    kind: SchedulerKind,
    cluster: Sequence[int] = DEFAULT_CLUSTER,
) -> SchedulerDecision:
    """Select one user of the drop under the given rule.

    max_sinr maximizes snr/(1+inr); max_gain maximizes the direct gain and
    keeps its interference; no_interference maximizes the direct gain with
    interference zeroed; cluster_free maximizes snr over 1 + out-of-cluster
    interference only.  Ties break toward the lowest index.
    """
    if drop.n_users < 1:
        raise ValueError("cannot schedule an empty drop")
    kind = SchedulerKind(kind)
    if kind is SchedulerKind.MAX_SINR:
        values = drop.snr / (1.0 + drop.inr)
        k = int(np.argmax(values))
        return _decision(k, values[k], drop.inr[k])
    if kind is SchedulerKind.MAX_GAIN:
        k = int(np.argmax(drop.snr))
        return _decision(k, drop.snr[k] / (1.0 + drop.inr[k]), drop.inr[k])
    if kind is SchedulerKind.NO_INTERFERENCE:
        k = int(np.argmax(drop.snr))
        return _decision(k, drop.snr[k], 0.0)
    # cluster_free: only the cooperating cells' interference is removed
    outside = drop.inr_outside(cluster)
    values = drop.snr / (1.0 + outside)
    k = int(np.argmax(values))
    return _decision(k, values[k], outside[k])


def rate_gap(decision_up: SchedulerDecision, decision_sinr: SchedulerDecision) -> float:
    """Rate difference upper-bound minus scheduled; >= 0 on a common drop."""
    return decision_up.rate_bpcu - decision_sinr.rate_bpcu
