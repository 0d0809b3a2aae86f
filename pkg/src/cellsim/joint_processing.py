"""Three-cell joint transmission: zero-forcing, waterfilling, power scaling.

The cooperating base stations jointly invert the 3x3 channel toward the
three users selected in their cells, waterfill the resulting decoupled
streams, and scale the precoder so every BS respects its own transmit
power budget.  Interference from outside the cooperating cluster stays as
extra per-user noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import Drop
from .rng import RngStream
from .scheduling import DEFAULT_CLUSTER

#: Condition number above which a cluster channel is declared singular.
CONDITION_LIMIT = 1e8


class SingularChannelError(ValueError):
    """Cluster channel too ill-conditioned to invert; re-draw the trial."""


@dataclass(frozen=True)
class ClusterChannel:
    """3x3 complex gains, entry (u, b) = BS b to selected user u.

    Amplitudes carry path loss and fading normalized by noise, so
    ``|h[u, b]|**2 * power`` is a received power over noise.
    """

    h: np.ndarray
    noise: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        object.__setattr__(self, "h", h)
        if h.shape != (3, 3):
            raise ValueError(f"cluster channel must be 3x3, got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("cluster channel contains non-finite entries")


@dataclass(frozen=True)
class PowerAllocation:
    """Per-stream powers plus the water level they share."""

    per_stream: np.ndarray
    water_level: float


def zf_precoder(channel: ClusterChannel, condition_limit: float = CONDITION_LIMIT) -> np.ndarray:
    """Unit-column scaled inverse of the channel.

    Returns W with columns of H^-1 normalized to unit norm, so H @ W is
    diagonal with real nonnegative entries and column u's transmit power
    equals the power allocated to stream u.
    """
    h = channel.h
    if np.linalg.cond(h) > condition_limit:
        raise SingularChannelError(
            f"cluster channel condition number exceeds {condition_limit:g}"
        )
    inverse = np.linalg.inv(h)
    norms = np.linalg.norm(inverse, axis=0)
    if np.any(norms == 0.0):
        raise SingularChannelError("zero column in inverted cluster channel")
    return inverse / norms


def effective_diagonal(channel: ClusterChannel, precoder: np.ndarray) -> np.ndarray:
    """Real diagonal of H @ W (the decoupled per-stream amplitudes)."""
    return np.maximum(np.real(np.diag(channel.h @ precoder)), 0.0)


def waterfilling(effective_gains, total_power: float) -> PowerAllocation:
    """Split a power budget over parallel streams to maximize the sum rate.

    Maximizes sum(log2(1 + g_i p_i)) subject to sum(p_i) = total_power and
    p_i >= 0; streams whose inverse gain reaches the water level get
    exactly zero.
    """
    gains = np.asarray(effective_gains, dtype=float)
    if gains.ndim != 1 or gains.size < 1:
        raise ValueError("need a 1-D list of stream gains")
    if np.any(gains < 0):
        raise ValueError("stream gains must be >= 0")
    if not np.any(gains > 0):
        raise ValueError("waterfilling needs at least one positive gain")
    if total_power <= 0:
        raise ValueError(f"total power must be > 0, got {total_power}")

    order = np.argsort(-gains)
    sorted_gains = gains[order]
    positive = sorted_gains > 0
    inv = np.empty_like(sorted_gains)
    inv[positive] = 1.0 / sorted_gains[positive]
    inv[~positive] = np.inf

    # Largest active set whose common water level keeps every stream >= 0.
    n_active = int(positive.sum())
    while n_active > 1:
        level = (total_power + inv[:n_active].sum()) / n_active
        if level >= inv[n_active - 1]:
            break
        n_active -= 1
    level = (total_power + inv[:n_active].sum()) / n_active

    allocation = np.zeros_like(sorted_gains)
    allocation[:n_active] = level - inv[:n_active]
    per_stream = np.zeros_like(gains)
    per_stream[order] = allocation
    return PowerAllocation(per_stream=per_stream, water_level=float(level))


def per_bs_normalize(
    precoder: np.ndarray, allocation: PowerAllocation, per_bs_power: float
) -> np.ndarray:
    """Scale the precoder so no BS exceeds its budget and one is exactly at it.

    BS b transmits sum_u p_u |W[b, u]|^2; a single common scalar keeps the
    effective channel diagonal.
    """
    if per_bs_power <= 0:
        raise ValueError(f"per-BS power must be > 0, got {per_bs_power}")
    bs_powers = (np.abs(precoder) ** 2) @ allocation.per_stream
    peak = float(np.max(bs_powers))
    if peak <= 0.0:
        raise ValueError("cannot normalize a zero precoder/allocation")
    return precoder * math.sqrt(per_bs_power / peak)


def jp_rate(channel: ClusterChannel, per_bs_power: float, out_of_cluster_beta) -> float:
    """Mean per-user rate of the cooperating cluster.

    Chain: invert the channel, waterfill the decoupled streams under the
    cluster-wide budget 3 P, rescale for the per-BS constraints, then rate
    each user against its remaining out-of-cluster interference.
    """
    beta_out = np.asarray(out_of_cluster_beta, dtype=float)
    if beta_out.shape != (3,):
        raise ValueError(f"need 3 out-of-cluster interference values, got {beta_out.shape}")
    if np.any(beta_out < 0):
        raise ValueError("out-of-cluster interference must be >= 0")

    precoder = zf_precoder(channel)
    diag = effective_diagonal(channel, precoder)
    allocation = waterfilling(diag**2 / (1.0 + beta_out), 3.0 * per_bs_power)
    scaled = per_bs_normalize(precoder, allocation, per_bs_power)
    scaled_diag = effective_diagonal(channel, scaled)
    stream_sinr = scaled_diag**2 * allocation.per_stream / (1.0 + beta_out)
    return float(np.mean(np.log2(1.0 + stream_sinr)))


def build_cluster_channel(
    drops: Sequence[Drop],
    selections: Sequence[int],
    p_mw: float,
    stream: RngStream,
    cluster: Sequence[int] = DEFAULT_CLUSTER,
) -> tuple[ClusterChannel, np.ndarray]:
    """Assemble the 3x3 channel for users selected in three cooperating cells.

    Each cell's drop supplies its user's direct gain (diagonal) and the
    gains from the two partner BSs (off-diagonal, taken from the in-cluster
    interferer columns).  Gains are converted to per-unit-power amplitudes
    and given independent uniform phases.  Also returns each user's
    out-of-cluster interference.
    """
    if len(drops) != 3 or len(selections) != 3:
        raise ValueError("joint processing expects exactly 3 cells")
    cluster = tuple(cluster)
    rng = stream.generator()
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, (3, 3)))

    gains = np.empty((3, 3))
    beta_out = np.empty(3)
    for u, (drop, k) in enumerate(zip(drops, selections)):
        partners = [b for b in range(3) if b != u]
        gains[u, u] = drop.snr[k] / p_mw
        for slot, b in zip(cluster, partners):
            gains[u, b] = drop.inr_per_interferer[k, slot] / p_mw
        beta_out[u] = drop.inr_outside(cluster)[k]
    return ClusterChannel(h=np.sqrt(gains) * phases), beta_out
