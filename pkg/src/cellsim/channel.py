"""Network geometry, path loss, Rayleigh fading and per-user channel drops.

Conventions used throughout the simulator:

* Distances are in km, powers in dBm at the API boundary and linear mW
  internally.
* Per-user link qualities are stored pre-divided by the noise power, so a
  user with direct-link SNR ``s`` and interference-to-noise ratio ``i``
  has SINR ``s / (1 + i)`` with no unit left anywhere downstream.
* Short-term power fading is unit-mean exponential (Rayleigh amplitude).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .rng import RngStream

TWO_PI = 2.0 * math.pi


def dbm_to_mw(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0)


@dataclass(frozen=True)
class PathLossSpec:
    """Distance-to-gain law, either a generic power law or a Hata-style fit.

    Both variants reduce to ``gain(d) = scale * d**(-exponent)`` with d in
    km; the Hata form ``offset_db + slope_db*log10(d)`` is the same law with
    ``scale = 10**(offset_db/10)`` and ``exponent = -slope_db/10``.
    """

    variant: str
    scale: float
    exponent: float

    @classmethod
    def generic(cls, scale: float, exponent: float) -> "PathLossSpec":
        # exponents <= 2 are physically atypical but admissible
        if scale <= 0:
            raise ValueError(f"path-loss scale must be > 0, got {scale}")
        if exponent <= 0:
            raise ValueError(f"path-loss exponent must be > 0, got {exponent}")
        return cls("generic", float(scale), float(exponent))

    @classmethod
    def hata(cls, offset_db: float = -114.5, slope_db: float = -37.19) -> "PathLossSpec":
        if slope_db >= 0:
            raise ValueError(f"hata slope must be negative dB/decade, got {slope_db}")
        # gain in dB must stay negative from 1 m outward
        if offset_db + slope_db * math.log10(1e-3) >= 0:
            raise ValueError(
                f"hata({offset_db}, {slope_db}) is not attenuating at 1 m"
            )
        return cls("hata", 10.0 ** (offset_db / 10.0), -slope_db / 10.0)

    @property
    def offset_db(self) -> float:
        return 10.0 * math.log10(self.scale)

    @property
    def slope_db(self) -> float:
        return -10.0 * self.exponent

    def gain(self, distance_km):
        """Linear power gain at the given distance(s); rejects d <= 0."""
        d = np.asarray(distance_km, dtype=float)
        if np.any(d <= 0.0):
            raise ValueError("path gain undefined for distance <= 0")
        out = self.scale * d ** (-self.exponent)
        return float(out) if np.isscalar(distance_km) else out


#: Urban-macro attenuation used by the default scenarios: antenna gains
#: folded in, d in km.
PAPER_HATA = PathLossSpec.hata(-114.5, -37.19)


def path_gain(spec: PathLossSpec, distance_km):
    """Linear power gain of a link of the given length."""
    return spec.gain(distance_km)


@dataclass(frozen=True)
class NetworkGeometry:
    """Serving-BS/interferer layout defining one deployment.

    The serving BS sits at ``serving_position``; ``interferer_positions``
    holds the N co-channel BSs of the first ring.  ``symmetric_radius_km``
    is the user circle of the equal-path-loss model and must not exceed the
    cell radius.
    """

    serving_position: np.ndarray
    interferer_positions: np.ndarray
    cell_radius_km: float
    symmetric_radius_km: float

    def __post_init__(self):
        serving = np.asarray(self.serving_position, dtype=float).reshape(2)
        interferers = np.atleast_2d(np.asarray(self.interferer_positions, dtype=float))
        object.__setattr__(self, "serving_position", serving)
        object.__setattr__(self, "interferer_positions", interferers)
        if interferers.shape[0] < 1 or interferers.shape[1] != 2:
            raise ValueError("need at least one interferer position (x, y)")
        if np.any(np.all(np.isclose(interferers, serving), axis=1)):
            raise ValueError("interferer coincides with the serving BS")
        if self.cell_radius_km <= 0:
            raise ValueError(f"cell radius must be > 0, got {self.cell_radius_km}")
        if not 0 < self.symmetric_radius_km <= self.cell_radius_km:
            raise ValueError(
                f"symmetric radius must lie in (0, {self.cell_radius_km}], "
                f"got {self.symmetric_radius_km}"
            )

    @property
    def n_interferers(self) -> int:
        return self.interferer_positions.shape[0]


def first_ring_geometry(
    cell_radius_km: float,
    n_interferers: int,
    symmetric_radius_km: Optional[float] = None,
) -> NetworkGeometry:
    """Tangent-disc first ring: serving BS at the origin, interferers at
    distance ``2 R`` and angles ``k * 360/N`` degrees.

    Args:
        cell_radius_km: disc radius R of every cell.
        n_interferers: ring size N >= 1.
        symmetric_radius_km: user circle for the symmetric model; defaults
            to R/2 (the R = 2 km, R_sym = 1 km default scenario).
    """
    if n_interferers < 1:
        raise ValueError(f"need at least one interferer, got {n_interferers}")
    if cell_radius_km <= 0:
        raise ValueError(f"cell radius must be > 0, got {cell_radius_km}")
    angles = TWO_PI * np.arange(n_interferers) / n_interferers
    ring = 2.0 * cell_radius_km * np.column_stack([np.cos(angles), np.sin(angles)])
    return NetworkGeometry(
        serving_position=np.zeros(2),
        interferer_positions=ring,
        cell_radius_km=float(cell_radius_km),
        symmetric_radius_km=float(
            symmetric_radius_km if symmetric_radius_km is not None else cell_radius_km / 2.0
        ),
    )


@dataclass(frozen=True)
class UserSample:
    """One user's link budget: direct SNR, interference-to-noise ratio."""

    snr: float
    inr: float
    distance_km: Optional[float] = None


@dataclass
class Drop:
    """One realization of ``n`` candidate users in the serving cell.

    ``snr[k]`` is user k's direct-link power over noise and
    ``inr_per_interferer[k, j]`` the contribution of interferer j, so row
    sums give the total interference-to-noise ratio.
    """

    snr: np.ndarray
    inr_per_interferer: np.ndarray
    model_tag: str
    distance_km: Optional[np.ndarray] = None
    _inr_total: Optional[np.ndarray] = field(
        default=None, repr=False, compare=False, init=False
    )

    def __post_init__(self):
        if self.snr.ndim != 1 or self.snr.size < 1:
            raise ValueError("a drop needs at least one user")
        if self.inr_per_interferer.shape[0] != self.snr.size:
            raise ValueError("snr and interference arrays disagree on user count")

    @property
    def n_users(self) -> int:
        return self.snr.size

    @property
    def inr(self) -> np.ndarray:
        if self._inr_total is None:
            self._inr_total = self.inr_per_interferer.sum(axis=1)
        return self._inr_total

    def inr_outside(self, excluded: Sequence[int]) -> np.ndarray:
        """Interference with the given interferer columns removed."""
        keep = [j for j in range(self.inr_per_interferer.shape[1]) if j not in set(excluded)]
        if not keep:
            return np.zeros(self.n_users)
        return self.inr_per_interferer[:, keep].sum(axis=1)

    def user(self, k: int) -> UserSample:
        d = None if self.distance_km is None else float(self.distance_km[k])
        return UserSample(float(self.snr[k]), float(self.inr[k]), d)


def draw_fading(stream: RngStream, count: int) -> np.ndarray:
    """i.i.d. unit-mean exponential power fading samples (Rayleigh power)."""
    if count < 1:
        raise ValueError(f"fading sample count must be >= 1, got {count}")
    return stream.generator().standard_exponential(count)


def _interferer_scale(geometry: NetworkGeometry, scale) -> np.ndarray:
    if scale is None:
        return np.ones(geometry.n_interferers)
    arr = np.asarray(scale, dtype=float)
    if arr.shape != (geometry.n_interferers,):
        raise ValueError(
            f"interferer gain scale needs {geometry.n_interferers} entries, "
            f"got shape {arr.shape}"
        )
    if np.any(arr < 0):
        raise ValueError("interferer gain scale factors must be >= 0")
    return arr


def _interference(
    geometry: NetworkGeometry,
    spec: PathLossSpec,
    positions: np.ndarray,
    tx_over_noise: float,
    fading: np.ndarray,
    scale: np.ndarray,
) -> np.ndarray:
    # (n, N) distances from every user position to every interfering BS
    delta = positions[:, None, :] - geometry.interferer_positions[None, :, :]
    dist = np.sqrt(np.einsum("unx,unx->un", delta, delta))
    return tx_over_noise * spec.gain(dist) * scale[None, :] * fading


def drop_symmetric(
    geometry: NetworkGeometry,
    spec: PathLossSpec,
    p_dbm: float,
    noise_dbm: float,
    n: int,
    stream: RngStream,
    interferer_gain_scale=None,
) -> Drop:
    """Equal-path-loss drop: users on the circle of the symmetric radius.

    Every user shares the direct-link path loss (constant distance to the
    serving BS); interference path losses vary with the user's angle, which
    is drawn uniformly.  Optional per-interferer scale factors multiply the
    interferers' path gains (0 silences an interferer).
    """
    if n < 1:
        raise ValueError(f"user count must be >= 1, got {n}")
    scale = _interferer_scale(geometry, interferer_gain_scale)
    tx_over_noise = dbm_to_mw(p_dbm) / dbm_to_mw(noise_dbm)
    rng = stream.generator()

    angles = rng.uniform(0.0, TWO_PI, n)
    direct_fading = rng.standard_exponential(n)
    cross_fading = rng.standard_exponential((n, geometry.n_interferers))

    radius = geometry.symmetric_radius_km
    positions = geometry.serving_position + radius * np.column_stack(
        [np.cos(angles), np.sin(angles)]
    )
    snr = tx_over_noise * spec.gain(radius) * direct_fading
    inr = _interference(geometry, spec, positions, tx_over_noise, cross_fading, scale)
    return Drop(snr=snr, inr_per_interferer=inr, model_tag="symmetric")


def drop_asymmetric(
    geometry: NetworkGeometry,
    spec: PathLossSpec,
    p_dbm: float,
    noise_dbm: float,
    n: int,
    stream: RngStream,
    interferer_gain_scale=None,
) -> Drop:
    """Uniform-in-disc drop: users anywhere in the cell of radius R.

    Radial positions follow the area law (CDF r^2/R^2); a user landing
    exactly on the serving BS is re-drawn to avoid the path-loss
    singularity.
    """
    if n < 1:
        raise ValueError(f"user count must be >= 1, got {n}")
    scale = _interferer_scale(geometry, interferer_gain_scale)
    tx_over_noise = dbm_to_mw(p_dbm) / dbm_to_mw(noise_dbm)
    rng = stream.generator()

    radii = geometry.cell_radius_km * np.sqrt(rng.uniform(0.0, 1.0, n))
    while np.any(radii == 0.0):
        zero = radii == 0.0
        radii[zero] = geometry.cell_radius_km * np.sqrt(rng.uniform(0.0, 1.0, int(zero.sum())))
    angles = rng.uniform(0.0, TWO_PI, n)
    direct_fading = rng.standard_exponential(n)
    cross_fading = rng.standard_exponential((n, geometry.n_interferers))

    positions = geometry.serving_position + radii[:, None] * np.column_stack(
        [np.cos(angles), np.sin(angles)]
    )
    snr = tx_over_noise * spec.gain(radii) * direct_fading
    inr = _interference(geometry, spec, positions, tx_over_noise, cross_fading, scale)
    return Drop(snr=snr, inr_per_interferer=inr, model_tag="asymmetric", distance_km=radii)


def unequal_interferer_drop(
    geometry: NetworkGeometry,
    spec: PathLossSpec,
    per_interferer_gains,
    p_dbm: float,
    noise_dbm: float,
    n: int,
    stream: RngStream,
) -> Drop:
    """Symmetric-model drop where interferer j has a fixed path gain.

    The direct link behaves exactly as in :func:`drop_symmetric`; each
    interferer contributes through its own constant linear gain instead of
    a distance-dependent one.  Gains must be strictly positive.
    """
    if n < 1:
        raise ValueError(f"user count must be >= 1, got {n}")
    gains = np.asarray(per_interferer_gains, dtype=float)
    if gains.shape != (geometry.n_interferers,):
        raise ValueError(
            f"need one gain per interferer ({geometry.n_interferers}), "
            f"got shape {gains.shape}"
        )
    if np.any(gains <= 0.0):
        raise ValueError("per-interferer path gains must be > 0")
    tx_over_noise = dbm_to_mw(p_dbm) / dbm_to_mw(noise_dbm)
    rng = stream.generator()

    direct_fading = rng.standard_exponential(n)
    cross_fading = rng.standard_exponential((n, geometry.n_interferers))

    snr = tx_over_noise * spec.gain(geometry.symmetric_radius_km) * direct_fading
    inr = tx_over_noise * gains[None, :] * cross_fading
    return Drop(snr=snr, inr_per_interferer=inr, model_tag="symmetric")
