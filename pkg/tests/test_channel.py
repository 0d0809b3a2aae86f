"""Channel generation: geometry, path loss, fading and drops."""

import math

import numpy as np
import pytest
from scipy import stats

from cellsim.channel import (
    PAPER_HATA,
    PathLossSpec,
    draw_fading,
    drop_asymmetric,
    drop_symmetric,
    first_ring_geometry,
    path_gain,
    unequal_interferer_drop,
)
from cellsim.rng import RngStream


def lin_to_db(x):
    return 10.0 * np.log10(x)


# -- geometry ----------------------------------------------------------------


def test_first_ring_layout():
    geo = first_ring_geometry(2.0, 6)
    assert geo.n_interferers == 6
    dists = np.linalg.norm(geo.interferer_positions, axis=1)
    assert np.allclose(dists, 4.0)
    angles = np.degrees(np.arctan2(*geo.interferer_positions.T[::-1])) % 360
    assert np.allclose(sorted(angles), [0, 60, 120, 180, 240, 300], atol=1e-9)


def test_first_ring_single_interferer():
    geo = first_ring_geometry(1.0, 1)
    assert np.allclose(geo.interferer_positions, [[2.0, 0.0]])


def test_first_ring_adjacent_distance():
    # oracle: chord between adjacent ring points, 2*(2R)*sin(pi/N)
    geo = first_ring_geometry(2.0, 6)
    ring = geo.interferer_positions
    adjacent = np.linalg.norm(ring - np.roll(ring, -1, axis=0), axis=1)
    assert np.allclose(adjacent, 2.0 * 4.0 * math.sin(math.pi / 6))
    assert np.allclose(adjacent, 4.0)


def test_first_ring_rejects_bad_inputs():
    with pytest.raises(ValueError):
        first_ring_geometry(2.0, 0)
    with pytest.raises(ValueError):
        first_ring_geometry(0.0, 6)
    with pytest.raises(ValueError):
        first_ring_geometry(1.0, 6, symmetric_radius_km=1.5)


# -- path loss ----------------------------------------------------------------


def test_hata_reference_points():
    assert lin_to_db(path_gain(PAPER_HATA, 1.0)) == pytest.approx(-114.5, abs=1e-9)
    assert lin_to_db(path_gain(PAPER_HATA, 10.0)) == pytest.approx(-151.69, abs=1e-9)


def test_generic_power_law():
    spec = PathLossSpec.generic(1.0, 2.0)
    assert path_gain(spec, 0.5) == pytest.approx(4.0, rel=1e-12)


def test_path_gain_rejects_nonpositive_distance():
    for spec in (PAPER_HATA, PathLossSpec.generic(1.0, 4.0)):
        with pytest.raises(ValueError):
            path_gain(spec, 0.0)
        with pytest.raises(ValueError):
            path_gain(spec, -1.0)


def test_path_gain_strictly_decreasing():
    rng = np.random.default_rng(7)
    for spec in (PAPER_HATA, PathLossSpec.generic(0.3, 3.5)):
        d = np.sort(rng.uniform(0.05, 10.0, 100))
        gains = spec.gain(d)
        assert np.all(np.diff(gains) < 0)


def test_path_loss_spec_validation():
    with pytest.raises(ValueError):
        PathLossSpec.generic(0.0, 4.0)
    with pytest.raises(ValueError):
        PathLossSpec.generic(1.0, -1.0)
    with pytest.raises(ValueError):
        PathLossSpec.hata(-114.5, 5.0)  # amplifying slope
    with pytest.raises(ValueError):
        PathLossSpec.hata(200.0, -1.0)  # positive gain at 1 m


def test_hata_roundtrip_parameters():
    assert PAPER_HATA.offset_db == pytest.approx(-114.5, abs=1e-9)
    assert PAPER_HATA.slope_db == pytest.approx(-37.19, abs=1e-9)


# -- fading -------------------------------------------------------------------


def test_fading_moments():
    g = draw_fading(RngStream(2024, 1), 10**6)
    assert np.mean(g) == pytest.approx(1.0, abs=0.005)
    assert np.var(g, ddof=1) == pytest.approx(1.0, abs=0.01)


def test_fading_tail_probability():
    # Pr{G > log(100)} = 1/100 for a unit-mean exponential
    g = draw_fading(RngStream(2024, 2), 10**6)
    assert np.mean(g > math.log(100)) == pytest.approx(0.01, abs=0.002)


def test_fading_ks_against_exponential():
    g = draw_fading(RngStream(2024, 3), 10**5)
    dist = stats.kstest(g, stats.expon.cdf).statistic
    assert dist <= 0.01


def test_fading_deterministic_per_stream():
    a = draw_fading(RngStream(99, 5), 1000)
    b = draw_fading(RngStream(99, 5), 1000)
    c = draw_fading(RngStream(99, 6), 1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_fading_rejects_bad_count():
    with pytest.raises(ValueError):
        draw_fading(RngStream(1, 1), 0)


# -- symmetric drops ----------------------------------------------------------

GEO = first_ring_geometry(2.0, 6, symmetric_radius_km=1.0)


def test_symmetric_drop_mean_snr_matches_link_budget():
    # P + gain + (-noise) = 40 - 114.5 + 101 = 26.5 dB
    total = 0.0
    count = 0
    for i in range(5):
        drop = drop_symmetric(GEO, PAPER_HATA, 40.0, -101.0, 200_000, RngStream(11, i))
        total += drop.snr.sum()
        count += drop.n_users
    mean_db = lin_to_db(total / count)
    assert mean_db == pytest.approx(26.5, abs=0.1)


def test_symmetric_drop_direct_link_ignores_interferers():
    # equal path loss for all users: the direct link is a fixed gain times
    # fading, independent of the interferer configuration
    a = drop_symmetric(GEO, PAPER_HATA, 40.0, -101.0, 500, RngStream(3, 1))
    b = drop_symmetric(
        GEO, PAPER_HATA, 40.0, -101.0, 500, RngStream(3, 1), interferer_gain_scale=np.zeros(6)
    )
    assert np.array_equal(a.snr, b.snr)
    rho = 10.0 ** (26.5 / 10.0)
    dist = stats.kstest(a.snr / rho, stats.expon.cdf).statistic
    assert dist < 0.07


def test_symmetric_drop_zeroed_interferers_kill_interference():
    drop = drop_symmetric(
        GEO, PAPER_HATA, 40.0, -101.0, 50, RngStream(3, 2), interferer_gain_scale=np.zeros(6)
    )
    assert np.all(drop.inr == 0.0)


def test_drop_reproducible_and_nonnegative():
    for maker in (drop_symmetric, drop_asymmetric):
        a = maker(GEO, PAPER_HATA, 40.0, -101.0, 256, RngStream(77, 4))
        b = maker(GEO, PAPER_HATA, 40.0, -101.0, 256, RngStream(77, 4))
        assert np.array_equal(a.snr, b.snr)
        assert np.array_equal(a.inr_per_interferer, b.inr_per_interferer)
        assert np.all(a.snr >= 0) and np.all(a.inr >= 0)


def test_power_scaling_scales_links_linearly():
    for maker in (drop_symmetric, drop_asymmetric):
        base = maker(GEO, PAPER_HATA, 40.0, -101.0, 128, RngStream(5, 8))
        scaled = maker(GEO, PAPER_HATA, 50.0, -101.0, 128, RngStream(5, 8))
        assert np.allclose(scaled.snr, 10.0 * base.snr, rtol=1e-12)
        assert np.allclose(
            scaled.inr_per_interferer, 10.0 * base.inr_per_interferer, rtol=1e-12
        )


# -- asymmetric drops ---------------------------------------------------------


def test_asymmetric_radial_law():
    drop = drop_asymmetric(GEO, PAPER_HATA, 40.0, -101.0, 10**6, RngStream(13, 0))
    r = drop.distance_km
    assert np.mean(r <= 1.0) == pytest.approx(0.25, abs=0.002)  # (R/2)^2 / R^2
    assert np.mean(r) == pytest.approx(4.0 / 3.0, abs=0.005)  # 2R/3


def test_asymmetric_zeroed_interferers():
    drop = drop_asymmetric(
        GEO, PAPER_HATA, 40.0, -101.0, 64, RngStream(13, 1), interferer_gain_scale=np.zeros(6)
    )
    assert np.all(drop.inr == 0.0)


def test_drop_rejects_empty():
    with pytest.raises(ValueError):
        drop_symmetric(GEO, PAPER_HATA, 40.0, -101.0, 0, RngStream(1, 1))


# -- fixed per-interferer gains -----------------------------------------------


def test_unequal_gains_reduce_to_equal_path_loss_case():
    # with all gains equal the drop is the equal-path-loss model: direct
    # SNR exponential with mean rho, interference Gamma(N) with the common
    # per-interferer mean
    gamma0 = PAPER_HATA.gain(4.0)
    drop = unequal_interferer_drop(
        GEO, PAPER_HATA, np.full(6, gamma0), 40.0, -101.0, 100_000, RngStream(21, 0)
    )
    rho = 10.0 ** (26.5 / 10.0)
    assert stats.kstest(drop.snr / rho, stats.expon.cdf).statistic < 0.01
    theta = 10.0 ** ((40.0 + 101.0) / 10.0) * gamma0
    assert stats.kstest(drop.inr / theta, stats.gamma(a=6).cdf).statistic < 0.01


def test_unequal_gains_expectation_is_linear():
    rng = np.random.default_rng(40)
    gains = rng.uniform(0.5, 2.0, 6) * PAPER_HATA.gain(4.0)
    kwargs = dict(p_dbm=40.0, noise_dbm=-101.0, n=500_000)
    one = unequal_interferer_drop(GEO, PAPER_HATA, gains, stream=RngStream(22, 0), **kwargs)
    two = unequal_interferer_drop(GEO, PAPER_HATA, 2 * gains, stream=RngStream(22, 1), **kwargs)
    assert np.mean(two.inr) / np.mean(one.inr) == pytest.approx(2.0, rel=0.01)


def test_unequal_gains_vanishing_interferer():
    gamma0 = PAPER_HATA.gain(4.0)
    gains = np.full(6, gamma0)
    gains[0] = 1e-30
    drop = unequal_interferer_drop(
        GEO, PAPER_HATA, gains, 40.0, -101.0, 20_000, RngStream(23, 0)
    )
    # contribution mean is P/noise * gamma_0 = 10^14.1 * 1e-30, vanishing
    assert np.mean(drop.inr_per_interferer[:, 0]) < 1e-15
    assert np.mean(drop.inr_per_interferer[:, 0]) < 1e-15 * np.mean(drop.inr)


def test_unequal_gains_reject_nonpositive():
    with pytest.raises(ValueError):
        unequal_interferer_drop(
            GEO, PAPER_HATA, [0.0] + [1e-12] * 5, 40.0, -101.0, 4, RngStream(1, 1)
        )
