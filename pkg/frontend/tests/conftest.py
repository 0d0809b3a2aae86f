"""Fixture CSVs produced through the simulator's public CSV interface."""

import pytest

from cellsim.montecarlo import ScenarioConfig, run_scenario, write_curve_csv


def _sweep(tmpdir, name, **overrides):
    settings = dict(
        model="symmetric",
        n_grid=(8, 16, 32),
        trials_per_n=30,
        jp_enabled=True,
        master_seed=11,
    )
    settings.update(overrides)
    cfg = ScenarioConfig(**settings)
    path = tmpdir / name
    write_curve_csv(path, run_scenario(cfg), cfg)
    return path


@pytest.fixture(scope="session")
def sym_csv(tmp_path_factory):
    return _sweep(tmp_path_factory.mktemp("curves"), "sym.csv")


@pytest.fixture(scope="session")
def asym_csv(tmp_path_factory):
    return _sweep(tmp_path_factory.mktemp("curves"), "asym.csv", model="asymmetric")


@pytest.fixture(scope="session")
def nojp_csv(tmp_path_factory):
    return _sweep(tmp_path_factory.mktemp("curves"), "nojp.csv", jp_enabled=False)


@pytest.fixture(scope="session")
def single_row_csv(tmp_path_factory):
    cfg = ScenarioConfig(model="symmetric", n_grid=(8,), trials_per_n=5, master_seed=3)
    path = tmp_path_factory.mktemp("curves") / "point.csv"
    write_curve_csv(path, run_scenario(cfg), cfg)
    return path
