"""Figure rendering: fidelity to the CSV, determinism, error reporting."""

import numpy as np
import pytest

from render_figures import FigureSpec, RenderError, build_figure, load_curve, main, render


def spec_for(figure_id, csv_path, tmp_path, suffix=".svg", **kwargs):
    return FigureSpec(
        figure_id=figure_id,
        input_csv=csv_path,
        output_image=tmp_path / f"figure{figure_id}{suffix}",
        **kwargs,
    )


def test_all_figure_ids_render(sym_csv, asym_csv, tmp_path):
    for figure_id, source in ((1, sym_csv), (2, sym_csv), (3, asym_csv), (4, asym_csv)):
        out = render(spec_for(figure_id, source, tmp_path))
        assert out.is_file() and out.stat().st_size > 0


def test_plotted_series_equal_csv_cells(sym_csv, tmp_path):
    for figure_id in (1, 2):
        spec = spec_for(figure_id, sym_csv, tmp_path)
        columns = load_curve(sym_csv)
        fig = build_figure(spec, columns)
        ax = fig.axes[0]
        labelled = [line for line in ax.lines if not line.get_label().startswith("_")]
        assert labelled, "no labelled series plotted"
        for line in labelled:
            name = line.get_label()
            assert name in columns
            assert np.array_equal(line.get_xdata(), columns["n"])
            assert np.array_equal(line.get_ydata(), columns[name], equal_nan=True)


def test_rate_and_beta_figures_select_different_columns(sym_csv, tmp_path):
    columns = load_curve(sym_csv)
    rates = build_figure(spec_for(1, sym_csv, tmp_path), columns)
    betas = build_figure(spec_for(2, sym_csv, tmp_path), columns)
    rate_labels = {l.get_label() for l in rates.axes[0].lines}
    beta_labels = {l.get_label() for l in betas.axes[0].lines}
    assert any(l.endswith("_mean_rate") for l in rate_labels)
    assert "jp_rate" in rate_labels
    assert all("_mean_rate" not in l for l in beta_labels)
    assert any(l.endswith("_mean_beta_norm") for l in beta_labels)


def test_rendering_is_byte_deterministic(sym_csv, tmp_path):
    a = render(spec_for(1, sym_csv, tmp_path / "first"))
    b = render(spec_for(1, sym_csv, tmp_path / "second"))
    assert a.read_bytes() == b.read_bytes()


def test_rendering_leaves_input_untouched(sym_csv, tmp_path):
    before = sym_csv.read_bytes()
    render(spec_for(2, sym_csv, tmp_path))
    assert sym_csv.read_bytes() == before


def test_single_row_csv_renders(single_row_csv, tmp_path):
    out = render(spec_for(1, single_row_csv, tmp_path))
    assert out.is_file()


def test_empty_optional_series_warns_and_skips(nojp_csv, tmp_path):
    spec = spec_for(1, nojp_csv, tmp_path)
    with pytest.warns(UserWarning, match="jp_rate"):
        fig = build_figure(spec, load_curve(nojp_csv))
    assert all(l.get_label() != "jp_rate" for l in fig.axes[0].lines)


def test_empty_overlays_warn_for_asymmetric(asym_csv, tmp_path):
    spec = spec_for(3, asym_csv, tmp_path)
    with pytest.warns(UserWarning, match="lemma"):
        build_figure(spec, load_curve(asym_csv))


def test_missing_overlay_column_is_an_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,max_sinr_mean_rate,max_sinr_rate_ci\n8,1.5,0.1\n")
    with pytest.raises(RenderError, match="lemma1_lo"):
        build_figure(spec_for(1, bad, tmp_path), load_curve(bad))


def test_missing_n_column_is_an_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("users,max_sinr_mean_rate\n8,1.5\n")
    with pytest.raises(RenderError, match="'n'"):
        load_curve(bad)


def test_png_output_supported(sym_csv, tmp_path):
    out = render(spec_for(4, sym_csv, tmp_path, suffix=".png"))
    assert out.suffix == ".png" and out.stat().st_size > 0


def test_cli_success_and_errors(sym_csv, tmp_path, capsys):
    out = tmp_path / "cli.svg"
    assert main(["1", str(sym_csv), str(out)]) == 0
    assert out.is_file()
    assert main(["1", str(tmp_path / "nope.csv"), str(out)]) == 1
    assert "not found" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["9", str(sym_csv), str(out)])


def test_cli_linear_x(sym_csv, tmp_path):
    out = tmp_path / "linear.svg"
    assert main(["2", str(sym_csv), str(out), "--linear-x"]) == 0
    assert out.is_file()
