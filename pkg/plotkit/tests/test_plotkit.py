import json
import shutil
import subprocess

import numpy as np
import pytest

from plotkit import SchemaError, load_table, recipe_for, render, save
from plotkit.cli import main


def data_axes(fig):
    return [ax for ax in fig.axes if ax.get_label() != "<colorbar>"]


def test_load_table_parses_provenance_and_grid(fig4_bundle):
    table = load_table(fig4_bundle / "fig4a_isolation_map.csv")
    assert "omega_ep" in table.provenance
    assert table.provenance["params_hash"]
    spins, dps, grid = table.grid("I_dB")
    assert grid.shape == (8, 8)
    assert spins[0] == 0.0
    axes = table.axes()
    assert [a.name for a in axes] == ["omega_spin", "delta_p"]
    assert axes[0].count == 8


def test_missing_column_named_in_error(fig4_bundle):
    table = load_table(fig4_bundle / "fig4a_isolation_map.csv")
    with pytest.raises(SchemaError) as err:
        table.require("T_cw")
    assert err.value.column == "T_cw"
    assert "T_cw" in str(err.value)


def test_render_fig4_is_three_heatmap_panels(fig4_bundle):
    fig = render(recipe_for("fig4", fig4_bundle))
    panels = data_axes(fig)
    assert len(panels) == 3
    # each heatmap gets its own colorbar
    assert len(fig.axes) == 6


def test_ep_marker_drawn_at_provenance_speed(fig4_bundle):
    manifest = json.loads((fig4_bundle / "manifest.json").read_text())
    w_ep = manifest["omega_ep"]
    fig = render(recipe_for("fig4", fig4_bundle))
    for ax in data_axes(fig):
        marks = [ln for ln in ax.lines
                 if np.allclose(ln.get_ydata(), [w_ep, w_ep])]
        assert len(marks) == 1


def test_rerender_is_byte_identical(fig4_bundle, tmp_path):
    paths = [tmp_path / "a.png", tmp_path / "b.png"]
    for path in paths:
        save(render(recipe_for("fig4", fig4_bundle)), path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_render_fig2_and_fig3_layouts(fig2_bundle, fig3_bundle):
    fig2 = render(recipe_for("fig2", fig2_bundle))
    assert len(data_axes(fig2)) == 6
    fig3 = render(recipe_for("fig3", fig3_bundle))
    assert len(data_axes(fig3)) == 6


def test_normalize_scales_isolation_curves(fig2_bundle):
    fig = render(recipe_for("fig2", fig2_bundle, normalize=True))
    iso_panel = data_axes(fig)[2]  # pump-on isolation spectra
    curves = [ln for ln in iso_panel.lines if ln.get_label() != "_child0"
              and not ln.get_linestyle() == "--"]
    peak = max(np.max(np.abs(ln.get_ydata())) for ln in curves)
    assert peak == pytest.approx(1.0)


def test_schema_mismatch_names_offending_column(fig4_bundle, tmp_path):
    broken = tmp_path / "broken"
    shutil.copytree(fig4_bundle, broken)
    path = broken / "fig4a_isolation_map.csv"
    path.write_text(path.read_text().replace("I_dB", "iso"))
    with pytest.raises(SchemaError) as err:
        render(recipe_for("fig4", broken))
    assert err.value.column == "I_dB"


def test_nan_cells_render_as_gaps(fig4_bundle, tmp_path):
    gappy = tmp_path / "gappy"
    shutil.copytree(fig4_bundle, gappy)
    path = gappy / "fig4a_isolation_map.csv"
    lines = path.read_text().splitlines()
    first_data = next(i for i, l in enumerate(lines)
                      if not l.startswith("#")) + 1
    cells = lines[first_data].split(",")
    cells[-1] = "NaN"
    lines[first_data] = ",".join(cells)
    path.write_text("\n".join(lines) + "\n")
    fig = render(recipe_for("fig4", gappy))  # no crash
    assert len(data_axes(fig)) == 3


def test_tiny_two_by_two_grid_renders(tmp_path):
    bundle = tmp_path / "tiny"
    bundle.mkdir()
    csv = (
        "# axis1 = omega_spin linear 0.0 1.0 2\n"
        "# axis2 = delta_p linear -1.0 1.0 2\n"
        "# omega_ep = 0.5\n"
        "# params_hash = 0123456789abcdef\n"
        "omega_spin,delta_p,I_dB,tau_cw_s,tau_ccw_s\n")
    for w in (0.0, 1.0):
        for d in (-1.0, 1.0):
            csv += f"{w},{d},0.1,1e-6,-1e-6\n"
    for name in ("fig4a_isolation_map", "fig4b_delay_cw_map",
                 "fig4c_delay_ccw_map"):
        (bundle / f"{name}.csv").write_text(csv)
    manifest = {"figure": "fig4", "omega_ep": 0.5, "params_hash": "x",
                "files": {n: f"{n}.csv" for n in
                          ("fig4a_isolation_map", "fig4b_delay_cw_map",
                           "fig4c_delay_ccw_map")}}
    (bundle / "manifest.json").write_text(json.dumps(manifest))
    fig = render(recipe_for("fig4", bundle))
    assert len(data_axes(fig)) == 3


def test_wrong_bundle_for_figure_id(fig4_bundle):
    with pytest.raises(SchemaError):
        recipe_for("fig2", fig4_bundle)


def test_cli_renders_and_reports_errors(fig4_bundle, tmp_path, capsys):
    out = tmp_path / "fig4.png"
    assert main(["fig4", str(fig4_bundle), "-o", str(out)]) == 0
    assert out.stat().st_size > 0
    code = main(["fig4", str(tmp_path / "nowhere"), "-o", str(out)])
    captured = capsys.readouterr()
    assert code == 1 and "manifest" in captured.err


def test_cli_usage_error_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["fig9", str(tmp_path), "-o", "x.png"])
    assert exc.value.code == 2


def test_console_script():
    proc = subprocess.run(["render-figure", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "bundle" in proc.stdout
