import json
import os

import numpy as np
import pytest

from aptomit.params import apply_overrides
from aptomit.sweep import (Axis, SweepSpec, params_hash, reproduce_figure,
                           run_sweep)


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis("power", 0.0, 1.0, 10)
    with pytest.raises(ValueError):
        Axis("delta_p", 1.0, 0.0, 10)
    with pytest.raises(ValueError):
        Axis("delta_p", 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        Axis("delta_p", 0.0, 1.0, 10, spacing="log")


def test_spec_validation():
    ax = Axis("delta_p", -1.0, 1.0, 5)
    with pytest.raises(ValueError):
        SweepSpec((), ("I",))
    with pytest.raises(ValueError):
        SweepSpec((ax, ax), ("I",))
    with pytest.raises(ValueError):
        SweepSpec((ax,), ())
    with pytest.raises(ValueError):
        SweepSpec((ax,), ("reflectivity",))


def test_eigenvalue_sweep_columns_and_labels(micro, w_ep):
    spec = SweepSpec((Axis("omega_spin", 0.0, 2.0 * w_ep, 9),), ("eigvals",))
    result = run_sweep(micro, spec)
    assert result.columns == ("re_omega_plus", "im_omega_plus",
                              "re_omega_minus", "im_omega_minus",
                              "phase_label")
    labels = result.data["phase_label"][:, 0]
    assert labels[0] == "APTS" and labels[-1] == "APTB"
    assert result.data["re_omega_plus"].shape == (9, 1)


def test_missing_axis_collapses_to_fixed_value(micro, w_ep):
    spec = SweepSpec((Axis("delta_p", -500.0, 500.0, 11),),
                     ("T_cw", "T_ccw", "I"), fixed_omega_spin=w_ep)
    result = run_sweep(micro, spec)
    assert result.axes["omega_spin"].tolist() == [w_ep]
    assert result.data["I_dB"].shape == (1, 11)
    assert np.all(np.isfinite(result.data["I_dB"]))


def test_deterministic_across_worker_counts(micro, w_ep, tmp_path,
                                            monkeypatch):
    spec = SweepSpec((Axis("omega_spin", 0.0, 2.0 * w_ep, 6),
                      Axis("delta_p", -500.0, 500.0, 7)),
                     ("I", "tau_cw"))
    paths = []
    for workers in ("1", "4"):
        monkeypatch.setenv("APTOMIT_WORKERS", workers)
        path = tmp_path / f"sweep_{workers}.csv"
        run_sweep(micro, spec).to_csv(path)
        paths.append(path.read_bytes())
    assert paths[0] == paths[1]


def test_csv_preamble_and_layout(micro, w_ep, tmp_path):
    spec = SweepSpec((Axis("omega_spin", 0.0, 2.0 * w_ep, 3),
                      Axis("delta_p", -100.0, 100.0, 4)), ("I",))
    path = tmp_path / "out.csv"
    run_sweep(micro, spec).to_csv(path)
    lines = path.read_text().splitlines()
    preamble = [l for l in lines if l.startswith("#")]
    keys = [l.split("=")[0].strip("# ") for l in preamble]
    assert keys == sorted(keys)
    assert any(k.strip() == "omega_ep" for k in keys)
    assert any(k.strip() == "params_hash" for k in keys)
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "omega_spin,delta_p,I_dB"
    data_rows = [l for l in lines if not l.startswith("#")][1:]
    assert len(data_rows) == 3 * 4
    # numeric cells round-trip exactly through repr
    first = data_rows[0].split(",")
    assert float(first[1]) == -100.0


def test_json_output_structure(micro, w_ep, tmp_path):
    spec = SweepSpec((Axis("delta_p", -100.0, 100.0, 5),), ("T_cw",),
                     fixed_omega_spin=w_ep)
    path = tmp_path / "out.json"
    run_sweep(micro, spec).to_json(path)
    payload = json.loads(path.read_text())
    assert payload["columns"] == ["T_cw"]
    assert len(payload["data"]["T_cw"][0]) == 5
    assert payload["provenance"]["m_variant"] == "symmetrized"
    assert payload["errors"] == []


def test_params_hash_tracks_parameter_changes(micro):
    h1 = params_hash(micro)
    assert len(h1) == 16
    assert h1 == params_hash(micro)
    assert h1 != params_hash(apply_overrides(micro, {"kappa": 8400.0}))


def test_reproduce_fig4_bundle(micro, tmp_path):
    outdir = tmp_path / "fig4"
    manifest = reproduce_figure(micro, "fig4", outdir,
                                heatmap_points=8, line_points=8)
    assert set(manifest["files"]) == {"fig4a_isolation_map",
                                      "fig4b_delay_cw_map",
                                      "fig4c_delay_ccw_map"}
    assert manifest["omega_ep"] == pytest.approx(351.4, rel=1e-2)
    for name in manifest["files"].values():
        assert os.path.exists(outdir / name)
    saved = json.loads((outdir / "manifest.json").read_text())
    assert saved == manifest


def test_reproduce_rejects_unknown_figure(micro, tmp_path):
    with pytest.raises(ValueError):
        reproduce_figure(micro, "fig9", tmp_path / "x")
