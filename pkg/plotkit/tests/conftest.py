import subprocess

import pytest


def make_bundle(figure, outdir, points=8):
    subprocess.run(
        ["aptomit", "reproduce", figure, "--config", "microsphere-nanostring",
         "--outdir", str(outdir), "--heatmap-points", str(points),
         "--line-points", str(points)],
        check=True, capture_output=True)
    return outdir


@pytest.fixture(scope="session")
def fig4_bundle(tmp_path_factory):
    return make_bundle("fig4", tmp_path_factory.mktemp("bundle") / "fig4")


@pytest.fixture(scope="session")
def fig2_bundle(tmp_path_factory):
    return make_bundle("fig2", tmp_path_factory.mktemp("bundle") / "fig2")


@pytest.fixture(scope="session")
def fig3_bundle(tmp_path_factory):
    return make_bundle("fig3", tmp_path_factory.mktemp("bundle") / "fig3")
