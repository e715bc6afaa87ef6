"""Figure rendering from output CSVs."""

import pytest

from evonet.engine import run_trial
from evonet.errors import EvonetError
from evonet.project import parse_project
from evonet.report import render_frequency_figure, render_grid_figure, render_report

from conftest import grid_project, project_text


@pytest.fixture
def outdir(tmp_path):
    rows = [
        grid_project(
            "fig", width=9, height=9, nodes="same(81; strategy=0) | set(40: strategy=1)",
            stop_at=6, outputs="freq(strategy);snapshot(nodes)@3",
        )
    ]
    [exp] = parse_project(project_text(*rows))
    run_trial(exp, 0, outdir=tmp_path)
    return tmp_path


def test_frequency_figure(outdir):
    png = render_frequency_figure(outdir / "fig_t0_freq_strategy.csv")
    assert png.exists() and png.stat().st_size > 1000
    assert png.suffix == ".png"


def test_grid_figure(outdir):
    png = render_grid_figure(outdir / "fig_t0_nodes_3.csv")
    assert png.exists() and png.stat().st_size > 1000


def test_grid_figure_attr_selection(outdir):
    png = render_grid_figure(outdir / "fig_t0_nodes_0.csv", attr="strategy")
    assert png.exists()
    with pytest.raises(EvonetError, match="mood"):
        render_grid_figure(outdir / "fig_t0_nodes_0.csv", attr="mood")


def test_render_report_covers_all_outputs(outdir):
    written = render_report(outdir)
    names = sorted(p.name for p in written)
    assert names == [
        "fig_t0_freq_strategy.png",
        "fig_t0_nodes_0.png",
        "fig_t0_nodes_3.png",
        "fig_t0_nodes_6.png",
    ]


def test_rejects_wrong_file_shape(tmp_path):
    bad = tmp_path / "x.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(EvonetError):
        render_frequency_figure(bad)
    with pytest.raises(EvonetError):
        render_grid_figure(bad)


def test_circular_fallback_for_missing_coordinates(tmp_path):
    snap = tmp_path / "c_t0_nodes_0.csv"
    snap.write_text("id,x,y,strategy\n0,,,1\n1,,,0\n2,,,0\n")
    png = render_grid_figure(snap)
    assert png.exists()
