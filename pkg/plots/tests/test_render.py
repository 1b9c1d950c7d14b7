"""Rendering: all four figure ids, determinism, markers, error handling."""

import csv
from pathlib import Path

import pytest

from notrap_plots.render import FigureSpec, RenderError, main, render

DATA = Path(__file__).parent / "data"

GOLDEN = {
    "fig3": (DATA / "golden_fig3.csv",),
    "fig4": (DATA / "golden_fig4_left.csv", DATA / "golden_fig4_right.csv"),
    "fig5": (DATA / "golden_fig5.csv",),
    "pareto": (DATA / "golden_pareto.csv",),
}


def spec_for(figure_id, out_path, paths=None):
    return FigureSpec(
        figure_id=figure_id,
        csv_paths=tuple(str(p) for p in (paths or GOLDEN[figure_id])),
        out_path=str(out_path),
    )


@pytest.mark.parametrize("figure_id", sorted(GOLDEN))
@pytest.mark.parametrize("suffix", [".png", ".svg"])
def test_renders_every_figure(tmp_path, figure_id, suffix):
    out = tmp_path / f"{figure_id}{suffix}"
    render(spec_for(figure_id, out))
    assert out.exists() and out.stat().st_size > 1000


@pytest.mark.parametrize("figure_id", sorted(GOLDEN))
@pytest.mark.parametrize("suffix", [".png", ".svg"])
def test_rerender_is_byte_identical(tmp_path, figure_id, suffix):
    one = tmp_path / f"one{suffix}"
    two = tmp_path / f"two{suffix}"
    render(spec_for(figure_id, one))
    render(spec_for(figure_id, two))
    assert one.read_bytes() == two.read_bytes()


def test_fig4_marker_matches_csv_argmin(tmp_path):
    """The minimum marker sits at the argmin of the input's shot column."""
    info = render(spec_for("fig4", tmp_path / "f4.png"))
    with open(GOLDEN["fig4"][0], newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if r["feasible"] == "true"]
    best = min(rows, key=lambda r: float(r["n_total"]))
    assert info["argmin_tau"] == float(best["tau1"])
    assert info["min_total"] == float(best["n_total"])


def test_fig4_single_csv_renders_one_panel(tmp_path):
    out = tmp_path / "left_only.png"
    info = render(spec_for("fig4", out, paths=GOLDEN["fig4"][:1]))
    assert out.exists()
    assert "argmin_tau" in info


def test_empty_csv_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("label,n_tau,rel_error\n")
    with pytest.raises(RenderError, match="no data"):
        render(spec_for("fig3", tmp_path / "x.png", paths=(empty,)))


def test_missing_column_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("label,n_tau\naloc,2\n")
    with pytest.raises(RenderError, match="rel_error"):
        render(spec_for("fig3", tmp_path / "x.png", paths=(bad,)))


def test_unknown_figure_id():
    with pytest.raises(RenderError, match="figure id"):
        FigureSpec(figure_id="fig9", csv_paths=("x.csv",), out_path="y.png")


def test_unsupported_format(tmp_path):
    with pytest.raises(RenderError, match="format"):
        render(spec_for("fig3", tmp_path / "out.pdf"))


class TestCli:
    def test_success(self, tmp_path, capsys):
        out = tmp_path / "fig3.png"
        code = main(["--fig", "fig3", "--in", str(GOLDEN["fig3"][0]), "--out", str(out)])
        assert code == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_two_inputs(self, tmp_path, capsys):
        out = tmp_path / "fig4.png"
        code = main([
            "--fig", "fig4",
            "--in", str(GOLDEN["fig4"][0]),
            "--in", str(GOLDEN["fig4"][1]),
            "--out", str(out),
        ])
        assert code == 0
        assert "argmin_tau" in capsys.readouterr().out

    def test_missing_column_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("tau1,n_total\n0.1,5\n")
        code = main(["--fig", "fig4", "--in", str(bad), "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "eps_extrap" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path):
        code = main(["--fig", "fig3", "--in", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "x.png")])
        assert code == 2

    def test_linear_axis_flag(self, tmp_path):
        out = tmp_path / "linear.png"
        code = main(["--fig", "pareto", "--in", str(GOLDEN["pareto"][0]),
                     "--out", str(out), "--linear-y"])
        assert code == 0
