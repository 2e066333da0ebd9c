from pathlib import Path

from jrr_plots.cli import main

DATA = Path(__file__).parent / "data"


def test_render_subcommand(tmp_path, capsys):
    out = tmp_path / "ri.png"
    code = main([
        "render", "--kind", "ri-curve",
        "--in", str(DATA / "ri_acceptance.csv"),
        "--out", str(out), "--log-x",
    ])
    assert code == 0
    assert out.exists() and out.stat().st_size > 0
    assert str(out) in capsys.readouterr().out


def test_render_twice_byte_identical(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for out in (a, b):
        assert main([
            "render", "--kind", "mse-vs-n",
            "--in", str(DATA / "ri_acceptance.csv"),
            "--out", str(out), "--log-x", "--log-y",
        ]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_error_exit_code(tmp_path, capsys):
    code = main([
        "render", "--kind", "mse-vs-n",
        "--in", str(tmp_path / "missing.csv"),
        "--out", str(tmp_path / "fig.png"),
    ])
    assert code == 2
    assert "error:" in capsys.readouterr().err
