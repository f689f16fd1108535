"""Acceptance: every figure kind renders from real simulation CLI outputs.

Exercises the actual external interface end to end: the simulation package's
CLI produces the CSV files, and this package consumes them as an independent
client.  (The simulation acceptance suite itself runs without this package
installed; the dependency is one-directional.)
"""

import math

import pytest

spinshuttle_cli = pytest.importorskip(
    "spinshuttle.cli", reason="simulation package not installed")

from shuttleplots import FigureSpec, render


@pytest.fixture(scope="module")
def run_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("runs")
    base = """
protocol = sta
d = 3.0
t_f = 2.0
x_min = -8.0
x_max = 11.0
n_points = 512
dt = 1e-3
sample_every = 20
"""
    cfg = out / "run.cfg"
    cfg.write_text(base)
    assert spinshuttle_cli.main(["design", "--config", str(cfg),
                                 "--out", str(out)]) == 0
    assert spinshuttle_cli.main(["simulate", "--config", str(cfg),
                                 "--out", str(out)]) == 0
    sweep_cfg = out / "sweep.cfg"
    sweep_cfg.write_text(base + "gn_values = 0.0, 0.25, 0.5\n")
    assert spinshuttle_cli.main(["sweep", "--config", str(sweep_cfg),
                                 "--out", str(out), "--sequential"]) == 0
    return out


def test_criterion_10_all_figure_kinds_render(run_outputs, tmp_path):
    out = run_outputs
    densities = tuple(str(p) for p in sorted(out.glob("density_t*.csv")))
    assert len(densities) == 5
    jobs = {
        "controls": (str(out / "controls.csv"),),
        "density_contour": densities,
        "snapshots": densities,
        "spin_traces": (str(out / "observables.csv"),),
        "sweep": (str(out / "sweep.csv"),),
    }
    rendered = []
    for kind, inputs in jobs.items():
        target = tmp_path / f"{kind}.png"
        render(FigureSpec(kind, inputs, str(target)))
        assert target.exists() and target.stat().st_size > 2000
        rendered.append(kind)
    print(f"ACCEPTANCE 10: PASS — rendered {', '.join(rendered)} "
          f"from live CLI outputs")


def test_spin_trace_shows_full_flip(run_outputs, tmp_path):
    # the transport run's sx column actually sweeps +1 -> -1
    import numpy as np
    data = np.loadtxt(run_outputs / "observables.csv", delimiter=",", skiprows=1)
    sx = data[:, 4]
    assert sx[0] == pytest.approx(1.0, abs=1e-6)
    assert sx[-1] == pytest.approx(-1.0, abs=1e-3)
    target = tmp_path / "flip.png"
    render(FigureSpec("spin_traces", (str(run_outputs / "observables.csv"),),
                      str(target)))
    assert target.exists()
