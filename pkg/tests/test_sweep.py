from dataclasses import replace

import numpy as np
import pytest

from ifscavity.errors import ConfigError, TruncationError
from ifscavity.ifs import Family
from ifscavity.sweep import FIGURES, SweepConfig, compare_modes, figure_preset, run_sweep
from ifscavity.witnesses import mandel_q_closed


def test_two_point_sweep_rows():
    cfg = SweepConfig(gt_min=0.0, gt_max=1.0, points=2, witnesses=("mandel", "squeezing"))
    series = run_sweep(cfg)
    assert [(s.mode, s.witness) for s in series] == [("paper", "mandel"), ("paper", "squeezing")]
    for s in series:
        assert [r.gt for r in s.rows] == [0.0, 1.0]
    assert series[0].rows[0].Q == pytest.approx(0.2403, abs=5e-4)


def test_single_point_config():
    cfg = SweepConfig(gt_min=3.0, gt_max=3.0, points=1)
    assert cfg.grid().tolist() == [3.0]
    with pytest.raises(ConfigError):
        SweepConfig(gt_min=0.0, gt_max=1.0, points=1)


@pytest.mark.parametrize(
    "kw",
    [dict(gt_min=2.0, gt_max=1.0), dict(points=0), dict(k=-0.1), dict(g=0.0), dict(witnesses=("x",)), dict(modes=("y",)), dict(family="custom")],
)
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        SweepConfig(**kw)


def test_q_defaults_for_q_families():
    assert SweepConfig(family="qbracket").q == 0.5
    assert SweepConfig().q is None


def test_paper_series_matches_closed_sum():
    cfg = SweepConfig(points=51)
    s = run_sweep(cfg)[0]
    for r in s.rows:
        assert abs(r.Q - mandel_q_closed(cfg.weights(), 0.5, r.gt)) < 1e-10


def test_determinism():
    cfg = SweepConfig(points=41, gt_max=10.0, modes=("paper", "oracle"), witnesses=("mandel", "squeezing"))
    a, b = run_sweep(cfg), run_sweep(cfg)
    for x, y in zip(a, b):
        assert x.values() == y.values()


@pytest.mark.parametrize("mode", ["paper", "oracle"])
def test_refinement_keeps_shared_points(mode):
    coarse = SweepConfig(points=11, gt_max=5.0, modes=(mode,), witnesses=("squeezing",))
    fine = replace(coarse, points=21)
    c, f = run_sweep(coarse)[0], run_sweep(fine)[0]
    np.testing.assert_allclose(c.values(), f.values()[::2], rtol=0, atol=1e-8)


def test_continuation_matches_independent_oracle():
    cfg = SweepConfig(points=6, gt_max=5.0, modes=("oracle",), witnesses=("squeezing",))
    cont = run_sweep(cfg)[0].values()
    indep = run_sweep(replace(cfg, independent_oracle=True))[0].values()
    np.testing.assert_allclose(cont, indep, rtol=0, atol=1e-8)


def test_summary_consistency():
    s = run_sweep(SweepConfig(points=201))[0]
    summ = s.summary()
    vals = np.array(s.values(), dtype=float)
    assert summ["min"] == vals.min()
    assert summ["argmin_gt"] == s.gt[vals.argmin()]
    assert summ["fraction_below_zero"] == pytest.approx(np.mean(vals < 0))


def test_summary_all_undefined():
    s = run_sweep(SweepConfig(nbar=0.0, points=3))[0]
    assert s.values() == [None] * 3
    assert s.summary() == {"min": None, "argmin_gt": None, "fraction_below_zero": None}


def test_figure_presets():
    assert len(FIGURES) == 12
    c = figure_preset("fig3b")
    assert (c.family, c.nbar, c.k, c.witnesses) == (Family.FACTORIAL_SQUARED, 0.5, 0.1, ("mandel",))
    c = figure_preset("fig5c")
    assert (c.family, c.q, c.nbar, c.k, c.witnesses) == (Family.QBRACKET, 0.5, 0.3, 0.5, ("squeezing",))
    c = figure_preset("fig2a", points=11)
    assert c.points == 11 and c.gt_max == 50.0
    with pytest.raises(ConfigError):
        figure_preset("fig9a")


def test_compare_modes():
    rep = compare_modes(SweepConfig(points=51, gt_max=25.0))
    assert rep.dq[0] == pytest.approx(0, abs=1e-12)
    assert rep.ds[0] == pytest.approx(0, abs=1e-12)
    assert rep.dq[-1] > 0.01
    summ = rep.summary()
    assert summ["max_abs_oracle_norm_drift"] < 1e-8
    # the printed closed form is not unitary
    assert summ["max_abs_paper_norm_drift"] > 1
    assert summ["max_dq"] == max(v for v in rep.dq if v is not None)


def test_truncation_error_suggests_n_max():
    cfg = SweepConfig(nbar=10.0, n_max=20, points=3)
    with pytest.raises(TruncationError) as info:
        run_sweep(cfg)
    assert info.value.suggested_n_max > 20


def test_overdamped_lossy_error_names_gt():
    from ifscavity.errors import OverdampedError

    cfg = SweepConfig(k=10.0, points=3, gt_max=1.0)
    with pytest.raises(OverdampedError, match="gt=0"):
        run_sweep(cfg)


def test_to_dict_roundtrip():
    cfg = figure_preset("fig4c", points=5)
    assert SweepConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in cfg.to_dict().items()}) == cfg
