import math

import numpy as np
import pytest

from ergocover.config import default_config
from ergocover.domain import MOVING
from ergocover.errors import ConfigError, NormalizationError
from ergocover.harness import baseline_of, compare, final_quarter_fraction, make_streams, normalized_rmse, run
from ergocover.spectral import ModeSet, uniform_coeffs


def short(t=6.0, **over):
    cfg = default_config().replace("run.t_sim", t).replace("run.metric_resolution", "40 40")
    for k, v in over.items():
        cfg = cfg.replace(k.replace("__", "."), v)
    return cfg


def test_rmse_examples():
    truth = np.linspace(0.0, 2.0, 50)
    assert normalized_rmse(truth, truth) == 0.0
    assert normalized_rmse(truth + 0.3, truth) == pytest.approx(0.15, abs=1e-15)
    with pytest.raises(NormalizationError):
        normalized_rmse(np.zeros(4), np.ones(4))


def test_rmse_of_cold_model_against_default_field():
    # frozen from a pure-python loop over the 100 x 100 midpoint grid
    r = run(default_config().replace("run.t_sim", 0.0))
    assert r.initial_rmse == pytest.approx(0.301404157956437, abs=1e-12)


def test_zero_horizon_record_is_empty():
    r = run(short(0.0))
    assert r.positions.shape == (0, 4, 2)
    assert r.rmse.size == 0 and r.sample_times.size == 0
    assert r.final_rmse == r.initial_rmse
    assert r.initial_positions.shape == (4, 2)


def test_sampling_cadence():
    for t in (3.0, 7.3, 12.0):
        r = run(short(t))
        assert r.sample_times.size == math.floor(t * 2.0)
        assert int(r.sampled.sum()) == r.sample_times.size
        assert r.measurements.shape == (r.sample_times.size, 4)
        # every logged time lies on the control grid
        np.testing.assert_allclose(r.sample_times / 0.1, np.round(r.sample_times / 0.1), atol=1e-9)


def test_baseline_target_stays_uniform():
    r = run(short(6.0, controller__mode="uniform-baseline"))
    mu0 = uniform_coeffs(ModeSet.build(10, r.config.build_domain()))
    assert np.all(r.target_coeffs == mu0)


def test_adaptive_target_is_normalized():
    r = run(short(6.0))
    np.testing.assert_allclose(r.target_mass, 1.0, atol=1e-9)
    assert not np.all(r.target_coeffs[-1] == r.target_coeffs[0])


def test_runs_are_bit_identical():
    a, b = run(short(4.0)), run(short(4.0))
    for name in ("positions", "controls", "rmse", "ergodic", "lyapunov", "weights", "target_coeffs"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_seed_changes_start():
    a, b = run(short(0.0)), run(short(0.0, run__seed=1))
    assert not np.array_equal(a.initial_positions, b.initial_positions)


def test_noise_does_not_move_robot_init_stream():
    a = run(short(2.0))
    b = run(short(2.0, field__noise_std=0.2))
    np.testing.assert_array_equal(a.initial_positions, b.initial_positions)
    assert not np.array_equal(a.measurements, b.measurements)


def test_streams_are_independent():
    s1, s2 = make_streams(3), make_streams(3)
    s2["sensor-noise"].normal(size=1000)
    assert s1["robot-init"].uniform() == s2["robot-init"].uniform()
    assert s1["tie-break"].uniform() == s2["tie-break"].uniform()


def test_baseline_ignores_estimator():
    cfg = short(8.0, controller__mode="uniform-baseline")
    with_est = run(cfg)
    without = run(cfg, estimator_enabled=False)
    np.testing.assert_array_equal(with_est.controls, without.controls)
    np.testing.assert_array_equal(with_est.positions, without.positions)


def test_metric_sanity():
    for r in (run(short(6.0)), run(short(6.0, field__variant=MOVING))):
        assert np.all(r.rmse >= 0)
        assert np.all(np.isfinite(r.ergodic)) and np.all(r.ergodic >= 0)
        assert np.all(np.isfinite(r.lyapunov))
        assert r.lyapunov_kind == "projected"


def test_speed_and_containment_every_step():
    r = run(short(10.0))
    np.testing.assert_allclose(np.hypot(r.controls[..., 0], r.controls[..., 1]), 1.0, atol=1e-12)
    assert np.all(r.positions >= 0.0) and np.all(r.positions <= 1.0)


def test_self_comparison():
    cfg = short(4.0)
    c = compare(cfg, cfg)
    assert np.all(c.delta == 0.0)
    assert c.final_ratio == 1.0
    assert c.final_quarter_fraction == 1.0


def test_compare_rejects_different_horizon():
    with pytest.raises(ConfigError, match="run.t_sim"):
        compare(short(4.0), short(5.0))


def test_compare_allows_mode_difference():
    cfg = short(3.0)
    c = compare(cfg, baseline_of(cfg))
    assert c.delta.size == 6
    np.testing.assert_array_equal(c.delta, c.a.rmse - c.b.rmse)


def test_final_quarter_fraction():
    a = np.array([1, 1, 1, 1, 1, 1, 0.5, 2.0])
    b = np.ones(8)
    assert final_quarter_fraction(a, b) == 0.5
    assert math.isnan(final_quarter_fraction([], []))


def test_adaptive_requires_estimator():
    with pytest.raises(ConfigError):
        run(short(1.0), estimator_enabled=False)
