import numpy as np
import pytest

from ergocover.control import (
    ControllerState,
    RobotState,
    confine,
    control_law,
    residuals,
    set_target,
    step,
    steering_vector,
)
from ergocover.domain import Domain
from ergocover.errors import NormalizationError, ShapeError
from ergocover.spectral import ModeSet, basis_eval, uniform_coeffs

UNIT = Domain()


@pytest.fixture(scope="module")
def modes():
    return ModeSet.build(10, UNIT)


def fresh(modes, n=1, boundary="reflect", domain=UNIT):
    return ControllerState(modes, domain, n, 1.0, 0.1, boundary=boundary)


def test_residual_at_start_is_zero(modes):
    np.testing.assert_array_equal(residuals(fresh(modes)), np.zeros(len(modes)))


def test_residual_after_one_step(modes):
    st = fresh(modes)
    x = np.array([0.3, 0.6])
    st.accum = 0.1 * basis_eval(modes, UNIT, x)
    st.steps = 1
    expected = 0.1 * basis_eval(modes, UNIT, x) - 0.1 * uniform_coeffs(modes)
    np.testing.assert_allclose(residuals(st), expected, atol=1e-15)


def test_steering_single_mode(modes):
    st = fresh(modes)
    S = np.zeros(len(modes))
    S[modes.index(1, 0)] = 1.0
    B = steering_vector(st, RobotState(0, np.array([0.5, 0.5])), S)
    # Lambda_(1,0) * d/dx sqrt(2) cos(pi x) at x = 1/2 is -pi / 2
    np.testing.assert_allclose(B, [-np.pi / 2, 0.0], atol=1e-12)
    assert B[1] == 0.0


def test_steering_matches_mode_loop(modes):
    rng = np.random.default_rng(2)
    st = fresh(modes)
    S = rng.normal(size=len(modes))
    for _ in range(20):
        robot = RobotState(0, rng.uniform(size=2))
        grads = modes.grads_local(robot.position)
        acc = np.zeros(2)
        for k in range(len(modes)):
            acc = acc + modes.lam[k] * S[k] * grads[k]
        np.testing.assert_array_equal(steering_vector(st, robot, S), acc)


def test_control_law_direction():
    u = control_law([3.0, 4.0], 1.0, np.random.default_rng(0))
    np.testing.assert_allclose(u, [-0.6, -0.8], atol=1e-15)


@pytest.mark.parametrize("B", [[1e-3, -2e-3], [5.0, 0.0], [-7.0, 2.5]])
@pytest.mark.parametrize("u_max", [0.3, 1.0, 2.0])
def test_control_law_saturates(B, u_max):
    u = control_law(B, u_max, np.random.default_rng(0))
    assert abs(np.hypot(*u) - u_max) <= 1e-12


def test_control_law_fallback_is_seeded():
    a = control_law([0.0, 0.0], 1.0, np.random.default_rng(4))
    b = control_law([0.0, 0.0], 1.0, np.random.default_rng(4))
    np.testing.assert_array_equal(a, b)
    assert abs(np.hypot(*a) - 1.0) <= 1e-12
    theta = np.random.default_rng(4).uniform(0.0, 2 * np.pi)
    np.testing.assert_allclose(a, [np.cos(theta), np.sin(theta)], atol=1e-15)


def test_first_step_from_center_is_random_heading(modes):
    # at t = 0 every residual vanishes, so the fallback heading is used
    st = fresh(modes)
    robots = [RobotState(0, np.array([0.5, 0.5]))]
    step(robots, st, np.random.default_rng(9))
    theta = np.random.default_rng(9).uniform(0.0, 2 * np.pi)
    np.testing.assert_allclose(robots[0].control, [np.cos(theta), np.sin(theta)], atol=1e-15)


def test_euler_step_example(modes):
    st = fresh(modes)
    S = np.zeros(len(modes))
    S[modes.index(1, 0)] = 1.0  # steering points to -x, control to +x
    st.accum = S.copy()  # at t = 0 the residual is the raw sum
    robot = RobotState(0, np.array([0.5, 0.5]))
    step([robot], st, np.random.default_rng(0))
    np.testing.assert_allclose(robot.control, [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(robot.position, [0.6, 0.5], atol=1e-12)
    assert st.steps == 1 and st.t == pytest.approx(0.1)


def test_clip_mode_parks_on_boundary():
    np.testing.assert_array_equal(confine(np.array([1.05, 0.5]), np.array([1.0, 1.0]), "clip"), [1.0, 0.5])


def test_reflect_mode_mirrors():
    L = np.array([1.0, 2.0])
    np.testing.assert_allclose(confine(np.array([1.05, -0.25]), L), [0.95, 0.25], atol=1e-15)
    np.testing.assert_array_equal(confine(np.array([0.3, 1.7]), L), [0.3, 1.7])


@pytest.mark.parametrize("boundary", ["reflect", "clip"])
def test_robots_stay_in_domain_at_full_speed(modes, boundary):
    st = fresh(modes, 3, boundary)
    rng = np.random.default_rng(1)
    robots = [RobotState(i, rng.uniform(size=2)) for i in range(3)]
    for _ in range(300):
        step(robots, st, rng)
        for r in robots:
            assert np.all(r.position >= 0.0) and np.all(r.position <= 1.0)
            assert abs(np.hypot(*r.control) - 1.0) <= 1e-12


def _trajectory(modes, seed, steps=100):
    st = fresh(modes, 2)
    robots = [RobotState(0, np.array([0.2, 0.3])), RobotState(1, np.array([0.7, 0.9]))]
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(steps):
        step(robots, st, rng)
        out.append(np.array([r.control for r in robots]))
    return np.array(out), st


def test_step_is_deterministic(modes):
    a, sa = _trajectory(modes, 5)
    b, sb = _trajectory(modes, 5)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(sa.accum, sb.accum)


def test_constant_coefficient_after_steps(modes):
    _, st = _trajectory(modes, 0, 40)
    assert st.coverage_coeffs()[0] == pytest.approx(1.0, abs=1e-12)


def test_translation_consistency(modes):
    shifted = Domain((3.25, -7.5), (4.25, -6.5))
    m2 = ModeSet.build(10, shifted)
    runs = []
    for dom, m in [(UNIT, modes), (shifted, m2)]:
        st = ControllerState(m, dom, 2)
        robots = [RobotState(0, np.array([0.2, 0.3])), RobotState(1, np.array([0.7, 0.9]))]
        rng = np.random.default_rng(8)
        ctrl = []
        for _ in range(80):
            step(robots, st, rng)
            ctrl.append([r.control.copy() for r in robots])
        runs.append(np.array(ctrl))
    np.testing.assert_array_equal(runs[0], runs[1])


def test_set_target_validation(modes):
    st = fresh(modes)
    with pytest.raises(ShapeError):
        set_target(st, np.zeros(5))
    bad = uniform_coeffs(modes) * 1.5
    with pytest.raises(NormalizationError):
        set_target(st, bad)


def test_retarget_changes_residual_by_target_shift(modes):
    _, st = _trajectory(modes, 1, 30)
    old = residuals(st)
    mu_old = st.mu.copy()
    mu_new = mu_old.copy()
    mu_new[modes.index(2, 1)] = 0.4
    set_target(st, mu_new)
    np.testing.assert_allclose(residuals(st) - old, 2 * st.t * (mu_old - mu_new), atol=1e-12)


def test_stationary_robot_coefficients(modes):
    st = fresh(modes)
    x0 = np.array([0.41, 0.13])
    for _ in range(25):
        st.accum = st.accum + 0.1 * modes.values_local(x0[None, :])[0]
        st.steps += 1
    np.testing.assert_allclose(st.coverage_coeffs(), basis_eval(modes, UNIT, x0), atol=1e-9)


def test_uniform_target_metric_decreases(modes):
    st = fresh(modes, 4)
    rng = np.random.default_rng(0)
    robots = [RobotState(i, rng.uniform(size=2)) for i in range(4)]
    for _ in range(50):
        step(robots, st, rng)
    early = st.metric()
    for _ in range(550):
        step(robots, st, rng)
    assert st.metric() < 0.2 * early
