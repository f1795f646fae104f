import math

import numpy as np
import pytest

import dirl


SADDLE_X2 = (3 - 2 * math.sqrt(2)) / 4


def test_regularizer_table_values():
    lpn = dirl.Regularizer("LPN", 0.5)
    assert lpn.value(4.0) == pytest.approx(2.0, abs=1e-15)
    assert lpn.derivative(4.0) == pytest.approx(0.25, abs=1e-15)
    assert lpn.second_derivative(4.0) == pytest.approx(-0.03125, abs=1e-15)
    assert math.isinf(lpn.derivative_at_zero_plus())
    assert not lpn.lipschitz_at_zero
    assert dirl.Regularizer("FRA", 2.0).derivative_at_zero_plus() == 0.5


def test_invalid_parameter_raises():
    with pytest.raises(ValueError, match="p"):
        dirl.Regularizer("LPN", 1.5)


def test_benchmark_objective():
    prob = dirl.benchmark2d()
    assert prob.objective_value(np.array([0.0, 1.0])) == pytest.approx(1.0625, abs=1e-15)
    assert prob.objective_value(np.zeros(2)) == pytest.approx(1.5625, abs=1e-15)


def test_soft_threshold_with_infinite_weight():
    out = dirl.soft_threshold(np.array([3.0, -0.5, 5.0]), np.array([1.0, 1.0, math.inf]))
    np.testing.assert_array_equal(out, [2.0, 0.0, 0.0])


def test_solve_reaches_axis():
    prob = dirl.benchmark2d()
    trace = dirl.run(dirl.SolverConfig("DIRL1"), prob, np.array([3.0, 3.0]))
    assert trace.converged
    assert abs(trace.final_x[0]) < 1e-10
    assert trace.final_residual <= 1e-6
    assert trace.support_identified(50)


def test_classification_and_jacobian():
    prob = dirl.benchmark2d()
    rep = dirl.classify_stationary_point(prob, np.array([0.0, 1.0]))
    assert rep["classification"] == "StrictLocalMin"
    assert rep["lambda_min"] == pytest.approx(1.75, abs=1e-10)
    saddle = dirl.classify_stationary_point(prob, np.array([0.0, SADDLE_X2]))
    assert saddle["classification"] == "StrictSaddle"
    jac = dirl.fixed_point_jacobian("DIRL1", prob, np.array([0.0, SADDLE_X2]), 0.2, 4.0, 0.3)
    assert jac.unstable()
    assert jac.full().shape == (4, 4)


def test_not_stationary_raises():
    with pytest.raises(RuntimeError):
        dirl.classify_stationary_point(dirl.benchmark2d(), np.array([1.0, 1.0]))


def test_finite_difference_matches_linear_map():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    fd = dirl.finite_difference_jacobian(lambda p: M @ p, np.array([0.3, -0.7]))
    np.testing.assert_allclose(fd, M, atol=1e-10)


def test_escape_is_deterministic():
    cfg = {"problem": "benchmark2d", "num_inits": 20, "seed": 3,
           "init_box": {"lower": -3, "upper": 3}}
    a = dirl.run_escape(cfg, workers=1)
    b = dirl.run_escape(cfg, workers=2)
    assert a == b
    assert a["fraction_at_saddle"] == 0.0
    assert sum(a["counts"].values()) == 20


def test_selfcheck_passes():
    assert all(passed for _, passed, _ in dirl.selfcheck())
