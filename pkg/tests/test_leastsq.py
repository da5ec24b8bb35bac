import numpy as np
import pytest

from mtload import FitNotConvergedError
from mtload.leastsq import least_squares, numeric_jacobian


def test_jacobian_against_analytic():
    t = np.linspace(0.1, 4.0, 15)

    def residual(p):
        return p[0] * np.exp(-p[1] * t)

    x = np.array([2.5, 0.7])
    jac = numeric_jacobian(residual, x)
    np.testing.assert_allclose(jac[:, 0], np.exp(-x[1] * t), rtol=1e-7)
    np.testing.assert_allclose(jac[:, 1], -x[0] * t * np.exp(-x[1] * t),
                               rtol=1e-6)


def test_exponential_recovery_noiseless():
    t = np.linspace(0.0, 5.0, 40)
    y = 3.2 * np.exp(-0.8 * t)

    def residual(p):
        return p[0] * np.exp(-p[1] * t) - y

    res = least_squares(residual, [1.0, 0.3], ("a", "k"))
    assert res.converged
    assert res.params["a"] == pytest.approx(3.2, rel=1e-8)
    assert res.params["k"] == pytest.approx(0.8, rel=1e-8)
    assert res.residual_norm < 1e-8


def test_deterministic_repeat():
    t = np.linspace(0.0, 5.0, 40)
    rng = np.random.default_rng(5)
    y = 3.2 * np.exp(-0.8 * t) * (1 + 0.02 * rng.standard_normal(t.shape))

    def residual(p):
        return p[0] * np.exp(-p[1] * t) - y

    r1 = least_squares(residual, [1.0, 0.3], ("a", "k"))
    r2 = least_squares(residual, [1.0, 0.3], ("a", "k"))
    assert r1.params == r2.params
    assert r1.iterations == r2.iterations


def test_stderr_reasonable_for_linear_model(rng):
    # straight line with known noise: slope error should be near the
    # textbook value sigma/sqrt(sum (x - xbar)^2)
    x = np.linspace(0, 10, 50)
    noise = 0.5
    y = 2.0 * x + 1.0 + noise * rng.standard_normal(x.shape)

    def residual(p):
        return p[0] * x + p[1] - y

    res = least_squares(residual, [1.0, 0.0], ("slope", "intercept"))
    textbook = noise / np.sqrt(np.sum((x - x.mean()) ** 2))
    assert res.stderr["slope"] == pytest.approx(textbook, rel=0.5)


def test_non_convergence_carries_best_iterate():
    t = np.linspace(0.0, 5.0, 40)
    y = 3.2 * np.exp(-0.8 * t)

    def residual(p):
        return p[0] * np.exp(-p[1] * t) - y

    with pytest.raises(FitNotConvergedError) as err:
        least_squares(residual, [100.0, 5.0], ("a", "k"), max_iter=2)
    best = err.value.best
    assert best is not None and not best.converged
    assert best.iterations == 2


def test_lower_bound_clamp_flagged():
    x_data = np.linspace(0, 1, 20)
    y = -0.5 * x_data  # pulls the slope negative

    def residual(p):
        return p[0] * x_data - y

    res = least_squares(residual, [1.0], ("slope",), lower_bounds=[0.0])
    assert res.params["slope"] == 0.0
    assert res.extras.get("clamped") is True


def test_input_validation():
    with pytest.raises(ValueError):
        least_squares(lambda p: p, [1.0, 2.0], ("only-one",))
