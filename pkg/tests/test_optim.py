import numpy as np
import pytest

from dmasim import optim


def rosen(x):
    return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2


def rosen_grad(x):
    return np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])


def test_settings_validation():
    with pytest.raises(ValueError):
        optim.TrSettings(eta_accept=0.3)
    with pytest.raises(ValueError):
        optim.TrSettings(initial_radius=10, max_radius=1)
    with pytest.raises(ValueError):
        optim.TrSettings(grad_tol=0)
    assert optim.TrSettings(hessian_mode="sr1").hessian_mode is optim.HessianMode.SR1


@pytest.mark.parametrize("mode", ["bfgs", "sr1"])
def test_sphere(mode):
    out = optim.minimize(lambda x: x @ x, lambda x: 2 * x, np.array([5.0, -3.0, 0.2, 8.0]),
                         optim.TrSettings(hessian_mode=mode))
    assert out.converged and out.f_best < 1e-16


def gd_oracle(x, iters=200_000, lr=1e-3):
    """Plain gradient descent, slow but independent of the trust-region code."""
    for _ in range(iters):
        x = x - lr * rosen_grad(x)
    return x


@pytest.mark.parametrize("mode", ["bfgs", "sr1"])
def test_rosenbrock(mode):
    out = optim.minimize(rosen, rosen_grad, np.array([-1.2, 1.0]), optim.TrSettings(hessian_mode=mode))
    assert out.converged
    assert np.max(np.abs(out.x_best - 1)) < 1e-6


def test_rosenbrock_oracle_agrees():
    ref = gd_oracle(np.array([-1.2, 1.0]))
    assert np.max(np.abs(ref - 1)) < 1e-4


@pytest.mark.parametrize("x0,want", [(0.5, 1.0), (-0.5, -1.0)])
def test_double_well(x0, want):
    out = optim.minimize(lambda x: (x[0] ** 2 - 1) ** 2, lambda x: np.array([4 * x[0] * (x[0] ** 2 - 1)]),
                         np.array([x0]))
    assert out.x_best[0] == pytest.approx(want, abs=1e-6)


def test_history_and_radius_invariants():
    s = optim.TrSettings(max_radius=5.0)
    out = optim.minimize(rosen, rosen_grad, np.array([-1.2, 1.0]), s)
    h = np.array(out.f_history)
    assert np.all(np.diff(h) < 0)
    assert out.f_best == h.min()
    assert all(0 < r <= 5.0 for r in out.radius_history)


def test_deterministic():
    a = optim.minimize(rosen, rosen_grad, np.array([-1.2, 1.0]))
    b = optim.minimize(rosen, rosen_grad, np.array([-1.2, 1.0]))
    assert a.f_history == b.f_history and np.array_equal(a.x_best, b.x_best)


def test_invalid_start_and_nan():
    with pytest.raises(optim.OptimizationError):
        optim.minimize(lambda x: np.inf, lambda x: x, np.zeros(2))
    with pytest.raises(optim.OptimizationError):
        optim.minimize(lambda x: np.nan, lambda x: x, np.zeros(2))
    with pytest.raises(optim.OptimizationError):
        optim.minimize(lambda x: x @ x, lambda x: np.full_like(x, np.nan), np.ones(2))


def test_inf_vetoes_step():
    # f is +inf for x > 0.5: the solver must stay on the finite side and still converge
    f = lambda x: np.inf if x[0] > 0.5 else (x[0] - 0.4) ** 2  # noqa: E731
    g = lambda x: np.array([2 * (x[0] - 0.4)])  # noqa: E731
    out = optim.minimize(f, g, np.array([-3.0]), optim.TrSettings(initial_radius=10))
    assert out.x_best[0] == pytest.approx(0.4, abs=1e-6)


def test_max_iters():
    out = optim.minimize(rosen, rosen_grad, np.array([-1.2, 1.0]), optim.TrSettings(max_iters=3))
    assert not out.converged and out.iterations == 3


def test_dogleg():
    B = np.diag([1.0, 4.0])
    g = np.array([1.0, 1.0])
    newton = -np.linalg.solve(B, g)
    np.testing.assert_allclose(optim.dogleg(g, B, 10.0), newton)
    p = optim.dogleg(g, B, 0.5)
    assert np.linalg.norm(p) == pytest.approx(0.5)
    p = optim.dogleg(g, -np.eye(2), 0.3)  # indefinite -> steepest descent to the boundary
    np.testing.assert_allclose(p, -0.3 * g / np.linalg.norm(g))


def test_updates_symmetric(rng):
    B = np.eye(3)
    for _ in range(5):
        s, y = rng.standard_normal(3), rng.standard_normal(3)
        y = y if s @ y > 0 else -y
        B = optim._bfgs_update(B, s, y)
        assert np.allclose(B, B.T) and np.linalg.eigvalsh(B).min() > 0
        B2 = optim._sr1_update(np.eye(3), s, y)
        assert np.allclose(B2, B2.T)
    np.testing.assert_array_equal(optim._bfgs_update(np.eye(2), np.array([1.0, 0]), np.array([-1.0, 0])), np.eye(2))


def test_gradient_audit():
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    f = lambda x: 0.5 * x @ A @ x + x[0]  # noqa: E731
    g = lambda x: A @ x + np.array([1.0, 0])  # noqa: E731
    x = np.array([0.3, -1.2])
    assert optim.gradient_audit(f, g, x) < 1e-10
    assert optim.gradient_audit(f, lambda x: -g(x), x) == pytest.approx(1.0, abs=1e-6)
