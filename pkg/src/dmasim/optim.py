"""Quasi-Newton trust-region minimizer with a dogleg subproblem solver."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class HessianMode(str, enum.Enum):
    BFGS = "bfgs"
    SR1 = "sr1"


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrSettings:
    initial_radius: float = 1.0
    max_radius: float = 1e3
    eta_accept: float = 0.1
    grad_tol: float = 1e-6
    max_iters: int = 500
    hessian_mode: HessianMode = HessianMode.BFGS
    #: stop once the trust radius drops below this
    min_radius: float = 1e-12
    #: stop when an accepted step lowers f by less than f_tol * max(1, |f|) (0 disables)
    f_tol: float = 0.0

    def __post_init__(self):
        if not 0 < self.eta_accept < 0.25:
            raise ValueError("eta_accept must lie in (0, 0.25)")
        if not 0 < self.initial_radius <= self.max_radius:
            raise ValueError("need 0 < initial_radius <= max_radius")
        if self.grad_tol <= 0 or self.max_iters < 0:
            raise ValueError("grad_tol must be > 0 and max_iters >= 0")
        object.__setattr__(self, "hessian_mode", HessianMode(self.hessian_mode))


@dataclass
class TrOutcome:
    x_best: np.ndarray
    f_best: float
    grad_norm: float
    iterations: int
    converged: bool
    f_history: list = field(default_factory=list)
    radius_history: list = field(default_factory=list)
    message: str = ""
    n_fev: int = 0
    n_gev: int = 0


def _check(value, what):
    if np.any(np.isnan(value)):
        raise OptimizationError(f"{what} returned NaN")
    return value


def dogleg(g: np.ndarray, B: np.ndarray, radius: float) -> np.ndarray:
    """Dogleg step for ``min g.p + p.B.p/2`` s.t. ``|p| <= radius``.

    Falls back to a steepest-descent step to the boundary when ``B`` is not
    positive definite.
    """
    gnorm = np.linalg.norm(g)
    try:
        chol = np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        curv = g @ B @ g
        if curv <= 0:
            return -radius * g / gnorm
        return -min(gnorm**2 / curv, radius / gnorm) * g
    p_newton = -np.linalg.solve(chol.T, np.linalg.solve(chol, g))
    if np.linalg.norm(p_newton) <= radius:
        return p_newton
    p_cauchy = -(gnorm**2 / (g @ B @ g)) * g
    pc_norm = np.linalg.norm(p_cauchy)
    if pc_norm >= radius:
        return -radius * g / gnorm
    # walk from the Cauchy point towards the Newton point until the boundary
    d = p_newton - p_cauchy
    a, b, c = d @ d, 2 * p_cauchy @ d, pc_norm**2 - radius**2
    tau = (-b + np.sqrt(b * b - 4 * a * c)) / (2 * a)
    return p_cauchy + tau * d


def _bfgs_update(B, s, y):
    sy = s @ y
    if sy <= 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
        return B
    Bs = B @ s
    B = B - np.outer(Bs, Bs) / (s @ Bs) + np.outer(y, y) / sy
    return (B + B.T) / 2


def _sr1_update(B, s, y):
    r = y - B @ s
    denom = r @ s
    if abs(denom) <= 1e-8 * np.linalg.norm(s) * np.linalg.norm(r):
        return B
    B = B + np.outer(r, r) / denom
    return (B + B.T) / 2


def minimize(f, g, x0, settings: TrSettings | None = None) -> TrOutcome:
    """Minimize ``f`` with gradient ``g`` from ``x0``.

    Steps are accepted only when the actual decrease is positive and at least
    ``eta_accept`` times the model decrease, so ``f_history`` (one entry per
    accepted iterate, starting with ``f(x0)``) is strictly decreasing.
    ``f`` may return ``inf`` to veto a trial point.
    """
    settings = settings or TrSettings()
    x = np.array(x0, dtype=float)
    fx = _check(float(f(x)), "objective")
    if not np.isfinite(fx):
        raise OptimizationError("objective is not finite at the starting point")
    gx = _check(np.asarray(g(x), float), "gradient")
    n_fev, n_gev = 1, 1
    B = np.eye(x.size)
    scaled = False
    radius = settings.initial_radius
    history, radii = [fx], [radius]
    update = _bfgs_update if settings.hessian_mode == HessianMode.BFGS else _sr1_update

    message = "max_iters reached"
    converged = False
    it = 0
    while True:
        gnorm = np.linalg.norm(gx)
        if gnorm < settings.grad_tol:
            converged, message = True, "gradient tolerance met"
            break
        if it >= settings.max_iters:
            break
        if radius < settings.min_radius:
            converged, message = True, "trust radius underflow"
            break
        it += 1
        p = dogleg(gx, B, radius)
        predicted = -(gx @ p + 0.5 * p @ B @ p)
        x_new = x + p
        f_new = _check(float(f(x_new)), "objective")
        n_fev += 1
        actual = fx - f_new
        rho = actual / predicted if predicted > 0 else -np.inf
        if not np.isfinite(f_new):
            rho = -np.inf

        pnorm = np.linalg.norm(p)
        if rho < 0.25:
            radius = 0.25 * pnorm
        elif rho > 0.75 and pnorm >= 0.99 * radius:
            radius = min(2 * radius, settings.max_radius)
        radii.append(radius)

        if rho > settings.eta_accept and actual > 0:
            g_new = _check(np.asarray(g(x_new), float), "gradient")
            n_gev += 1
            s, y = p, g_new - gx
            if not scaled and s @ y > 0:
                B = np.eye(x.size) * (y @ y) / (s @ y)
                scaled = True
            B = update(B, s, y)
            small = settings.f_tol > 0 and actual <= settings.f_tol * max(1.0, abs(fx))
            x, fx, gx = x_new, f_new, g_new
            history.append(fx)
            if small:
                converged, message = True, "relative decrease below f_tol"
                break

    return TrOutcome(x, fx, float(np.linalg.norm(gx)), it, converged, history, radii, message, n_fev, n_gev)


def gradient_audit(f, g, x, rel_step: float = 1e-6, eps: float | None = None) -> float:
    """Max over coordinates of ``|g_i - fd_i| / (|g_i| + |fd_i| + eps)`` using
    central differences with step ``rel_step * (1 + |x_i|)``.

    ``eps`` defaults to ``1e-10`` times the largest gradient magnitude, which
    keeps coordinates with a vanishing derivative from dominating.
    """
    x = np.asarray(x, float)
    grad = np.asarray(g(x), float)
    fd = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * (1 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        fd[i] = (f(x + e) - f(x - e)) / (2 * h)
    if eps is None:
        eps = 1e-10 * max(np.abs(grad).max(), np.abs(fd).max(), np.finfo(float).tiny)
    return float(np.max(np.abs(grad - fd) / (np.abs(grad) + np.abs(fd) + eps)))
