"""Zero-forcing precoders for full-digital, hybrid and DMA transmitters."""
from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import optim
from .equivchan import (
    EquivalentChannel,
    ModelError,
    receive_normalization,
    reflection_and_supply,
    supplied_power,
    transmitted_power,
    transmitter_admittance_dma,
)
from .metrics import sinr
from .netmodel import AdmittanceSet, Architecture

log = logging.getLogger(__name__)


class RankError(ArithmeticError):
    """The equivalent channel does not have full row rank."""


class AllocationError(ArithmeticError):
    """The hybrid water-filling allocation would need a negative power."""


class LossMode(str, enum.Enum):
    WITH_LOSS = "with_loss"
    NO_LOSS = "no_loss"
    COMPENSATED = "compensated"


@dataclass
class PrecoderSolution:
    architecture: Architecture
    B: np.ndarray
    achieved_P: float
    gamma_per_user: np.ndarray
    Q: np.ndarray | None = None
    R: np.ndarray | None = None
    Ys_im: np.ndarray | None = None
    P_t: float = float("nan")
    P_s: float = float("nan")
    converged: bool = True
    iterations: int = 0
    f_history: list = field(default_factory=list)
    loss_mode: LossMode | None = None


def pseudo_inverse(H: np.ndarray, rank_tol: float = 1e-12) -> np.ndarray:
    """Right inverse ``H^H (H H^H)^-1`` through a Cholesky factor of the Gram matrix."""
    M, N = H.shape
    if M > N:
        raise RankError(f"{M} users cannot be zero-forced with {N} inputs")
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] <= rank_tol * s[0]:
        raise RankError(f"equivalent channel is rank deficient (smallest singular value {s[-1]:.3e})")
    gram = H @ H.conj().T
    c = linalg.cho_factor(gram)
    return linalg.cho_solve(c, H).conj().T


def _normalize(direction: np.ndarray, Y: np.ndarray, P_max: float, sigma_x2: float) -> np.ndarray:
    return np.sqrt(P_max / transmitted_power(direction, Y, sigma_x2)) * direction


def zf_fd(H: EquivalentChannel | np.ndarray, Y_tt: np.ndarray, P_max: float = 1.0,
          sigma_x2: float = 1.0, sigma_n2: float = 1.0) -> PrecoderSolution:
    """Closed-form ZF scaled to transmitted power ``P_max``."""
    H = getattr(H, "H", H)
    B = _normalize(pseudo_inverse(H), Y_tt, P_max, sigma_x2)
    P_t = transmitted_power(B, Y_tt, sigma_x2)
    return PrecoderSolution(Architecture.FULL_DIGITAL, B, P_t, sinr(H, B, sigma_n2, sigma_x2), P_t=P_t, P_s=P_t)


# -- hybrid ---------------------------------------------------------------------------

def _hybrid_parts(theta, H):
    Q = np.exp(1j * theta)
    QhQ = Q.conj().T @ Q
    C_h = np.linalg.solve(QhQ, Q.conj().T @ H.conj().T)
    A_h = np.linalg.inv(H @ Q @ C_h)
    A_h = (A_h + A_h.conj().T) / 2
    return Q, C_h, A_h


def _hybrid_cost_from(A_h, P_max, sigma_n2):
    a = np.real(np.diag(A_h))
    if np.any(a <= 0):
        return np.inf
    return float(np.sum(np.log(a)) - len(a) * np.log(P_max / sigma_n2 + np.sum(a)))


def hybrid_cost(theta, H, P_max, sigma_n2) -> float:
    """Negative water-filled ZF sum rate (nats, up to a constant) for phases ``theta``."""
    try:
        return _hybrid_cost_from(_hybrid_parts(theta, H)[2], P_max, sigma_n2)
    except np.linalg.LinAlgError:
        return np.inf


def hybrid_gradient(theta, H, P_max, sigma_n2) -> np.ndarray:
    """``2 Im{[U W V] o Q*}`` with ``W = (A_h o I)^-1 - M/(P/sigma^2 + Tr A_h) I``."""
    return _hybrid_gradient_from(*_hybrid_parts(theta, H), H, P_max, sigma_n2)


def _hybrid_gradient_from(Q, C_h, A_h, H, P_max, sigma_n2):
    M = H.shape[0]
    a = np.real(np.diag(A_h))
    U = (Q @ C_h - H.conj().T) @ A_h
    V = (C_h @ A_h).conj().T
    weight = 1 / a - M / (P_max / sigma_n2 + np.sum(a))
    return 2 * np.imag((U * weight) @ V * Q.conj())


def zf_hybrid(H: EquivalentChannel | np.ndarray, Y_tt: np.ndarray, P_max: float = 1.0,
              sigma_n2: float = 1.0, sigma_x2: float = 1.0, S: int | None = None,
              step: float = 1e-2, max_iters: int = 5000, tol: float = 1e-6,
              rng: np.random.Generator | None = None, theta0: np.ndarray | None = None) -> PrecoderSolution:
    """Fully connected hybrid ZF: gradient descent on the phase-shifter angles,
    then water-filling over the users and a final power scaling.

    The step starts at ``step``, is halved until the cost does not increase
    and grows by 1.5x after each accepted step.
    """
    H = getattr(H, "H", H)
    M, N = H.shape
    S = M if S is None else S
    if not M <= S <= N:
        raise ValueError("need M <= S <= N")
    pseudo_inverse(H)
    if theta0 is None:
        rng = rng if rng is not None else np.random.default_rng()
        theta0 = rng.uniform(0, 2 * np.pi, size=(N, S))
    theta = np.array(theta0, dtype=float)

    parts = _hybrid_parts(theta, H)
    cost = _hybrid_cost_from(parts[2], P_max, sigma_n2)
    history = [cost]
    converged = False
    it = 0
    while it < max_iters:
        grad = _hybrid_gradient_from(*parts, H, P_max, sigma_n2)
        if np.linalg.norm(grad) < tol:
            converged = True
            break
        it += 1
        while step > 1e-14:
            trial = theta - step * grad
            try:
                trial_parts = _hybrid_parts(trial, H)
                trial_cost = _hybrid_cost_from(trial_parts[2], P_max, sigma_n2)
            except np.linalg.LinAlgError:
                trial_cost = np.inf
            if trial_cost <= cost:
                break
            step /= 2
        else:
            break
        theta, cost, parts = trial, trial_cost, trial_parts
        history.append(cost)
        step *= 1.5

    Q, C_h, A_h = parts
    a = np.real(np.diag(A_h))
    p2 = (P_max + np.sum(a) * sigma_n2) / (M * a) - sigma_n2
    if np.any(p2 < 0):
        raise AllocationError(f"water-filling asks for negative power {p2.min():.3e}")
    O = C_h @ A_h * np.sqrt(p2)
    R = np.sqrt(P_max / transmitted_power(Q @ O, Y_tt, sigma_x2)) * O
    B = Q @ R
    P_t = transmitted_power(B, Y_tt, sigma_x2)
    return PrecoderSolution(Architecture.HYBRID, B, P_t, sinr(H, B, sigma_n2, sigma_x2), Q=Q, R=R,
                            P_t=P_t, P_s=P_t, converged=converged, iterations=it, f_history=history)


# -- DMA ------------------------------------------------------------------------------

@dataclass(frozen=True)
class ZfObjectiveContext:
    """Everything the DMA objective needs besides the tunable reactances."""

    Yrs_tilde: np.ndarray
    Y_st: np.ndarray
    Y_ss_tilde: np.ndarray
    Y_tt: np.ndarray
    Y0: float
    sigma_x2: float = 1.0
    sigma_n2: float = 1.0
    P_max: float = 1.0
    loss_aware: bool = True

    @classmethod
    def from_admittances(cls, admit: AdmittanceSet, Y_wireless: np.ndarray, *, sigma_x2=1.0, sigma_n2=1.0,
                         P_max=1.0, loss_aware=True) -> "ZfObjectiveContext":
        Yrs_tilde = receive_normalization(admit.Y_r, admit.Y_rr) @ Y_wireless
        return cls(Yrs_tilde, admit.Y_st, admit.Y_ss_tilde, admit.Y_tt, admit.Y0,
                   sigma_x2, sigma_n2, P_max, loss_aware)

    @property
    def L(self) -> int:
        return self.Y_st.shape[0]


def dma_value_and_grad(Ys_im, ctx: ZfObjectiveContext, with_grad: bool = True):
    """Objective ``Re Tr{Y_q H^+ H^+^H}`` and its gradient over ``diag(Y_s^im)``.

    Returns ``(inf, None)`` when the inner matrix or the Gram matrix is singular.
    """
    x = np.asarray(Ys_im, float)
    x = np.diag(x) if x.ndim == 2 else x
    A = ctx.Y_ss_tilde + 1j * np.diag(x)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            lu = linalg.lu_factor(A, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) == 0:
            return np.inf, None
        G = linalg.lu_solve(lu, ctx.Y_st)            # A^-1 Y_st
        H = ctx.Yrs_tilde @ G
        Y_p = ctx.Y_tt - ctx.Y_st.T @ G
        S = H @ H.conj().T
        Hpinv = linalg.solve(S, H, assume_a="her").conj().T
    except (linalg.LinAlgError, ValueError):
        return np.inf, None

    y_in = np.diag(Y_p)
    with np.errstate(all="ignore"):
        C = 1 / (y_in + ctx.Y0)
        if ctx.loss_aware:
            gamma = (y_in - ctx.Y0) * C
            D = 1 / (1 - np.abs(gamma) ** 2)
        else:
            gamma = np.zeros_like(y_in)
            D = np.ones(len(y_in))
        Y_q = D[:, None] * Y_p
        W = Hpinv @ Hpinv.conj().T
        f = float(np.real(np.sum(Y_q * W.T)))
    if not (np.isfinite(f) and np.all(np.isfinite(C)) and np.all(np.isfinite(D))):
        return np.inf, None
    if not with_grad:
        return f, None

    Gt = linalg.lu_solve(lu, ctx.Y_st, trans=1)      # A^-T Y_st
    Kt = linalg.lu_solve(lu, ctx.Yrs_tilde.T, trans=1)  # (Y~_rs A^-1)^T
    Hq = (Y_q + Y_q.conj().T) / 2
    N = Y_p.shape[0]
    proj = np.eye(N) - Hpinv @ H

    # reflection term: feed-port power weights through dD/dy_in
    r = np.real(np.sum(Y_p * W.T, axis=1))
    kappa = D**2 * r * np.conj(gamma) * (1 - gamma) * C
    term_refl = -2 * np.imag(np.sum(G * kappa * Gt, axis=1))
    # Y_p term
    term_yp = -np.imag(np.sum((G @ (W * D[None, :])) * Gt, axis=1))
    # pseudo-inverse term
    Mh = (proj @ Hq @ W - W @ Hq) @ Hpinv
    term_h = 2 * np.imag(np.sum((G @ Mh) * Kt, axis=1))
    return f, term_refl + term_yp + term_h


def dma_objective(Ys_im, ctx: ZfObjectiveContext) -> float:
    return dma_value_and_grad(Ys_im, ctx, with_grad=False)[0]


def dma_gradient(Ys_im, ctx: ZfObjectiveContext) -> np.ndarray:
    f, g = dma_value_and_grad(Ys_im, ctx)
    if g is None:
        raise ModelError("objective is not finite at this configuration")
    return g


@dataclass(frozen=True)
class LossBehavior:
    loss_aware_objective: bool
    compensate: bool


def dma_loss_modes(mode: LossMode | str) -> LossBehavior:
    """What each insertion-loss treatment does during design and normalization."""
    mode = LossMode(mode)
    if mode == LossMode.WITH_LOSS:
        return LossBehavior(True, False)
    if mode == LossMode.NO_LOSS:
        return LossBehavior(False, False)
    return LossBehavior(False, True)


@dataclass(frozen=True)
class DmaSettings:
    starts: int = 3
    trust_region: optim.TrSettings = optim.TrSettings()


def initial_reactances(Y_ss: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw over ``[-|ref|, |ref|]`` with ``ref`` the mean of ``Im diag(Y_ss)``."""
    ref = abs(np.mean(np.imag(np.diag(Y_ss))))
    ref = ref if ref > 0 else np.mean(np.abs(np.diag(Y_ss)))
    return rng.uniform(-ref, ref, size=Y_ss.shape[0])


def optimize_reactances(ctx: ZfObjectiveContext, starts: list[np.ndarray], tr: optim.TrSettings):
    """Run the trust-region solver on ``log f`` from each start; keep the best.

    The log leaves the minimizers unchanged and makes the gradient tolerance
    independent of the channel scale.
    """
    best = None
    for x0 in starts:
        cache = {}

        def value(x):
            key = x.tobytes()
            if key not in cache:
                cache.clear()
                cache[key] = dma_value_and_grad(x, ctx)
            f, _ = cache[key]
            return np.log(f) if f > 0 else np.inf

        def grad(x):
            value(x)
            f, g = cache[x.tobytes()]
            return g / f

        if not np.isfinite(value(np.asarray(x0, float))):
            continue
        out = optim.minimize(value, grad, x0, tr)
        if best is None or out.f_best < best.f_best:
            best = out
    if best is None:
        raise ModelError("objective is not finite at any starting point")
    return best


def zf_dma(admit: AdmittanceSet, Y_wireless: np.ndarray, *, P_max: float = 1.0, sigma_x2: float = 1.0,
           sigma_n2: float = 1.0, loss_mode: LossMode | str = LossMode.WITH_LOSS,
           settings: DmaSettings | None = None, rng: np.random.Generator | None = None,
           extra_starts: list | None = None, design_admit: AdmittanceSet | None = None,
           Ys_im: np.ndarray | None = None) -> PrecoderSolution:
    """Optimize the element reactances for ZF, then scale ``B``.

    Passing ``Ys_im`` skips the optimization and only forms the precoder,
    e.g. to derive the compensated solution from a no-loss run.
    ``design_admit`` is the (possibly ablated) model the optimizer sees; the
    returned SINRs and powers are always evaluated on ``admit``.  When the two
    differ, ``B`` is rescaled so that the true supplied power is ``P_max``.
    """
    settings = settings or DmaSettings()
    rng = rng if rng is not None else np.random.default_rng()
    mode = LossMode(loss_mode)
    behavior = dma_loss_modes(mode)
    design = design_admit if design_admit is not None else admit
    ctx = ZfObjectiveContext.from_admittances(design, Y_wireless, sigma_x2=sigma_x2, sigma_n2=sigma_n2,
                                              P_max=P_max, loss_aware=behavior.loss_aware_objective)
    if Ys_im is None:
        starts = [np.asarray(s, float) for s in (extra_starts or [])]
        starts += [initial_reactances(design.Y_ss, rng) for _ in range(settings.starts)]
        out = optimize_reactances(ctx, starts, settings.trust_region)
        x, converged, iterations = out.x_best, out.converged, out.iterations
        history = [float(np.exp(v)) for v in out.f_history]
    else:
        x, converged, iterations, history = np.asarray(Ys_im, float), True, 0, []

    # B from the design model, normalized with that model's power measure
    f, _ = dma_value_and_grad(x, ctx, with_grad=False)
    Yr_t = receive_normalization(design.Y_r, design.Y_rr)
    G = linalg.solve(design.Y_ss_tilde + 1j * np.diag(x), design.Y_st)
    H_design = Yr_t @ Y_wireless @ G
    B = np.sqrt(P_max / (sigma_x2 / 2 * f)) * pseudo_inverse(H_design)

    # evaluate on the true model
    Yr_t = receive_normalization(admit.Y_r, admit.Y_rr)
    H = Yr_t @ Y_wireless @ linalg.solve(admit.Y_ss_tilde + 1j * np.diag(x), admit.Y_st)
    Y_p = transmitter_admittance_dma(admit, x)
    _, Y_q = reflection_and_supply(Y_p, admit.Y0)
    if behavior.compensate or design is not admit:
        B = B * np.sqrt(P_max / supplied_power(B, Y_q, sigma_x2))
    P_t = transmitted_power(B, Y_p, sigma_x2)
    P_s = supplied_power(B, Y_q, sigma_x2)
    achieved = P_t if mode == LossMode.NO_LOSS else P_s
    return PrecoderSolution(Architecture.DMA, B, achieved, sinr(H, B, sigma_n2, sigma_x2), Ys_im=x,
                            P_t=P_t, P_s=P_s, converged=converged, iterations=iterations,
                            f_history=history, loss_mode=mode)
