"""Equivalent channels, transmitter admittance, reflection and power bookkeeping."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .netmodel import AdmittanceSet, Architecture

#: condition number above which a solve is flagged
COND_WARN = 1e12


class ModelError(ArithmeticError):
    """A matrix that the network model needs to invert is singular."""


class ReflectionWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class EquivalentChannel:
    H: np.ndarray
    architecture: Architecture
    Y_tilde_r: np.ndarray
    condition: float = 1.0
    diagnostics: tuple = ()

    @property
    def M(self) -> int:
        return self.H.shape[0]

    @property
    def N(self) -> int:
        return self.H.shape[1]


@dataclass(frozen=True)
class PowerReport:
    P_t: float
    P_s: float
    Gamma: np.ndarray
    Y_p: np.ndarray
    Y_q: np.ndarray
    diagnostics: tuple = field(default=())


def _diag_vector(Ys_im) -> np.ndarray:
    Ys_im = np.asarray(Ys_im, dtype=float)
    return np.diag(Ys_im).copy() if Ys_im.ndim == 2 else Ys_im


def receive_normalization(Y_r: np.ndarray, Y_rr: np.ndarray) -> np.ndarray:
    """``sqrt(Re{y_r}/2) (Y_r + Y_rr)^-1`` so that ``|y|^2`` is received power."""
    g = np.real(np.diag(Y_r))
    if np.any(g <= 0):
        raise ModelError("user loads need a positive real part")
    try:
        inv = linalg.inv(Y_r + Y_rr)
    except linalg.LinAlgError as exc:
        raise ModelError("Y_r + Y_rr is singular") from exc
    return np.sqrt(g / 2)[:, None] * inv


def _factor(A: np.ndarray, what: str):
    cond = np.linalg.cond(A)
    if not np.isfinite(cond):
        raise ModelError(f"{what} is singular")
    diag = ()
    if cond > COND_WARN:
        diag = (f"{what} is ill-conditioned (cond ~ {cond:.2e})",)
    with warnings.catch_warnings():
        warnings.simplefilter("error", linalg.LinAlgWarning)
        try:
            lu = linalg.lu_factor(A, check_finite=False)
        except (linalg.LinAlgError, linalg.LinAlgWarning) as exc:
            raise ModelError(f"{what} is singular (cond ~ {cond:.2e})") from exc
    return lu, cond, diag


def inner_matrix(admit: AdmittanceSet, Ys_im) -> np.ndarray:
    """``j Y_s^im + R_s I + Y_ss``, i.e. ``Y_s + Y_ss``."""
    return 1j * np.diag(_diag_vector(Ys_im)) + admit.Y_ss_tilde


def equivalent_channel_fd(admit: AdmittanceSet, Y_wireless: np.ndarray) -> EquivalentChannel:
    Yr_t = receive_normalization(admit.Y_r, admit.Y_rr)
    return EquivalentChannel(-Yr_t @ Y_wireless, Architecture.FULL_DIGITAL, Yr_t)


def equivalent_channel_dma(admit: AdmittanceSet, Y_wireless: np.ndarray, Ys_im) -> EquivalentChannel:
    """``Y~_r Y_rs (j Y_s^im + Y~_ss)^-1 Y_st`` via one LU solve."""
    Yr_t = receive_normalization(admit.Y_r, admit.Y_rr)
    lu, cond, diag = _factor(inner_matrix(admit, Ys_im), "jY_s^im + Y~_ss")
    H = (Yr_t @ Y_wireless) @ linalg.lu_solve(lu, admit.Y_st)
    return EquivalentChannel(H, Architecture.DMA, Yr_t, cond, diag)


def transmitter_admittance_dma(admit: AdmittanceSet, Ys_im) -> np.ndarray:
    """``Y_p = Y_tt - Y_st^T (Y_s + Y_ss)^-1 Y_st``."""
    lu, _, _ = _factor(inner_matrix(admit, Ys_im), "jY_s^im + Y~_ss")
    return admit.Y_tt - admit.Y_st.T @ linalg.lu_solve(lu, admit.Y_st)


def reflection_coefficients(Y_p: np.ndarray, Y0: float) -> np.ndarray:
    """Feed reflection ``(y_in - Y0)/(y_in + Y0)`` with ``y_in = diag(Y_p)``."""
    y_in = np.diag(Y_p)
    den = y_in + Y0
    if np.any(den == 0):
        raise ModelError("Y_in + Y0 I is singular")
    return (y_in - Y0) / den


def reflection_and_supply(Y_p: np.ndarray, Y0: float):
    """Return ``(Gamma, Y_q)`` where ``Gamma`` is diagonal and
    ``Y_q = (I - Gamma^H Gamma)^-1 Y_p``.

    Cross-waveguide terms of ``Y_p`` are ignored when forming the feed input
    admittance.
    """
    gamma = reflection_coefficients(Y_p, Y0)
    mag2 = np.abs(gamma) ** 2
    if np.any(np.abs(1 - mag2) <= 1e-12):
        raise ModelError("|Gamma| = 1: supplied power is unbounded")
    if np.any(mag2 > 1 + 1e-12):
        warnings.warn(f"|Gamma| > 1 at feeds {np.flatnonzero(mag2 > 1).tolist()}", ReflectionWarning, stacklevel=2)
    Y_q = Y_p / (1 - mag2)[:, None]
    return np.diag(gamma), Y_q


def transmitted_power(B: np.ndarray, Y: np.ndarray, sigma_x2: float = 1.0) -> float:
    """``(sigma_x^2/2) Tr{Re{B^H Y B}}``.  For FD/hybrid pass ``Y_tt``."""
    return float(sigma_x2 / 2 * np.real(np.trace(B.conj().T @ Y @ B)))


def supplied_power(B: np.ndarray, Y_q: np.ndarray, sigma_x2: float = 1.0) -> float:
    return transmitted_power(B, Y_q, sigma_x2)


def power_report(admit: AdmittanceSet, B: np.ndarray, Ys_im=None, sigma_x2: float = 1.0) -> PowerReport:
    """Transmitted and supplied power of precoder ``B``.

    FD/hybrid arrays (``Ys_im is None``) are fed directly, so ``P_s = P_t``
    and ``Gamma = 0``.
    """
    if Ys_im is None:
        P_t = transmitted_power(B, admit.Y_tt, sigma_x2)
        N = admit.Y_tt.shape[0]
        return PowerReport(P_t, P_t, np.zeros((N, N), complex), admit.Y_tt, admit.Y_tt)
    Y_p = transmitter_admittance_dma(admit, Ys_im)
    gamma, Y_q = reflection_and_supply(Y_p, admit.Y0)
    return PowerReport(transmitted_power(B, Y_p, sigma_x2), supplied_power(B, Y_q, sigma_x2), gamma, Y_p, Y_q)
