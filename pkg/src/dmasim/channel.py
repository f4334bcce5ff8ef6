"""Correlated Rayleigh draws of the wireless admittance block."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .netmodel import PhysicalConstants


class CovarianceError(ValueError):
    pass


def isotropic_kernel(k: float, dist: np.ndarray) -> np.ndarray:
    """Isotropic 3-D scattering correlation sin(kd)/(kd)."""
    return np.sinc(k * dist / np.pi)


def reference_variance(constants: PhysicalConstants, sigma_n2: float) -> float:
    """Per-port variance 2 k^2 w^2 eps^2 sigma_n^2 / (9 pi^2) that calibrates the reference link."""
    k, w, eps = constants.wavenumber, constants.angular_frequency, constants.permittivity
    return 2 * (k * w * eps) ** 2 * sigma_n2 / (9 * np.pi**2)


def build_covariance(positions, constants: PhysicalConstants, sigma_n2: float = 1.0,
                     kernel=isotropic_kernel) -> np.ndarray:
    """Spatial covariance of one user's channel row over the transmit-side ports.

    ``positions`` is a ``(P, 3)`` array or an :class:`ArrayGeometry`.
    ``kernel(k, d)`` must return 1 at ``d = 0``.
    """
    positions = getattr(positions, "element_positions", positions)
    positions = np.atleast_2d(np.asarray(positions, float))
    if len(positions) < 1:
        raise CovarianceError("need at least one port")
    dist = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=-1)
    sigma = reference_variance(constants, sigma_n2) * kernel(constants.wavenumber, dist)
    sigma = (sigma + sigma.conj().T) / 2
    _, lam_min, trace = _eig_check(sigma)
    if lam_min < -1e-10 * trace:
        raise CovarianceError(f"covariance is not PSD (min eigenvalue {lam_min:.3e}, trace {trace:.3e})")
    return sigma.astype(complex)


def _eig_check(sigma):
    lam = np.linalg.eigvalsh(sigma)
    return lam, lam.min(), float(np.trace(sigma).real)


def covariance_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Hermitian square root; small negative eigenvalues are clipped to zero."""
    lam, vec = np.linalg.eigh(sigma)
    trace = float(np.trace(sigma).real)
    if lam.min() < -1e-10 * max(trace, np.finfo(float).tiny):
        raise CovarianceError(f"covariance is not PSD (min eigenvalue {lam.min():.3e})")
    lam = np.clip(lam, 0, None)
    return (vec * np.sqrt(lam)) @ vec.conj().T


@dataclass(frozen=True)
class ChannelSpec:
    M: int
    covariance: np.ndarray
    delta: float
    sigma_n2: float = 1.0
    sigma_x2: float = 1.0
    sqrt_cov: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=complex)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("covariance must be square")
        if not np.allclose(cov, cov.conj().T, rtol=0, atol=1e-12 * max(np.abs(cov).max(), 1)):
            raise CovarianceError("covariance must be Hermitian")
        if self.delta < 0 or self.sigma_n2 <= 0 or self.sigma_x2 <= 0:
            raise ValueError("delta must be >= 0 and noise/symbol powers > 0")
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "sqrt_cov", covariance_sqrt(cov))

    @property
    def P(self) -> int:
        return self.covariance.shape[0]


@dataclass(frozen=True)
class ChannelRealization:
    Y_wireless: np.ndarray
    seed: int
    trial_index: int


def trial_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Generator keyed on ``(master_seed, *keys)``; independent of call order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(master_seed), *map(int, keys)])))


def draw_realization(spec: ChannelSpec, master_seed: int, trial: int, *keys: int) -> ChannelRealization:
    """Rows ``F_m^T`` with ``F_m ~ CN(0, delta * Sigma)``.

    Extra ``keys`` (e.g. a sweep-point index) are folded into the seed.
    """
    rng = trial_rng(master_seed, trial, *keys)
    z = (rng.standard_normal((spec.M, spec.P)) + 1j * rng.standard_normal((spec.M, spec.P))) / np.sqrt(2)
    Y = np.sqrt(spec.delta) * z @ spec.sqrt_cov.T
    return ChannelRealization(Y, int(master_seed), int(trial))


def calibrate_reference_snr(constants: PhysicalConstants, sigma_n2: float, delta: float,
                            sigma_y2: float | None = None) -> float:
    """Nominal SNR of the one-antenna, one-user, conjugate-matched reference link.

    With the default ``sigma_y2`` from :func:`reference_variance` this is
    ``delta`` up to rounding.
    """
    if sigma_y2 is None:
        sigma_y2 = reference_variance(constants, sigma_n2)
    k, w, eps = constants.wavenumber, constants.angular_frequency, constants.permittivity
    return delta * (sigma_y2 / sigma_n2) * 9 * np.pi**2 / (2 * (k * w * eps) ** 2)


def db_to_linear(db: float) -> float:
    return 10 ** (db / 10)
