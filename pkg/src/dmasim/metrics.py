"""SINR, Shannon rates and per-trial records."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def sinr(H: np.ndarray, B: np.ndarray, sigma_n2: float = 1.0, sigma_x2: float = 1.0) -> np.ndarray:
    """Per-user SINR of the linear downlink ``y = H B x + n``."""
    H = getattr(H, "H", H)
    resp = np.abs(H @ B) ** 2
    signal = np.diag(resp)
    interference = resp.sum(axis=1) - signal
    return signal / (sigma_n2 / sigma_x2 + interference)


def per_user_rate(gammas) -> np.ndarray:
    gammas = np.asarray(gammas, float)
    if np.any(gammas < 0):
        raise ValueError("SINR must be non-negative")
    return np.log2(1 + gammas)


@dataclass
class TrialRecord:
    scenario: str
    arch: str
    trial: int
    seed: int
    M: int
    N: int
    L: int
    S: int = 0
    loss_mode: str = ""
    coupling_mode: str = ""
    spacing_wl: float = float("nan")
    rate_users: list = field(default_factory=list)
    P_t: float = float("nan")
    P_s: float = float("nan")
    converged: bool = True
    iters: int = 0
    error: str = ""
    wall_time: float = 0.0
    config_hash: str = ""

    @property
    def rate_user_mean(self) -> float:
        return float(np.mean(self.rate_users)) if len(self.rate_users) else float("nan")
