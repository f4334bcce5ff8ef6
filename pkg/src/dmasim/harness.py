"""Scenario presets, Monte Carlo execution and result files."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml
from scipy import linalg

from . import optim
from .channel import ChannelSpec, build_covariance, db_to_linear, draw_realization, trial_rng
from .equivchan import ModelError, equivalent_channel_fd
from .metrics import TrialRecord, per_user_rate
from .netmodel import Architecture, CouplingMode, PhysicalConstants, UserSpacing, assemble, planar_array
from .precoder import AllocationError, DmaSettings, LossMode, RankError, zf_dma, zf_fd, zf_hybrid

log = logging.getLogger(__name__)

CSV_HEADER = ("scenario,arch,loss_mode,coupling_mode,M,N,S,L,spacing_wl,trial,seed,"
              "rate_user_mean,rate_users,P_t,P_s,converged,iters,error").split(",")

WORKERS_ENV = "DMASIM_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "custom"
    M: int = 5
    N: int = 6
    S: int | None = None
    elements_per_waveguide: tuple = (2, 4, 6, 8, 10)
    element_spacing_wl: tuple = (0.5,)
    waveguide_spacing_wl: float = 1.0
    delta_dB: float = 13.0
    P_t_max: float = 1.0
    sigma_x2: float = 1.0
    sigma_n2: float = 1.0
    R_s: float = 0.0
    architectures: tuple = ("fd", "hybrid", "dma")
    loss_mode: tuple = ("with_loss", "no_loss", "compensated")
    coupling_mode: tuple = ("full",)
    trials: int = 200
    master_seed: int = 0
    frequency: float = 10e9
    Y0: float = 35.33
    waveguide_width_wl: float = 0.73
    waveguide_height_wl: float = 0.167
    termination: float = 0.0
    user_spacing_mode: str = "free_space"
    dma_starts: int = 3
    tr_initial_radius: float = 1.0
    tr_max_radius: float = 1e3
    tr_eta_accept: float = 0.1
    tr_grad_tol: float = 1e-6
    tr_max_iters: int = 500
    tr_f_tol: float = 0.0
    tr_hessian: str = "bfgs"
    hybrid_step: float = 1e-2
    hybrid_max_iters: int = 5000
    hybrid_tol: float = 1e-6
    statistic: str = "mean"
    # rectangular-FD matching search
    fd_rows: int = 6
    fd_columns: tuple = (1, 2, 3, 4)
    fd_column_spacing_wl: float = 5.0
    fd_row_spacing_wl: float = 1.0
    aperture_wl: float = 5.0
    max_elements_per_waveguide: int = 40
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        for name in ("elements_per_waveguide", "element_spacing_wl", "architectures",
                     "loss_mode", "coupling_mode", "fd_columns"):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        for name in ("elements_per_waveguide", "element_spacing_wl", "architectures"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        if any(s <= 0 for s in self.element_spacing_wl) or self.waveguide_spacing_wl <= 0:
            raise ConfigError("spacings must be positive")
        if any(int(e) < 1 for e in self.elements_per_waveguide):
            raise ConfigError("elements_per_waveguide entries must be >= 1")
        if self.M < 1 or self.N < 1:
            raise ConfigError("M and N must be >= 1")
        try:
            [Architecture(a) for a in self.architectures]
            [LossMode(m) for m in self.loss_mode]
            [CouplingMode(m) for m in self.coupling_mode]
            UserSpacing(self.user_spacing_mode)
            optim.HessianMode(self.tr_hessian)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.statistic not in ("mean", "median"):
            raise ConfigError("statistic must be 'mean' or 'median'")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError("format must be 'csv' or 'jsonl'")

    @property
    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(frequency=self.frequency, characteristic_admittance=self.Y0)

    @property
    def delta(self) -> float:
        return db_to_linear(self.delta_dB)

    @property
    def chains(self) -> int:
        return self.S if self.S is not None else self.N

    def tr_settings(self) -> optim.TrSettings:
        return optim.TrSettings(self.tr_initial_radius, self.tr_max_radius, self.tr_eta_accept,
                                self.tr_grad_tol, self.tr_max_iters, self.tr_hessian, f_tol=self.tr_f_tol)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    def digest(self) -> str:
        d = self.to_dict()
        d.pop("output")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:12]


PRESETS = {
    "fig2": dict(scenario="fig2", M=5, N=6, elements_per_waveguide=(2, 4, 6, 8, 10), element_spacing_wl=(0.5,),
                 waveguide_spacing_wl=1.0, delta_dB=13.0, architectures=("fd", "hybrid", "dma"),
                 loss_mode=("with_loss", "no_loss", "compensated"), coupling_mode=("full",)),
    "fig3": dict(scenario="fig3", M=5, N=6, fd_rows=6, fd_columns=(1, 2, 3, 4), fd_column_spacing_wl=5.0,
                 fd_row_spacing_wl=1.0, aperture_wl=5.0, waveguide_spacing_wl=1.0, delta_dB=13.0,
                 architectures=("fd", "hybrid", "dma"), loss_mode=("with_loss",), coupling_mode=("full",)),
    "fig4": dict(scenario="fig4", M=4, N=4, elements_per_waveguide=(2, 4, 6, 8, 10), element_spacing_wl=(0.5, 0.2),
                 waveguide_spacing_wl=1.0, delta_dB=13.0, architectures=("dma",), loss_mode=("with_loss",),
                 coupling_mode=("full", "no_air", "no_coupling")),
}
PRESET_ALIASES = {"fig2sweep": "fig2", "fig3match": "fig3", "fig4coupling": "fig4"}
REQUIRED_CUSTOM = ("M", "N", "elements_per_waveguide")
FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def preset(name: str) -> dict:
    key = PRESET_ALIASES.get(name.lower(), name.lower())
    if key == "custom":
        return {"scenario": "custom"}
    if key not in PRESETS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(PRESETS)} or custom")
    return dict(PRESETS[key])


def load_config_file(path) -> dict:
    """Read a flat YAML mapping; unknown keys are errors."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    data = yaml.safe_load(path.read_text()) or {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a flat key: value mapping")
    unknown = sorted(set(data) - FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def make_config(scenario: str | None = None, file_values: dict | None = None, **overrides) -> ExperimentConfig:
    """Preset < config file < explicit overrides.  A custom scenario must name
    every key in ``REQUIRED_CUSTOM``."""
    file_values = dict(file_values or {})
    name = scenario or file_values.get("scenario") or "custom"
    values = preset(name)
    values.update(file_values)
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["scenario"] = preset(name)["scenario"]
    if values["scenario"] == "custom":
        missing = [k for k in REQUIRED_CUSTOM if k not in file_values and k not in overrides]
        if missing:
            raise ConfigError(f"missing required config field(s): {', '.join(missing)}")
    unknown = sorted(set(values) - FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# -- one Monte Carlo work unit --------------------------------------------------------

_ERRORS = {RankError: "rank", AllocationError: "allocation", ModelError: "model",
           optim.OptimizationError: "optimizer", linalg.LinAlgError: "linalg",
           np.linalg.LinAlgError: "linalg"}


def _error_code(exc: Exception) -> str:
    for cls, code in _ERRORS.items():
        if isinstance(exc, cls):
            return code
    raise exc


def _record(cfg, arch, point, trial, L, N, S, sol=None, loss_mode="", coupling_mode="", error="", t0=None):
    rec = TrialRecord(scenario=cfg.scenario, arch=arch, trial=trial, seed=cfg.master_seed, M=cfg.M, N=N, L=L, S=S,
                      loss_mode=loss_mode, coupling_mode=coupling_mode, spacing_wl=point[1], error=error,
                      config_hash=cfg.digest())
    if sol is not None:
        rec.rate_users = [float(r) for r in per_user_rate(sol.gamma_per_user)]
        rec.P_t, rec.P_s = float(sol.P_t), float(sol.P_s)
        rec.converged, rec.iters = bool(sol.converged), int(sol.iterations)
    else:
        rec.converged = False
    if t0 is not None:
        rec.wall_time = time.perf_counter() - t0
    return rec


def sweep_points(cfg: ExperimentConfig) -> list:
    return [(i, float(s), int(e)) for i, (s, e) in
            enumerate((s, e) for s in cfg.element_spacing_wl for e in cfg.elements_per_waveguide)]


def run_trial(cfg: ExperimentConfig, point: tuple, trial: int) -> list[TrialRecord]:
    """All architectures for one sweep point and one channel draw.

    Every architecture sees the same channel realization, keyed on
    ``(master_seed, trial, point index)``.
    """
    idx, spacing, epw = point
    c = cfg.constants
    geo_kw = dict(element_spacing_wl=spacing, waveguide_spacing_wl=cfg.waveguide_spacing_wl,
                  width_wl=cfg.waveguide_width_wl, height_wl=cfg.waveguide_height_wl)
    dma_geo = planar_array(Architecture.DMA, cfg.N, epw, c, **geo_kw)
    L = dma_geo.element_count
    spec = ChannelSpec(cfg.M, build_covariance(dma_geo, c, cfg.sigma_n2), cfg.delta, cfg.sigma_n2, cfg.sigma_x2)
    F = draw_realization(spec, cfg.master_seed, trial, idx).Y_wireless
    power = dict(P_max=cfg.P_t_max, sigma_x2=cfg.sigma_x2, sigma_n2=cfg.sigma_n2)
    records = []

    archs = [Architecture(a) for a in cfg.architectures]
    if Architecture.FULL_DIGITAL in archs or Architecture.HYBRID in archs:
        fd_geo = planar_array(Architecture.FULL_DIGITAL, cfg.N, epw, c, **geo_kw)
        fd_admit = assemble(fd_geo, c, cfg.M, user_spacing_mode=cfg.user_spacing_mode)
        H = equivalent_channel_fd(fd_admit, F)
    for arch in archs:
        t0 = time.perf_counter()
        if arch == Architecture.FULL_DIGITAL:
            try:
                sol = zf_fd(H, fd_admit.Y_tt, cfg.P_t_max, cfg.sigma_x2, cfg.sigma_n2)
                records.append(_record(cfg, "fd", point, trial, L, L, L, sol, t0=t0))
            except Exception as exc:  # noqa: BLE001 - trial-level failures are data
                records.append(_record(cfg, "fd", point, trial, L, L, L, error=_error_code(exc), t0=t0))
        elif arch == Architecture.HYBRID:
            S = cfg.chains
            try:
                sol = zf_hybrid(H, fd_admit.Y_tt, S=S, step=cfg.hybrid_step, max_iters=cfg.hybrid_max_iters,
                                tol=cfg.hybrid_tol, rng=trial_rng(cfg.master_seed, trial, idx, 1),
                                P_max=cfg.P_t_max, sigma_n2=cfg.sigma_n2, sigma_x2=cfg.sigma_x2)
                records.append(_record(cfg, "hybrid", point, trial, L, S, S, sol, t0=t0))
            except Exception as exc:  # noqa: BLE001
                records.append(_record(cfg, "hybrid", point, trial, L, S, S, error=_error_code(exc), t0=t0))
        else:
            records.extend(_run_dma(cfg, point, trial, dma_geo, F, power))
    return records


def _run_dma(cfg, point, trial, geo, F, power):
    idx = point[0]
    c = cfg.constants
    build = dict(R_s=cfg.R_s, termination=cfg.termination, user_spacing_mode=cfg.user_spacing_mode)
    true_admit = assemble(geo, c, cfg.M, **build)
    settings = DmaSettings(cfg.dma_starts, cfg.tr_settings())
    L, N = geo.element_count, geo.waveguide_count
    modes = [LossMode(m) for m in cfg.loss_mode]
    records = []
    for ci, cmode in enumerate(CouplingMode(m) for m in cfg.coupling_mode):
        design = true_admit if cmode == CouplingMode.FULL else assemble(geo, c, cfg.M, coupling_mode=cmode, **build)
        common = dict(design_admit=design, **power)
        x_noloss = None
        if LossMode.NO_LOSS in modes or LossMode.COMPENSATED in modes:
            t0 = time.perf_counter()
            try:
                sol = zf_dma(true_admit, F, loss_mode=LossMode.NO_LOSS, settings=settings,
                             rng=trial_rng(cfg.master_seed, trial, idx, 2, ci, 0), **common)
                x_noloss = sol.Ys_im
                if LossMode.NO_LOSS in modes:
                    records.append(_record(cfg, "dma", point, trial, L, N, N, sol, "no_loss", cmode.value, t0=t0))
                if LossMode.COMPENSATED in modes:
                    comp = zf_dma(true_admit, F, loss_mode=LossMode.COMPENSATED, Ys_im=x_noloss, **common)
                    comp.converged, comp.iterations = sol.converged, sol.iterations
                    records.append(_record(cfg, "dma", point, trial, L, N, N, comp, "compensated", cmode.value,
                                           t0=t0))
            except Exception as exc:  # noqa: BLE001
                code = _error_code(exc)
                for m in (LossMode.NO_LOSS, LossMode.COMPENSATED):
                    if m in modes:
                        records.append(_record(cfg, "dma", point, trial, L, N, N, None, m.value, cmode.value,
                                               error=code, t0=t0))
        if LossMode.WITH_LOSS in modes:
            t0 = time.perf_counter()
            try:
                sol = zf_dma(true_admit, F, loss_mode=LossMode.WITH_LOSS, settings=settings,
                             rng=trial_rng(cfg.master_seed, trial, idx, 2, ci, 1),
                             extra_starts=[x_noloss] if x_noloss is not None else None, **common)
                records.append(_record(cfg, "dma", point, trial, L, N, N, sol, "with_loss", cmode.value, t0=t0))
            except Exception as exc:  # noqa: BLE001
                records.append(_record(cfg, "dma", point, trial, L, N, N, None, "with_loss", cmode.value,
                                       error=_error_code(exc), t0=t0))
    return records


def _unit(args):
    cfg, point, trial = args
    return run_trial(cfg, point, trial)


def worker_count(parallel: int | None = None) -> int:
    if parallel is None:
        parallel = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(parallel))


def _map(fn, units, parallel):
    if parallel <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(fn, units, chunksize=1))


def run_scenario(cfg: ExperimentConfig, parallel: int | None = None) -> list[TrialRecord]:
    """Monte Carlo over every sweep point and trial.  Output order is fixed by
    ``(point, trial)`` whatever the worker count."""
    units = [(cfg, point, t) for point in sweep_points(cfg) for t in range(cfg.trials)]
    results = _map(_unit, units, worker_count(parallel))
    return [rec for recs in results for rec in recs]


# -- rectangular-FD matching search ---------------------------------------------------

def monotone_search(value, target: float, lo: int, hi: int):
    """Smallest ``n`` in ``[lo, hi]`` with ``value(n) >= target`` for a
    non-decreasing ``value``; ``None`` if even ``value(hi)`` falls short."""
    cache = {}

    def v(n):
        if n not in cache:
            cache[n] = value(n)
        return cache[n]

    if v(hi) < target:
        return None, cache
    while lo < hi:
        mid = (lo + hi) // 2
        if v(mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo, cache


def _aggregate(values, statistic):
    values = [v for v in values if np.isfinite(v)]
    if not values:
        return float("nan")
    return float(np.median(values) if statistic == "median" else np.mean(values))


def _fd_rect_rate(cfg, columns, point_key):
    c = cfg.constants
    geo = planar_array(Architecture.FULL_DIGITAL, cfg.fd_rows, columns, c,
                       element_spacing_wl=cfg.fd_column_spacing_wl, waveguide_spacing_wl=cfg.fd_row_spacing_wl)
    admit = assemble(geo, c, cfg.M, user_spacing_mode=cfg.user_spacing_mode)
    spec = ChannelSpec(cfg.M, build_covariance(geo, c, cfg.sigma_n2), cfg.delta, cfg.sigma_n2, cfg.sigma_x2)
    rates = []
    for t in range(cfg.trials):
        F = draw_realization(spec, cfg.master_seed, t, *point_key).Y_wireless
        try:
            sol = zf_fd(equivalent_channel_fd(admit, F), admit.Y_tt, cfg.P_t_max, cfg.sigma_x2, cfg.sigma_n2)
            rates.append(float(np.mean(per_user_rate(sol.gamma_per_user))))
        except RankError:
            continue
    return _aggregate(rates, cfg.statistic)


def _fixed_aperture_rate(cfg, arch, epw, parallel):
    spacing = cfg.aperture_wl / epw
    sub = dataclasses.replace(cfg, elements_per_waveguide=(epw,), element_spacing_wl=(spacing,),
                              architectures=(arch,), loss_mode=("with_loss",), coupling_mode=("full",),
                              master_seed=cfg.master_seed + 7919 * epw)
    recs = [r for r in run_scenario(sub, parallel) if r.arch == arch and not r.error]
    return _aggregate([r.rate_user_mean for r in recs], cfg.statistic)


def match_fd_search(cfg: ExperimentConfig, parallel: int | None = None, rate_fn=None) -> list[dict]:
    """For each rectangular FD size, the smallest hybrid and DMA element
    count (``N`` chains, aperture fixed) whose rate reaches the FD rate.

    ``rate_fn(arch, elements_per_waveguide)`` can replace the Monte Carlo
    estimate, e.g. in tests.
    """
    if rate_fn is None:
        def rate_fn(arch, epw):
            return _fixed_aperture_rate(cfg, arch, epw, parallel)
    rows = []
    for columns in cfg.fd_columns:
        target = _fd_rect_rate(cfg, int(columns), (1000 + int(columns),))
        row = {"fd_columns": int(columns), "fd_antennas": cfg.fd_rows * int(columns), "fd_rate": target}
        for arch in ("hybrid", "dma"):
            if arch not in cfg.architectures:
                continue
            lo = max(1, -(-cfg.M // cfg.N)) if arch == "dma" else max(1, -(-cfg.chains // cfg.N))
            epw, cache = monotone_search(lambda e: rate_fn(arch, e), target, lo, cfg.max_elements_per_waveguide)
            row[f"required_L_{arch}"] = None if epw is None else epw * cfg.N
            row[f"rate_{arch}"] = cache[epw] if epw is not None else cache[cfg.max_elements_per_waveguide]
            row[f"matched_{arch}"] = epw is not None
        rows.append(row)
    return rows


# -- output ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def record_row(rec: TrialRecord) -> dict:
    return {
        "scenario": rec.scenario, "arch": rec.arch, "loss_mode": rec.loss_mode, "coupling_mode": rec.coupling_mode,
        "M": rec.M, "N": rec.N, "S": rec.S, "L": rec.L, "spacing_wl": rec.spacing_wl, "trial": rec.trial,
        "seed": rec.seed, "rate_user_mean": rec.rate_user_mean, "rate_users": list(rec.rate_users),
        "P_t": rec.P_t, "P_s": rec.P_s, "converged": rec.converged, "iters": rec.iters, "error": rec.error,
    }


def format_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        row = record_row(rec)
        row["rate_users"] = ";".join(repr(float(r)) for r in row["rate_users"])
        writer.writerow([_fmt(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


def format_jsonl(records) -> str:
    lines = []
    for rec in records:
        row = record_row(rec)
        row["config_hash"] = rec.config_hash
        row["wall_time"] = rec.wall_time
        lines.append(json.dumps(row, allow_nan=True))
    return "\n".join(lines) + "\n"


def emit_results(records, fmt: str = "csv", path=None) -> str:
    """Serialize ``records``; write to ``path`` when given.  Returns the text."""
    if not records:
        raise ValueError("no records to emit")
    text = format_csv(records) if fmt == "csv" else format_jsonl(records)
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_csv(text: str) -> list[dict]:
    """Inverse of :func:`format_csv` for the numeric columns."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        for k in ("M", "N", "S", "L", "trial", "seed", "iters"):
            row[k] = int(row[k])
        for k in ("spacing_wl", "rate_user_mean", "P_t", "P_s"):
            row[k] = float(row[k])
        row["rate_users"] = [float(v) for v in row["rate_users"].split(";")] if row["rate_users"] else []
        row["converged"] = row["converged"] == "1"
        rows.append(row)
    return rows


def format_match_table(rows) -> str:
    cols = ["fd_columns", "fd_antennas", "fd_rate", "required_L_hybrid", "rate_hybrid", "matched_hybrid",
            "required_L_dma", "rate_dma", "matched_dma"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow(["" if r.get(k) is None else _fmt(r.get(k)) for k in cols])
    return buf.getvalue()


# -- gradient audit over random small DMA instances -----------------------------------

def random_dma_instance(rng: np.random.Generator, loss_aware: bool = True):
    """Random small DMA problem (``L <= 10``, ``N <= 4``, ``M <= 3``) and a
    feasible reactance vector."""
    from .precoder import ZfObjectiveContext, initial_reactances

    c = PhysicalConstants()
    while True:
        N = int(rng.integers(1, 5))
        epw = int(rng.integers(1, 10 // N + 1))
        M = int(rng.integers(1, min(3, N) + 1))
        geo = planar_array(Architecture.DMA, N, epw, c, element_spacing_wl=float(rng.uniform(0.2, 0.6)))
        admit = assemble(geo, c, M, R_s=float(rng.uniform(0, 2)))
        spec = ChannelSpec(M, build_covariance(geo, c), db_to_linear(13.0))
        F = draw_realization(spec, int(rng.integers(2**31)), 0).Y_wireless
        ctx = ZfObjectiveContext.from_admittances(admit, F, loss_aware=loss_aware)
        x = initial_reactances(admit.Y_ss, rng)
        from .precoder import dma_value_and_grad
        if np.isfinite(dma_value_and_grad(x, ctx, with_grad=False)[0]):
            return ctx, x


def gradient_check(instances: int = 20, seed: int = 0, rel_step: float = 1e-4) -> float:
    """Worst :func:`optim.gradient_audit` error of the closed-form DMA gradient."""
    from .precoder import dma_gradient, dma_objective

    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(instances):
        ctx, x = random_dma_instance(rng, loss_aware=bool(i % 2 == 0))
        err = optim.gradient_audit(lambda v: dma_objective(v, ctx), lambda v: dma_gradient(v, ctx), x, rel_step)
        worst = max(worst, err)
    return worst
