"""Monte Carlo estimation of type I error and power under p-hacked data.

Every repetition draws from its own stream::

    numpy.random.Generator(PCG64(SeedSequence(seed, spawn_key=(n, mu_bits, r))))

where ``mu_bits`` is the IEEE-754 bit pattern of ``float(mu)`` read as an
unsigned 64-bit integer and ``r`` is the 0-based repetition index. Repetitions
are grouped into fixed chunks of :data:`CHUNK` and the chunk counts are summed,
so results do not depend on how many workers run the chunks or in which order.
Robust and classical rules are always evaluated on the same path.
"""
from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .adversary import (
    IidRandomStrategy,
    NoiseModel,
    OptimalStrategy,
    Strategy,
    batch_paths,
    draw_noise,
)
from .errors import DomainError
from .gnormal import TestKind, TestSpec, VarianceBand, critical_value, power_approx, std_normal_quantile

CHUNK = 250

DEFAULT_N_GRID = (50, 100, 150, 200, 300, 400, 500, 600, 700, 800, 900, 1000)
POWER_MU_GRID = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)
POWER_N_GRID = (50, 100, 200, 300, 500, 700, 1000, 1500, 2000)

CLASSICAL_TARGET = "classical-target"
ROBUST_TARGET = "robust-target"


@dataclass(frozen=True)
class SimulationConfig:
    scenario: str = "custom"
    band: VarianceBand = VarianceBand(0.5, 1.0)
    mu0: float = 0.0
    alpha: float = 0.05
    n_list: tuple = DEFAULT_N_GRID
    mu_list: tuple = (0.0,)
    reps: int = 5000
    seed: int = 0
    adversary_c: Union[str, float] = ROBUST_TARGET
    noise: NoiseModel = NoiseModel.STANDARD_NORMAL
    # overrides the threshold adversary (used for the any-strategy checks)
    strategy: Optional[Strategy] = None

    def __post_init__(self):
        if self.reps < 1:
            raise DomainError("reps must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.scenario == "sim1" and self.adversary_c != CLASSICAL_TARGET:
            raise DomainError("sim1 uses the classical-target adversary")
        if self.scenario == "sim2" and self.adversary_c != ROBUST_TARGET:
            raise DomainError("sim2 uses the robust-target adversary")
        if any(int(n) < 2 for n in self.n_list):
            raise DomainError("every n must be >= 2")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "mu_list", tuple(float(m) for m in self.mu_list))
        object.__setattr__(self, "noise", NoiseModel(self.noise))
        TestSpec(TestKind.I, self.mu0, self.alpha)  # validates alpha / mu0

    @property
    def spec(self) -> TestSpec:
        return TestSpec(TestKind.I, self.mu0, self.alpha)

    @property
    def robust_threshold(self) -> float:
        return critical_value(self.spec, self.band)

    @property
    def adversary_target(self) -> float:
        if self.adversary_c == CLASSICAL_TARGET:
            return self.band.sigma_upper * std_normal_quantile(1.0 - self.alpha)
        if self.adversary_c == ROBUST_TARGET:
            return self.robust_threshold
        return float(self.adversary_c)

    def adversary(self) -> Strategy:
        if self.strategy is not None:
            return self.strategy
        return OptimalStrategy(TestKind.I, self.adversary_target)


def scenario_config(name: str, **overrides) -> SimulationConfig:
    """Preset for ``sim1`` (adversary aims at the classical threshold) or
    ``sim2`` (adversary aims at the robust threshold)."""
    if name == "sim1":
        base = dict(scenario="sim1", adversary_c=CLASSICAL_TARGET)
    elif name == "sim2":
        base = dict(scenario="sim2", adversary_c=ROBUST_TARGET)
    else:
        raise DomainError(f"unknown scenario {name!r}")
    base.update(overrides)
    return SimulationConfig(**base)


@dataclass
class CellResult:
    n: int
    mu: float
    reps: int
    reject_count_robust: int = 0
    reject_count_classical: int = 0
    # repetitions with S_n > sigma_upper, and robust-but-not-classical
    # rejections among the others (the latter must be zero)
    s_above_upper: int = 0
    dominance_violations: int = 0

    @property
    def rate_robust(self) -> float:
        return self.reject_count_robust / self.reps

    @property
    def rate_classical(self) -> float:
        return self.reject_count_classical / self.reps

    @staticmethod
    def _se(rate: float, reps: int) -> float:
        return math.sqrt(rate * (1.0 - rate) / reps)

    @property
    def se_robust(self) -> float:
        return self._se(self.rate_robust, self.reps)

    @property
    def se_classical(self) -> float:
        return self._se(self.rate_classical, self.reps)


@dataclass
class SimulationReport:
    config: SimulationConfig
    cells: list = field(default_factory=list)

    def cell(self, n: int, mu: float = 0.0) -> CellResult:
        for c in self.cells:
            if c.n == n and c.mu == mu:
                return c
        raise KeyError((n, mu))


def mu_key(mu: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(mu)))[0]


def rep_generator(seed: int, n: int, mu: float, r: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(n), mu_key(mu), int(r)))
    return np.random.Generator(np.random.PCG64(ss))


def _run_chunk(task):
    seed, n, mu, r0, r1, strategy, noise, band, mu0, robust_t, q = task
    rows = r1 - r0
    eps = np.empty((rows, n))
    coins = np.empty((rows, n)) if isinstance(strategy, IidRandomStrategy) else None
    for j, r in enumerate(range(r0, r1)):
        e, cn = draw_noise(rep_generator(seed, n, mu, r), n, strategy, noise)
        eps[j] = e
        if coins is not None:
            coins[j] = cn
    z, _ = batch_paths(eps, mu, mu0, strategy, band, coins)
    mean = z.mean(axis=1)
    sd = z.std(axis=1, ddof=1)
    stat = math.sqrt(n) * (mean - mu0)
    rob = stat > robust_t
    cla = stat > sd * q
    small = sd <= band.sigma_upper
    return (
        int(rob.sum()),
        int(cla.sum()),
        int((~small).sum()),
        int((rob & ~cla & small).sum()),
    )


def _tasks(cfg: SimulationConfig, n: int, mu: float):
    strategy = cfg.adversary()
    q = std_normal_quantile(1.0 - cfg.alpha)
    rt = cfg.robust_threshold
    for r0 in range(0, cfg.reps, CHUNK):
        r1 = min(cfg.reps, r0 + CHUNK)
        yield (cfg.seed, n, mu, r0, r1, strategy, cfg.noise, cfg.band, cfg.mu0, rt, q)


def _execute(tasks, workers: Optional[int]):
    tasks = list(tasks)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(tasks) == 1:
        return [_run_chunk(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_run_chunk, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def default_workers() -> int:
    return os.cpu_count() or 1


def _merge(n, mu, reps, results) -> CellResult:
    cell = CellResult(n=n, mu=mu, reps=reps)
    for a, b, s, v in results:
        cell.reject_count_robust += a
        cell.reject_count_classical += b
        cell.s_above_upper += s
        cell.dominance_violations += v
    return cell


def run_cells(cfg: SimulationConfig, points: Sequence[tuple], workers: Optional[int] = None) -> list:
    """Run several ``(n, mu)`` cells sharing one worker pool."""
    spans, tasks = [], []
    for n, mu in points:
        ts = list(_tasks(cfg, int(n), float(mu)))
        spans.append((int(n), float(mu), len(tasks), len(tasks) + len(ts)))
        tasks.extend(ts)
    results = _execute(tasks, workers)
    return [_merge(n, mu, cfg.reps, results[a:b]) for n, mu, a, b in spans]


def run_cell(n: int, mu: float, cfg: SimulationConfig, workers: Optional[int] = None) -> CellResult:
    return run_cells(cfg, [(n, mu)], workers)[0]


def run_table(cfg: SimulationConfig, workers: Optional[int] = None) -> SimulationReport:
    """Type I error table: every ``n`` in ``cfg.n_list`` at ``mu = mu0``."""
    cells = run_cells(cfg, [(n, cfg.mu0) for n in cfg.n_list], workers)
    return SimulationReport(cfg, cells)


@dataclass(frozen=True)
class PowerPoint:
    value: float  # grid value: mu or n
    n: int
    mu: float
    robust: float
    classical: float
    approx: float
    se_robust: float
    se_classical: float


def power_curve(
    cfg: SimulationConfig,
    axis: str = "mu",
    *,
    n_fixed: int = 100,
    mu_grid: Sequence[float] = POWER_MU_GRID,
    mu_fixed: float = 0.1,
    n_grid: Sequence[int] = POWER_N_GRID,
    workers: Optional[int] = None,
) -> list:
    """Empirical power of both tests along ``mu`` (fixed n) or ``n`` (fixed mu),
    with the asymptotic worst-case approximation for the robust test."""
    if axis == "mu":
        points = [(n_fixed, float(m)) for m in mu_grid]
    elif axis == "n":
        points = [(int(n), mu_fixed) for n in n_grid]
    else:
        raise DomainError("axis must be 'mu' or 'n'")
    if any(mu <= cfg.mu0 for _, mu in points):
        raise DomainError("power is defined for mu > mu0")
    out = []
    for (n, mu), cell in zip(points, run_cells(cfg, points, workers)):
        out.append(PowerPoint(
            value=float(mu) if axis == "mu" else int(n),
            n=n,
            mu=mu,
            robust=cell.rate_robust,
            classical=cell.rate_classical,
            approx=power_approx(n, mu, cfg.spec, cfg.band),
            se_robust=cell.se_robust,
            se_classical=cell.se_classical,
        ))
    return out


def with_strategy(cfg: SimulationConfig, strategy: Strategy) -> SimulationConfig:
    return replace(cfg, scenario="custom", strategy=strategy)
