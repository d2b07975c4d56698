"""Sequential data generation with predictable variance selection.

Observation ``i`` is ``Z_i = sigma_i * eps_i + mu`` where ``sigma_i`` may
depend on the past only through the running centred sum
``xi_{i-1} = sum_{l < i} (Z_l - mu0)``. The threshold strategies here are the
asymptotically optimal p-hacking policies: spend high variance while the
normalised sum sits on the "wrong" side of the target ``c`` and switch to low
variance once it has crossed.

Picking ``sigma_i`` and scaling a single noise draw is equivalent in law to
pre-drawing two pools ``N(mu, sigma_upper^2)`` and ``N(mu, sigma_lower^2)`` and
taking one of them, because the unchosen draw is never seen.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from ._backend import kernels
from .errors import DomainError
from .gnormal import TestKind, VarianceBand

_KIND_CODE = {TestKind.I: 1, TestKind.II: 2, TestKind.III: 3}


class NoiseModel(str, enum.Enum):
    STANDARD_NORMAL = "standard-normal"
    RADEMACHER = "rademacher"

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        if self is NoiseModel.STANDARD_NORMAL:
            return rng.standard_normal(size)
        return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0


@dataclass(frozen=True)
class PathState:
    """Observations seen so far (``i``) and their centred sum ``xi``."""

    i: int
    xi: float


# -- strategies -------------------------------------------------------------


@dataclass(frozen=True)
class OptimalStrategy:
    kind: TestKind
    c: float

    def __post_init__(self):
        object.__setattr__(self, "kind", TestKind.parse(self.kind))
        if not math.isfinite(self.c):
            raise DomainError("strategy target c must be finite")

    deterministic = True

    def choose(self, state: PathState, n: int, band: VarianceBand) -> float:
        return optimal_sigma(self.kind, state, n, self.c, band)


@dataclass(frozen=True)
class ConstantStrategy:
    sigma: float

    deterministic = True

    def choose(self, state: PathState, n: int, band: VarianceBand) -> float:
        return self.sigma


@dataclass(frozen=True)
class AlternatingStrategy:
    """sigma_upper on odd steps, sigma_lower on even steps."""

    deterministic = True

    def choose(self, state: PathState, n: int, band: VarianceBand) -> float:
        return band.sigma_upper if state.i % 2 == 0 else band.sigma_lower


@dataclass(frozen=True)
class IidRandomStrategy:
    """Independent coin per step: sigma_upper with probability ``p_upper``.

    The coins come from the generation stream, drawn after the noise.
    """

    p_upper: float = 0.5

    deterministic = False

    def __post_init__(self):
        if not 0.0 <= self.p_upper <= 1.0:
            raise DomainError("p_upper must be a probability")


Strategy = Union[OptimalStrategy, ConstantStrategy, AlternatingStrategy, IidRandomStrategy]


def _check_strategy(strategy: Strategy, band: VarianceBand) -> None:
    if isinstance(strategy, ConstantStrategy):
        if not band.sigma_lower <= strategy.sigma <= band.sigma_upper:
            raise DomainError(
                f"constant sigma {strategy.sigma} outside band "
                f"[{band.sigma_lower}, {band.sigma_upper}]"
            )
    elif not isinstance(strategy, (OptimalStrategy, AlternatingStrategy, IidRandomStrategy)):
        raise DomainError(f"unknown strategy {strategy!r}")


def optimal_sigma(kind, state: PathState, n: int, c: float, band: VarianceBand) -> float:
    """Threshold policy for the next step ``state.i + 1``.

    The first step always uses sigma_upper. Afterwards, with ``s = xi / sqrt(n)``:
    kind I picks sigma_upper iff ``s <= c``, kind II iff ``s >= c``, kind III iff
    ``|s| <= c``.
    """
    kind = TestKind.parse(kind)
    if not 0 <= state.i < n:
        raise DomainError(f"step {state.i + 1} outside 1..{n}")
    if state.i == 0:
        return band.sigma_upper
    s = state.xi / math.sqrt(n)
    if kind is TestKind.I:
        up = s <= c
    elif kind is TestKind.II:
        up = s >= c
    else:
        up = abs(s) <= c
    return band.sigma_upper if up else band.sigma_lower


# -- generation -------------------------------------------------------------


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng))
    raise DomainError("rng must be a numpy Generator or an integer seed; no implicit seeding")


def batch_paths(
    eps: np.ndarray,
    mu: float,
    mu0: float,
    strategy: Strategy,
    band: VarianceBand,
    coins: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Paths for every row of a (reps x n) noise matrix; returns ``(z, sigma)``."""
    eps = np.atleast_2d(np.asarray(eps, dtype=np.float64))
    _check_strategy(strategy, band)
    reps, n = eps.shape
    if isinstance(strategy, OptimalStrategy):
        return kernels().optimal_paths(
            eps, band.sigma_lower, band.sigma_upper, float(mu), float(mu0),
            float(strategy.c), _KIND_CODE[strategy.kind],
        )
    if isinstance(strategy, ConstantStrategy):
        sig = np.full((reps, n), float(strategy.sigma))
    elif isinstance(strategy, AlternatingStrategy):
        row = np.where(np.arange(n) % 2 == 0, band.sigma_upper, band.sigma_lower)
        sig = np.broadcast_to(row, (reps, n)).copy()
    else:
        if coins is None or coins.shape != eps.shape:
            raise DomainError("iid-random strategy needs a coin matrix shaped like eps")
        sig = np.where(coins < strategy.p_upper, band.sigma_upper, band.sigma_lower)
    return sig * eps + mu, sig


def draw_noise(rng: np.random.Generator, n: int, strategy: Strategy, noise: NoiseModel):
    """Noise for one path, then (iid-random only) the coins."""
    eps = NoiseModel(noise).draw(rng, n)
    coins = rng.random(n) if isinstance(strategy, IidRandomStrategy) else None
    return eps, coins


class Trace(NamedTuple):
    sigma: np.ndarray
    z: np.ndarray
    xi: np.ndarray


def strategy_trace(
    n: int,
    mu: float,
    mu0: float,
    strategy: Strategy,
    noise: NoiseModel,
    band: VarianceBand,
    rng,
) -> Trace:
    """Per-step ``(sigma_i, Z_i, xi_i)`` of one generated path."""
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = as_generator(rng)
    eps, coins = draw_noise(rng, n, strategy, noise)
    z, sig = batch_paths(eps[None, :], mu, mu0, strategy, band,
                         None if coins is None else coins[None, :])
    z, sig = z[0], sig[0]
    xi = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc = acc + (z[i] - mu0)
        xi[i] = acc
    return Trace(sig, z, xi)


def generate_sequence(
    n: int,
    mu: float,
    mu0: float,
    strategy: Strategy,
    noise: NoiseModel,
    band: VarianceBand,
    rng,
) -> np.ndarray:
    """``n`` observations from the strategy; deterministic given the seed."""
    return strategy_trace(n, mu, mu0, strategy, noise, band, rng).z


def replay_sigmas(z, mu0: float, strategy: Strategy, band: VarianceBand) -> np.ndarray:
    """Recompute each ``sigma_i`` from the prefix ``Z_1..Z_{i-1}`` alone."""
    if not strategy.deterministic:
        raise DomainError("only deterministic strategies can be replayed from data")
    z = np.asarray(z, dtype=np.float64)
    n = z.size
    out = np.empty(n)
    xi = 0.0
    for i in range(n):
        out[i] = strategy.choose(PathState(i, xi), n, band)
        xi = xi + (z[i] - mu0)
    return out
