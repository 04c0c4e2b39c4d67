"""Non-adaptive baselines: a Gaussian linear sketch, a count sketch, and
top-k denoising.

Non-adaptive means every measurement functional is fixed before the first
evaluation. Both sketches here expose an explicit plan step (the random
functionals, constructible from the stream and the parameters alone) and
an execution step against the oracle, so the contract is visible in the
code and replayable in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .oracle import MeasurementOracle
from .rng import RngStream, rademacher

_LINSKETCH_BLOCK_ROWS = 128  # fixed so blocked and one-shot draws agree


# -- Gaussian linear sketch ---------------------------------------------------

def linsketch_matrix(m: int, n: int, rng: RngStream) -> np.ndarray:
    """The n x m Gaussian measurement matrix, drawn row-block by row-block."""
    gen = rng.generator
    blocks = [
        gen.standard_normal((min(_LINSKETCH_BLOCK_ROWS, n - start), m))
        for start in range(0, n, _LINSKETCH_BLOCK_ROWS)
    ]
    return np.vstack(blocks) if blocks else np.empty((0, m))


def linsketch(oracle: MeasurementOracle, n: int, rng: RngStream,
              stage="linsketch") -> np.ndarray:
    """Output (1/n) N^T N x from n Gaussian measurements (a linear method)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    m = oracle.dimension
    gen = rng.generator
    support = np.arange(m)
    acc = np.zeros(m)
    done = 0
    while done < n:  # stream the matrix in blocks: same draws, bounded memory
        rows = gen.standard_normal((min(_LINSKETCH_BLOCK_ROWS, n - done), m))
        y = oracle.measure_rows(support, rows, stage=stage)
        acc += y @ rows
        done += rows.shape[0]
    return acc / n


# -- count sketch -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CountSketchPlan:
    """All functionals of a count-sketch run, fixed before any measurement."""

    groups: np.ndarray  # (reps, m) group id of each coordinate per round
    signs: np.ndarray   # (reps, m) ±1 coefficient of each coordinate per round
    group_count: int

    @property
    def reps(self) -> int:
        return self.groups.shape[0]

    @property
    def cost(self) -> int:
        return self.reps * self.group_count


def countsketch_params(level: int, m: int) -> tuple[int, int]:
    """Rounds and group count for accuracy level ``level``.

    Groups G = 2^(4+level); rounds R = smallest odd number with
    R >= max(5, 2 + 3*log2(m)).
    """
    if level < 0:
        raise ParameterError("level must be >= 0")
    if m < 1:
        raise ParameterError("m must be >= 1")
    reps = max(5, math.ceil(2.0 + 3.0 * math.log2(m)))
    if reps % 2 == 0:
        reps += 1
    return reps, 2 ** (4 + level)


def countsketch_plan(m: int, reps: int, group_count: int, rng: RngStream) -> CountSketchPlan:
    if reps < 1 or reps % 2 == 0:
        raise ParameterError("reps must be odd and >= 1")
    if group_count < 1:
        raise ParameterError("group_count must be >= 1")
    gen = rng.generator
    groups = np.empty((reps, m), dtype=np.int64)
    signs = np.empty((reps, m))
    for r in range(reps):  # per round: group ids first, then signs
        groups[r] = gen.integers(0, group_count, size=m)
        signs[r] = rademacher(gen, m)
    return CountSketchPlan(groups, signs, group_count)


def countsketch_estimates(oracle: MeasurementOracle, plan: CountSketchPlan,
                          stage="countsketch") -> np.ndarray:
    """Per-round unbiased estimates sign * Y[group] of every coordinate, shape (reps, m)."""
    est = np.empty_like(plan.signs)
    for r in range(plan.reps):
        y = oracle.measure_partition(plan.groups[r], plan.signs[r],
                                     plan.group_count, stage=stage)
        est[r] = plan.signs[r] * y[plan.groups[r]]
    return est


def countsketch(oracle: MeasurementOracle, reps: int, group_count: int,
                rng: RngStream, stage="countsketch") -> np.ndarray:
    """Componentwise median of the per-round estimates; cost reps * group_count."""
    plan = countsketch_plan(oracle.dimension, reps, group_count, rng)
    return np.median(countsketch_estimates(oracle, plan, stage=stage), axis=0)


# -- denoising ----------------------------------------------------------------

def keep_largest(z, k: int) -> np.ndarray:
    """Zero all but the k largest-magnitude entries (ties: smaller index wins)."""
    z = np.asarray(z, dtype=np.float64)
    if k < 0:
        raise ParameterError("k must be >= 0")
    out = np.zeros_like(z)
    if k == 0:
        return out
    if k >= z.size:
        return z.copy()
    keep = np.argsort(-np.abs(z), kind="stable")[:k]
    out[keep] = z[keep]
    return out


def denoise(z, eps: float, p: float) -> np.ndarray:
    """Keep the k = min(floor(eps^-p), m) largest-magnitude entries of ``z``.

    Converts a uniform (l_inf) guarantee of size ~eps into an l_q guarantee
    of order eps^(1 - p/q) for unit l_p-ball inputs.
    """
    if not eps > 0.0:
        raise ParameterError("eps must be positive")
    if not p >= 1.0:
        raise ParameterError("p must be >= 1")
    z = np.asarray(z, dtype=np.float64)
    return keep_largest(z, min(math.floor(eps ** -p), z.size))


def denoised_countsketch(oracle: MeasurementOracle, level: int, p: float, q: float,
                         rng: RngStream, stage="countsketch") -> np.ndarray:
    """Count sketch at accuracy level ``level`` followed by top-2^level denoising."""
    if not (1.0 <= p < q < math.inf):
        raise ParameterError("need 1 <= p < q < inf")
    reps, group_count = countsketch_params(level, oracle.dimension)
    z = countsketch(oracle, reps, group_count, rng, stage=stage)
    # sensitivity eps = 2^(-level/p), hence exactly k = 2^level kept entries
    return keep_largest(z, min(2 ** level, oracle.dimension))


def denoised_linsketch(oracle: MeasurementOracle, n: int, p: float, q: float,
                       rng: RngStream, stage="linsketch") -> np.ndarray:
    """Gaussian sketch with n measurements, then keep the top
    k = floor((n / (m^(1-2/p) log m))^(p/2)) entries.

    When k = 0 the sketch cannot beat the trivial method, so this falls
    back to the zero algorithm (no measurements, output 0).
    """
    if not (1.0 <= p < q < math.inf):
        raise ParameterError("need 1 <= p < q < inf")
    if n < 1:
        raise ParameterError("n must be >= 1")
    m = oracle.dimension
    noise = m ** (1.0 - 2.0 / p) * math.log(m) / n
    k = math.floor(noise ** (-p / 2.0)) if noise > 0 else m
    if k == 0:
        return np.zeros(m)
    z = linsketch(oracle, n, rng, stage=stage)
    return keep_largest(z, min(k, m))
