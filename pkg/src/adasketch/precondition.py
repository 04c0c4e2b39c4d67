"""Sign-measurement filtering of a candidate set.

``precond`` takes k Rademacher measurements of the hidden vector restricted
to the candidate set, keeps only the measurement signs s, and retains a
candidate j when its sign-pattern column a_j agrees with s or with -s in
all but k/6 positions (exact integer comparison). Under a mild sqrt(5)
dominance of one coordinate this both keeps that coordinate and strips the
bucket down until the survivor set satisfies a much stronger dominance, at
a fixed price of k measurements.

Candidates where the hidden entry is zero cannot influence the measured
signs, so their retention is an independent Binomial(k, 1/2) tail event;
by default that event is sampled from its exact law instead of
materializing k sign bits per zero candidate. Pass ``materialize=True``
for the direct construction (required for ``return_draw``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import binom

from .errors import ParameterError
from .oracle import MeasurementOracle
from .rng import RngStream, rademacher

_EMPTY = np.empty(0, dtype=np.intp)


@dataclass(frozen=True, eq=False)
class PrecondDraw:
    """The realized sign-measurement pattern: matrix of ±1 columns and sign vector."""

    matrix: np.ndarray  # (k, #candidates), entries ±1
    signs: np.ndarray   # (k,), entries ±1 with sign(0) := +1


def precond_measurements(gamma: float, delta1: float) -> int:
    """Measurement count k upgrading sqrt(5)-dominance to gamma-dominance w.p. 1 - delta1."""
    if not gamma > 1.0:
        raise ParameterError("gamma must exceed 1")
    if not 0.0 < delta1 < 1.0:
        raise ParameterError("delta1 must lie in (0, 1)")
    return math.ceil(36.0 * math.log((1.0 + 0.4 * gamma * gamma) / delta1))


def hamming(a, b) -> int:
    """Number of differing positions between two sign vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ParameterError("sign vectors must have equal length")
    return int(np.count_nonzero(a != b))


@lru_cache(maxsize=None)
def sign_tail_probability(k: int) -> float:
    """P(a fresh ±1 column passes the k/6 filter against any fixed sign vector).

    The agreement distance is Binomial(k, 1/2); both filter events together
    have probability 2 * P(Bin(k, 1/2) <= floor(k/6)).
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    return min(1.0, 2.0 * float(binom.cdf(k // 6, k, 0.5)))


def sign_filter_mask(corr: np.ndarray, k: int) -> np.ndarray:
    """Retention mask from the column/sign correlations <a_j, s>.

    Hamming distance of a_j to s (resp. -s) is (k -+ corr_j)/2, so the
    k/6 filter is 3*|corr_j| >= 2*k, compared in exact integers.
    """
    corr_int = np.rint(corr).astype(np.int64)
    return 3 * np.abs(corr_int) >= 2 * k


def signs_of(values: np.ndarray) -> np.ndarray:
    """Sign vector with sign(0) := +1."""
    return np.where(values >= 0.0, 1.0, -1.0)


def precond(oracle: MeasurementOracle, candidates, k: int, rng: RngStream,
            stage="precond", materialize=False, return_draw=False):
    """Filter ``candidates`` with k sign measurements; cost is exactly k.

    Returns the sorted surviving indices, or ``(survivors, PrecondDraw)``
    when ``return_draw`` is set (which forces ``materialize=True``). An
    empty candidate set returns empty at zero cost.
    """
    idx = np.sort(np.asarray(candidates, dtype=np.intp))
    if idx.size == 0:
        return (_EMPTY, None) if return_draw else _EMPTY
    k = int(k)
    if k < 1:
        raise ParameterError("k must be >= 1")
    gen = rng.generator

    if materialize or return_draw:
        matrix = rademacher(gen, (k, idx.size))
        y = oracle.measure_rows(idx, matrix, stage=stage)
        s = signs_of(y)
        survivors = idx[sign_filter_mask(s @ matrix, k)]
        if return_draw:
            return survivors, PrecondDraw(matrix, s)
        return survivors

    live_mask = oracle.nonzero_mask(idx)
    live = idx[live_mask]
    if live.size:
        matrix = rademacher(gen, (k, live.size))
        y = oracle.measure_rows(live, matrix, stage=stage)
        kept = live[sign_filter_mask(signs_of(y) @ matrix, k)]
    else:
        oracle.charge(k, stage=stage)  # all measured values are exactly 0.0
        kept = _EMPTY
    n_zero = idx.size - live.size
    if n_zero:
        count = int(gen.binomial(n_zero, sign_tail_probability(k)))
        if count:
            extras = gen.choice(idx[~live_mask], size=count, replace=False)
            kept = np.concatenate([kept, extras])
    return np.sort(kept)
