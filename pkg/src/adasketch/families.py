"""Test-vector families for the benchmark harness.

Every generated vector lies in the unit l_p ball of its family (exactly for
spike constructions, numerically for the rest). The families mirror the
structures that stress sparse-recovery methods: few equal spikes, geometric
decay, spikes over a decaying tail, the equal-mass construction that is
worst for top-k denoising, uniform draws from the ball, and zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import gennorm

from .errors import ParameterError
from .rng import RngStream, rademacher

KINDS = ("spikes", "geometric", "spike_plus_tail", "uniform_ball", "zero",
         "denoise_adversarial")

# geometric tails are cut once entries drop below this relative size; the
# discarded mass is far below float visibility in any norm comparison
_TAIL_RELATIVE_CUTOFF = 1e-18


@dataclass(frozen=True)
class VectorFamily:
    """A named distribution over the unit l_p ball."""

    kind: str
    p: float = 1.0
    count: int = 1      # spikes / adversarial block size
    ratio: float = 0.5  # geometric decay ratio

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown family kind {self.kind!r}")
        if not (1.0 <= self.p < math.inf):
            raise ParameterError("family p must lie in [1, inf)")
        if self.count < 1:
            raise ParameterError("family count must be >= 1")
        if not 0.0 < self.ratio < 1.0:
            raise ParameterError("family ratio must lie in (0, 1)")

    @classmethod
    def parse(cls, text: str, p: float) -> "VectorFamily":
        """Parse CLI notation like ``spikes:4`` or ``geometric``."""
        name, _, arg = text.partition(":")
        name = name.strip()
        if name not in KINDS:
            raise ParameterError(f"unknown family {text!r}")
        if arg:
            return cls(kind=name, p=p, count=int(arg))
        return cls(kind=name, p=p)

    def label(self) -> str:
        if self.kind in ("spikes", "spike_plus_tail", "denoise_adversarial"):
            return f"{self.kind}:{self.count}"
        return self.kind


def _tail_length(ratio: float) -> int:
    return int(math.ceil(math.log(_TAIL_RELATIVE_CUTOFF) / math.log(ratio))) + 1


def _geometric_magnitudes(p: float, ratio: float, mass: float, length: int) -> np.ndarray:
    # mass = sum of |entry|^p over the full infinite tail
    head = (mass * (1.0 - ratio ** p)) ** (1.0 / p)
    return head * ratio ** np.arange(length)


def gen_vector(family: VectorFamily, m: int, rng: RngStream) -> np.ndarray:
    """Draw one vector of dimension m from the family."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    gen = rng.generator
    p = family.p
    x = np.zeros(m)

    if family.kind == "zero":
        return x

    if family.kind == "spikes":
        k = family.count
        if k > m:
            raise ParameterError(f"spikes:{k} does not fit dimension {m}")
        where = gen.choice(m, size=k, replace=False)
        x[where] = rademacher(gen, k) * k ** (-1.0 / p)
        return x

    if family.kind == "denoise_adversarial":
        block = 2 * family.count + 1
        if block > m:
            raise ParameterError(f"denoise_adversarial:{family.count} needs m >= {block}")
        where = gen.choice(m, size=block, replace=False)
        x[where] = block ** (-1.0 / p)
        return x

    if family.kind == "geometric":
        length = min(m, _tail_length(family.ratio))
        where = gen.choice(m, size=length, replace=False)
        mags = _geometric_magnitudes(p, family.ratio, 1.0, length)
        x[where] = rademacher(gen, length) * mags
        return x

    if family.kind == "spike_plus_tail":
        k = family.count
        length = min(m - k, _tail_length(family.ratio))
        if k + length > m or length < 1:
            raise ParameterError(f"spike_plus_tail:{k} does not fit dimension {m}")
        where = gen.choice(m, size=k + length, replace=False)
        x[where[:k]] = rademacher(gen, k) * (0.5 / k) ** (1.0 / p)
        mags = _geometric_magnitudes(p, family.ratio, 0.5, length)
        x[where[k:]] = rademacher(gen, length) * mags
        return x

    # uniform_ball: direction from the p-generalized normal, radius U^(1/m)
    y = gennorm.rvs(p, size=m, random_state=gen)
    norm = float(np.sum(np.abs(y) ** p)) ** (1.0 / p)
    radius = gen.uniform() ** (1.0 / m)
    return (radius / norm) * y
