"""One full detection pass over all coordinates.

``discover`` splits [0, m) into D equi-hash buckets and runs ``spot`` on
each bucket (optionally after the sign-measurement filter of
:mod:`adasketch.precondition`), returning the union of the per-bucket hits.
Sized for a sensitivity ``eps``, every coordinate with |x_j| >= eps of a
unit l_p-ball vector lands in the result with probability at least 1/2,
at a deterministic cost cap of D * 2(depth+1) measurements for the basic
variant and D * (703 + 2*depth) for the preconditioned one.

The three random components (hashing, filtering, spotting) draw from
distinct labelled streams and are therefore independent; per-bucket draws
are consumed in ascending bucket order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .hashing import equi_partition, equi_ranks
from .oracle import MeasurementOracle
from .precondition import sign_filter_mask, sign_tail_probability, signs_of
from .rng import RngStream, rademacher
from .spotting import SpotParams, shrink_depth, spot, spot_cost_cap

BASIC = "basic"
PRECONDITIONED = "preconditioned"
VARIANTS = (BASIC, PRECONDITIONED)

# dominance constants required by spot at the two operating points
GAMMA_BASIC = 3075.0 * math.sqrt(2.0 * math.log(48.0))            # delta2 = 1/3
GAMMA_PRECONDITIONED = 4100.0 * math.sqrt(2.0 * math.log(64.0))   # delta2 = 1/4

PRECOND_MEASUREMENTS = 701  # precond_measurements(GAMMA_PRECONDITIONED, 1/5)


def _validate_peps(p: float, eps: float, m: int):
    if not (1.0 <= p < math.inf):
        raise ParameterError("p must lie in [1, inf)")
    if not 0.0 < eps < 1.0:
        raise ParameterError("eps must lie in (0, 1)")
    if m < 1:
        raise ParameterError("m must be >= 1")


def bucket_count(p: float, eps: float, m: int, variant: str = PRECONDITIONED) -> int:
    """Bucket count giving each eps-large coordinate a >= 1/2 detection chance.

    Basic variant: ceil(4 * (3075*sqrt(2 log 48))^p / eps^p) for p <= 2 and
    ceil(4 * (3075*sqrt(2 log 48))^2 * m^(1-2/p) / eps^2) for p > 2.
    Preconditioned variant: ceil(6 * 5^(p/2) / eps^p), resp.
    ceil(30 * m^(1-2/p) / eps^2). Capped at m (singleton buckets).
    """
    _validate_peps(p, eps, m)
    p = float(p)
    if variant == BASIC:
        if p <= 2.0:
            d = math.ceil(4.0 * GAMMA_BASIC**p * eps**-p)
        else:
            d = math.ceil(4.0 * GAMMA_BASIC**2 * m ** (1.0 - 2.0 / p) * eps**-2)
    elif variant == PRECONDITIONED:
        if p <= 2.0:
            d = math.ceil(6.0 * 5.0 ** (p / 2.0) * eps**-p)
        else:
            d = math.ceil(30.0 * m ** (1.0 - 2.0 / p) * eps**-2)
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    return min(d, m)


@dataclass(frozen=True)
class DiscoverConfig:
    """Fully determined parameters of one detection pass."""

    variant: str
    p: float
    eps: float
    m: int
    buckets: int
    delta2: float
    depth: int
    precond_size: int

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown variant {self.variant!r}")
        if not 1 <= self.buckets <= self.m:
            raise ParameterError("bucket count must lie in [1, m]")
        if self.variant == PRECONDITIONED and self.precond_size < 1:
            raise ParameterError("preconditioned variant needs precond_size >= 1")

    @classmethod
    def for_sensitivity(cls, p: float, eps: float, m: int,
                        variant: str = PRECONDITIONED) -> "DiscoverConfig":
        """Standard parameterization for sensitivity ``eps``."""
        buckets = bucket_count(p, eps, m, variant)
        return cls.with_buckets(p, eps, m, buckets, variant)

    @classmethod
    def with_buckets(cls, p: float, eps: float, m: int, buckets: int,
                     variant: str = PRECONDITIONED) -> "DiscoverConfig":
        delta2 = 1.0 / 4.0 if variant == PRECONDITIONED else 1.0 / 3.0
        size = PRECOND_MEASUREMENTS if variant == PRECONDITIONED else 0
        return cls(variant=variant, p=float(p), eps=float(eps), m=int(m),
                   buckets=int(buckets), delta2=delta2,
                   depth=shrink_depth(m / buckets), precond_size=size)

    @property
    def spot_params(self) -> SpotParams:
        return SpotParams(self.delta2, self.depth)


def discover_cost_cap(cfg: DiscoverConfig) -> int:
    """Hard upper bound on the oracle cost of one discover call."""
    per_bucket = spot_cost_cap(cfg.spot_params)
    if cfg.variant == PRECONDITIONED:
        per_bucket += cfg.precond_size
    return cfg.buckets * per_bucket


def _spot_survivors(oracle, survivor_sets, params, spot_rng):
    hits = []
    for sub in survivor_sets:
        found = spot(oracle, sub, params, spot_rng)
        if found.size:
            hits.append(found)
    if not hits:
        return np.empty(0, dtype=np.intp)
    return np.unique(np.concatenate(hits))


def discover(oracle: MeasurementOracle, cfg: DiscoverConfig, rng: RngStream) -> np.ndarray:
    """Run one detection pass; returns the sorted set of detected coordinates."""
    if oracle.dimension != cfg.m:
        raise DimensionError("oracle dimension does not match the configuration")
    params = cfg.spot_params
    spot_rng = rng.child("spot")

    if cfg.variant == BASIC:
        order, bounds = equi_partition(cfg.m, cfg.buckets, rng.child("hash"))
        sets = (order[bounds[d]:bounds[d + 1]] for d in range(cfg.buckets))
        return _spot_survivors(oracle, (np.sort(s) for s in sets), params, spot_rng)

    ranks, bounds = equi_ranks(cfg.m, cfg.buckets, rng.child("hash"))
    return _spot_survivors(
        oracle,
        _preconditioned_survivors(oracle, ranks, bounds, cfg, rng),
        params,
        spot_rng,
    )


def _preconditioned_survivors(oracle, ranks, bounds, cfg, rng):
    """Per-bucket survivor sets of the sign filter, in ascending bucket order.

    Statistically identical to calling :func:`adasketch.precondition.precond`
    on each bucket: sign columns are drawn only for candidates with nonzero
    hidden entries (they alone determine the measured signs) and in one
    block per pass, while the retention of zero candidates is the usual
    independent Binomial tail event, sampled in one vectorized draw across
    buckets.
    """
    k = cfg.precond_size
    d_count = cfg.buckets
    sign_gen = rng.child("precond").generator
    tail_gen = rng.child("precond-tails").generator

    nz = oracle.nonzero_indices()
    nz_bucket = np.searchsorted(bounds[1:], ranks[nz], side="right")
    by_bucket = np.argsort(nz_bucket, kind="stable")
    nz_sorted, nz_bucket = nz[by_bucket], nz_bucket[by_bucket]
    starts = np.searchsorted(nz_bucket, np.arange(d_count + 1))

    sizes = np.diff(bounds)
    live_counts = np.diff(starts)
    zero_counts = sizes - live_counts
    tail_counts = tail_gen.binomial(zero_counts, sign_tail_probability(k))

    # buckets whose k measurements are all exactly 0.0 are charged in bulk
    idle = int(np.count_nonzero(live_counts == 0))
    if idle:
        oracle.charge(k * idle, stage="precond")

    # one block draw covering every live column, in bucket order
    all_signs = rademacher(sign_gen, (k, nz_sorted.size)) if nz_sorted.size else None

    survivors = []
    for d in np.nonzero((live_counts > 0) | (tail_counts > 0))[0]:
        live = nz_sorted[starts[d]:starts[d + 1]]
        kept = None
        if live.size:
            matrix = all_signs[:, starts[d]:starts[d + 1]]
            y = oracle.measure_rows(live, matrix, stage="precond")
            kept = live[sign_filter_mask(signs_of(y) @ matrix, k)]
        if tail_counts[d]:
            members = np.flatnonzero((ranks >= bounds[d]) & (ranks < bounds[d + 1]))
            zeros = np.setdiff1d(members, live)
            extras = tail_gen.choice(zeros, size=int(tail_counts[d]), replace=False)
            kept = extras if kept is None else np.concatenate([kept, extras])
        if kept is not None and kept.size:
            survivors.append(np.sort(kept))
    return survivors
