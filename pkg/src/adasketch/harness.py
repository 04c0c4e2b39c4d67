"""Experiment driver: Monte Carlo error estimation, cost audits, parameter
tables, and CSV comparisons of adaptive vs non-adaptive methods.

Each trial draws a fresh vector from the family (a stream derived only from
seed, family and trial index, so different methods see identical inputs),
runs the method against a fresh oracle, and records the l_q error and the
measured cost. Every trial hard-asserts the measured cost against the
method's closed-form cap. Identical configurations (including the seed)
produce byte-identical CSV output.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import adaptive, nonadaptive
from .discover import PRECONDITIONED, VARIANTS
from .errors import CapViolationError, ParameterError
from .families import VectorFamily, gen_vector
from .oracle import MeasurementOracle, lp_norm
from .rng import RngStream

CSV_COLUMNS = [
    "method", "variant", "m", "p", "q", "budget", "L", "R", "family",
    "trials", "mean_err", "qmoment_err", "ci", "mean_cost", "max_cost", "seed",
]

METHOD_NAMES = (
    "zero", "read_all", "adaptive", "linsketch", "linsketch_denoised",
    "countsketch", "countsketch_denoised",
)


@dataclass(frozen=True)
class Method:
    """A runnable method plus its declared worst-case cost cap."""

    name: str
    cap: int
    runner: callable
    variant: str = ""
    levels: int | None = None
    reps: int | None = None

    def run(self, oracle: MeasurementOracle, rng: RngStream) -> np.ndarray:
        return self.runner(oracle, rng)


def _countsketch_level_for_budget(budget: int, m: int) -> int | None:
    """Largest level with reps * groups <= budget, or None if even level 0 misses."""
    level = None
    probe = 0
    while True:
        reps, groups = nonadaptive.countsketch_params(probe, m)
        if reps * groups > budget:
            return level
        level = probe
        probe += 1


def make_method(name: str, m: int, p: float, q: float, budget: int | None = None,
                levels: int | None = None, reps: int | None = None,
                variant: str = PRECONDITIONED) -> Method:
    """Resolve a method name plus budget/level knobs into a runnable Method."""
    if name not in METHOD_NAMES:
        raise ParameterError(f"unknown method {name!r}")
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")

    if name == "zero":
        return Method("zero", 0, lambda oracle, rng: np.zeros(oracle.dimension))
    if name == "read_all":
        def run_read_all(oracle, rng):
            return oracle.read_entries(np.arange(oracle.dimension), stage="reads")
        return Method("read_all", m, run_read_all)

    if name == "adaptive":
        if levels is None:
            if budget is None:
                raise ParameterError("adaptive needs --L or --budget")
            levels = adaptive.levels_for_budget(budget, m, p, q, variant)
        use_reps = reps if reps is not None else adaptive.repetitions(p, q)
        plan = adaptive.AdaptivePlan(m=m, p=p, q=q, levels=levels,
                                     reps=use_reps, variant=variant)
        return Method(
            "adaptive", adaptive.plan_cost_cap(plan),
            lambda oracle, rng: adaptive.approximate(oracle, plan, rng),
            variant=variant, levels=plan.levels, reps=plan.reps,
        )

    if name in ("linsketch", "linsketch_denoised"):
        if budget is None or budget < 1:
            return Method(name, 0, lambda oracle, rng: np.zeros(oracle.dimension))
        if name == "linsketch":
            runner = lambda oracle, rng: nonadaptive.linsketch(oracle, budget, rng)
        else:
            runner = lambda oracle, rng: nonadaptive.denoised_linsketch(
                oracle, budget, p, q, rng)
        return Method(name, budget, runner)

    # countsketch variants: largest level whose round cost fits the budget
    if levels is None:
        if budget is None:
            raise ParameterError("countsketch needs --L or --budget")
        levels = _countsketch_level_for_budget(budget, m)
        if levels is None:
            return Method(name, 0, lambda oracle, rng: np.zeros(oracle.dimension))
    cs_reps, cs_groups = nonadaptive.countsketch_params(levels, m)
    if name == "countsketch":
        runner = lambda oracle, rng: nonadaptive.countsketch(
            oracle, cs_reps, cs_groups, rng)
    else:
        runner = lambda oracle, rng: nonadaptive.denoised_countsketch(
            oracle, levels, p, q, rng)
    return Method(name, cs_reps * cs_groups, runner, levels=levels, reps=cs_reps)


@dataclass(frozen=True)
class ExperimentConfig:
    method: Method
    family: VectorFamily
    m: int
    q: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.q > 1.0:
            raise ParameterError("q must exceed 1")


@dataclass
class ErrorEstimate:
    mean_err: float
    qmoment_err: float
    ci: float            # 95% normal-approximation half width of the mean error
    mean_cost: float
    max_cost: int
    stage_costs: dict = field(default_factory=dict)


def _trial_streams(seed: int, family: VectorFamily, method_name: str, t: int):
    trial = RngStream(seed).child_at("trial", t)
    return (trial.child(f"vector-{family.label()}"),
            trial.child(f"method-{method_name}"))


def estimate_error(cfg: ExperimentConfig) -> ErrorEstimate:
    """Monte Carlo l_q error and cost of one method on one family."""
    errors = np.empty(cfg.trials)
    costs = np.empty(cfg.trials, dtype=np.int64)
    stage_totals: dict = {}
    for t in range(cfg.trials):
        vec_rng, method_rng = _trial_streams(cfg.seed, cfg.family,
                                             cfg.method.name, t)
        x = gen_vector(cfg.family, cfg.m, vec_rng)
        oracle = MeasurementOracle(x)
        out = cfg.method.run(oracle, method_rng)
        if oracle.cost > cfg.method.cap:
            raise CapViolationError(
                f"{cfg.method.name}: cost {oracle.cost} exceeds cap {cfg.method.cap}"
            )
        errors[t] = lp_norm(x - out, cfg.q)
        costs[t] = oracle.cost
        for stage, amount in oracle.stage_costs().items():
            stage_totals[stage] = stage_totals.get(stage, 0) + amount
    qmoment = float(np.mean(errors ** cfg.q) ** (1.0 / cfg.q))
    spread = float(np.std(errors, ddof=1)) if cfg.trials > 1 else 0.0
    return ErrorEstimate(
        mean_err=float(errors.mean()),
        qmoment_err=qmoment,
        ci=1.96 * spread / math.sqrt(cfg.trials),
        mean_cost=float(costs.mean()),
        max_cost=int(costs.max()),
        stage_costs=stage_totals,
    )


@dataclass
class AuditReport:
    method: str
    cap: int
    max_cost: int
    mean_cost: float
    ok: bool
    stage_totals: dict

    def lines(self):
        yield f"method {self.method}: cap {self.cap}, max cost {self.max_cost}, " \
              f"mean cost {self.mean_cost:.2f} -> {'OK' if self.ok else 'CAP VIOLATION'}"
        yield "  hashing: 0 (draws no information)"
        for stage in sorted(self.stage_totals):
            yield f"  {stage}: {self.stage_totals[stage]}"


def cost_audit(cfg: ExperimentConfig) -> AuditReport:
    """Check measured costs against the declared cap; report per-stage totals.

    Unlike :func:`estimate_error` this never raises on a violation: the
    report carries the verdict so callers can surface it (the CLI exits
    nonzero).
    """
    costs = np.empty(cfg.trials, dtype=np.int64)
    stage_totals: dict = {}
    for t in range(cfg.trials):
        vec_rng, method_rng = _trial_streams(cfg.seed, cfg.family,
                                             cfg.method.name, t)
        oracle = MeasurementOracle(gen_vector(cfg.family, cfg.m, vec_rng))
        cfg.method.run(oracle, method_rng)
        costs[t] = oracle.cost
        for stage, amount in oracle.stage_costs().items():
            stage_totals[stage] = stage_totals.get(stage, 0) + amount
    max_cost = int(costs.max())
    return AuditReport(cfg.method.name, cfg.method.cap, max_cost,
                       float(costs.mean()), max_cost <= cfg.method.cap,
                       stage_totals)


def param_table(p: float, q: float, m: int, eps_values=None, budgets=None,
                variant: str = PRECONDITIONED) -> list[dict]:
    """One row of derived parameters per requested accuracy or budget."""
    if (eps_values is None) == (budgets is None):
        raise ParameterError("give exactly one of eps_values or budgets")
    rows = []
    reps = adaptive.repetitions(p, q)
    if eps_values is not None:
        pairs = [("eps", float(e), adaptive.levels_for_accuracy(e, p, q))
                 for e in eps_values]
    else:
        pairs = [("budget", int(n), adaptive.levels_for_budget(n, m, p, q, variant))
                 for n in budgets]
    for mode, value, levels in pairs:
        plan = adaptive.AdaptivePlan(m=m, p=p, q=q, levels=levels, reps=reps,
                                     variant=variant)
        rows.append({
            "mode": mode,
            "value": value,
            "L": levels,
            "R": reps,
            "variant": variant,
            "cost_cap": adaptive.plan_cost_cap(plan),
            "error_bound": plan.error_bound(),
            "buckets_per_level": "|".join(str(c.buckets) for c in plan.configs),
        })
    return rows


_COMPARE_METHODS = (
    ("zero", ""),
    ("adaptive", "basic"),
    ("adaptive", "preconditioned"),
    ("linsketch_denoised", ""),
    ("countsketch_denoised", ""),
)


def compare_methods(m: int, p: float, q: float, budgets, families, trials: int,
                    seed: int) -> list[dict]:
    """Error/cost rows for every (method, budget, family) combination."""
    rows = []
    for name, variant in _COMPARE_METHODS:
        for budget in budgets:
            budget = int(budget)
            method = make_method(name, m, p, q, budget=budget,
                                 variant=variant or PRECONDITIONED)
            for family in families:
                cfg = ExperimentConfig(method=method, family=family, m=m, q=q,
                                       trials=trials, seed=seed)
                est = estimate_error(cfg)
                rows.append({
                    "method": name,
                    "variant": variant,
                    "m": m, "p": p, "q": q, "budget": budget,
                    "L": "" if method.levels is None else method.levels,
                    "R": "" if method.reps is None else method.reps,
                    "family": family.label(),
                    "trials": trials,
                    "mean_err": est.mean_err,
                    "qmoment_err": est.qmoment_err,
                    "ci": est.ci,
                    "mean_cost": est.mean_cost,
                    "max_cost": est.max_cost,
                    "seed": seed,
                })
    return rows


def write_csv(path, rows, columns=None):
    """UTF-8 CSV with a header row and '.' decimal separator."""
    columns = list(columns) if columns is not None else CSV_COLUMNS
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: row.get(key, "") for key in columns})
