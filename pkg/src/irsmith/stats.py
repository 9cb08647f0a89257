"""Frequency model for operations with a required region type.

Model: ``N`` ops precede an ``scf.while`` and its condition region holds ``K``
ops; both are geometric on {0, 1, ...} with parameter ``p_g``, and every op
independently yields the needed boolean with probability ``p_bool``. The
while can be built iff at least one of the ``S = N + K`` ops yields one.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from irsmith.builder import generate_module
from irsmith.config import GenConfig
from irsmith.ir import I1, iter_ops
from irsmith.registry import REGISTRY, Trait
from irsmith.rng import derive_seed

WHILE = "scf.while"


@dataclass(frozen=True)
class FreqModelParams:
    p_g: float
    p_bool: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p_g < 1.0:
            raise ValueError(f"p_g must lie in (0, 1), got {self.p_g}")
        if not 0.0 <= self.p_bool <= 1.0:
            raise ValueError(f"p_bool must lie in [0, 1], got {self.p_bool}")


def length_sum_pmf(params: FreqModelParams, s: int) -> float:
    """P(S = s) = (s + 1) p_g^2 (1 - p_g)^s."""
    if s < 0:
        return 0.0
    p = params.p_g
    return (s + 1) * p * p * (1.0 - p) ** s


def length_sum_tail(params: FreqModelParams, s: int) -> float:
    """P(S > s) = (1 - p_g)^(s+1) (1 + (s+1) p_g), exact for the sum of two geometrics."""
    p = params.p_g
    return (1.0 - p) ** (s + 1) * (1.0 + (s + 1) * p)


def while_success_probability(params: FreqModelParams, tail_tolerance: float = 1e-12) -> float:
    """P(while generated | while chosen), summed until the tail is below tolerance.

    Each summand is P(S = s) times a factor in [0, 1], so the unsummed
    remainder after term ``s`` is bounded by P(S > s).
    """
    q_bool = 1.0 - params.p_bool
    total = 0.0
    s = 0
    while True:
        total += (1.0 - q_bool**s) * length_sum_pmf(params, s)
        if length_sum_tail(params, s) < tail_tolerance:
            break
        s += 1
    return min(max(total, 0.0), 1.0)


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    trials: int


def monte_carlo_while(params: FreqModelParams, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Simulate the idealized process directly: draw N, K, then one coin per op."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    # numpy's geometric counts trials to the first success (support 1, 2, ...)
    n = rng.geometric(params.p_g, trials) - 1
    k = rng.geometric(params.p_g, trials) - 1
    bools = rng.binomial(n + k, params.p_bool)
    p_hat = float(np.mean(bools >= 1))
    return MonteCarloEstimate(p_hat, math.sqrt(p_hat * (1.0 - p_hat) / trials), trials)


# -- measurement on the real generator -----------------------------------------


@dataclass
class OpFrequency:
    chosen: int = 0
    generated: int = 0
    occurrences: int = 0

    @property
    def fraction(self) -> float:
        """Share of selections of this op that ended in an insertion."""
        return self.generated / self.chosen if self.chosen else 0.0


@dataclass
class FrequencyReport:
    programs: int
    ops: dict[str, OpFrequency] = field(default_factory=dict)
    total_ops: int = 0
    bool_producers: int = 0

    @property
    def bool_fraction(self) -> float:
        """Share of ops in the generated programs that produce an i1."""
        return self.bool_producers / self.total_ops if self.total_ops else 0.0

    def occurrence_frequency(self, name: str) -> float:
        op = self.ops.get(name)
        return op.occurrences / self.total_ops if op and self.total_ops else 0.0

    def to_tsv(self) -> str:
        rows = ["op\tchosen\tgenerated\tfraction\toccurrences\toccurrence_frequency"]
        for name in sorted(self.ops):
            f = self.ops[name]
            rows.append(
                f"{name}\t{f.chosen}\t{f.generated}\t{f.fraction:.6f}\t"
                f"{f.occurrences}\t{self.occurrence_frequency(name):.6f}"
            )
        return "\n".join(rows) + "\n"


def measure_op_frequencies(config: GenConfig, n_programs: int) -> FrequencyReport:
    """Generate ``n_programs`` programs and count per-op selections and insertions.

    Program ``i`` uses the campaign seed derivation from ``config.seed``.
    Only ops with positive weight appear in the report.
    """
    poolable = [s.name for s in REGISTRY.poolable() if config.weight(s.name) > 0]
    report = FrequencyReport(n_programs, {name: OpFrequency() for name in poolable})
    counts: Counter[tuple[str, str]] = Counter()

    def listener(event: str, name: str) -> None:
        counts[event, name] += 1

    for i in range(n_programs):
        module = generate_module(config.replace(seed=derive_seed(config.seed, i)), listener=listener)
        for op in iter_ops(module.body.block):
            spec = REGISTRY.specs[op.name]
            if spec.has(Trait.IS_TERMINATOR) or spec.top_level_only:
                continue
            report.total_ops += 1
            if any(r.type == I1 for r in op.results):
                report.bool_producers += 1
            entry = report.ops.get(op.name)
            if entry is not None:
                entry.occurrences += 1
    for (event, name), n in counts.items():
        entry = report.ops.setdefault(name, OpFrequency())
        if event == "chosen":
            entry.chosen += n
        else:
            entry.generated += n
    return report


def compare_while_frequency(
    report: FrequencyReport, p_stop: float, p_bool: Optional[float] = None
) -> tuple[float, float]:
    """(measured while success fraction, analytic value at matched parameters)."""
    p_bool = report.bool_fraction if p_bool is None else p_bool
    measured = report.ops[WHILE].fraction if WHILE in report.ops else 0.0
    return measured, while_success_probability(FreqModelParams(p_stop, p_bool))
