"""Differential fuzzing campaigns and bug grouping.

Failures are grouped by the MD5 digest of their message after every run of
decimal digits has been replaced by ``#``, so the same bug reached through
different constants, indices or paths lands in one group.

Output directory layout (column orders are frozen)::

    programs/<index>_<seed>.rir
    report.txt     human-readable summary
    groups.tsv     digest, count, first_seed, normalized_message
    series.tsv     elapsed_seconds, group_count
"""

from __future__ import annotations

import hashlib
import re
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

from irsmith.builder import generate_module
from irsmith.config import GenConfig
from irsmith.difftest import (
    ESCALATION_FACTOR,
    Verdict,
    VerdictKind,
    differential_check,
    input_vectors,
)
from irsmith.interp import DEFAULT_FUEL
from irsmith.passes import DEFAULT_PIPELINE, NO_BUGS, BugInjection, PassId, run_pipeline
from irsmith.rng import derive_seed
from irsmith.textio import parse_module, print_module

GROUPS_HEADER = "digest\tcount\tfirst_seed\tnormalized_message"
SERIES_HEADER = "elapsed_seconds\tgroup_count"

_DIGITS = re.compile(r"[0-9]+")


def normalize_message(msg: str) -> str:
    """Replace every maximal run of ASCII digits with a single ``#``."""
    return _DIGITS.sub("#", msg)


def group_digest(normalized: str) -> str:
    return hashlib.md5(normalized.encode("utf-8")).hexdigest()


@dataclass
class BugGroup:
    digest: str
    normalized_message: str
    count: int
    first_seed: int
    representative_path: str
    verdict: VerdictKind
    first_index: int = 0


@dataclass
class Budget:
    programs: Optional[int] = None
    seconds: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.programs is None) == (self.seconds is None):
            raise ValueError("give exactly one of programs or seconds")


@dataclass
class ProgramResult:
    index: int
    seed: int
    text: str
    verdicts: list[tuple[VerdictKind, str]]
    gen_seconds: float
    check_seconds: float
    reached_fixpoint: bool


@dataclass
class CampaignReport:
    programs_generated: int = 0
    verdict_counts: dict[str, int] = field(
        default_factory=lambda: {k.value: 0 for k in VerdictKind}
    )
    groups: list[BugGroup] = field(default_factory=list)
    gen_seconds: list[float] = field(default_factory=list)
    check_seconds: list[float] = field(default_factory=list)
    pipeline_timeouts: int = 0
    series: list[tuple[float, int]] = field(default_factory=list)
    inject: str = "none"
    master_seed: int = 0

    def groups_tsv(self) -> str:
        rows = [GROUPS_HEADER]
        for g in self.groups:
            rows.append(f"{g.digest}\t{g.count}\t{g.first_seed}\t{g.normalized_message}")
        return "\n".join(rows) + "\n"

    def series_tsv(self) -> str:
        rows = [SERIES_HEADER] + [f"{t:.3f}\t{n}" for t, n in self.series]
        return "\n".join(rows) + "\n"

    def summary(self) -> str:
        lines = [
            f"master_seed: {self.master_seed}",
            f"injected_bugs: {self.inject}",
            f"programs_generated: {self.programs_generated}",
        ]
        for k, n in self.verdict_counts.items():
            lines.append(f"verdict.{k}: {n}")
        lines.append(f"bug_groups: {len(self.groups)}")
        lines.append(f"pipeline_iteration_cap_hit: {self.pipeline_timeouts}")
        for label, xs in (("generation", self.gen_seconds), ("check", self.check_seconds)):
            lines.append(f"{label}_seconds.median: {_median(xs):.6f}")
            lines.append(f"{label}_seconds.p95: {_p95(xs):.6f}")
        for g in self.groups:
            lines.append(
                f"group {g.digest} count={g.count} first_seed={g.first_seed} "
                f"program={g.representative_path} :: {g.normalized_message}"
            )
        return "\n".join(lines) + "\n"


def _median(xs: Sequence[float]) -> float:
    return statistics.median(xs) if xs else 0.0


def _p95(xs: Sequence[float]) -> float:
    if not xs:
        return 0.0
    s = sorted(xs)
    return s[min(len(s) - 1, int(0.95 * len(s)))]


def program_filename(index: int, seed: int) -> str:
    return f"{index}_{seed}.rir"


def check_program(
    index: int,
    config: GenConfig,
    inject: BugInjection,
    inputs_per_program: int,
    fuel: int,
    passes: Sequence[PassId],
    escalation_factor: int = ESCALATION_FACTOR,
) -> ProgramResult:
    seed = derive_seed(config.seed, index)
    t0 = time.perf_counter()
    module = generate_module(config.replace(seed=seed))
    t1 = time.perf_counter()
    pipeline = run_pipeline(module, passes, inject)
    verdicts = differential_check(
        module,
        input_vectors(module, seed, inputs_per_program),
        inject=inject,
        fuel=fuel,
        escalation_factor=escalation_factor,
        optimized=pipeline.module,
    )
    t2 = time.perf_counter()
    return ProgramResult(
        index,
        seed,
        print_module(module),
        [(v.kind, v.message) for v in verdicts],
        t1 - t0,
        t2 - t1,
        pipeline.reached_fixpoint,
    )


def _results(
    worker, budget: Budget, jobs: int, start: float
) -> Iterator[ProgramResult]:
    if budget.programs is not None:
        indices = range(budget.programs)
        if jobs <= 1:
            yield from map(worker, indices)
        else:
            with ProcessPoolExecutor(jobs) as pool:
                # map() yields in index order whatever the completion order
                yield from pool.map(worker, indices, chunksize=8)
        return
    index = 0
    assert budget.seconds is not None
    while time.perf_counter() - start < budget.seconds:
        yield worker(index)
        index += 1


def run_campaign(
    config: GenConfig,
    inject: BugInjection = NO_BUGS,
    budget: Union[int, Budget] = 100,
    inputs_per_program: int = 4,
    output_dir: Union[str, Path] = "campaign",
    fuel: int = DEFAULT_FUEL,
    passes: Sequence[PassId] = DEFAULT_PIPELINE,
    jobs: int = 1,
    escalation_factor: int = ESCALATION_FACTOR,
) -> CampaignReport:
    """Generate, optimize and differentially check programs; group failures."""
    if isinstance(budget, int):
        budget = Budget(programs=budget)
    out = Path(output_dir)
    programs_dir = out / "programs"
    programs_dir.mkdir(parents=True, exist_ok=True)
    report = CampaignReport(inject=str(inject), master_seed=config.seed)
    groups: dict[str, BugGroup] = {}
    worker = partial(
        check_program,
        config=config,
        inject=inject,
        inputs_per_program=inputs_per_program,
        fuel=fuel,
        passes=tuple(passes),
        escalation_factor=escalation_factor,
    )
    start = time.perf_counter()
    try:
        for res in _results(worker, budget, jobs, start):
            path = programs_dir / program_filename(res.index, res.seed)
            path.write_text(res.text)
            report.programs_generated += 1
            report.gen_seconds.append(res.gen_seconds)
            report.check_seconds.append(res.check_seconds)
            report.pipeline_timeouts += not res.reached_fixpoint
            before = len(groups)
            for kind, message in res.verdicts:
                report.verdict_counts[kind.value] += 1
                if kind is VerdictKind.AGREE:
                    continue
                norm = normalize_message(message)
                digest = group_digest(norm)
                g = groups.get(digest)
                if g is None:
                    groups[digest] = BugGroup(
                        digest, norm, 1, res.seed, str(path), kind, res.index
                    )
                else:
                    g.count += 1
            if len(groups) != before or not report.series:
                report.series.append((time.perf_counter() - start, len(groups)))
    finally:
        report.groups = sorted(groups.values(), key=lambda g: (-g.count, g.first_index, g.digest))
        report.series.append((time.perf_counter() - start, len(groups)))
        _write_report(report, out)
    return report


def _write_report(report: CampaignReport, out: Path) -> None:
    (out / "groups.tsv").write_text(report.groups_tsv())
    (out / "series.tsv").write_text(report.series_tsv())
    (out / "report.txt").write_text(report.summary())


def read_groups(path: Union[str, Path]) -> list[tuple[str, int, int, str]]:
    rows = Path(path).read_text().splitlines()
    if not rows or rows[0] != GROUPS_HEADER:
        raise ValueError(f"{path}: not a groups.tsv file")
    out = []
    for row in rows[1:]:
        digest, count, seed, msg = row.split("\t", 3)
        out.append((digest, int(count), int(seed), msg))
    return out


def seed_from_filename(path: Union[str, Path]) -> int:
    stem = Path(path).stem
    try:
        return int(stem.rsplit("_", 1)[1])
    except (IndexError, ValueError):
        raise ValueError(f"cannot recover a seed from file name {Path(path).name!r}") from None


def replay(
    source: Union[int, str, Path],
    config: GenConfig,
    inject: BugInjection = NO_BUGS,
    inputs: Optional[Sequence[Sequence[int]]] = None,
    inputs_per_program: int = 4,
    fuel: int = DEFAULT_FUEL,
    passes: Sequence[PassId] = DEFAULT_PIPELINE,
) -> list[Verdict]:
    """Re-run the differential check for one program.

    ``source`` is either a program seed (the program is regenerated from it)
    or the path of a persisted ``.rir`` file. Without explicit ``inputs``
    the campaign's input vectors are re-derived from the seed, which for a
    file is taken from its ``<index>_<seed>.rir`` name.
    """
    if isinstance(source, int):
        seed = source
        module = generate_module(config.replace(seed=seed))
    else:
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(f"program file {path} does not exist")
        module = parse_module(path.read_text())
        seed = seed_from_filename(path) if inputs is None else 0
    if inputs is None:
        inputs = input_vectors(module, seed, inputs_per_program)
    return differential_check(module, inputs, passes, inject, fuel)
