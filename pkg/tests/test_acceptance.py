"""Acceptance criteria 1-10, one test (and one PASS/FAIL line) per criterion.

Run just this file with ``pytest tests/test_acceptance.py -v``; the lines are
collected in an "acceptance criteria" section at the end of the report.
Where a criterion does not fix an interpreter fuel, the default of 100,000
ops is used.
"""

from __future__ import annotations

import json
import math
import subprocess
import sys
import time

import pytest
from conftest import record_criterion

from irsmith import GenConfig, generate_module, parse_module, print_module, verify_module
from irsmith.difftest import VerdictKind
from irsmith.fuzz import group_digest, normalize_message, replay, run_campaign
from irsmith.ir import structural_equal
from irsmith.passes import BugInjection
from irsmith.rng import derive_seed
from irsmith.stats import (
    FreqModelParams,
    compare_while_frequency,
    length_sum_pmf,
    measure_op_frequencies,
    monte_carlo_while,
    while_success_probability,
)

CORPUS_SIZE = 10_000
CORPUS_MASTER_SEED = 0


def test_criterion_01_analytic_frequency():
    t0 = time.perf_counter()
    value = while_success_probability(FreqModelParams(0.2, 1 / 90))
    elapsed = time.perf_counter() - t0
    ok = 0.0828 <= value <= 0.0838 and elapsed < 1.0
    record_criterion(1, ok, f"P(while generated | chosen) = {value:.6f} "
                     f"(band [0.0828, 0.0838]), {elapsed * 1000:.2f} ms")
    assert ok


def test_criterion_02_model_validation():
    t0 = time.perf_counter()
    params = FreqModelParams(0.2, 1 / 90)
    exact = while_success_probability(params)
    mc = monte_carlo_while(params, 100_000, seed=0)
    z = abs(mc.estimate - exact) / mc.std_error
    norm = math.fsum(length_sum_pmf(params, s) for s in range(2001))
    elapsed = time.perf_counter() - t0
    ok = z <= 3.0 and abs(norm - 1.0) <= 1e-9 and elapsed < 10.0
    record_criterion(2, ok, f"monte-carlo {mc.estimate:.5f} +- {mc.std_error:.5f} vs "
                     f"{exact:.5f} ({z:.2f} SE); sum P(S=s) - 1 = {norm - 1:.1e}; {elapsed:.2f} s")
    assert ok


@pytest.mark.slow
def test_criterion_03_empirical_while_frequency():
    t0 = time.perf_counter()
    cfg = GenConfig(seed=CORPUS_MASTER_SEED)
    report = measure_op_frequencies(cfg, CORPUS_SIZE)
    measured, analytic = compare_while_frequency(report, cfg.p_stop)
    elapsed = time.perf_counter() - t0
    gap = 100 * (measured - analytic)
    ok = report.programs == CORPUS_SIZE and abs(gap) <= 2.0 and elapsed < 600
    record_criterion(3, ok, f"scf.while chosen->generated {measured:.4f} vs analytic "
                     f"{analytic:.4f} at (p_stop={cfg.p_stop}, p_bool={report.bool_fraction:.4f}); "
                     f"gap {gap:+.2f} pp (band +-2 pp); {CORPUS_SIZE} programs in {elapsed:.0f} s")
    assert ok


@pytest.fixture(scope="module")
def corpus_sweep():
    """Generate, verify and round-trip the 10,000-program corpus once."""
    gen_seconds = 0.0
    failures: list[str] = []
    clean = roundtrip_ok = 0
    for i in range(CORPUS_SIZE):
        seed = derive_seed(CORPUS_MASTER_SEED, i)
        t0 = time.perf_counter()
        try:
            m = generate_module(GenConfig(seed=seed))
            problems = verify_module(m)
        except Exception as exc:  # criterion 4 counts exceptions
            failures.append(f"seed {seed}: {exc!r}")
            continue
        gen_seconds += time.perf_counter() - t0
        if problems:
            failures.append(f"seed {seed}: {problems[0]}")
            continue
        clean += 1
        try:
            roundtrip_ok += structural_equal(parse_module(print_module(m)), m)
        except Exception as exc:
            failures.append(f"seed {seed}: round-trip raised {exc!r}")
    return clean, roundtrip_ok, gen_seconds, failures


@pytest.mark.slow
def test_criterion_04_generator_validity(corpus_sweep):
    clean, _, seconds, failures = corpus_sweep
    ok = clean == CORPUS_SIZE and not failures and seconds < 300
    record_criterion(4, ok, f"{clean}/{CORPUS_SIZE} verifier-clean modules, "
                     f"{len(failures)} exceptions or violations, {seconds:.0f} s")
    assert ok, failures[:3]


@pytest.mark.slow
def test_criterion_05_round_trip(corpus_sweep):
    clean, roundtrip_ok, _, _ = corpus_sweep
    ok = roundtrip_ok == CORPUS_SIZE
    record_criterion(5, ok, f"{roundtrip_ok}/{CORPUS_SIZE} modules structurally equal after "
                     "print -> parse")
    assert ok


def _generate_in_subprocess(seed: int, hash_seed: str) -> str:
    env = {"PYTHONHASHSEED": hash_seed}
    code = f"from irsmith.cli import main; main(['generate', '--seed', '{seed}'])"
    import os

    return subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True,
        env={**os.environ, **env},
    ).stdout


def test_criterion_06_determinism(tmp_path):
    same_programs = all(
        print_module(generate_module(GenConfig(seed=s)))
        == print_module(generate_module(GenConfig(seed=s)))
        for s in range(200)
    )
    local = print_module(generate_module(GenConfig(seed=7)))
    cross_process = all(_generate_in_subprocess(7, h) == local for h in ("1", "2"))
    inject = BugInjection(b2_xor_self_misfold=True)
    cfg = GenConfig(seed=6)
    run_campaign(cfg, inject, 150, output_dir=tmp_path / "a")
    run_campaign(cfg, inject, 150, output_dir=tmp_path / "b")
    a = (tmp_path / "a/groups.tsv").read_bytes()
    b = (tmp_path / "b/groups.tsv").read_bytes()
    rows = len(a.splitlines()) - 1
    ok = same_programs and cross_process and a == b
    record_criterion(6, ok, f"200 seeds print identically: {same_programs}; identical across "
                     f"processes with different hash seeds: {cross_process}; repeated campaign "
                     f"groups.tsv byte-identical: {a == b} ({rows} groups)")
    assert ok


@pytest.mark.slow
def test_criterion_07_optimizer_soundness(tmp_path):
    t0 = time.perf_counter()
    report = run_campaign(GenConfig(seed=CORPUS_MASTER_SEED), budget=1000,
                          inputs_per_program=4, output_dir=tmp_path)
    elapsed = time.perf_counter() - t0
    c = report.verdict_counts
    ok = (c["ValueMismatch"] == 0 and c["TrapMismatch"] == 0 and c["TerminationSuspect"] == 0
          and sum(c.values()) == 4000 and elapsed < 600)
    record_criterion(7, ok, f"1000 programs x 4 vectors: {json.dumps(c)}; {elapsed:.0f} s")
    assert ok


@pytest.mark.slow
@pytest.mark.parametrize("bug, kind", [
    ("b1", VerdictKind.TERMINATION_SUSPECT),
    ("b2", VerdictKind.VALUE_MISMATCH),
])
def test_criterion_08_bug_detection(tmp_path, bug, kind):
    t0 = time.perf_counter()
    inject = BugInjection.parse([bug])
    cfg = GenConfig(seed=CORPUS_MASTER_SEED)
    report = run_campaign(cfg, inject, 2000, output_dir=tmp_path)
    elapsed = time.perf_counter() - t0
    target = [g for g in report.groups if g.verdict is kind]
    replayed = 0
    for g in report.groups:
        verdicts = replay(g.first_seed, cfg, inject)
        replayed += g.verdict in {v.kind for v in verdicts}
    ok = bool(target) and replayed == len(report.groups) and elapsed < 900
    record_criterion(8, ok, f"[{bug}] {len(report.groups)} groups, {len(target)} of class "
                     f"{kind.value} ({sum(g.count for g in target)} failures); "
                     f"{replayed}/{len(report.groups)} representatives replay; {elapsed:.0f} s")
    assert ok


def test_criterion_09_grouping():
    pairs = [
        ("Trap(oob): oob at main/body/op[3]: index 9 out of bounds for buffer 0 of size 8",
         "Trap(oob): oob at main/body/op[17]: index 10 out of bounds for buffer 2 of size 4"),
        ("ValueMismatch: original returned (0, 7) but optimized returned (1, 7)",
         "ValueMismatch: original returned (12, 123456) but optimized returned (0, 5)"),
        ("TerminationSuspect: original did not terminate within 1000000 ops; optimized completed",
         "TerminationSuspect: original did not terminate within 10 ops; optimized completed"),
    ]
    collapse = all(group_digest(normalize_message(a)) == group_digest(normalize_message(b))
                   for a, b in pairs)
    distinct = len({group_digest(normalize_message(a)) for a, _ in pairs}) == len(pairs)
    md5_empty = group_digest("") == "d41d8cd98f00b204e9800998ecf8427e"
    ok = collapse and distinct and md5_empty
    record_criterion(9, ok, f"digit-only variants collapse: {collapse}; different messages stay "
                     f"apart: {distinct}; MD5('') standard vector: {md5_empty}")
    assert ok


PERF_SCRIPT = """
import json, resource, statistics, time
from irsmith import GenConfig, generate_module, print_module
cfg = GenConfig(p_stop=0.02, max_total_ops=300, max_ops_per_block=64)
times, sizes = [], []
for seed in range(200):
    t0 = time.perf_counter()
    m = generate_module(cfg.replace(seed=seed))
    dt = time.perf_counter() - t0
    n = len(print_module(m).encode())
    if 15_000 <= n <= 25_000:
        times.append(dt)
        sizes.append(n)
print(json.dumps({
    "programs": len(times),
    "median_ms": 1000 * statistics.median(times),
    "median_bytes": statistics.median(sizes),
    "peak_rss_mb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024,
}))
"""


def test_criterion_10_performance_soft():
    out = subprocess.run([sys.executable, "-c", PERF_SCRIPT], capture_output=True,
                         text=True, check=True).stdout
    r = json.loads(out)
    ok = r["programs"] > 0 and r["median_ms"] < 100 and r["peak_rss_mb"] < 64
    record_criterion(10, ok, f"median generation {r['median_ms']:.1f} ms for "
                     f"~{r['median_bytes'] / 1000:.0f} KB programs ({r['programs']} samples), "
                     f"peak RSS {r['peak_rss_mb']:.1f} MB (soft: <100 ms, <64 MB)", soft=True)
    if not ok:
        import warnings

        warnings.warn(f"soft performance target missed: {r}")
