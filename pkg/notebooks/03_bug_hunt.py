"""
Finding injected optimizer bugs
===============================

The optimizer ships with two switchable bugs. B1 lets dead-code
elimination delete side-effect-free while loops, which can make a
non-terminating program terminate. B2 folds ``xori x, x`` to 1. A small
campaign per bug shows how failures are grouped and replayed.
"""

# %%
import tempfile

from irsmith import GenConfig
from irsmith.fuzz import replay, run_campaign
from irsmith.passes import BugInjection

config = GenConfig(seed=0)
out = tempfile.mkdtemp(prefix="irsmith-demo-")

for bug in ("b2", "b1"):
    inject = BugInjection.parse([bug])
    report = run_campaign(config, inject, 200, output_dir=f"{out}/{bug}", fuel=20_000)
    print(f"--- {bug}: {report.programs_generated} programs, {len(report.groups)} groups")
    for g in report.groups[:5]:
        print(f"{g.count:5d}  {g.verdict.value:<18} {g.normalized_message[:90]}")

# %%
# B2 can also show up as a TerminationSuspect: a misfolded xor that feeds a
# loop condition changes how many times the loop runs.

# %%
# Any group replays from its first seed alone.
if report.groups:
    g = report.groups[0]
    for v in replay(g.first_seed, config, inject, fuel=20_000):
        print(v.args, v.kind.value)

# %%
# Digits are masked before hashing, so the same bug reached with other
# constants lands in one group.
from irsmith.fuzz import group_digest, normalize_message

a = "ValueMismatch: original returned (0, 7) but optimized returned (1, 7)"
b = "ValueMismatch: original returned (3, 9) but optimized returned (1, 40)"
print(normalize_message(a))
print(group_digest(normalize_message(a)) == group_digest(normalize_message(b)))
