"""
Generating, printing and running a random program
=================================================

A short tour of the library: build one program from a seed, look at its
text, check that it verifies and parses back to the same module, then run
it before and after optimization.
"""

# %%
# One program per seed. The same seed and config always give the same text.
from irsmith import GenConfig, generate_module, print_module

config = GenConfig(seed=3)
module = generate_module(config)
text = print_module(module)
print(text)

# %%
# The verifier reports structural problems as a list; an empty list means clean.
from irsmith import parse_module, structural_equal, verify_module

print("violations:", verify_module(module))
print("round trip equal:", structural_equal(parse_module(text), module))

# %%
# Run main on a few input vectors. Every run is bounded by fuel (ops executed).
from irsmith import input_vectors, interpret
from irsmith.interp import describe

for args in input_vectors(module, config.seed, 4):
    print(args, "->", describe(interpret(module, args, fuel=100_000)))

# %%
# Optimize and compare. Without injected bugs every verdict should be Agree.
from irsmith import differential_check, run_pipeline

optimized = run_pipeline(module).module
print("ops before/after:", text.count("\n"), print_module(optimized).count("\n"))
for v in differential_check(module, input_vectors(module, config.seed, 4)):
    print(v.args, v.message)
