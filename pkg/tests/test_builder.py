import collections

import pytest

from irsmith import GenConfig, generate_module, print_module
from irsmith.builder import Builder
from irsmith.dialects.arith import make_constant
from irsmith.dialects.func import generate_functions
from irsmith.ir import I1, I32, INDEX, Region, iter_ops
from irsmith.registry import REGISTRY, OpKindSpec, Registry, Trait, UnknownOpError
from irsmith.rng import GOLDEN_GAMMA, MASK64


def fresh(config=None, registry=REGISTRY, **kw):
    """A builder whose insertion point is inside an open function-like block."""
    b = Builder(config or GenConfig(), registry, **kw)
    block = b.new_block()
    # keep a reference: a collected context manager would close the region
    b.open_scope = b.region(block, isolated=True)
    b.open_scope.__enter__()
    return b


def only(*names, **extra):
    """Config in which just ``names`` keep a positive weight."""
    weights = {s.name: 0.0 for s in REGISTRY.poolable() if s.name not in names}
    return GenConfig(op_weights=weights, **extra)


def test_visible_single_definition():
    b = fresh()
    c0 = make_constant(b, I32, 1)
    assert b.visible_values() == [c0.results[0]]


def test_visible_stops_at_isolation():
    b = Builder(GenConfig())
    outer = b.new_block()
    with b.region(outer):
        c_out = make_constant(b, I32, 1)
        with b.region(b.new_block([I32]), isolated=True) as inner:
            assert b.visible_values() == [inner.args[0]]
        with b.region(b.new_block()):
            assert b.visible_values() == [c_out.results[0]]


def test_visible_after_if_excludes_region_values():
    b = fresh()
    cond = make_constant(b, I1, 1).results[0]
    then_b, else_b = b.new_block(), b.new_block()
    with b.region(then_b):
        t = make_constant(b, I32, 4).results[0]
        b.create("scf.yield", [t])
    with b.region(else_b):
        e = make_constant(b, I32, 5).results[0]
        b.create("scf.yield", [e])
    if_op = b.create("scf.if", [cond], [I32],
                     regions=[Region(then_b, [I32]), Region(else_b, [I32])])
    assert if_op is not None
    assert b.visible_values() == [cond, if_op.results[0]]
    assert b.visible_values(I32) == [if_op.results[0]]


def test_visible_order_innermost_first():
    b = Builder(GenConfig())
    with b.region(b.new_block([I32]), isolated=True) as fn:
        x = make_constant(b, I32, 1).results[0]
        with b.region(b.new_block([INDEX])) as loop:
            y = make_constant(b, I32, 2).results[0]
            assert b.visible_values() == [loop.args[0], y, fn.args[0], x]


def test_sample_value_uniform_and_one_draw():
    b = fresh(GenConfig(seed=5))
    a = make_constant(b, I32, 1).results[0]
    c = make_constant(b, I32, 2).results[0]
    n = 10_000
    hits = sum(b.sample_value(I32) is a for _ in range(n))
    assert abs(hits / n - 0.5) <= 0.02
    state = b.rng.state
    b.sample_value(I32)
    assert b.rng.state == (state + GOLDEN_GAMMA) & MASK64
    assert b.sample_value(I1) is None
    state = b.rng.state
    b.sample_value(I1)
    assert b.rng.state == state
    assert c in b.visible_values(I32)


def test_sample_single_value_is_that_value():
    b = fresh()
    v = make_constant(b, I32, 9).results[0]
    assert {b.sample_value(I32) for _ in range(50)} == {v}


def test_create_checked():
    b = fresh()
    addi = REGISTRY.get("arith.addi").gen
    assert addi(b) is None
    make_constant(b, I32, 1)
    make_constant(b, I32, 2)
    op = addi(b)
    assert op is not None and op.name == "arith.addi"
    assert b.block.ops[-1] is op
    with pytest.raises(UnknownOpError):
        b.create("arith.nope")


def test_failed_check_leaves_block_untouched():
    b = fresh()
    c = make_constant(b, I32, 1).results[0]
    before = (len(b.block.ops), b.ops_created)
    # i32 condition violates scf.if's constraint check
    assert b.create("scf.if", [c], regions=[Region(b.new_block()), Region(b.new_block())]) is None
    assert (len(b.block.ops), b.ops_created) == before


def test_while_without_boolean_rolls_back():
    cfg = only("mem.alloc", "scf.while", seed=3, p_stop=0.3)
    b = fresh(cfg)
    make_constant(b, I32, 1)
    snapshot = (print_ops(b), b.ops_created, len(b.block.ops))
    gen_while = REGISTRY.get("scf.while").gen
    for _ in range(20):
        assert gen_while(b) is None
        assert (print_ops(b), b.ops_created, len(b.block.ops)) == snapshot


def print_ops(b):
    return [(op.name, [r.id for r in op.results]) for op in b.block.ops]


def test_while_with_boolean_is_inserted():
    cfg = only("arith.constant", "scf.while", seed=1)
    b = fresh(cfg)
    make_constant(b, I1, 1)
    op = REGISTRY.get("scf.while").gen(b)
    assert op is not None and op.name == "scf.while"
    assert op.regions[0].block.ops[-1].name == "scf.condition"


def test_fill_block_exhaustion():
    reg = Registry()
    attempts = collections.Counter()

    def never(b):
        attempts["never"] += 1
        return None

    reg.register(OpKindSpec("t.never", gen=never))
    reg.register(OpKindSpec("t.never2", gen=never))
    b = fresh(GenConfig(), reg)
    assert b.fill_block() == 0
    assert attempts["never"] == 2  # each entry tried once, then the pool is empty


def test_pool_addi_then_constant():
    cfg = only("arith.addi", "arith.constant", p_stop=0.5)
    for seed in range(100):
        events = []
        b = fresh(cfg.replace(seed=seed), listener=lambda e, n: events.append((e, n)))
        b.fill_block()
        if events[0] == ("chosen", "arith.addi"):
            assert events[1] == ("chosen", "arith.constant")
            assert events[2] == ("generated", "arith.constant")
            assert b.block.ops[0].name == "arith.constant"
            return
    raise AssertionError("no seed picked addi first")


def _counting_registry():
    reg = Registry()

    def const(b):
        return make_constant(b, I32, 0)

    reg.register(OpKindSpec("arith.constant", num_results=1, gen=const))
    return reg


def test_geometric_block_length():
    reg = _counting_registry()
    cfg = GenConfig(p_stop=0.5, max_ops_per_block=10_000, max_total_ops=10_000)
    n = 10_000
    lengths = []
    for seed in range(n):
        b = fresh(cfg.replace(seed=seed), reg)
        lengths.append(b.fill_block())
    mean = sum(lengths) / n
    assert abs(mean - 2.0) <= 0.1
    hist = collections.Counter(lengths)
    for k in (1, 2, 3, 4):
        assert abs(hist[k] / n - 0.5**k) < 0.015
    assert min(lengths) >= 1


def test_pool_removal_and_reset():
    reg = Registry()
    reg.register(OpKindSpec("t.fail", gen=lambda b: None))
    reg.register(OpKindSpec("arith.constant", num_results=1, gen=lambda b: make_constant(b, I32, 0)))
    events = []
    b = fresh(GenConfig(seed=2, p_stop=0.01, max_ops_per_block=500, max_total_ops=500), reg,
              listener=lambda e, n: events.append((e, n)))
    b.fill_block()
    rounds, current = [], []
    for e, n in events:
        if e == "chosen":
            current.append(n)
        else:
            rounds.append(current)
            current = []
    # removal: nothing is chosen twice before the next success
    assert all(len(r) == len(set(r)) for r in rounds)
    # reset: the failing op keeps coming back after successes
    assert sum("t.fail" in r for r in rounds) > 50


def test_budget_caps():
    for seed in range(100):
        m = generate_module(GenConfig(seed=seed, max_total_ops=1))
        counted = [
            op for op in iter_ops(m.body.block)
            if not REGISTRY.get(op.name).has(Trait.IS_TERMINATOR) and op.name != "func.func"
        ]
        assert len(counted) <= 1


@pytest.mark.parametrize("cfg", [
    GenConfig(),
    GenConfig(max_total_ops=20, p_stop=0.05),
    GenConfig(max_ops_per_block=3, p_stop=0.01),
    GenConfig(max_region_depth=1),
])
def test_budget_and_depth_respected(cfg):
    def depth(block, d):
        worst = d
        for op in block.ops:
            for r in op.regions:
                worst = max(worst, depth(r.block, d + 1))
        return worst

    def blocks(block):
        yield block
        for op in block.ops:
            for r in op.regions:
                yield from blocks(r.block)

    for seed in range(100):
        m = generate_module(cfg.replace(seed=seed))
        counted = [
            op for op in iter_ops(m.body.block)
            if not REGISTRY.get(op.name).has(Trait.IS_TERMINATOR) and op.name != "func.func"
        ]
        assert len(counted) <= cfg.max_total_ops
        assert depth(m.body.block, 0) <= cfg.max_region_depth
        for blk in list(blocks(m.body.block))[1:]:
            body = [op for op in blk.ops if not REGISTRY.get(op.name).has(Trait.IS_TERMINATOR)]
            assert len(body) <= cfg.max_ops_per_block


def test_insertion_point_monotone():
    for seed in range(100):
        b = Builder(GenConfig(seed=seed), record_trace=True)
        generate_functions(b)
        final = {}
        for op in iter_ops(b.module.body.block):
            blk = op.parent
            final[blk.id] = len(blk.ops)
        per_block = collections.defaultdict(list)
        for block_id, pos in b.trace:
            if block_id in final:
                per_block[block_id].append(pos)
        for block_id, positions in per_block.items():
            assert positions == list(range(final[block_id])), block_id


def test_scope_safety(monkeypatch):
    original = Builder.create

    def checked(self, name, operands=(), *args, **kw):
        visible = {v.id for v in self.visible_values()}
        assert all(v.id in visible for v in operands), name
        return original(self, name, operands, *args, **kw)

    monkeypatch.setattr(Builder, "create", checked)
    for seed in range(1000):
        generate_module(GenConfig(seed=seed, allow_unsafe_memory=seed % 2 == 1))


def test_determinism():
    for seed in (0, 1, 2**63 + 5):
        cfg = GenConfig(seed=seed)
        assert print_module(generate_module(cfg)) == print_module(generate_module(cfg))


def test_distinct_seeds_differ():
    texts = {print_module(generate_module(GenConfig(seed=s))) for s in range(100)}
    assert len(texts) > 90


def test_function_count_and_main_last():
    counts = collections.Counter()
    for seed in range(300):
        m = generate_module(GenConfig(seed=seed))
        names = [f.attributes["sym_name"].name for f in m.functions]
        assert names[-1] == "main"
        assert names[:-1] == [f"f{i}" for i in range(len(names) - 1)]
        counts[len(names)] += 1
    assert set(counts) == {1, 2, 3}
