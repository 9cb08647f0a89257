import pytest
from conftest import load_fixture, wrap_main

from irsmith import GenConfig, generate_module, parse_module
from irsmith.difftest import input_vectors
from irsmith.interp import Completed, FuelExhausted, Interpreter, InterpreterError, Trap, interpret


def run_body(body, args=(0,), fuel=10_000, arg_decl="%0: i32"):
    return interpret(parse_module(wrap_main(body, arg_decl)), list(args), fuel)


def test_doubling():
    assert interpret(load_fixture("doubling.rir"), [21], 100) == Completed((42,))


def test_constant_true_while_exhausts_fuel():
    assert interpret(load_fixture("infinite_while.rir"), [0], 1000) == FuelExhausted(1000)


def test_double_free_trap():
    out = interpret(load_fixture("double_free.rir"), [0])
    assert isinstance(out, Trap) and out.kind == "double_free"
    assert "main/body/op[2]" in out.message


def test_oob_and_use_after_free():
    out = run_body(
        '  %1 = "mem.alloc"() : () -> (memref<4xi32>)\n'
        '  %2 = "arith.constant"() {value = 5 : index} : () -> (index)\n'
        '  %3 = "mem.load"(%1, %2) : (memref<4xi32>, index) -> (i32)\n'
        '  "func.return"(%3) : (i32) -> ()\n')
    assert out.kind == "oob"
    assert out.message == "oob at main/body/op[2]: index 5 out of bounds for buffer 0 of size 4"
    out = run_body(
        '  %1 = "mem.alloc"() : () -> (memref<4xi32>)\n'
        '  %2 = "arith.constant"() {value = 1 : index} : () -> (index)\n'
        '  "mem.dealloc"(%1) : (memref<4xi32>) -> ()\n'
        '  "mem.store"(%0, %1, %2) : (i32, memref<4xi32>, index) -> ()\n'
        '  "func.return"(%0) : (i32) -> ()\n')
    assert out.kind == "use_after_free"


def test_memory_zero_initialized_and_store_load():
    out = run_body(
        '  %1 = "mem.alloc"() : () -> (memref<4xi32>)\n'
        '  %2 = "arith.constant"() {value = 1 : index} : () -> (index)\n'
        '  %3 = "arith.constant"() {value = 2 : index} : () -> (index)\n'
        '  "mem.store"(%0, %1, %2) : (i32, memref<4xi32>, index) -> ()\n'
        '  %4 = "mem.load"(%1, %2) : (memref<4xi32>, index) -> (i32)\n'
        '  %5 = "mem.load"(%1, %3) : (memref<4xi32>, index) -> (i32)\n'
        '  "func.return"(%4, %5) : (i32, i32) -> ()\n', args=(9,))
    assert out == Completed((9, 0))


def test_div_by_zero_trap_and_truncation():
    body = ('  %1 = "arith.constant"() {value = DIVISOR : i32} : () -> (i32)\n'
            '  %2 = "arith.divsi"(%0, %1) : (i32, i32) -> (i32)\n'
            '  "func.return"(%2) : (i32) -> ()\n')
    assert run_body(body.replace("DIVISOR", "0"), args=(7,)).kind == "div_by_zero"
    assert run_body(body.replace("DIVISOR", "2"), args=(-7,)) == Completed((-3,))
    # INT_MIN / -1 wraps around
    assert run_body(body.replace("DIVISOR", "-1"), args=(-(2**31),)) == Completed((-(2**31),))


def test_wraparound_arithmetic():
    out = run_body(
        '  %1 = "arith.addi"(%0, %0) : (i32, i32) -> (i32)\n'
        '  %2 = "arith.muli"(%0, %0) : (i32, i32) -> (i32)\n'
        '  %3 = "arith.subi"(%1, %2) : (i32, i32) -> (i32)\n'
        '  "func.return"(%1, %2, %3) : (i32, i32, i32) -> ()\n', args=(2**31 - 1,))
    a = (2 * (2**31 - 1) + 2**31) % 2**32 - 2**31
    b = ((2**31 - 1) ** 2 + 2**31) % 2**32 - 2**31
    c = (a - b + 2**31) % 2**32 - 2**31
    assert out == Completed((a, b, c))


def test_bitwise_and_compare_and_select():
    out = run_body(
        '  %1 = "arith.constant"() {value = -6 : i64} : () -> (i64)\n'
        '  %2 = "arith.andi"(%0, %1) : (i64, i64) -> (i64)\n'
        '  %3 = "arith.ori"(%0, %1) : (i64, i64) -> (i64)\n'
        '  %4 = "arith.xori"(%0, %1) : (i64, i64) -> (i64)\n'
        '  %5 = "arith.cmpi"(%0, %1) {predicate = slt} : (i64, i64) -> (i1)\n'
        '  %6 = "arith.select"(%5, %2, %3) : (i1, i64, i64) -> (i64)\n'
        '  "func.return"(%2, %3, %4, %5, %6) : (i64, i64, i64, i1, i64) -> ()\n',
        args=(3,), arg_decl="%0: i64")
    assert out == Completed((3 & -6, 3 | -6, 3 ^ -6, 0, 3 | -6))


def test_for_loop_trip_count_and_fuel():
    body = (
        '  %1 = "arith.constant"() {value = 0 : index} : () -> (index)\n'
        '  %2 = "arith.constant"() {value = 10 : index} : () -> (index)\n'
        '  %3 = "arith.constant"() {value = 3 : index} : () -> (index)\n'
        '  "scf.for"(%1, %2, %3) : (index, index, index) -> () { ^bb(%4: index):\n'
        '    "scf.yield"() : () -> ()\n'
        '  }\n'
        '  "func.return"(%0) : (i32) -> ()\n')
    # 3 constants + for + 4 iterations x yield + return
    assert run_body(body, fuel=9) == Completed((0,))
    assert run_body(body, fuel=8) == FuelExhausted(8)


def test_if_selects_branch():
    body = (
        '  %1 = "arith.cmpi"(%0, %0) {predicate = PRED} : (i32, i32) -> (i1)\n'
        '  %2 = "scf.if"(%1) : (i1) -> (i32) {\n'
        '    %3 = "arith.addi"(%0, %0) : (i32, i32) -> (i32)\n'
        '    "scf.yield"(%3) : (i32) -> ()\n'
        '  } {\n'
        '    "scf.yield"(%0) : (i32) -> ()\n'
        '  }\n'
        '  "func.return"(%2) : (i32) -> ()\n')
    assert run_body(body.replace("PRED", "eq"), args=(5,)) == Completed((10,))
    assert run_body(body.replace("PRED", "ne"), args=(5,)) == Completed((5,))


def test_signature_mismatch_is_hard_error():
    m = load_fixture("doubling.rir")
    with pytest.raises(InterpreterError):
        interpret(m, [], 10)
    with pytest.raises(InterpreterError):
        interpret(m, [2**40], 10)
    with pytest.raises(InterpreterError):
        interpret(m, [1], 0)


def test_determinism_and_fuel_monotonicity(corpus):
    for seed, m in enumerate(corpus[:100]):
        interp = Interpreter(m)
        for args in input_vectors(m, seed, 3):
            a = interp.run(args, 5_000)
            assert a == Interpreter(m).run(args, 5_000)
            if isinstance(a, Completed):
                assert interp.run(args, 50_000) == a
                assert interp.run(args, 5_001) == a


def test_unsafe_corpus_traps_are_well_formed(unsafe_corpus):
    kinds = set()
    for seed, m in enumerate(unsafe_corpus):
        for args in input_vectors(m, seed, 2):
            out = interpret(m, args, 5_000)
            if isinstance(out, Trap):
                kinds.add(out.kind)
                assert out.message.startswith(out.kind + " at ")
    assert {"oob", "double_free"} <= kinds
