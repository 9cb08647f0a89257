"""Printer and recursive-descent parser for the ``.rir`` text format.

One op per line, two spaces of indentation per region level::

    "func.func"() {sym_name = @main} : () -> () { ^bb(%0: i32):
      %1 = "arith.constant"() {value = 2 : i32} : () -> (i32)
      %2 = "arith.muli"(%0, %1) : (i32, i32) -> (i32)
      "func.return"(%2) : (i32) -> ()
    }

Value ids are renumbered in definition order when printing. See
``docs/format.md`` for the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from irsmith.ir import (
    I1,
    I32,
    I64,
    INDEX,
    PREDICATES,
    Attribute,
    Block,
    BoolAttr,
    IntAttr,
    Module,
    Operation,
    PredicateAttr,
    Region,
    SymbolAttr,
    Type,
    Value,
    memref,
)

INDENT = "  "


# -- printing ------------------------------------------------------------------


def format_attribute(attr: Attribute) -> str:
    if isinstance(attr, IntAttr):
        return f"{attr.value} : {attr.type}"
    if isinstance(attr, BoolAttr):
        return "true" if attr.value else "false"
    if isinstance(attr, PredicateAttr):
        return attr.predicate
    return f"@{attr.name}"


def _types(types) -> str:
    return "(" + ", ".join(str(t) for t in types) + ")"


class _Printer:
    def __init__(self) -> None:
        self.names: dict[int, int] = {}
        self.lines: list[str] = []

    def name(self, v: Value) -> str:
        n = self.names.get(v.id)
        if n is None:
            # only reachable for malformed input that uses a value before
            # defining it; name it now so the text still round-trips
            n = self.names[v.id] = len(self.names)
        return f"%{n}"

    def define(self, v: Value) -> str:
        if v.id not in self.names:
            self.names[v.id] = len(self.names)
        return f"%{self.names[v.id]}"

    def op(self, op: Operation, depth: int, suffix: str = "") -> None:
        pad = INDENT * depth
        head = ""
        if op.results:
            head = ", ".join(self.define(r) for r in op.results) + " = "
        text = f'{head}"{op.name}"(' + ", ".join(self.name(v) for v in op.operands) + ")"
        if op.attributes:
            items = sorted(op.attributes.items())
            text += " {" + ", ".join(f"{k} = {format_attribute(a)}" for k, a in items) + "}"
        text += f" : {_types(v.type for v in op.operands)} -> {_types(op.result_types)}"
        if not op.regions:
            self.lines.append(pad + text + suffix)
            return
        for k, region in enumerate(op.regions):
            opener = self.region_header(region.block)
            if k == 0:
                self.lines.append(pad + text + " {" + opener)
            else:
                self.lines.append(pad + "} {" + opener)
            for inner in region.block.ops:
                self.op(inner, depth + 1)
        self.lines.append(pad + "}" + suffix)

    def region_header(self, block: Block) -> str:
        if not block.args:
            return ""
        args = ", ".join(f"{self.define(a)}: {a.type}" for a in block.args)
        return f" ^bb({args}):"


def print_module(module: Module) -> str:
    """Canonical text of ``module``; LF line endings and a trailing newline."""
    p = _Printer()
    for f in module.body.block.ops:
        p.op(f, 0)
    return "\n".join(p.lines) + "\n"


# -- parsing -------------------------------------------------------------------


@dataclass
class ParseError(Exception):
    line: int
    column: int
    expected: str
    found: str = ""

    def __str__(self) -> str:
        tail = f", found {self.found!r}" if self.found else ""
        return f"{self.line}:{self.column}: expected {self.expected}{tail}"


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<string>"[^"\n]*")
  | (?P<value>%[0-9]+)
  | (?P<symbol>@[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<label>\^[A-Za-z_][A-Za-z0-9_]*)
  | (?P<memref>memref<[0-9]+xi32>)
  | (?P<int>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[(){}:,=])
    """,
    re.VERBOSE,
)

_SCALARS = {"i1": I1, "i32": I32, "i64": I64, "index": INDEX}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, "a token", text[pos])
        kind = m.lastgroup or ""
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.module = Module()
        self.defs: dict[str, Value] = {}
        # operand slots to resolve once every definition has been seen
        self.uses: list[tuple[Operation, int, _Tok, Type]] = []
        self.max_id = -1

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: str) -> ParseError:
        t = self.tok
        return ParseError(t.line, t.col, expected, t.text or "end of input")

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("punct", "arrow", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        t = self.tok
        if not self.accept(text):
            raise self.fail(f"'{text}'")
        return t

    def expect_kind(self, kind: str, what: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            raise self.fail(what)
        self.i += 1
        return t

    # grammar
    def parse_module(self) -> Module:
        top = self.module.body.block
        while self.tok.kind != "eof":
            top.append(self.parse_op())
        for op, j, tok, t in self.uses:
            v = self.defs.get(tok.text)
            if v is None:
                raise ParseError(tok.line, tok.col, "a defined value", tok.text)
            if v.type != t:
                raise ParseError(tok.line, tok.col, f"a value of type {t}", f"{tok.text}: {v.type}")
            op.operands[j] = v
        self.module.bump_ids(self.max_id)
        return self.module

    def parse_type(self) -> Type:
        t = self.tok
        if t.kind == "memref":
            self.i += 1
            return memref(int(t.text[len("memref<"):-len("xi32>")]))
        if t.kind == "ident" and t.text in _SCALARS:
            self.i += 1
            return _SCALARS[t.text]
        raise self.fail("a type")

    def parse_type_list(self) -> list[Type]:
        self.expect("(")
        types: list[Type] = []
        if not self.accept(")"):
            types.append(self.parse_type())
            while self.accept(","):
                types.append(self.parse_type())
            self.expect(")")
        return types

    def new_value(self, tok: _Tok, t: Type, owner, index: int) -> Value:
        if tok.text in self.defs:
            raise ParseError(tok.line, tok.col, "a fresh value name", tok.text)
        vid = int(tok.text[1:])
        self.max_id = max(self.max_id, vid)
        v = Value(vid, t, owner, index)
        self.defs[tok.text] = v
        return v

    def parse_attribute(self) -> Attribute:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            self.expect(":")
            return IntAttr(int(t.text), self.parse_type())
        if t.kind == "symbol":
            self.i += 1
            return SymbolAttr(t.text[1:])
        if t.kind == "ident" and t.text in ("true", "false"):
            self.i += 1
            return BoolAttr(t.text == "true")
        if t.kind == "ident" and t.text in PREDICATES:
            self.i += 1
            return PredicateAttr(t.text)
        raise self.fail("an attribute value")

    def parse_op(self) -> Operation:
        result_toks: list[_Tok] = []
        if self.tok.kind == "value":
            result_toks.append(self.expect_kind("value", "a value"))
            while self.accept(","):
                result_toks.append(self.expect_kind("value", "a value"))
            self.expect("=")
        name = self.expect_kind("string", "a quoted op name").text[1:-1]
        if "." not in name:
            raise ParseError(self.toks[self.i - 1].line, self.toks[self.i - 1].col, "'dialect.op'", name)
        self.expect("(")
        operand_toks: list[_Tok] = []
        if not self.accept(")"):
            operand_toks.append(self.expect_kind("value", "an operand"))
            while self.accept(","):
                operand_toks.append(self.expect_kind("value", "an operand"))
            self.expect(")")
        attrs: dict[str, Attribute] = {}
        if self.accept("{"):
            while True:
                key = self.expect_kind("ident", "an attribute name").text
                self.expect("=")
                attrs[key] = self.parse_attribute()
                if not self.accept(","):
                    break
            self.expect("}")
        self.expect(":")
        operand_types = self.parse_type_list()
        self.expect("->")
        result_types = self.parse_type_list()
        if len(operand_types) != len(operand_toks):
            raise self.fail(f"{len(operand_toks)} operand types")
        if len(result_types) != len(result_toks):
            raise self.fail(f"{len(result_toks)} result types")

        op = Operation(name, [], attrs, [], [])
        for j, (tok, t) in enumerate(zip(operand_toks, operand_types)):
            # typed placeholder until the definition is resolved
            op.operands.append(Value(-1, t, op, j))
            self.uses.append((op, j, tok, t))
        regions: list[Region] = []
        if self.accept("{"):
            regions.append(self.parse_region_body())
            while self.tok.text == "{":
                self.i += 1
                regions.append(self.parse_region_body())
        for r in regions:
            r.parent = op
        op.regions = regions
        # results are defined after the op's regions, matching the printer
        op.results = [self.new_value(tok, t, op, k) for k, (tok, t) in enumerate(zip(result_toks, result_types))]
        return op

    def parse_region_body(self) -> Region:
        """Parse after the opening brace, through the closing brace."""
        block = self.module.new_block()
        if self.tok.kind == "label":
            self.i += 1
            self.expect("(")
            if not self.accept(")"):
                while True:
                    vt = self.expect_kind("value", "a block argument")
                    self.expect(":")
                    t = self.parse_type()
                    block.args.append(self.new_value(vt, t, block, len(block.args)))
                    if not self.accept(","):
                        break
                self.expect(")")
            self.expect(":")
        while self.tok.text != "}":
            if self.tok.kind == "eof":
                raise self.fail("'}'")
            block.append(self.parse_op())
        self.i += 1
        term = block.ops[-1] if block.ops else None
        declared = [v.type for v in term.operands] if term is not None and _is_term(term) else []
        return Region(block, declared)


def _is_term(op: Operation) -> bool:
    from irsmith.registry import is_terminator

    return is_terminator(op)


def parse_module(text: str) -> Module:
    """Parse ``.rir`` text; malformed input raises ParseError.

    Well-formed text that breaks IR rules still parses; run the verifier on
    the result.
    """
    import irsmith.dialects  # noqa: F401

    return _Parser(text).parse_module()
