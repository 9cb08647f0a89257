from __future__ import annotations

from pathlib import Path

import pytest

from irsmith import GenConfig, generate_module, parse_module
from irsmith.ir import Module

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> Module:
    return parse_module((FIXTURES / name).read_text())


def wrap_main(body: str, args: str = "%0: i32") -> str:
    """Wrap indented op lines into a ``main`` function."""
    return f'"func.func"() {{sym_name = @main}} : () -> () {{ ^bb({args}):\n{body}}}\n'


@pytest.fixture(scope="session")
def corpus() -> list[Module]:
    """A small fixed-seed corpus shared by property tests."""
    return [generate_module(GenConfig(seed=s)) for s in range(200)]


@pytest.fixture(scope="session")
def unsafe_corpus() -> list[Module]:
    cfg = GenConfig(allow_unsafe_memory=True)
    return [generate_module(cfg.replace(seed=s)) for s in range(200)]


# -- acceptance result lines -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str, soft: bool = False) -> str:
    status = "PASS" if ok else ("WARN" if soft else "FAIL")
    line = f"criterion {number:>2}: {status}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
