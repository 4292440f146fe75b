from pathlib import Path

import pytest

from tldforge.parser import parse_types
from tldforge.workspace import load_workspace

FIXTURES = Path(__file__).parent / "fixtures"

EXAMPLE_TYPES = """
fruit ::= enum {orange, apple, banana, pineapple, strawberry}.
nat ::= zero | s(nat).
list ::= empty_list | cons_list(term, list).
nat_list ::= empty_list | cons_list(nat, nat_list).
nat_set == nat_list.
"""


@pytest.fixture(scope="session")
def example_env():
    env, diags = parse_types(EXAMPLE_TYPES)
    assert not diags
    return env


@pytest.fixture(scope="session")
def nat_env():
    env, diags = parse_types("nat ::= zero | s(nat).")
    assert not diags
    return env


@pytest.fixture(scope="session")
def maxprefix_dir():
    return FIXTURES / "maxprefix"


@pytest.fixture(scope="session")
def maxprefix_ws(maxprefix_dir):
    result = load_workspace(maxprefix_dir / "manifest.txt")
    assert result.ok, [d.format() for d in result.diagnostics]
    return result.workspace


@pytest.fixture(scope="session")
def golden_dir():
    return FIXTURES / "golden"
