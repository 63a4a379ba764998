import pytest

from raystab.construction import build_construction
from raystab.grammar_io import parse_grammar
from raystab.groups import dihedral, img_z2_i

DIHEDRAL_RAY = ((), (1,))
IMG_RAY = ((), (1, 0))

ANBN = """
terminals: a b
nonterminals: S A B
start: S
table alpha {
  S -> S S | S | A B
}
table beta {
  A -> a A
  B -> b B
}
table gamma {
  A -> eps
  B -> eps
}
control: alpha* beta* gamma
"""

PARTITIONS = """
terminals: a b
nonterminals: S A
start: S
table alpha {
  S -> a A b S
}
table beta {
  A -> a A
}
table gamma {
  S -> eps
  A -> eps
}
control: ( alpha | beta | gamma )*
"""

TOY = """
terminals: a
nonterminals: S A B
start: S
table alpha {
  S -> A
}
table beta {
  A -> a A | B
}
table gamma {
  A -> eps
  B -> eps
}
control: alpha beta* gamma
"""

AMBIGUOUS = """
terminals: a
nonterminals: S A
start: S
table alpha {
  S -> A
}
table beta {
  A -> a A | A
}
table gamma {
  A -> eps
}
control: alpha beta* gamma
"""

EPS_IN_BETA = """
terminals: a
nonterminals: S A
start: S
table alpha {
  S -> A
}
table beta {
  A -> a A | eps
}
table gamma {
  A -> eps
}
control: alpha beta* gamma
"""

EMPTY_GAMMA = """
terminals: a
nonterminals: S A
start: S
table alpha {
  S -> A
}
table beta {
  A -> a A
}
table gamma {
  A -> empty
}
control: alpha beta* gamma
"""


@pytest.fixture(scope="session")
def D():
    return dihedral()


@pytest.fixture(scope="session")
def IMG():
    return img_z2_i()


@pytest.fixture(scope="session")
def dihedral_construction(D):
    return build_construction(D, *DIHEDRAL_RAY)


@pytest.fixture(scope="session")
def img_construction(IMG):
    return build_construction(IMG, *IMG_RAY)


@pytest.fixture
def toy():
    return parse_grammar(TOY)


@pytest.fixture
def ambiguous():
    return parse_grammar(AMBIGUOUS)


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.failed:
        n = int(name.rsplit("_", 1)[1])
        if report.failed or n not in _criteria:
            _criteria[n] = "FAIL" if report.failed else "pass"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"criterion {n}: {_criteria[n]}")
