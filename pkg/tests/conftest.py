import sys
from pathlib import Path

import pytest
from hypothesis import settings

from lefschetz_lab.algebra import Instance, build
from lefschetz_lab.linalg import FieldSpec
from lefschetz_lab.poly import Poly
from lefschetz_lab.reports import generate

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

P = 65521


@pytest.fixture(scope="session")
def F():
    return FieldSpec.prime(P)


@pytest.fixture(scope="session")
def Q():
    return FieldSpec.rational()


@pytest.fixture(scope="session")
def mono42(F):
    return build(Instance.monomial(4, 2, F))


@pytest.fixture(scope="session")
def rand42(F):
    return build(generate(4, 2, F, 11).instance)


def var(field, n, i):
    return Poly.variable(field, n, i)


# --------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run


def pytest_configure(config):
    config.acceptance = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.acceptance
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 15):
        if n in results:
            ok, title, detail = results[n]
            terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:>2} NOT RUN")
