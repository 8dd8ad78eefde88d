import json
import math
from functools import reduce
from pathlib import Path

import numpy as np
import pytest

from center_scope.cyclotomic import CycloNumber
from center_scope.formats import load_input
from center_scope.fusion_data import DecompositionProblem, build_problem

DATA = Path(__file__).parent / "data"
FIXTURES = Path(__file__).parent.parent / "src" / "center_scope" / "data"
FIXTURE_NAMES = ("trivial", "fibonacci", "one_v_four_v_one", "extended_haagerup")


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def load_fixture(name: str):
    return load_input(fixture_path(name))


def load_problem(name: str) -> DecompositionProblem:
    return build_problem(load_fixture(name))


def reference_eh() -> dict:
    return json.loads((DATA / "extended_haagerup_reference.json").read_text())


def vacuous_problem(M) -> DecompositionProblem:
    """A problem whose algebraic conditions accept every nonzero column.

    Over Q the dot with an all-ones vector is the column sum, a positive
    integer, hence a d-number; D is a multiple of every possible column sum.
    """
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    bound = max(1, sum(math.isqrt(int(M[i, i])) for i in range(n)))
    D = reduce(lambda a, b: a * b // math.gcd(a, b), range(1, bound + 1), 1)
    one = CycloNumber.from_rational(1, 1)
    return DecompositionProblem(M=M, vs=((one,) * n,), D=CycloNumber.from_rational(1, D), conductor=1)


def column_multiset(A) -> tuple:
    A = np.asarray(A)
    return tuple(sorted((tuple(int(x) for x in A[:, j]) for j in range(A.shape[1])), reverse=True))


@pytest.fixture(scope="session")
def eh_problem():
    return load_problem("extended_haagerup")


@pytest.fixture(scope="session")
def eh_reference():
    return reference_eh()


@pytest.fixture(scope="session")
def eh_outcome(eh_problem):
    from center_scope.solver import search_all

    return search_all(eh_problem)


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


class criterion:
    """Context manager that records one PASS/FAIL line per acceptance criterion."""

    def __init__(self, tag: str, title: str):
        self.tag, self.title = tag, title

    def __enter__(self):
        import time

        self._t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time

        dt = time.perf_counter() - self._t0
        status = "PASS" if exc_type is None else "FAIL"
        line = f"[{status}] {self.tag} {self.title} ({dt:.2f}s)"
        if exc is not None:
            detail = str(exc).strip().splitlines()
            line += f": {detail[0] if detail else exc_type.__name__}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
