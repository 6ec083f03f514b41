from fractions import Fraction
from typing import List, Tuple

import pytest

from utils.config_manager import ConfigManager
from utils.exact_arithmetic import SparseMatrix
from utils.operator_builder import Bivector
from utils.template_manager import builtin_example

Pair = Tuple[Fraction, Fraction]


def _pair(value) -> Pair:
    return (
        Fraction(int(value.x.numerator), int(value.x.denominator)),
        Fraction(int(value.y.numerator), int(value.y.denominator)),
    )


def _mul(a: Pair, b: Pair) -> Pair:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _sub(a: Pair, b: Pair) -> Pair:
    return (a[0] - b[0], a[1] - b[1])


def _inverse(a: Pair) -> Pair:
    norm = a[0] * a[0] + a[1] * a[1]
    return (a[0] / norm, -a[1] / norm)


def dense_rank(matrix: SparseMatrix) -> int:
    """Rank by textbook Gauss-Jordan on lists of (re, im) Fractions."""
    zero = (Fraction(0), Fraction(0))
    rows: List[List[Pair]] = [[zero] * matrix.cols for _ in range(matrix.rows)]
    for (i, j), value in matrix.entries.items():
        rows[i][j] = _pair(value)
    rank = 0
    for col in range(matrix.cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != zero), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inverse = _inverse(rows[rank][col])
        rows[rank] = [_mul(value, inverse) for value in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != zero:
                factor = rows[r][col]
                rows[r] = [_sub(a, _mul(factor, b)) for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@pytest.fixture
def heis_ext_1():
    return builtin_example("heis_ext", n=1)


@pytest.fixture
def w4n6_0():
    return builtin_example("W4n6", k=0)


@pytest.fixture
def p4n2_0():
    return builtin_example("P4n2", k=0)


@pytest.fixture
def wt():
    """Builds W_1 ^ T_j for a spec."""
    def build(spec, j, coeff=1):
        return Bivector.from_terms(spec, wt=[((1, j), coeff)])
    return build


@pytest.fixture
def config(monkeypatch):
    """ConfigManager re-read after each monkeypatched environment change."""
    for variable in ("HPSS_MAX_PAGES", "HPSS_LOG_LEVEL", "HPSS_TEMPLATE_DIR", "HPSS_LAYOUT_DIR"):
        monkeypatch.delenv(variable, raising=False)

    def apply(**environment):
        for variable, value in environment.items():
            monkeypatch.setenv(variable, value)
        manager = ConfigManager()
        manager.reload()
        return manager

    yield apply
    monkeypatch.undo()
    ConfigManager().reload()
