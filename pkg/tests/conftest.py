import numpy as np
import pytest
from hypothesis import strategies as st

from bmduality.core import ExactComplex
from bmduality.kelvin import KelvinFunction

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, ok: bool, summary: str) -> None:
    ACCEPTANCE[number] = (bool(ok), summary)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, summary = ACCEPTANCE[k]
        terminalreporter.write_line(f"AC{k:02d} {'PASS' if ok else 'FAIL'}  {summary}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


small_int = st.integers(min_value=-4, max_value=4)
gaussian = st.builds(ExactComplex, small_int, small_int)


@st.composite
def kelvin_functions(draw, n=2, max_exp=2, max_m=2, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        p = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        q = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        m = draw(st.integers(0, max_m))
        terms[(p, q, m)] = draw(gaussian)
    return KelvinFunction(n, terms)


@st.composite
def holomorphic_polys(draw, n=2, max_deg=3, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        p = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        terms[(p, (0,) * n, 0)] = draw(gaussian)
    return KelvinFunction(n, terms)


@st.composite
def polynomials(draw, n=2, max_deg=2, max_terms=3):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        p = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        q = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        terms[(p, q, 0)] = draw(gaussian)
    return KelvinFunction(n, terms)
