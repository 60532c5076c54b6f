import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from stablepoly.polycore import MultiPoly, parse_text

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("quick", max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def P(s: str, nvars: int | None = None) -> MultiPoly:
    return parse_text(s, nvars)


coef = st.complex_numbers(min_magnitude=0.05, max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def multipolys(draw, nvars=None, max_deg=3, max_terms=6, real=False):
    d = draw(st.integers(1, 3)) if nvars is None else nvars
    exps = draw(st.lists(st.tuples(*[st.integers(0, max_deg)] * d), min_size=1, max_size=max_terms, unique=True))
    if real:
        cs = draw(st.lists(st.floats(-1, 1).filter(lambda v: abs(v) > 0.05), min_size=len(exps), max_size=len(exps)))
    else:
        cs = draw(st.lists(coef, min_size=len(exps), max_size=len(exps)))
    return MultiPoly(d, dict(zip(exps, cs)))


@st.composite
def points(draw, d, scale=2.0):
    vals = draw(st.lists(st.tuples(st.floats(-scale, scale), st.floats(-scale, scale)), min_size=d, max_size=d))
    return tuple(complex(a, b) for a, b in vals)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[n])
