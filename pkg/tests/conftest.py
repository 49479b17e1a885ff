import os
import sys

from hypothesis import HealthCheck, settings, strategies as st

from walkspec.moment_map import sample

settings.register_profile(
    "default", max_examples=30, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def unbiased_shapes(draw, max_degree=6, min_degree=2):
    """Random unbiased rational shapes, exact on the mean-zero slice."""
    n = draw(st.integers(min_degree, max_degree))
    e = draw(st.integers(1, n - 1))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return sample(e, n - e, seed).to_shape()


@st.composite
def any_shapes(draw, max_reach=3):
    """Random shapes with small denominators, biased or not."""
    e = draw(st.integers(1, max_reach))
    f = draw(st.integers(1, max_reach))
    weights = draw(st.lists(st.integers(0, 5), min_size=e + f + 1, max_size=e + f + 1))
    weights[0] += 1
    weights[-1] += 1
    total = sum(weights)
    from fractions import Fraction
    from walkspec import new_shape
    return new_shape({k - e: Fraction(w, total) for k, w in enumerate(weights) if w})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
