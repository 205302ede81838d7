import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ctrlprop.random_diagrams import random_diagram

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def diagrams(dialect="cqc", min_wires=0, max_wires=4, depth=6, max_ctrl=2):
    """Hypothesis strategy drawing generator seeds and wire counts."""

    @st.composite
    def build(draw):
        seed = draw(st.integers(0, 2**32 - 1))
        n = draw(st.integers(min_wires, max_wires))
        return random_diagram(random.Random(seed), wires=n, depth=depth, dialect=dialect, max_ctrl=max_ctrl)

    return build()


angles = st.floats(min_value=0.0, max_value=6.283185307179586, allow_nan=False, exclude_max=True)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
