from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from taylorlam.resource import Bag, RAbs, RApp, RFree, RVar
from taylorlam.syntax import Abs, App, Free, Var

settings.register_profile(
    "repo", max_examples=100, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

NAMES = "xyzuvw"


def _lam(draw, n: int, k: int, free):
    if n <= 1:
        return draw(st.sampled_from([Free(f) for f in free] + [Var(i) for i in range(k)]))
    if n == 2 or draw(st.booleans()):
        return Abs(_lam(draw, n - 1, k + 1, free), draw(st.sampled_from(NAMES)))
    left = draw(st.integers(1, n - 2))
    return App(_lam(draw, left, k, free), _lam(draw, n - 1 - left, k, free))


@st.composite
def lam_terms(draw, max_size: int = 8, free=("x", "y", "z")):
    """Closed-or-open lambda terms with at most ``max_size`` nodes."""
    n = draw(st.integers(1, max_size))
    return _lam(draw, n, 0, free)


def _res(draw, n: int, k: int, free):
    if n <= 1:
        return draw(st.sampled_from([RFree(f) for f in free] + [RVar(i) for i in range(k)]))
    if draw(st.booleans()):
        return RAbs(_res(draw, n - 1, k + 1, free), draw(st.sampled_from(NAMES)))
    head = draw(st.integers(1, n - 1))
    left = n - 1 - head
    elems = []
    while left > 0:
        s = draw(st.integers(1, left))
        elems.append(_res(draw, s, k, free))
        left -= s
    return RApp(_res(draw, head, k, free), Bag(elems))


@st.composite
def resource_terms(draw, max_size: int = 8, free=("x", "y")):
    n = draw(st.integers(1, max_size))
    return _res(draw, n, 0, free)
