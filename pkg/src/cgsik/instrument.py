"""Process-wide call counters used to assert properties of the online path
(no Groebner basis computed, no univariate solve for infeasible targets)."""

from collections import Counter
from contextlib import contextmanager

COUNTERS: Counter = Counter()

BUCHBERGER = "buchberger"
UNIVARIATE_SOLVE = "univariate_solve"


def bump(name: str, n: int = 1) -> None:
    COUNTERS[name] += n


def reset() -> None:
    COUNTERS.clear()


@contextmanager
def watch():
    """Yield a Counter holding the increments made inside the block."""
    before = COUNTERS.copy()
    delta = Counter()
    try:
        yield delta
    finally:
        for k, v in COUNTERS.items():
            d = v - before.get(k, 0)
            if d:
                delta[k] = d
