import itertools
import random

import pytest

from rieszkit.cli import random_measure
from rieszkit.order import OrderChain, lexicographic, halfline


@pytest.fixture(scope="session")
def lex2() -> OrderChain:
    return lexicographic(2)


@pytest.fixture(scope="session")
def lex3() -> OrderChain:
    return lexicographic(3)


@pytest.fixture(scope="session")
def line() -> OrderChain:
    return halfline()


def window(dim: int, radius: int):
    return list(itertools.product(range(-radius, radius + 1), repeat=dim))


def corpus(chain: OrderChain, n: int, seed: int = 0, analytic: bool = False):
    rng = random.Random(seed)
    return [random_measure(chain, rng, analytic=analytic) for _ in range(n)]
