import pytest

from diractree.tree import TailRule, new_tree


@pytest.fixture
def dyadic():
    return new_tree([1, 2, 2], [0, 1, 2], TailRule(2, "arithmetic", 1.0))


@pytest.fixture
def ternary():
    return new_tree([1, 3, 2], [0, 1, 2], TailRule(2, "arithmetic", 1.0))


@pytest.fixture
def geometric_up():
    # edge lengths 1, 2, 4, ...
    return new_tree([1], [0, 1], TailRule(2, "geometric", 1.0, 2.0))


@pytest.fixture
def geometric_down():
    # edge lengths 1, 1/2, 1/4, ...
    return new_tree([1, 2, 2], [0, 1, 1.5, 1.75], TailRule(2, "geometric", 1.0, 0.5))
