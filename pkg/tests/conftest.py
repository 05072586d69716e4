import pytest

from ralloc import create_instance

E1_ROWS = [[10, 6, 3, 1], [8, 7, 2, 2]]
E2_ROWS = [[10, 9, 8], [10, 10, 4]]
E3_ROWS = [[10, 6, 3, 1], [9, 5, 4, 3.5]]
E4_ROWS = [[10, 6, 3, 1], [9, 8, 7.5, 7.2]]


@pytest.fixture
def e1():
    return create_instance((3, 3), 3, 100, E1_ROWS, name="e1")


@pytest.fixture
def e2():
    return create_instance((2, 2), 2, 100, E2_ROWS, name="e2")


@pytest.fixture
def e3():
    return create_instance((3, 3), 3, 100, E3_ROWS, convex=True, name="e3")


@pytest.fixture
def e4():
    return create_instance((3, 3), 4, 100, E4_ROWS, convex=True, name="e4")
