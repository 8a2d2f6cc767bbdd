import numpy as np
import pytest

from tgraphs import Twist, Window, build_tgraph, build_triangle


@pytest.fixture(scope="session")
def equilateral():
    return build_triangle(1 / 3, 1 / 3, 1 / 3)


@pytest.fixture(scope="session")
def scalene():
    return build_triangle(0.5, 0.3, 0.2)


@pytest.fixture(scope="session")
def t_eq(equilateral):
    return build_tgraph(equilateral, Twist.from_angle(0.37), Window.centered(30),
                        check=False)


@pytest.fixture(scope="session")
def t_sc(scalene):
    return build_tgraph(scalene, Twist.from_angle(0.71), Window.centered(30),
                        check=False)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
