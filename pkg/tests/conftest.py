import random

import pytest

from orbint.poly import Ideal, MultiPoly
from orbint.quotient import model_a1, model_a2, model_product, model_trivial


@pytest.fixture(scope="session")
def a1():
    return model_a1()


@pytest.fixture(scope="session")
def a2():
    return model_a2()


@pytest.fixture(scope="session")
def trivial2():
    return model_trivial(2)


@pytest.fixture(scope="session")
def trivial3():
    return model_trivial(3)


@pytest.fixture(scope="session")
def prod_a1_t1(a1):
    return model_product(a1, model_trivial(1))


@pytest.fixture
def rng():
    return random.Random(20240817)


def upvar(model, name):
    return MultiPoly.var(model.field, model.uvars, name)


def upideal(model, *gens):
    return Ideal(model.field, model.uvars, list(gens))


@pytest.fixture(scope="session")
def helpers():
    class H:
        upvar = staticmethod(upvar)
        upideal = staticmethod(upideal)
    return H
