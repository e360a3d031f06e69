import random
from fractions import Fraction

import pytest

from jtcurv import build_m14
from jtcurv.realizations import AFamily, build_M_A


@pytest.fixture(scope="session")
def m14():
    return build_m14()


def rational_point(rng, n=14, num=6, den=4):
    return tuple(Fraction(rng.randint(-num, num), rng.randint(1, den))
                 for _ in range(n))


def random_afamily(rng, num=4, den=3):
    return AFamily({(i, j): Fraction(rng.randint(-num, num), rng.randint(1, den))
                    for i in (1, 2, 3) for j in (1, 2)})


@pytest.fixture
def rng():
    return random.Random(20260823)


@pytest.fixture(scope="session")
def ones_metric():
    # every a_{i,j} = 1
    return build_M_A(AFamily({(i, j): Fraction(1)
                              for i in (1, 2, 3) for j in (1, 2)}))


# the hand-solved locally symmetric parameter set
SYMMETRIC_A = AFamily({(1, 1): Fraction(1), (2, 2): Fraction(1),
                       (2, 1): Fraction(2, 3), (1, 2): Fraction(2, 3),
                       (3, 1): Fraction(0), (3, 2): Fraction(0)})


@pytest.fixture(scope="session")
def symmetric_metric():
    return build_M_A(SYMMETRIC_A)
