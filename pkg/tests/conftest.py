import numpy as np
import pytest

from momentforge import AtomicMeasure, generate_moments, parse_poly
from momentforge.scalars import GaussianRational

SQRT_3_2 = np.sqrt(1.5)
SQRT_7 = np.sqrt(7.0)

# z^3 - 8iz - 5w has these seven zeros of the form (z, conj z); the first five
# are Gaussian rationals, the last two quadratic irrationals.
SEVEN_POINT_ROOTS = [
    0j,
    1 + 2j,
    -1 - 2j,
    2 + 1j,
    -2 - 1j,
    SQRT_3_2 * (1 + 1j),
    -SQRT_3_2 * (1 + 1j),
]

# w + 3z^2 + 2z^3: three rational real zeros and two conjugate pairs at
# x = (-2 +- sqrt 7)/4 with imaginary part exactly +-1/4.
INTEGER_BASIS_ROOTS = [
    0j,
    -1 + 0j,
    -0.5 + 0j,
    complex((-2 + SQRT_7) / 4, 0.25),
    complex((-2 + SQRT_7) / 4, -0.25),
    complex((-2 - SQRT_7) / 4, 0.25),
    complex((-2 - SQRT_7) / 4, -0.25),
]


@pytest.fixture(scope="session")
def seven_point_cubic():
    return parse_poly("z^3 - 8iz - 5w")


@pytest.fixture(scope="session")
def integer_basis_cubic():
    return parse_poly("w + 3z^2 + 2z^3")


@pytest.fixture(scope="session")
def ten_point_quartic():
    return parse_poly("z^4 + 4/3z^3 + 2z^2 + 3w + 4z + 11/5")


@pytest.fixture(scope="session")
def seven_point_measure():
    return AtomicMeasure(tuple((z, 1.0) for z in SEVEN_POINT_ROOTS))


@pytest.fixture(scope="session")
def seven_point_moments(seven_point_measure):
    return generate_moments(seven_point_measure, 3)


@pytest.fixture(scope="session")
def integer_basis_measure():
    return AtomicMeasure(tuple((z, 1.0) for z in INTEGER_BASIS_ROOTS))


@pytest.fixture(scope="session")
def integer_basis_moments(integer_basis_measure):
    return generate_moments(integer_basis_measure, 3)


def gaussian(re, im=0):
    return GaussianRational(re, im)
