from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from berkdyn.padic.field import FieldConfig
from berkdyn.padic.scalar import PadicScalar

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def F3():
    return FieldConfig(3)


def q(field, x):
    return PadicScalar.from_rational(field, Fraction(x))
