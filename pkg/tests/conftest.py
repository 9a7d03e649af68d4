import pytest
from hypothesis import settings

settings.register_profile("eclc", deadline=None)
settings.load_profile("eclc")


@pytest.fixture
def unit_model():
    from eclc import CostModel

    return CostModel({}, default_cost=1.0, alpha=0.75)


@pytest.fixture
def zero_model():
    """All-zero costs: the validity gate always passes, so provability
    is purely structural."""
    from eclc import CostModel

    return CostModel({}, default_cost=0.0, alpha=0.75)
