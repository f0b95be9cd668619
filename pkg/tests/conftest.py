import os

import pytest
from hypothesis import HealthCheck, settings

from world.fixtures import fig1, fig2, fig3_MN, fig3_UN

settings.register_profile("hybis", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("hybis")

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MODELS = os.path.join(ROOT, "models")


@pytest.fixture
def figure1():
    return fig1()


@pytest.fixture
def figure2():
    return fig2(4)


@pytest.fixture
def figure3_mn():
    return fig3_MN(5)


@pytest.fixture
def figure3_un():
    return fig3_UN(5)


@pytest.fixture
def models_dir():
    return MODELS
