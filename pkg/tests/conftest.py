import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from models import Config, FormFactor, FormFactorFamily, FriedrichsModel


def lorentzian_model(g: float, omega0: float = 1.0, omega_c: float = 10.0) -> FriedrichsModel:
    return FriedrichsModel(omega0=omega0, form_factor=FormFactor(FormFactorFamily.THRESHOLD_LORENTZIAN, g, omega_c))


@pytest.fixture
def config():
    return Config()


@pytest.fixture
def weak_model():
    return lorentzian_model(0.1)


@pytest.fixture
def model():
    return lorentzian_model(0.2)


@pytest.fixture
def free_model():
    return lorentzian_model(0.0)


@pytest.fixture
def flat_model():
    return FriedrichsModel(omega0=1.0, form_factor=FormFactor(FormFactorFamily.FLAT_CUTOFF, 0.1, 10.0))
