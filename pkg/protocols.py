from typing import Protocol

import numpy as np


class CouplingShape(Protocol):
    """ A form-factor family: λ²(ω) on the real axis and the self-energy integral ∫λ²(ω)/(z − ω) dω. """

    @property
    def analytic(self) -> bool:
        pass

    def lambda_squared(self, omega: np.ndarray) -> np.ndarray:
        pass

    def continued_lambda_squared(self, z: np.ndarray) -> np.ndarray:
        pass

    def self_energy_first(self, z: np.ndarray) -> np.ndarray:
        pass

    def self_energy_boundary(self, omega: np.ndarray) -> np.ndarray:
        pass

    def coupling_integral(self) -> float:
        pass


class Scenario(Protocol):
    def run(self) -> "RunReport":
        pass

    def series(self) -> dict[str, np.ndarray]:
        pass
