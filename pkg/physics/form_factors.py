import math

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import ContinuationUnavailable
from models import FormFactor, FormFactorFamily
from protocols import CouplingShape


class ThresholdLorentzianShape:
    """
        λ²(ω) = g²·√ω / (1 + (ω/ω_c)²)². The √ω threshold gives the t⁻³ long-time tail of the survival
        probability, and the rational remainder lets the self-energy integral be done by residues:

            ∫₀^∞ √ω / ((ω² + c²)²(z − ω)) dω
                = πi·[ −s/(z² + c²)² + R₊(z) + R₋(z) ],     s² = z,

        where R± are the double-pole residues at ω = ±ic and s picks the sheet: s = i√(−z) on the first sheet,
        s = √z (principal) once the cut on [0, ∞) has been crossed from above.
    """

    def __init__(self, g: float, omega_c: float):
        self.g = g
        self.omega_c = omega_c
        self._prefactor = g ** 2 * omega_c ** 4

    @property
    def analytic(self) -> bool:
        return True

    def lambda_squared(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return self.g ** 2 * np.sqrt(omega) / (1 + (omega / self.omega_c) ** 2) ** 2

    def continued_lambda_squared(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.g ** 2 * np.sqrt(z) / (1 + (z / self.omega_c) ** 2) ** 2

    def _kernel(self, z: np.ndarray, s: np.ndarray) -> np.ndarray:
        c = self.omega_c
        ic = 1j * c
        s_up = math.sqrt(c) * np.exp(1j * math.pi / 4)
        s_down = math.sqrt(c) * np.exp(3j * math.pi / 4)

        residue_up = -s_up / (4 * c ** 2 * (z - ic)) * (-1 / (2 * ic) + 1 / (z - ic))
        residue_down = -s_down / (4 * c ** 2 * (z + ic)) * (1 / (2 * ic) + 1 / (z + ic))
        return 1j * math.pi * (-s / (z ** 2 + c ** 2) ** 2 + residue_up + residue_down)

    def self_energy_first(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self._prefactor * self._kernel(z, 1j * np.sqrt(-z))

    def self_energy_second(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self._prefactor * self._kernel(z, np.sqrt(z))

    def self_energy_boundary(self, omega: np.ndarray) -> np.ndarray:
        """ Σ(ω + i0) for real ω ≥ 0: level shift minus iπλ²(ω). """
        omega = np.asarray(omega, dtype=float)
        return self._prefactor * self._kernel(omega.astype(complex), np.sqrt(omega).astype(complex))

    def coupling_integral(self) -> float:
        """ ∫₀^∞ λ²(ω) dω in closed form. """
        return self.g ** 2 * self.omega_c ** 1.5 * math.pi * math.sqrt(2) / 8

    def threshold_self_energy(self) -> float:
        """ Σ(0), real and negative. """
        return -self.g ** 2 * math.sqrt(self.omega_c) * 3 * math.sqrt(2) * math.pi / 8


class FlatCutoffShape:
    """ λ²(ω) = g² on [0, ω_c]. The hard edge leaves no analytic continuation through the cut. """

    def __init__(self, g: float, omega_c: float):
        self.g = g
        self.omega_c = omega_c

    @property
    def analytic(self) -> bool:
        return False

    def lambda_squared(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return np.where((omega >= 0) & (omega <= self.omega_c), self.g ** 2, 0.0)

    def continued_lambda_squared(self, z: np.ndarray) -> np.ndarray:
        raise ContinuationUnavailable('flat_cutoff form factor has no continuation to the second sheet')

    def self_energy_first(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.g ** 2 * np.log(z / (z - self.omega_c))

    def self_energy_second(self, z: np.ndarray) -> np.ndarray:
        raise ContinuationUnavailable('flat_cutoff form factor has no continuation to the second sheet')

    def self_energy_boundary(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        c = self.omega_c
        with np.errstate(divide='ignore', invalid='ignore'):
            inside = np.log(omega / np.abs(c - omega)) - 1j * math.pi
            outside = np.log(omega / np.abs(omega - c)) + 0j
        return self.g ** 2 * np.where(omega < c, inside, outside)

    def coupling_integral(self) -> float:
        return self.g ** 2 * self.omega_c

    def threshold_self_energy(self) -> float:
        # Log divergence at ω = 0
        return -math.inf if self.g > 0 else 0.0


def shape_for(form_factor: FormFactor) -> CouplingShape:
    """ Returns the coupling shape implementing the given form-factor family. """
    if form_factor.family is FormFactorFamily.THRESHOLD_LORENTZIAN:
        return ThresholdLorentzianShape(form_factor.g, form_factor.omega_c)
    if form_factor.family is FormFactorFamily.FLAT_CUTOFF:
        return FlatCutoffShape(form_factor.g, form_factor.omega_c)
    raise ValueError(f'Unknown form factor family: {form_factor.family}')
