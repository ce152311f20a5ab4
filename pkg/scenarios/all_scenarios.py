from enum import Enum, unique


@unique
class Scenarios(Enum):
    """
        Every analysis the runner knows. The value is the name used in the "scenario" field of a config file.
        New scenarios are added here, given a catalog entry below and registered in runner.py.
    """
    POLE = 'pole'
    SURVIVAL = 'survival'
    ORACLE_CHECK = 'oracle_check'
    MULTIPOLE = 'multipole'
    TWO_POLE = 'two_pole'
    LEE_FRIEDRICHS = 'lee_friedrichs'
    BASIS_CONVERGENCE = 'basis_convergence'


# One-line description and the top-level fields each scenario requires
CATALOG = {
    Scenarios.POLE: (
        'Resonance pole of a level coupled to a continuum: second-order estimate, exact second-sheet root, gap',
        ('model',)
    ),
    Scenarios.SURVIVAL: (
        'Survival amplitude by spectral quadrature, pole/background split, exponential and power-law fits',
        ('model',)
    ),
    Scenarios.ORACLE_CHECK: (
        'Finite-mode diagonalization of the discretized continuum checked against the quadrature',
        ('model',)
    ),
    Scenarios.MULTIPOLE: (
        'Mode-sum expectation value: effective decoherence rate, slow/fast partition, preferred evolution',
        ('modes',)
    ),
    Scenarios.TWO_POLE: (
        'Two-pole off-diagonal element: product rates and the relaxation/decoherence ordering',
        ('modes',)
    ),
    Scenarios.LEE_FRIEDRICHS: (
        'Oscillator superposition under the non-Hermitian effective Hamiltonian: off-diagonal decay and t_D',
        ('state', 'effective|model')
    ),
    Scenarios.BASIS_CONVERGENCE: (
        'Eigenbasis of the reduced density converging to the pointer basis of the preferred density',
        ('state', 'effective|model')
    ),
}


def describe(scenario: Scenarios) -> str:
    description, required = CATALOG[scenario]
    return f'{scenario.value:<18} {description} [requires: {", ".join(required)}]'
