import logging
import time

import numpy as np

from errors import ConfigInvalid
from models import Config, RunReport, ScenarioConfig, ScenarioContext
from protocols import Scenario
from scenarios.all_scenarios import Scenarios
from scenarios.basis_scenario import BasisConvergenceScenario
from scenarios.lee_friedrichs_scenario import LeeFriedrichsScenario
from scenarios.multipole_scenario import MultipoleScenario
from scenarios.oracle_scenario import OracleScenario
from scenarios.pole_scenario import PoleScenario
from scenarios.survival_scenario import SurvivalScenario
from scenarios.two_pole_scenario import TwoPoleScenario

logger = logging.getLogger(__name__)

REGISTRY: dict[Scenarios, type] = {
    Scenarios.POLE: PoleScenario,
    Scenarios.SURVIVAL: SurvivalScenario,
    Scenarios.ORACLE_CHECK: OracleScenario,
    Scenarios.MULTIPOLE: MultipoleScenario,
    Scenarios.TWO_POLE: TwoPoleScenario,
    Scenarios.LEE_FRIEDRICHS: LeeFriedrichsScenario,
    Scenarios.BASIS_CONVERGENCE: BasisConvergenceScenario
}


class ScenarioRunner:
    """ Resolves the numerical settings of a scenario file, runs it and times it. """

    def __init__(self, config: Config | None = None):
        self.config = config or Config()

    def context_for(self, settings: ScenarioConfig) -> ScenarioContext:
        return ScenarioContext(config=self.config.override(settings.numerics), settings=settings)

    def build(self, settings: ScenarioConfig) -> Scenario:
        return REGISTRY[settings.scenario](self.context_for(settings))

    def run(self, settings: ScenarioConfig) -> tuple[RunReport, dict[str, np.ndarray]]:
        scenario = self.build(settings)
        logger.info(f'Running {settings.scenario.value}')

        start = time.perf_counter()
        report = scenario.run()
        report.wall_time = time.perf_counter() - start

        unchecked = [key for key in settings.tolerances if key not in report.checks]
        if unchecked:
            raise ConfigInvalid(f'tolerances.{unchecked[0]}',
                                f'{settings.scenario.value} did not evaluate this check; it checks only its own '
                                f'quantities and some need a fit window or a long enough time grid')

        logger.info(f'{settings.scenario.value} finished in {report.wall_time:.3f} s, '
                    f'{len(report.checks)} tolerance checks')
        return report, scenario.series()
