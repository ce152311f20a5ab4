import json
import logging
import math

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import ConfigInvalid, ModelInvalid
from models import Config, FormFactorFamily, Mode, ModelParams, ScenarioConfig, Spacing, StateParams, TimeGrid
from scenarios.all_scenarios import CATALOG, Scenarios

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TIME_SCALES = ('absolute', 'lifetime')


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalid(field, f'expected a number, got {value!r}')
    if not math.isfinite(value):
        raise ConfigInvalid(field, 'must be finite')
    return float(value)


def _positive(value, field: str) -> float:
    value = _number(value, field)
    if value <= 0:
        raise ConfigInvalid(field, f'must be positive, got {value}')
    return value


def _integer(value, field: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(field, f'expected an integer, got {value!r}')
    if value < minimum:
        raise ConfigInvalid(field, f'must be at least {minimum}, got {value}')
    return value


def _complex(value, field: str) -> complex:
    """ A number, a [re, im] pair or a {"re": .., "im": ..} object. """
    if isinstance(value, dict):
        return complex(_number(value.get('re', 0.0), f'{field}.re'), _number(value.get('im', 0.0), f'{field}.im'))
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigInvalid(field, 'a complex pair must have exactly two entries [re, im]')
        return complex(_number(value[0], f'{field}[0]'), _number(value[1], f'{field}[1]'))
    return complex(_number(value, field))


def _section(raw: dict, name: str) -> dict:
    section = raw[name]
    if not isinstance(section, dict):
        raise ConfigInvalid(name, 'expected an object')
    return section


def _mapping(raw: dict, name: str) -> dict:
    section = raw.get(name, {})
    if not isinstance(section, dict):
        raise ConfigInvalid(name, 'expected an object')
    return section


def _require(section: dict, key: str, prefix: str):
    if key not in section:
        raise ConfigInvalid(f'{prefix}.{key}', 'missing required field')
    return section[key]


class ScenarioLoader:
    """ Reads a JSON scenario file into a ScenarioConfig. Every validation failure is a ConfigInvalid naming its field. """

    def __init__(self, config: Config | None = None):
        self.config = config or Config()

    def load(self, path: str | Path) -> ScenarioConfig:
        path = Path(path)
        if not path.exists():
            raise ConfigInvalid('config_path', f'{path} does not exist')

        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigInvalid('config_path', f'{path} is not valid JSON ({e.msg} at line {e.lineno})') from e

        settings = self.parse(raw)
        logger.info(f'Loaded {settings.scenario.value} scenario from {path}')
        return settings

    def parse(self, raw) -> ScenarioConfig:
        if not isinstance(raw, dict):
            raise ConfigInvalid('config', 'the top level must be an object')

        schema = raw.get('schema')
        if schema != SCHEMA_VERSION:
            raise ConfigInvalid('schema', f'expected {SCHEMA_VERSION}, got {schema!r}')

        name = _require(raw, 'scenario', 'config')
        try:
            scenario = Scenarios(name)
        except ValueError as e:
            known = ', '.join(s.value for s in Scenarios)
            raise ConfigInvalid('scenario', f'unknown scenario {name!r} (known: {known})') from e

        for required in CATALOG[scenario][1]:
            if not any(option in raw for option in required.split('|')):
                raise ConfigInvalid(required, f'required by the {scenario.value} scenario')

        return ScenarioConfig(
            scenario=scenario,
            time=self._time(raw),
            model=self._model(raw) if 'model' in raw else None,
            state=self._state(raw) if 'state' in raw else None,
            effective=self._effective(raw) if 'effective' in raw else None,
            modes=self._modes(raw) if 'modes' in raw else (),
            equilibrium=_complex(raw.get('equilibrium', 0.0), 'equilibrium'),
            fits=self._fits(raw),
            tolerances=self._tolerances(raw),
            n_max=_integer(raw['n_max'], 'n_max') if raw.get('n_max') is not None else None,
            output_dir=str(raw['output_dir']) if raw.get('output_dir') else None,
            numerics=self._numerics(raw),
            raw=raw
        )

    def _time(self, raw: dict) -> TimeGrid:
        if 'time' not in raw:
            return TimeGrid()
        section = _section(raw, 'time')
        defaults = TimeGrid()

        t_start = _number(section.get('t_start', defaults.t_start), 'time.t_start')
        t_end = _number(section.get('t_end', defaults.t_end), 'time.t_end')
        samples = _integer(section.get('samples', defaults.samples), 'time.samples', minimum=2)
        scale = section.get('scale', defaults.scale)

        try:
            spacing = Spacing(section.get('spacing', defaults.spacing.value))
        except ValueError as e:
            raise ConfigInvalid('time.spacing', 'must be "linear" or "log"') from e

        if t_start < 0:
            raise ConfigInvalid('time.t_start', f'must be non-negative, got {t_start}')
        if t_end <= t_start:
            raise ConfigInvalid('time.t_end', f'must exceed t_start = {t_start}, got {t_end}')
        if spacing is Spacing.LOG and t_start == 0:
            raise ConfigInvalid('time.t_start', 'log spacing needs t_start > 0')
        if scale not in TIME_SCALES:
            raise ConfigInvalid('time.scale', f'must be one of {TIME_SCALES}, got {scale!r}')

        return TimeGrid(t_start=t_start, t_end=t_end, samples=samples, spacing=spacing, scale=scale)

    def _model(self, raw: dict) -> ModelParams:
        section = _section(raw, 'model')
        defaults = ModelParams(omega0=1.0, g=0.0)

        try:
            family = FormFactorFamily(section.get('family', defaults.family.value))
        except ValueError as e:
            known = ', '.join(f.value for f in FormFactorFamily)
            raise ConfigInvalid('model.family', f'unknown family (known: {known})') from e

        omega0 = _positive(_require(section, 'omega0', 'model'), 'model.omega0')
        g = _number(_require(section, 'g', 'model'), 'model.g')
        if g < 0:
            raise ConfigInvalid('model.g', f'must be non-negative, got {g}')

        return ModelParams(
            omega0=omega0,
            g=g,
            omega_c=_positive(section.get('omega_c', defaults.omega_c), 'model.omega_c'),
            family=family,
            N=_integer(section.get('N', defaults.N), 'model.N'),
            omega_max=_positive(section.get('omega_max', defaults.omega_max), 'model.omega_max')
        )

    def _state(self, raw: dict) -> StateParams:
        section = _section(raw, 'state')
        a = _complex(section.get('a', StateParams.a), 'state.a')
        b = _complex(section.get('b', StateParams.b), 'state.b')
        if a == 0 and b == 0:
            raise ConfigInvalid('state.b', 'a and b cannot both vanish')

        if 'alpha2' in section:
            alpha2 = _number(section['alpha2'], 'state.alpha2')
            if alpha2 < 0:
                raise ConfigInvalid('state.alpha2', f'must be non-negative, got {alpha2}')
            return StateParams(a=a, b=b, alpha2=alpha2)

        mass_omega = _positive(_require(section, 'mass_omega', 'state'), 'state.mass_omega')
        L0 = _number(_require(section, 'L0', 'state'), 'state.L0')
        if L0 < 0:
            raise ConfigInvalid('state.L0', f'must be non-negative, got {L0}')
        return StateParams(a=a, b=b, mass_omega=mass_omega, L0=L0)

    def _effective(self, raw: dict) -> complex:
        section = _section(raw, 'effective')
        if 'z0' in section:
            z0 = _complex(section['z0'], 'effective.z0')
        else:
            omega0_prime = _number(_require(section, 'omega0_prime', 'effective'), 'effective.omega0_prime')
            gamma0 = _number(_require(section, 'gamma0', 'effective'), 'effective.gamma0')
            z0 = complex(omega0_prime, -gamma0)

        if not z0.imag < 0:
            raise ConfigInvalid('effective', f'the pole must lie in the lower half plane, got {z0}')
        return z0

    def _modes(self, raw: dict) -> tuple[Mode, ...]:
        entries = raw['modes']
        if not isinstance(entries, list) or not entries:
            raise ConfigInvalid('modes', 'expected a non-empty list of {c, omega, gamma} objects')

        modes = []
        for i, entry in enumerate(entries):
            field = f'modes[{i}]'
            if not isinstance(entry, dict):
                raise ConfigInvalid(field, 'expected an object')
            try:
                modes.append(Mode(c=_complex(_require(entry, 'c', field), f'{field}.c'),
                                  omega=_number(entry.get('omega', 0.0), f'{field}.omega'),
                                  gamma=_number(_require(entry, 'gamma', field), f'{field}.gamma')))
            except ModelInvalid as e:
                raise ConfigInvalid(field, str(e)) from e
        return tuple(modes)

    def _fits(self, raw: dict) -> dict:
        fits = {}
        for name, window in _mapping(raw, 'fits').items():
            field = f'fits.{name}'
            if not isinstance(window, list) or len(window) != 2:
                raise ConfigInvalid(field, 'expected a [t_min, t_max] window')
            lo, hi = _number(window[0], f'{field}[0]'), _number(window[1], f'{field}[1]')
            if not 0 <= lo < hi:
                raise ConfigInvalid(field, f'window must satisfy 0 ≤ t_min < t_max, got {window}')
            fits[name] = (lo, hi)
        return fits

    def _tolerances(self, raw: dict) -> dict:
        return {name: _positive(value, f'tolerances.{name}') for name, value in _mapping(raw, 'tolerances').items()}

    def _numerics(self, raw: dict) -> dict:
        values = _mapping(raw, 'numerics')
        try:
            self.config.override(values)
        except KeyError as e:
            raise ConfigInvalid(f'numerics.{e.args[0]}', 'unknown numerical setting') from e
        except (TypeError, ValueError) as e:
            raise ConfigInvalid('numerics', str(e)) from e
        return dict(values)
