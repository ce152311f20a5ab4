import csv
import io
import json
import logging
import math
import os
import tempfile

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import RunReport

logger = logging.getLogger(__name__)

INF_MARKER = 'inf'
SERIES_FILE = 'series.csv'
REPORT_FILE = 'report.json'


def _format(value: float) -> str:
    """ Full double precision; infinities use the same marker as the report. """
    value = float(value)
    if math.isinf(value):
        return INF_MARKER if value > 0 else f'-{INF_MARKER}'
    return f'{value:.17g}'


def to_jsonable(value):
    """ Converts numpy scalars, arrays, complex numbers and infinities into plain JSON values. """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': to_jsonable(float(value.real)), 'im': to_jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return INF_MARKER if value > 0 else f'-{INF_MARKER}'
        if math.isnan(value):
            return None
        return value
    return value


def _write_atomic(path: Path, text: str) -> None:
    """ Writes to a temporary file next to `path` and renames it into place. """
    handle, temp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(handle, 'w', newline='') as file:
            file.write(text)
        os.replace(temp, path)
    except BaseException:
        Path(temp).unlink(missing_ok=True)
        raise


class ResultsWriter:
    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)

    def write_series(self, columns: dict[str, np.ndarray]) -> Path:
        """ One header row, then one row per sample; column order is the dict order. """
        names = list(columns)
        lengths = {len(columns[name]) for name in names}
        if len(lengths) > 1:
            raise ValueError(f'Series columns have different lengths: {sorted(lengths)}')

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(names)
        for row in zip(*(columns[name] for name in names)):
            writer.writerow([_format(value) for value in row])

        path = self.output_dir / SERIES_FILE
        _write_atomic(path, buffer.getvalue())
        return path

    def write_report(self, report: RunReport) -> Path:
        path = self.output_dir / REPORT_FILE
        _write_atomic(path, json.dumps(to_jsonable(report.to_dict()), indent=2, sort_keys=False) + '\n')
        return path

    def write(self, report: RunReport, columns: dict[str, np.ndarray]) -> tuple[Path, Path]:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        series_path = self.write_series(columns)
        report_path = self.write_report(report)
        logger.info(f'Wrote {series_path} and {report_path}')
        return series_path, report_path
