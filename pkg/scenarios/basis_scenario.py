import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import RunReport, ScenarioContext
from physics.lee_friedrichs import (basis_convergence, decoherence_time_lf, default_cutoff, gram_matrix,
                                    offdiagonal_closed, overlap)
from scenarios.common import check, complex_columns, effective_model, new_report

logger = logging.getLogger(__name__)

LATE_TIME = 5.0  # in units of t_D


class BasisConvergenceScenario:
    """ Overlap between the dominant eigenvector of ρ(t) and the eigenbasis of ρ_P(t), with the entropies of both. """

    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def run(self) -> RunReport:
        config = self.context.config
        settings = self.context.settings
        state = settings.state.to_state()
        em = effective_model(self.context)
        n_max = settings.n_max or max(default_cutoff(alpha, config) for alpha in state.alphas)
        report = new_report(self.context)

        t_D, t_R = decoherence_time_lf(state, em)
        times = settings.time.values(t_R)
        basis = basis_convergence(state, em, times, n_max, config)
        early, late = basis.quartile_means()

        after = basis.eigen_overlap[times >= LATE_TIME * t_D]
        frame_overlap = abs(overlap(*state.alphas))

        report.quantities.update({
            't_D': t_D,
            't_R': t_R,
            'n_max': n_max,
            'frame_overlap': frame_overlap,
            'gram_min_eigenvalue': float(np.linalg.eigvalsh(gram_matrix(state))[0]),
            'initial_overlap': float(basis.eigen_overlap[0]),
            'early_quarter_overlap': early,
            'late_quarter_overlap': late
        })

        check(report, self.context, 'initial_overlap', basis.eigen_overlap[0], 0.5)
        if len(after):
            report.quantities['late_min_overlap'] = float(after.min())
            check(report, self.context, 'late_overlap', after.min(), 1.0)
        quasi_orthogonal = np.exp(-abs(state.alphas[1] - state.alphas[0]) ** 2 / 2)
        check(report, self.context, 'frame_overlap', frame_overlap, quasi_orthogonal)

        self._series = complex_columns(times, offdiagonal_closed(state, em, times))
        self._series.update({
            'eigen_overlap': basis.eigen_overlap,
            'offdiag_mod': basis.offdiag_mod,
            'linear_entropy': basis.linear_entropy,
            'preferred_linear_entropy': basis.preferred_linear_entropy
        })

        print(f'Eigenvector overlap {basis.eigen_overlap[0]:.4f} at t = 0, {late:.6f} over the last quarter')
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series
