import logging
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import NonConvergence, SingularityOutsideRange
from models import Config, Grid1D

logger = logging.getLogger(__name__)

_ROUNDOFF = 50 * np.finfo(float).eps


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """ Gauss-Legendre nodes and weights on [-1, 1]. The arrays are shared, so they are read-only. """
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    # Integrands may return a scalar for constant functions
    return np.broadcast_to(np.asarray(f(x)), x.shape)


def _panel_rule(f: Callable, lo: np.ndarray, hi: np.ndarray, order: int) -> np.ndarray:
    """ Gauss estimate of f over every panel [lo_i, hi_i] in one vectorized call. """
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    values = _evaluate(f, x)
    return half * (values @ weights)


def integrate(f: Callable, a: float, b: float, tol: float | None = None, config: Config | None = None):
    """
        Adaptive bisection with a fixed-order Gauss rule on every panel. Each panel is compared with the sum
        over its two halves and accepted once the difference fits its share tol·width/(b − a) of the budget;
        the rejected panels are refined together, level by level.

        `f` must accept a numpy array of abscissae. Returns a float for real integrands and a complex
        otherwise.
    """
    config = config or Config()
    tol = config.quad_tol if tol is None else tol

    if not a < b:
        raise ValueError(f'Integration bounds must satisfy a < b, got [{a}, {b}]')
    if tol <= 0:
        raise ValueError(f'Tolerance must be positive, got {tol}')

    order = config.quad_order
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    whole = _panel_rule(f, lo, hi, order)
    is_real = not np.iscomplexobj(whole)
    total = 0j

    for depth in range(config.quad_max_depth + 1):
        mid = 0.5 * (lo + hi)
        left = _panel_rule(f, lo, mid, order)
        right = _panel_rule(f, mid, hi, order)
        refined = left + right

        if not np.all(np.isfinite(refined)):
            raise NonConvergence(f'Integrand is not finite on [{a}, {b}]')

        error = np.abs(refined - whole)
        budget = np.maximum(tol * (hi - lo) / (b - a), _ROUNDOFF * np.abs(refined))
        done = error <= budget
        total += np.sum(refined[done])

        if np.all(done):
            logger.debug(f'integrate on [{a:.6g}, {b:.6g}] converged at depth {depth}')
            return float(total.real) if is_real else complex(total)

        keep = ~done
        if 2 * np.count_nonzero(keep) > config.quad_max_panels:
            raise NonConvergence(f'Adaptive quadrature on [{a}, {b}] needs more than '
                                 f'{config.quad_max_panels} panels')

        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        whole = np.concatenate([left[keep], right[keep]])

    raise NonConvergence(f'Adaptive quadrature on [{a}, {b}] exceeded depth {config.quad_max_depth}')


def principal_value(f: Callable, x0: float, a: float, b: float, tol: float | None = None,
                    config: Config | None = None) -> float:
    """ Cauchy principal value of ∫ f(x)/(x − x0) dx over [a, b]. """
    if not a < x0 < b:
        raise SingularityOutsideRange(f'Singular point {x0} is not inside ({a}, {b})')

    config = config or Config()
    tol = config.quad_tol if tol is None else tol

    d = min(x0 - a, b - x0)

    # The symmetric window around x0 folds into a regular integrand
    def folded(u):
        return (np.asarray(f(x0 + u)) - np.asarray(f(x0 - u))) / u

    value = integrate(folded, 0.0, d, tol / 2, config)

    # Remainder on the longer side, away from the singularity
    if x0 - d > a:
        value += integrate(lambda x: np.asarray(f(x)) / (x - x0), a, x0 - d, tol / 2, config)
    elif x0 + d < b:
        value += integrate(lambda x: np.asarray(f(x)) / (x - x0), x0 + d, b, tol / 2, config)

    return float(np.real(value))


def integrate_semi_infinite(f: Callable, a: float, tol: float | None = None, omega_max: float | None = None,
                            config: Config | None = None):
    """
        ∫ f over [a, ∞): adaptive integration up to omega_max, then the tail with ω = omega_max/s², which
        turns any decay faster than 1/ω into a bounded integrand on (0, 1].
    """
    config = config or Config()
    tol = config.quad_tol if tol is None else tol
    omega_max = config.omega_max if omega_max is None else omega_max

    cut = max(a, omega_max)

    def tail(s):
        omega = cut / s ** 2
        return np.asarray(f(omega)) * (2 * cut / s ** 3)

    tail_value = integrate(tail, 0.0, 1.0, tol / 2, config)
    logger.debug(f'Tail beyond {cut:.6g} contributes {abs(tail_value):.3e}')

    if a < cut:
        return integrate(f, a, cut, tol / 2, config) + tail_value
    return tail_value


def composite_gauss_grid(edges: Sequence[float], panels_per_segment: int | Sequence[int],
                         order: int) -> Grid1D:
    """ Composite Gauss-Legendre grid: each segment between consecutive edges is cut into equal panels. """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError('Grid edges must be a strictly increasing sequence of at least two values')

    if np.isscalar(panels_per_segment):
        panels_per_segment = [int(panels_per_segment)] * (len(edges) - 1)
    if len(panels_per_segment) != len(edges) - 1 or min(panels_per_segment) < 1:
        raise ValueError('Need at least one panel per segment')

    nodes, weights = gauss_legendre(order)
    points, point_weights = [], []

    for left, right, count in zip(edges[:-1], edges[1:], panels_per_segment):
        panel_edges = np.linspace(left, right, count + 1)
        half = 0.5 * np.diff(panel_edges)
        mid = 0.5 * (panel_edges[:-1] + panel_edges[1:])
        points.append((mid[:, None] + half[:, None] * nodes[None, :]).ravel())
        point_weights.append((half[:, None] * weights[None, :]).ravel())

    return Grid1D(np.concatenate(points), np.concatenate(point_weights))
