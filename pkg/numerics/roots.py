import cmath
import logging
from typing import Callable

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import DerivativeVanished, NoConvergence
from models import Config

logger = logging.getLogger(__name__)


def numerical_derivative(F: Callable[[complex], complex], z: complex, h: float) -> complex:
    """ Central difference along the real direction; F is analytic so any direction gives F′. """
    return (F(z + h) - F(z - h)) / (2 * h)


def newton(F: Callable[[complex], complex], z_init: complex, tol: float, max_iter: int,
           step: float = 1e-7) -> complex:
    """ Newton iteration with a numerical derivative, step h = step·max(1, |z|). """
    z = complex(z_init)
    value = F(z)

    for iteration in range(max_iter):
        if abs(value) <= tol:
            logger.debug(f'Newton converged to {z} after {iteration} steps')
            return z

        h = step * max(1.0, abs(z))
        derivative = numerical_derivative(F, z, h)
        if derivative == 0 or not cmath.isfinite(derivative):
            raise DerivativeVanished(f'Numerical derivative vanished at z = {z}')

        z = z - value / derivative
        value = F(z)
        if not cmath.isfinite(value):
            raise NoConvergence(f'Newton iterate left the domain of F at z = {z}')

    if abs(value) <= tol:
        return z
    raise NoConvergence(f'Newton did not converge in {max_iter} steps, |F| = {abs(value):.3e} at z = {z}')


def muller(F: Callable[[complex], complex], z_init: complex, tol: float, max_iter: int,
           spread: float = 1e-2) -> complex:
    """ Derivative-free Muller iteration started from z_init and two nearby points. """
    scale = spread * max(1.0, abs(z_init))
    z0, z1, z2 = complex(z_init) - scale, complex(z_init) + scale, complex(z_init)
    f0, f1, f2 = F(z0), F(z1), F(z2)

    for iteration in range(max_iter):
        if abs(f2) <= tol:
            logger.debug(f'Muller converged to {z2} after {iteration} steps')
            return z2

        if z1 == z0 or z2 == z1:
            raise NoConvergence(f'Muller iterates collapsed at z = {z2}')

        q = (z2 - z1) / (z1 - z0)
        a = q * f2 - q * (1 + q) * f1 + q ** 2 * f0
        b = (2 * q + 1) * f2 - (1 + q) ** 2 * f1 + q ** 2 * f0
        c = (1 + q) * f2

        root = cmath.sqrt(b ** 2 - 4 * a * c)
        denominator = b + root if abs(b + root) >= abs(b - root) else b - root
        if denominator == 0:
            raise NoConvergence(f'Muller parabola degenerate at z = {z2}')

        z_next = z2 - (z2 - z1) * (2 * c / denominator)
        z0, z1, z2 = z1, z2, z_next
        f0, f1, f2 = f1, f2, F(z_next)

    if abs(f2) <= tol:
        return z2
    raise NoConvergence(f'Muller did not converge in {max_iter} steps, |F| = {abs(f2):.3e} at z = {z2}')


def find_complex_root(F: Callable[[complex], complex], z_init: complex, tol: float | None = None,
                      max_iter: int | None = None, config: Config | None = None) -> complex:
    """
        Zero of an analytic F near z_init with |F(z)| ≤ tol. Newton with a numerical derivative runs first;
        if its derivative degenerates or it stalls, Muller restarts from the original seed.
    """
    config = config or Config()
    tol = config.root_tol if tol is None else tol
    max_iter = config.root_max_iter if max_iter is None else max_iter

    try:
        return newton(F, z_init, tol, max_iter, config.newton_step)
    except DerivativeVanished as e:
        logger.debug(f'Newton failed ({e}), falling back to Muller')
        try:
            return muller(F, z_init, tol, max_iter)
        except NoConvergence:
            raise e
    except NoConvergence as e:
        logger.debug(f'Newton failed ({e}), falling back to Muller')
        return muller(F, z_init, tol, max_iter)
