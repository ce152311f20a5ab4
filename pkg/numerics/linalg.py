import logging

import numpy as np
import scipy.linalg

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import GramSingular, NotHermitian

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
GRAM_MIN_EIGENVALUE = 1e-13


def _check_hermitian(M: np.ndarray, name: str) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotHermitian(f'{name} must be square, got shape {M.shape}')

    norm = np.linalg.norm(M)
    if np.linalg.norm(M - M.conj().T) > HERMITIAN_TOL * max(norm, 1e-300):
        raise NotHermitian(f'{name} is not Hermitian within {HERMITIAN_TOL:g}·‖{name}‖')

    # Symmetrize away round-off before handing to LAPACK
    return 0.5 * (M + M.conj().T)


def hermitian_eigen(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """ Eigenvalues in descending order and orthonormal eigenvectors as columns. """
    M = _check_hermitian(M, 'M')
    values, vectors = scipy.linalg.eigh(M)
    return values[::-1], vectors[:, ::-1]


def generalized_eigen(A: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
        Solves A·v = λ·S·v for Hermitian A and positive-definite Gram matrix S. Eigenvalues are returned
        descending; eigenvectors are S-orthonormal (v†·S·v = 1).
    """
    A = _check_hermitian(A, 'A')
    S = _check_hermitian(S, 'S')
    if A.shape != S.shape:
        raise ValueError(f'A and S must have the same shape, got {A.shape} and {S.shape}')

    gram_min = scipy.linalg.eigvalsh(S)[0]
    if gram_min <= GRAM_MIN_EIGENVALUE:
        raise GramSingular(f'Gram matrix is numerically singular (smallest eigenvalue {gram_min:.3e})')

    try:
        values, vectors = scipy.linalg.eigh(A, S)
    except scipy.linalg.LinAlgError as e:
        raise GramSingular('Cholesky factorization of the Gram matrix failed') from e

    return values[::-1], vectors[:, ::-1]
