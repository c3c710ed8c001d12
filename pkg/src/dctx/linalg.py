"""Small dense complex linear algebra helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; dimensions never
exceed 16 for physical states (64 for the extended oracle space), so nothing
here tries to be clever about sparsity.
"""
from functools import reduce

import numpy as np

from dctx.errors import InvalidState, NotAProjector, NotHermitian

TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def dag(a):
    return np.conj(np.swapaxes(a, -1, -2))


def tensor(*ops):
    """Kronecker product, ``result[i*db+k, j*db+l] = a[i,j] * b[k,l]``."""
    return reduce(np.kron, ops)


def ket(*amplitudes):
    v = np.asarray(amplitudes, dtype=complex).ravel()
    return v / np.linalg.norm(v)


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def trace(a):
    return complex(np.trace(a))


def is_hermitian(a, tol=TOL):
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dag(a)), initial=0.0) <= tol)


def is_unit(v, tol=1e-12):
    return abs(np.linalg.norm(v) - 1.0) <= tol


def is_projector(p, tol=TOL):
    p = np.asarray(p)
    return is_hermitian(p, tol) and np.max(np.abs(p @ p - p)) <= tol


def check_projector(p, tol=TOL):
    p = as_matrix(p)
    if not is_projector(p, tol):
        raise NotAProjector("operator is not a Hermitian idempotent within tolerance")
    return p


def hermitian_eigenvalues(a, tol=TOL):
    """Ascending real spectrum of a Hermitian matrix.

    Raises:
        NotHermitian: if ``max|A - A^dagger|`` exceeds ``tol``.
    """
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise NotHermitian(f"max |A - A^dagger| = {np.max(np.abs(a - dag(a))):.3g} > {tol}")
    return np.linalg.eigvalsh((a + dag(a)) / 2)


def validate_density_block(a, tol=TOL):
    """Check a (possibly subnormalized) density block and return its trace.

    The block must be Hermitian, positive semidefinite up to ``-tol`` and have
    trace in ``[0, 1 + tol]``.
    """
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise InvalidState("block is not Hermitian")
    evals = np.linalg.eigvalsh((a + dag(a)) / 2)
    if evals[0] < -tol:
        raise InvalidState(f"negative eigenvalue {evals[0]:.3g}")
    tr = float(np.real(np.trace(a)))
    if tr < -tol or tr > 1 + tol:
        raise InvalidState(f"trace {tr:.12g} outside [0, 1]")
    return tr


def validate_state(rho, tol=TOL):
    """Like :func:`validate_density_block` but also requires unit trace."""
    tr = validate_density_block(rho, tol)
    if abs(tr - 1.0) > tol:
        raise InvalidState(f"state is not normalized (trace {tr:.12g})")
    return as_matrix(rho)


def operator_norm(a):
    return float(np.linalg.norm(np.asarray(a), 2))


def commutator(a, b):
    return a @ b - b @ a
