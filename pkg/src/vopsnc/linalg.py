"""Small dense complex-matrix kernel used by every other module.

Two-mode matrices are always ordered ``|n1 n2>`` with flat index ``2*n1 + n2``,
i.e. ``|00>, |01>, |10>, |11>``.
"""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError

HERMITIAN_TOL = 1e-8
NEG_EIG_CLAMP = 1e-10
NEG_EIG_REJECT = 1e-8

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitianize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small Hermitian matrix.

    Returns ascending real eigenvalues and the matrix whose columns are the
    orthonormal eigenvectors.
    """
    m = as_matrix(m)
    defect = hermitian_defect(m)
    if defect > HERMITIAN_TOL:
        raise DomainError(f"matrix is not Hermitian (max |M - M^dag| = {defect:.3e})")
    w, v = np.linalg.eigh(hermitianize(m))
    return w, v


def eigvals_hermitian(m) -> np.ndarray:
    return eig_hermitian(m)[0]


def partial_transpose(rho, subsystem: str = "second") -> np.ndarray:
    """Partial transpose of a 4x4 two-qubit operator on ``subsystem``."""
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise DomainError(f"partial_transpose needs a 4x4 matrix, got {rho.shape}")
    r = rho.reshape(2, 2, 2, 2)  # [i1, i2, j1, j2]
    if subsystem == "second":
        r = r.transpose(0, 3, 2, 1)
    elif subsystem == "first":
        r = r.transpose(2, 1, 0, 3)
    else:
        raise DomainError(f"subsystem must be 'first' or 'second', not {subsystem!r}")
    return r.reshape(4, 4).copy()


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    """Clamp round-off negatives to zero; reject genuinely negative spectra."""
    lo = float(w.min()) if w.size else 0.0
    if lo < -NEG_EIG_REJECT:
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})")
    return np.where(w < 0, 0.0, w)


def mat_sqrt_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    w, v = eig_hermitian(m)
    w = clamp_spectrum(w)
    return hermitianize((v * np.sqrt(w)) @ v.conj().T)


def kron(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def validate_density(rho, tol: float = 1e-10, name: str = "rho") -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the Hermitian part."""
    rho = as_matrix(rho)
    defect = hermitian_defect(rho)
    if defect > tol:
        raise DomainError(f"{name} is not Hermitian (defect {defect:.3e} > {tol:g})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise DomainError(f"{name} has trace {tr.real:.12g}, expected 1 (tol {tol:g})")
    w = np.linalg.eigvalsh(hermitianize(rho))
    if w.min() < -tol:
        raise DomainError(f"{name} has negative eigenvalue {w.min():.3e} (tol {tol:g})")
    return hermitianize(rho)
