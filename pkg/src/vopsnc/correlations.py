"""Two-qubit correlation measures on 4x4 density matrices.

Each mode is treated as a qubit in its ``{|0>, |1>}`` photon-number basis.
Steering and Bell measures are functions of the correlation matrix
``R = T^T T`` built from the Stokes parameters ``T_ij = Tr[rho (s_i x s_j)]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PAULIS, SIGMA_Y, clamp_spectrum, eig_hermitian, eigvals_hermitian, partial_transpose
from .states import density

__all__ = [
    "StokesDecomposition",
    "MeasureSet",
    "theta",
    "stokes",
    "correlation_matrix",
    "concurrence",
    "negativity",
    "uwe",
    "steering_arg",
    "horodecki_m",
    "steering_s3",
    "steering_sca3",
    "bell_b",
    "steering_sca2",
    "measures",
    "chsh_bruteforce",
]

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
SUPPORT_TOL = 1e-14
_I2 = np.eye(2, dtype=complex)


def theta(v: float) -> float:
    """Ramp function ``max(v, 0)``."""
    return v if v > 0 else 0.0


@dataclass(frozen=True)
class StokesDecomposition:
    u: np.ndarray
    v: np.ndarray
    T: np.ndarray

    @property
    def R(self) -> np.ndarray:
        return self.T.T @ self.T

    def to_density(self) -> np.ndarray:
        rho = np.kron(_I2, _I2).astype(complex)
        for i, s in enumerate(PAULIS):
            rho += self.u[i] * np.kron(s, _I2) + self.v[i] * np.kron(_I2, s)
            for j, s2 in enumerate(PAULIS):
                rho += self.T[i, j] * np.kron(s, s2)
        return rho / 4


@dataclass(frozen=True)
class MeasureSet:
    concurrence: float
    negativity: float
    s3: float
    s3_ca: float
    bell: float
    s2_ca: float
    uwe: float


def stokes(rho) -> StokesDecomposition:
    m = density(rho)
    u = np.array([np.trace(m @ np.kron(s, _I2)).real for s in PAULIS])
    v = np.array([np.trace(m @ np.kron(_I2, s)).real for s in PAULIS])
    T = np.array([[np.trace(m @ np.kron(a, b)).real for b in PAULIS] for a in PAULIS])
    return StokesDecomposition(u, v, T)


def correlation_matrix(rho) -> np.ndarray:
    return stokes(rho).R


def concurrence(rho) -> float:
    """Wootters concurrence.

    The ``lambda_j`` are the singular values of ``V^T (s_y x s_y) V`` where
    the columns of ``V`` are the eigenvectors of rho scaled by the square roots
    of their eigenvalues. Eigenvalues below ``SUPPORT_TOL`` are dropped so that
    round-off in the null space does not leak in through the square root.
    """
    w, vecs = eig_hermitian(density(rho))
    w = clamp_spectrum(w)
    keep = w > SUPPORT_TOL
    v = vecs[:, keep] * np.sqrt(w[keep])
    tau = v.T @ np.kron(SIGMA_Y, SIGMA_Y) @ v
    lam = np.zeros(4)
    if tau.size:
        sv = np.linalg.svd(tau, compute_uv=False)
        lam[: sv.size] = sv
    return theta(float(lam[0] - lam[1] - lam[2] - lam[3]))


def negativity(rho) -> float:
    w = eigvals_hermitian(partial_transpose(density(rho)))
    return theta(-2.0 * float(w[0]))


def uwe(rho) -> float:
    """Universal entanglement witness ``max(-det rho^Gamma, 0)``."""
    return theta(-float(np.linalg.det(partial_transpose(density(rho))).real))


def steering_arg(rho) -> float:
    """``Tr R - 1``; positive iff the three-setting CJWR inequality is violated."""
    return float(np.trace(correlation_matrix(rho))) - 1.0


def horodecki_m(rho) -> float:
    """Sum of the two largest eigenvalues of R."""
    w = eigvals_hermitian(correlation_matrix(rho))
    return float(w[1] + w[2])


def steering_s3(rho) -> float:
    return float(np.sqrt(theta(steering_arg(rho)) / 2))


def steering_sca3(rho) -> float:
    tr = float(np.trace(correlation_matrix(rho)))
    return theta(np.sqrt(max(tr, 0.0)) - 1.0) / (SQRT3 - 1)


def bell_b(rho) -> float:
    return float(np.sqrt(theta(horodecki_m(rho) - 1.0)))


def steering_sca2(rho) -> float:
    return theta(np.sqrt(max(horodecki_m(rho), 0.0)) - 1.0) / (SQRT2 - 1)


def measures(rho) -> MeasureSet:
    return MeasureSet(
        concurrence=concurrence(rho),
        negativity=negativity(rho),
        s3=steering_s3(rho),
        s3_ca=steering_sca3(rho),
        bell=bell_b(rho),
        s2_ca=steering_sca2(rho),
        uwe=uwe(rho),
    )


def _unit_vectors(rng: np.random.Generator, shape) -> np.ndarray:
    v = rng.standard_normal((*shape, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def chsh_bruteforce(
    rho, n_settings: int = 100_000, seed: int = 0, bob: str = "best", chunk: int = 50_000
) -> float:
    """Largest ``|<B>|`` of the CHSH operator found over random settings.

    Alice's pair ``(a, a')`` is drawn uniformly on the sphere. With
    ``bob="random"`` Bob's pair is drawn the same way; with ``bob="best"``
    Bob answers each Alice pair with the settings maximising
    ``u.(b+b') + w.(b-b')`` for ``u = T^T a``, ``w = T^T a'``.
    Every returned value is the expectation of a genuine CHSH operator.
    """
    if n_settings < 1:
        raise ValueError("n_settings must be positive")
    if bob not in ("best", "random"):
        raise ValueError(f"bob must be 'best' or 'random', not {bob!r}")
    T = stokes(rho).T
    rng = np.random.default_rng(seed)
    best = 0.0
    done = 0
    while done < n_settings:
        n = min(chunk, n_settings - done)
        a, ap = (_unit_vectors(rng, (n,)) for _ in range(2))
        if bob == "random":
            b, bp = (_unit_vectors(rng, (n,)) for _ in range(2))
        else:
            u, w = a @ T, ap @ T
            c = _normalize_or_any(u, rng)
            d = _orthogonal_unit(w, c, rng)
            phi = np.arctan2(np.sum(w * d, axis=-1), np.sum(u * c, axis=-1))[:, None]
            b = np.cos(phi) * c + np.sin(phi) * d
            bp = np.cos(phi) * c - np.sin(phi) * d
        val = np.einsum("ni,ij,nj->n", a, T, b + bp) + np.einsum("ni,ij,nj->n", ap, T, b - bp)
        best = max(best, float(np.abs(val).max()))
        done += n
    return best


def _normalize_or_any(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    fallback = _unit_vectors(rng, v.shape[:-1])
    return np.where(norm > 1e-300, v / np.where(norm > 0, norm, 1), fallback)


def _orthogonal_unit(v: np.ndarray, c: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    w = v - np.sum(v * c, axis=-1, keepdims=True) * c
    norm = np.linalg.norm(w, axis=-1, keepdims=True)
    if np.any(norm <= 1e-300):
        alt = _unit_vectors(rng, v.shape[:-1])
        alt = alt - np.sum(alt * c, axis=-1, keepdims=True) * c
        w = np.where(norm > 1e-300, w, alt)
        norm = np.linalg.norm(w, axis=-1, keepdims=True)
    return w / norm

