"""Vacuum-one-photon qubit states and their two-mode images.

A qubit state ``sigma(p, x) = [[1-p, x], [x*, p]]`` is mixed with the vacuum on
a beam splitter ``U = exp((theta/2) (a1^dag a2 - a1 a2^dag))`` and optionally
dephased by a phase-damping channel on each output mode.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .exceptions import DomainError, NumericalError
from .linalg import as_matrix, validate_density

__all__ = [
    "QubitState",
    "ChannelParams",
    "TwoModeState",
    "IDEAL",
    "density",
    "vops",
    "pure_vops",
    "bs_unitary",
    "mix_with_vacuum",
    "phase_damp",
    "two_mode_closed_form",
    "sigma_prime",
    "dephase_mix",
    "annihilation",
    "coherent_amplitudes",
    "bs_unitary_fock",
    "ScissorsOutput",
    "scissors_output",
]

BOUND_TOL = 1e-12


@dataclass(frozen=True)
class QubitState:
    """Single-mode state in the ``{|0>, |1>}`` photon-number basis.

    ``p`` is the single-photon probability and ``x = <0|sigma|1>`` the
    coherence. Build instances with :func:`vops` to get validation.
    """

    p: float
    x: complex = 0j

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1 - self.p, self.x], [np.conj(self.x), self.p]], dtype=complex)

    @property
    def x_max(self) -> float:
        return float(np.sqrt(max(self.p * (1 - self.p), 0.0)))

    @classmethod
    def from_matrix(cls, m) -> "QubitState":
        m = validate_density(m, tol=1e-8, name="qubit state")
        if m.shape != (2, 2):
            raise DomainError(f"qubit state must be 2x2, got {m.shape}")
        return vops(float(m[1, 1].real), complex(m[0, 1]))


@dataclass(frozen=True)
class ChannelParams:
    """Dephasing rate ``q`` and beam-splitter angle ``theta``.

    The reflection and transmission amplitudes are ``r = sin(theta/2)`` and
    ``t = cos(theta/2)``; ``theta = pi/2`` is the balanced splitter.
    """

    q: float = 0.0
    theta: float = np.pi / 2

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"dephasing rate q={self.q} outside [0, 1]")
        if not 0.0 <= self.theta <= np.pi:
            raise DomainError(f"beam-splitter angle theta={self.theta} outside [0, pi]")

    @classmethod
    def from_r(cls, q: float = 0.0, r: float = 1 / np.sqrt(2)) -> "ChannelParams":
        if not 0.0 <= r <= 1.0:
            raise DomainError(f"reflection amplitude r={r} outside [0, 1]")
        return cls(q=q, theta=2 * float(np.arcsin(r)))

    @classmethod
    def from_rsq(cls, q: float = 0.0, rsq: float = 0.5) -> "ChannelParams":
        if not 0.0 <= rsq <= 1.0:
            raise DomainError(f"r^2={rsq} outside [0, 1]")
        return cls.from_r(q, float(np.sqrt(rsq)))

    @property
    def r(self) -> float:
        return float(np.sin(self.theta / 2))

    @property
    def t(self) -> float:
        return float(np.cos(self.theta / 2))

    @property
    def Q(self) -> float:
        return float(np.sqrt(1 - self.q))

    @property
    def is_ideal(self) -> bool:
        return self.q == 0.0 and abs(self.theta - np.pi / 2) < 1e-15


IDEAL = ChannelParams()


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """4x4 two-mode density matrix in the ``|00>, |01>, |10>, |11>`` basis."""

    rho: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho)
        if rho.shape != (4, 4):
            raise DomainError(f"two-mode state must be 4x4, got {rho.shape}")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.rho, dtype=dtype)

    def validate(self, tol: float = 1e-10) -> "TwoModeState":
        validate_density(self.rho, tol=tol, name="two-mode state")
        return self

    def swap_modes(self) -> "TwoModeState":
        perm = [0, 2, 1, 3]
        return TwoModeState(self.rho[np.ix_(perm, perm)])


def density(obj) -> np.ndarray:
    """Raw matrix of a TwoModeState, QubitState or array-like."""
    if isinstance(obj, TwoModeState):
        return obj.rho
    if isinstance(obj, QubitState):
        return obj.matrix
    return as_matrix(obj)


def vops(p: float, x: complex = 0.0) -> QubitState:
    """Validated vacuum-one-photon superposition ``sigma(p, x)``."""
    p = float(p)
    x = complex(x)
    if not -BOUND_TOL <= p <= 1 + BOUND_TOL:
        raise DomainError(f"p={p} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    bound = np.sqrt(p * (1 - p))
    if abs(x) > bound + BOUND_TOL:
        raise DomainError(
            f"|x|={abs(x):.12g} exceeds sqrt(p(1-p))={bound:.12g} by {abs(x) - bound:.3e}"
        )
    return QubitState(p, x)


def pure_vops(p: float) -> QubitState:
    """``sqrt(1-p)|0> + sqrt(p)|1>``."""
    return vops(p, np.sqrt(p * (1 - p)))


def _bs_generator() -> np.ndarray:
    # a1^dag a2 - a1 a2^dag on the single-excitation truncation
    g = np.zeros((4, 4), dtype=complex)
    g[2, 1] = 1.0   # a1^dag a2 |01> = |10>
    g[1, 2] = -1.0  # -a1 a2^dag |10> = -|01>
    return g


def bs_unitary(theta: float) -> np.ndarray:
    """Beam-splitter unitary ``exp(-i H theta)`` on the two-qubit truncation.

    Acts as the identity on ``|00>`` and ``|11>`` and maps
    ``|10> -> t|10> - r|01>``, ``|01> -> t|01> + r|10>``.
    """
    if not -np.pi <= theta <= np.pi:
        raise DomainError(f"theta={theta} outside [-pi, pi]")
    return scipy.linalg.expm(0.5 * theta * _bs_generator())


def mix_with_vacuum(sigma: QubitState, theta: float = np.pi / 2) -> TwoModeState:
    """``U (sigma (x) |0><0|) U^dag``; mode 1 carries sigma."""
    vac = np.array([[1, 0], [0, 0]], dtype=complex)
    u = bs_unitary(theta)
    return TwoModeState(u @ np.kron(sigma.matrix, vac) @ u.conj().T)


def _dephasing_kraus(q: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"dephasing rate {q} outside [0, 1]")
    e0 = np.diag([1.0, np.sqrt(1 - q)]).astype(complex)
    e1 = np.diag([0.0, np.sqrt(q)]).astype(complex)
    return e0, e1


def phase_damp(rho, q1: float, q2: float | None = None) -> TwoModeState:
    """Apply independent phase-damping channels with rates q1, q2 to the two modes."""
    q2 = q1 if q2 is None else q2
    m = density(rho)
    out = np.zeros((4, 4), dtype=complex)
    for a in _dephasing_kraus(q1):
        for b in _dephasing_kraus(q2):
            k = np.kron(a, b)
            out += k @ m @ k.conj().T
    return TwoModeState(out)


def two_mode_closed_form(p: float, x: complex, params: ChannelParams = IDEAL) -> TwoModeState:
    """Dephased, possibly unbalanced beam-splitter output in closed form."""
    s = vops(p, x)
    p, x = s.p, s.x
    r, t, Q = params.r, params.t, params.Q
    xc = np.conj(x)
    rho = np.array(
        [
            [1 - p, -Q * r * x, Q * t * x, 0],
            [-Q * r * xc, p * r * r, -p * Q * Q * r * t, 0],
            [Q * t * xc, -p * Q * Q * r * t, p * t * t, 0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    )
    return TwoModeState(rho)


def sigma_prime(p: float, pprime: float) -> QubitState:
    """Mixture ``p'|1><1| + (1-p')|psi_p><psi_p|`` of a photon and a pure VOPS state."""
    if not (0 <= p <= 1 and 0 <= pprime <= 1):
        raise DomainError(f"p={p}, p'={pprime} must both lie in [0, 1]")
    m = pprime * np.diag([0, 1]).astype(complex) + (1 - pprime) * pure_vops(p).matrix
    return vops(m[1, 1].real, m[0, 1])


def dephase_mix(n0: int, n1: int, p: float) -> QubitState:
    """Mix ``n0`` copies of ``|0>+a|1>`` with ``n1`` copies of ``|0>-a|1>``, ``|a|^2 = p/(1-p)``."""
    if n0 < 0 or n1 < 0 or n0 + n1 <= 0:
        raise DomainError(f"counts n0={n0}, n1={n1} must be non-negative with a positive sum")
    if not 0 <= p < 1:
        raise DomainError(f"p={p} must lie in [0, 1); use vops(1, 0) for the Fock state")
    a = np.sqrt(p / (1 - p))
    m = np.zeros((2, 2), dtype=complex)
    for n, sign in ((n0, 1.0), (n1, -1.0)):
        psi = np.array([1.0, sign * a]) / np.sqrt(1 + a * a)
        m += n * np.outer(psi, psi.conj())
    m /= n0 + n1
    return vops(m[1, 1].real, m[0, 1])


# ---------------------------------------------------------------------------
# Truncated Fock-space helpers (scissors network, phase-space covariance)


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)


def coherent_amplitudes(alpha: complex, cutoff: int, renormalize: bool = True) -> np.ndarray:
    n = np.arange(cutoff)
    mag = np.exp(-abs(alpha) ** 2 / 2 - 0.5 * gammaln(n + 1))
    amps = mag * np.power(complex(alpha), n)
    if renormalize:
        amps = amps / np.linalg.norm(amps)
    return amps


def bs_unitary_fock(theta: float, cutoff: int) -> np.ndarray:
    """Beam splitter on two modes truncated at ``cutoff`` levels each.

    Exact on every sector with total photon number below ``cutoff``; reduces
    to :func:`bs_unitary` on the single-excitation sector.
    """
    a = annihilation(cutoff)
    eye = np.eye(cutoff)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    g = a1.conj().T @ a2 - a1 @ a2.conj().T
    return scipy.linalg.expm(0.5 * theta * g)


class ScissorsOutput(NamedTuple):
    state: QubitState
    success_prob: float


def _mode_op(op: sp.spmatrix, k: int, cutoff: int, modes: int = 3) -> sp.csr_matrix:
    eye = sp.identity(cutoff, dtype=complex, format="csr")
    out = None
    for j in range(modes):
        f = op if j == k else eye
        out = f if out is None else sp.kron(out, f, format="csr")
    return out


def scissors_output(alpha: complex, cutoff: int = 12, herald: str = "d1") -> ScissorsOutput:
    """Quantum-scissors truncation of a coherent state ``|alpha>``.

    Mode a holds a single photon, mode b the vacuum and mode c the coherent
    state. a and b meet on a balanced splitter, then a and c on a second one;
    detectors watch a (D1) and c (D2). Heralding D1=1, D2=0 leaves mode b in
    a state proportional to ``|0> + alpha|1>``; ``herald="d2"`` selects the
    D1=0, D2=1 event, which yields ``|0> - alpha|1>``.
    """
    if cutoff < 8:
        raise DomainError(f"cutoff={cutoff} must be at least 8")
    if abs(alpha) ** 2 > cutoff / 4:
        raise DomainError(f"|alpha|^2={abs(alpha) ** 2:.4g} exceeds cutoff/4={cutoff / 4:g}")
    if herald not in ("d1", "d2"):
        raise DomainError(f"herald must be 'd1' or 'd2', not {herald!r}")
    n = cutoff
    lad = sp.csr_matrix(annihilation(n))
    a, b, c = (_mode_op(lad, k, n) for k in range(3))

    def gen(x, y):
        return x.getH() @ y - x @ y.getH()

    one = np.zeros(n, dtype=complex)
    one[1] = 1.0
    vac = np.zeros(n, dtype=complex)
    vac[0] = 1.0
    psi = np.kron(np.kron(one, vac), coherent_amplitudes(alpha, n))
    # a^dag -> (a^dag + b^dag)/sqrt2, then a^dag -> (a^dag - c^dag)/sqrt2, c^dag -> (c^dag + a^dag)/sqrt2
    psi = expm_multiply(-np.pi / 4 * gen(a, b), psi)
    psi = expm_multiply(np.pi / 4 * gen(a, c), psi)
    amp = psi.reshape(n, n, n)
    clicks = (1, 0) if herald == "d1" else (0, 1)
    out = amp[clicks[0], :, clicks[1]]
    prob = float(np.vdot(out, out).real)
    if prob < 1e-12:
        raise NumericalError(f"heralding probability {prob:.3e} is degenerate")
    if np.linalg.norm(out[2:]) > 1e-10 * np.sqrt(prob):
        raise NumericalError("heralded output left the vacuum-one-photon subspace")
    v = out[:2] / np.sqrt(prob)
    m = np.outer(v, v.conj())
    return ScissorsOutput(vops(m[1, 1].real, m[0, 1]), prob)
