"""Fidelity and least-distance fitting of the dephased beam-splitter model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .exceptions import DomainError
from .linalg import clamp_spectrum, eig_hermitian, validate_density
from .states import ChannelParams, TwoModeState, density, two_mode_closed_form

__all__ = [
    "PARAM_NAMES",
    "CURVATURE_TOL",
    "FitResult",
    "uhlmann_fidelity",
    "add_noise",
    "model_state",
    "fit_model",
]

PARAM_NAMES = ("p", "abs_x", "arg_x", "q", "r")
CURVATURE_TOL = 1e-8
SUPPORT_TOL = 1e-14
MAX_ITER = 2000
SIMPLEX_TOL = 1e-10


def _factor(m: np.ndarray) -> np.ndarray:
    # A with m = A A^dag, restricted to the numerical support
    w, v = eig_hermitian(m)
    w = clamp_spectrum(w)
    keep = w > SUPPORT_TOL
    return v[:, keep] * np.sqrt(w[keep])


def uhlmann_fidelity(a, b) -> float:
    """``[Tr sqrt(sqrt(a) b sqrt(a))]^2``.

    Evaluated as the squared trace norm of ``B^dag A`` with ``a = A A^dag`` and
    ``b = B B^dag``; the square roots of the (possibly rank-deficient) inputs
    are never formed, which keeps F accurate to round-off near 1.
    """
    ma = validate_density(density(a), tol=1e-8, name="a")
    mb = validate_density(density(b), tol=1e-8, name="b")
    A, B = _factor(ma), _factor(mb)
    if A.size == 0 or B.size == 0:
        return 0.0
    sv = np.linalg.svd(B.conj().T @ A, compute_uv=False)
    return float(min(max(sv.sum() ** 2, 0.0), 1.0))


def add_noise(rho, epsilon: float, seed: int = 0) -> TwoModeState:
    """``(1 - eps) rho + eps G G^dag / Tr(G G^dag)`` with a seeded complex Ginibre ``G``."""
    if not 0.0 <= epsilon <= 0.5:
        raise DomainError(f"epsilon={epsilon} outside [0, 0.5]")
    m = density(rho)
    if epsilon == 0:
        return TwoModeState(m.copy())
    rng = np.random.default_rng(seed)
    n = m.shape[0]
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    noise = g @ g.conj().T
    noise /= np.trace(noise).real
    return TwoModeState((1 - epsilon) * m + epsilon * noise)


def model_state(p: float, x: complex, q: float, r: float) -> TwoModeState:
    return two_mode_closed_form(p, x, ChannelParams.from_r(q, r))


@dataclass
class FitResult:
    p: float
    x: complex
    q: float
    r: float
    fidelity: float
    iterations: int
    converged: bool
    unidentifiable: tuple[str, ...] = ()
    curvature: dict = field(default_factory=dict)
    restarts: int = 1
    best_start: int = 0
    vacuum_fidelity: float = 0.0
    q_fixed: bool = False

    @property
    def abs_x(self) -> float:
        return abs(self.x)

    @property
    def model(self) -> TwoModeState:
        return model_state(self.p, self.x, self.q, self.r)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "x": [self.x.real, self.x.imag],
            "abs_x": self.abs_x,
            "q": self.q,
            "r": self.r,
            "rsq": self.r**2,
            "fidelity": self.fidelity,
            "iterations": self.iterations,
            "converged": self.converged,
            "unidentifiable": list(self.unidentifiable),
            "curvature": dict(self.curvature),
            "restarts": self.restarts,
            "best_start": self.best_start,
            "vacuum_fidelity": self.vacuum_fidelity,
            "q_fixed": self.q_fixed,
        }


def _fold(z: float) -> float:
    # triangle wave: reflect the real line into [0, 1]
    z = z % 2.0
    return 2.0 - z if z > 1.0 else z


def _wrap(phi: float) -> float:
    return (phi + np.pi) % (2 * np.pi) - np.pi


def _physical(z: np.ndarray, fixed_q: float | None) -> tuple[float, complex, float, float]:
    p = _fold(z[0])
    kappa = _fold(z[1])
    phi = _wrap(z[2])
    q = fixed_q if fixed_q is not None else _fold(z[3])
    r = _fold(z[4])
    x = kappa * np.sqrt(p * (1 - p)) * np.exp(1j * phi)
    return p, complex(x), q, r


def _internal(p: float, x: complex, q: float, r: float) -> np.ndarray:
    xm = np.sqrt(p * (1 - p))
    kappa = min(abs(x) / xm, 1.0) if xm > 0 else 0.0
    return np.array([p, kappa, np.angle(x), q, r])


def _hessian_diag(f, z: np.ndarray, h: float = 1e-3) -> np.ndarray:
    f0 = f(z)
    out = np.empty(z.size)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = h
        out[i] = (f(z + e) - 2 * f0 + f(z - e)) / h**2
    return out


def fit_model(
    rho_exp,
    restarts: int = 16,
    seed: int = 0,
    fix_q: float | None = None,
    max_iter: int = MAX_ITER,
) -> FitResult:
    """Maximise the fidelity between ``rho_exp`` and the model over ``(p, x, q, r)``.

    Nelder-Mead runs in an unconstrained space folded onto the parameter box
    (``p, |x|/sqrt(p(1-p)), q, r`` in [0, 1], ``arg x`` periodic) from
    ``restarts`` scrambled-Sobol starting points. ``fix_q`` pins the dephasing
    rate to an independently known value. Parameters whose curvature of
    ``1 - F`` at the optimum falls below ``CURVATURE_TOL`` are listed in
    ``unidentifiable``.
    """
    if restarts < 1:
        raise DomainError(f"restarts={restarts} must be at least 1")
    if fix_q is not None and not 0.0 <= fix_q <= 1.0:
        raise DomainError(f"fixed q={fix_q} outside [0, 1]")
    target = validate_density(density(rho_exp), tol=1e-4, name="rho_exp")
    target = TwoModeState(target / np.trace(target).real)

    def infid(z):
        return 1.0 - uhlmann_fidelity(target, model_state(*_physical(z, fix_q)))

    vac = np.zeros((4, 4), dtype=complex)
    vac[0, 0] = 1
    f_vac = uhlmann_fidelity(target, vac)

    sobol = qmc.Sobol(d=5, scramble=True, seed=seed)
    starts = sobol.random(1 << (restarts - 1).bit_length())[:restarts]  # balanced power-of-two draw
    starts[:, 2] = (2 * starts[:, 2] - 1) * np.pi

    best = None
    iterations = 0
    for k, z0 in enumerate(starts):
        simplex = np.vstack([z0, z0 + 0.25 * np.eye(5)])
        res = minimize(
            infid,
            z0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": SIMPLEX_TOL,
                "fatol": np.inf,
                "maxiter": max_iter,
                "maxfev": 4 * max_iter,
            },
        )
        iterations += int(res.nit)
        if best is None or res.fun < best[1].fun:  # ties keep the lower start index
            best = (k, res)

    k, res = best
    p, x, q, r = _physical(res.x, fix_q)
    fid = 1.0 - float(res.fun)
    # curvature in canonical coordinates so that folding does not alias it
    zc = _internal(p, x, q, r)
    curv = _hessian_diag(infid, zc)
    flags = [n for n, c in zip(PARAM_NAMES, curv) if c < CURVATURE_TOL]
    if fix_q is not None:
        flags = [n for n in flags if n != "q"]
    if p < 1e-12 or abs(x) < 1e-12:
        # the phase of a vanishing coherence carries no information
        if "arg_x" not in flags:
            flags.append("arg_x")
    flags = [n for n in PARAM_NAMES if n in flags]
    return FitResult(
        p=p,
        x=x,
        q=q,
        r=r,
        fidelity=fid,
        iterations=iterations,
        converged=fid >= f_vac - 1e-12,
        unidentifiable=tuple(flags),
        curvature=dict(zip(PARAM_NAMES, map(float, curv))),
        restarts=restarts,
        best_start=k,
        vacuum_fidelity=f_vac,
        q_fixed=fix_q is not None,
    )
