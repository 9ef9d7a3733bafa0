"""Closed-form nonclassicality potentials of vacuum-one-photon qubit states.

A potential of ``sigma(p, x)`` is a two-mode correlation measure of the
beam-splitter output. The ideal forms assume a lossless balanced splitter;
the ``*_qr`` forms include dephasing ``q`` and an arbitrary splitter angle.
All of them depend on the coherence only through ``|x|``.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .correlations import SQRT2, SQRT3, negativity, theta
from .exceptions import DomainError
from .states import IDEAL, ChannelParams, two_mode_closed_form, vops

__all__ = [
    "Regime",
    "PotentialSet",
    "cp",
    "np_closed",
    "sp",
    "bp",
    "sp_prime_from_sp",
    "bp_prime_from_bp",
    "ideal_r_trace",
    "ideal_r_min_eig",
    "x_s",
    "x_b",
    "kappa0",
    "kappa_s",
    "RSpectrum",
    "r_spectrum",
    "steering_margin",
    "bell_margin",
    "cp_qr",
    "uwep_qr",
    "sp_qr",
    "bp_qr",
    "np_qr",
    "classify_regime",
    "potentials",
    "RegimeMap",
    "regime_map",
    "Threshold",
    "potential_threshold",
    "pure_curve_threshold",
]


class Regime(str, enum.Enum):
    I = "I"        # separable (vacuum)
    II = "II"      # entangled, unsteerable
    III = "III"    # steerable, Bell local
    IV = "IV"      # Bell nonlocal

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PotentialSet:
    cp: float
    np: float
    sp: float
    sp_prime: float
    bp: float
    bp_prime: float
    uwep: float
    regime: Regime

    def as_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = str(self.regime)
        return d


def _px(p, x) -> tuple[float, float]:
    s = vops(p, x)
    return s.p, abs(s.x)


# ---------------------------------------------------------------------------
# ideal potentials (balanced, lossless splitter)


def cp(p, x=0.0) -> float:
    return _px(p, x)[0]


def np_closed(p, x=0.0) -> float:
    """Negativity potential from the principal complex cube root.

    Cardano's expression loses up to ~1e-8 to cancellation near p = 0, so its
    root is moved slightly left and polished by Newton steps on the cubic
    ``f(l) = -l(1-p-l)(p/2-l) + l|x|^2 - (p^2/4)(p/2-l)``, the characteristic
    polynomial of the partial transpose restricted to the coupled
    three-dimensional block. Left of its smallest root f is convex and
    decreasing, so the iteration converges monotonically to that root.
    """
    p, ax = _px(p, x)
    if p == 0:
        return 0.0
    x2 = ax * ax
    a2 = 14 * p**3 - 21 * p**2 + 15 * p + 9 * (p - 2) * x2 - 4
    a1 = a2**2 - 2 * (5 * (p - 1) * p + 6 * x2 + 2) ** 3
    root = np.power(2 * np.sqrt(complex(a1)) + 2 * a2, 1 / 3)
    lam = min(-(2 * root.real + p - 2) / 6, 0.0) - 1e-6
    h = p / 2
    for _ in range(200):
        f = -lam * (1 - p - lam) * (h - lam) + lam * x2 - p * p / 4 * (h - lam)
        df = -(1 - p - lam) * (h - lam) + lam * (h - lam) + lam * (1 - p - lam) + x2 + p * p / 4
        step = f / df
        if not step < 0:  # moves right monotonically; anything else is round-off
            break
        lam -= step
    return theta(-2 * lam)


def sp(p, x=0.0) -> float:
    p, ax = _px(p, x)
    return float(np.sqrt(theta(3 * p * p - 2 * p + 2 * ax * ax)))


def sp_prime_from_sp(s: float) -> float:
    return (np.sqrt(2 * s * s + 1) - 1) / (SQRT3 - 1)


def bp_prime_from_bp(b: float) -> float:
    return (np.sqrt(b * b + 1) - 1) / (SQRT2 - 1)


def ideal_r_trace(p, x=0.0) -> float:
    p, ax = _px(p, x)
    return 1 - 4 * p + 6 * p * p + 4 * ax * ax


def ideal_r_min_eig(p, x=0.0) -> float:
    p, ax = _px(p, x)
    return 0.5 * (1 + p * (5 * p - 4) + 4 * ax * ax - (1 - p) * np.sqrt((1 - 3 * p) ** 2 + 8 * ax * ax))


def bp(p, x=0.0) -> float:
    p, ax = _px(p, x)
    x2 = ax * ax
    arg = 0.5 * (7 * p * p + (1 - p) * np.sqrt((1 - 3 * p) ** 2 + 8 * x2) - 4 * p + 4 * x2 - 1)
    return float(np.sqrt(theta(arg)))


def x_s(p: float) -> float:
    """Coherence above which the three-setting steering potential is positive."""
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    return float(np.sqrt(theta(p * (1 - 1.5 * p))))


def x_b(p: float) -> float:
    """Coherence above which the Bell potential is positive."""
    if not 0 <= p <= 1:
        raise DomainError(f"p={p} outside [0, 1]")
    inner = 1 + p - 3 * p * p - (1 - p) * np.sqrt(1 - p * p)
    return float(np.sqrt(theta(inner)) / SQRT2)


def kappa0(p: float) -> float:
    """``(2 - 3p)/(2 - 2p)``, the decoherence-factor bound in its usual printed form.

    With ``x = kappa sqrt(p(1-p))`` the steering potential is positive iff
    ``kappa**2 > kappa0(p)``, i.e. ``kappa > kappa_s(p)``; see :func:`kappa_s`.
    """
    if not 0 <= p < 1:
        raise DomainError(f"kappa0 needs p in [0, 1), got {p}")
    return (2 - 3 * p) / (2 - 2 * p)


def kappa_s(p: float) -> float:
    """Decoherence factor above which SP is nonzero: ``x_s(p)/sqrt(p(1-p))``."""
    if not 0 < p < 1:
        raise DomainError(f"kappa_s needs p in (0, 1), got {p}")
    return float(np.sqrt(theta(kappa0(p))))


# ---------------------------------------------------------------------------
# generalized potentials (dephasing q, splitter angle theta)


class RSpectrum(NamedTuple):
    trace: float
    e1: float
    e2: float
    e3: float

    @property
    def min(self) -> float:
        return min(self.e2, self.e3)


def r_spectrum(p, x, params: ChannelParams = IDEAL) -> RSpectrum:
    """Eigenvalues of the correlation matrix of the dephased splitter output."""
    p, ax = _px(p, x)
    Q2 = 1 - params.q
    Z = Q2 * Q2 * params.r**2 * params.t**2
    tr = 4 * p * (2 * p * Z + p - 1) + 4 * Q2 * ax * ax + 1
    e3 = 4 * p * p * Z
    fe = (tr - e3) ** 2 - 16 * Z * (2 * p * p + 2 * ax * ax - p) ** 2
    root = np.sqrt(max(fe, 0.0))
    centre = 1 + 4 * (Q2 * ax * ax + p * p * (Z + 1) - p)
    return RSpectrum(tr, 0.5 * (centre + root), 0.5 * (centre - root), e3)


def steering_margin(p, x, params: ChannelParams = IDEAL) -> float:
    """``Tr R - 1``: positive exactly where the steering potential is."""
    return r_spectrum(p, x, params).trace - 1


def bell_margin(p, x, params: ChannelParams = IDEAL) -> float:
    """``M - 1``: positive exactly where the Bell potential is."""
    s = r_spectrum(p, x, params)
    return s.trace - s.min - 1


def cp_qr(p, x, params: ChannelParams = IDEAL) -> float:
    p, _ = _px(p, x)
    return p * (1 - params.q) * np.sin(params.theta)


def uwep_qr(p, x, params: ChannelParams = IDEAL) -> float:
    p, _ = _px(p, x)
    return (0.5 * p * np.sin(params.theta)) ** 4 * (1 - params.q) ** 2


def sp_qr(p, x, params: ChannelParams = IDEAL) -> float:
    return float(np.sqrt(theta(steering_margin(p, x, params)) / 2))


def bp_qr(p, x, params: ChannelParams = IDEAL) -> float:
    return float(np.sqrt(theta(bell_margin(p, x, params))))


def np_qr(p, x, params: ChannelParams = IDEAL) -> float:
    # no compact closed form; partial-transpose spectrum of the output state
    return negativity(two_mode_closed_form(p, x, params))


# ---------------------------------------------------------------------------
# regimes


def classify_regime(pot: PotentialSet | None = None, *, cp: float | None = None,
                    sp: float | None = None, bp: float | None = None) -> Regime:
    """Regime label from exact zero tests on ramp-clamped potentials."""
    if pot is not None:
        cp, sp, bp = pot.cp, pot.sp, pot.bp
    if cp is None or sp is None or bp is None:
        raise TypeError("need a PotentialSet or all of cp, sp, bp")
    if bp > 0 and sp == 0:
        raise DomainError(f"hierarchy violation: bp={bp:.3e} > 0 with sp = 0")
    if sp > 0 and cp == 0:
        raise DomainError(f"hierarchy violation: sp={sp:.3e} > 0 with cp = 0")
    if cp == 0:
        return Regime.I
    if sp == 0:
        return Regime.II
    if bp == 0:
        return Regime.III
    return Regime.IV


def potentials(p, x=0.0, params: ChannelParams = IDEAL) -> PotentialSet:
    """All seven potentials of ``sigma(p, x)`` for the given channel."""
    if params.is_ideal:
        c, n, s, b = cp(p, x), np_closed(p, x), sp(p, x), bp(p, x)
    else:
        c, n, s, b = cp_qr(p, x, params), np_qr(p, x, params), sp_qr(p, x, params), bp_qr(p, x, params)
    u = uwep_qr(p, x, params)
    return PotentialSet(
        cp=c, np=n, sp=s, sp_prime=sp_prime_from_sp(s), bp=b, bp_prime=bp_prime_from_bp(b),
        uwep=u, regime=classify_regime(cp=c, sp=s, bp=b),
    )


@dataclass(frozen=True)
class RegimeMap:
    p: np.ndarray
    x: np.ndarray
    labels: np.ndarray        # object array of Regime, None where out of the wedge
    out_of_wedge: np.ndarray  # bool mask

    def counts(self) -> dict[str, int]:
        out = {str(r): int(np.sum(self.labels == r)) for r in Regime}
        out["out_of_wedge"] = int(self.out_of_wedge.sum())
        return out


def regime_map(p_grid, x_grid, params: ChannelParams = IDEAL) -> RegimeMap:
    """Regime of every ``(p, x)`` cell; rows follow ``p_grid``, columns ``x_grid``."""
    p_grid = np.asarray(p_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    labels = np.empty((p_grid.size, x_grid.size), dtype=object)
    mask = np.zeros(labels.shape, dtype=bool)
    for i, p in enumerate(p_grid):
        bound = np.sqrt(max(p * (1 - p), 0.0)) if 0 <= p <= 1 else -1.0
        for j, x in enumerate(x_grid):
            if abs(x) > bound + 1e-12:
                mask[i, j] = True
                continue
            x = min(abs(x), bound)
            labels[i, j] = classify_regime(
                cp=cp_qr(p, x, params), sp=sp_qr(p, x, params), bp=bp_qr(p, x, params)
            )
    return RegimeMap(p_grid, x_grid, labels, mask)


# ---------------------------------------------------------------------------
# thresholds along curves in the (p, x) wedge


class Threshold(NamedTuple):
    p: float
    status: str  # "crossing", "always_positive" or "always_zero"


_MARGINS = {"sp": steering_margin, "sp_qr": steering_margin, "bp": bell_margin, "bp_qr": bell_margin}
_CURVES = {
    "pure": lambda p: np.sqrt(p * (1 - p)),
    "x0": lambda p: 0.0,
}


def potential_threshold(measure: str, params: ChannelParams = IDEAL, curve: str = "pure",
                        n_scan: int = 2001, xtol: float = 1e-14) -> Threshold:
    """Smallest ``p`` beyond which the steering or Bell potential turns positive.

    ``curve="pure"`` follows ``x = sqrt(p(1-p))``, ``curve="x0"`` the incoherent
    edge ``x = 0``. The sign change of the unclamped margin is bracketed on a
    scan and refined with Brent's method.
    """
    if measure not in _MARGINS:
        raise DomainError(f"measure must be one of {sorted(_MARGINS)}, not {measure!r}")
    if curve not in _CURVES:
        raise DomainError(f"curve must be one of {sorted(_CURVES)}, not {curve!r}")
    margin, xcurve = _MARGINS[measure], _CURVES[curve]

    def f(p):
        return margin(p, min(xcurve(p), np.sqrt(p * (1 - p))), params)

    ps = np.linspace(0.0, 1.0, n_scan)[1:]
    vals = np.array([f(p) for p in ps])
    pos = vals > 0
    if pos.all():
        return Threshold(0.0, "always_positive")
    if not pos.any():
        return Threshold(float("nan"), "always_zero")
    k = int(np.flatnonzero(~pos)[-1])
    if k == ps.size - 1:
        return Threshold(float("nan"), "always_zero")
    return Threshold(float(brentq(f, ps[k], ps[k + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)), "crossing")


def pure_curve_threshold(measure: str, params: ChannelParams = IDEAL) -> Threshold:
    return potential_threshold(measure, params, curve="pure")
