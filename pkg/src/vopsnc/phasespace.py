"""Cahill-Glauber s-parametrized quasiprobability distributions (QPDs).

``W^(s)(alpha_1..alpha_M) = pi^-M Tr[rho prod_k T^(s)(alpha_k)]`` with the
Fock-basis matrix elements of ``T^(s)`` written through associated Laguerre
polynomials. ``s = 0`` is the Wigner function, ``s = -1`` the Husimi
function; ``s -> 1`` (Glauber-Sudarshan) is singular and rejected.

Quadratures are ``X = Re(alpha)`` and ``Y = Im(alpha)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
import scipy.linalg

from .exceptions import DomainError, NumericalError
from .linalg import validate_density
from .states import TwoModeState, annihilation, coherent_amplitudes, density

__all__ = [
    "S_MAX",
    "QpdGrid",
    "AmpsSurface",
    "t_element",
    "t_matrix",
    "vacuum_qpd",
    "qpd_single",
    "wigner_vops",
    "qpd_two",
    "qpd_two_outer",
    "bs_phase_space_map",
    "parity_kernel",
    "wigner_displaced_parity",
    "wigner_displaced_parity_outer",
    "qpd_grid",
    "marginal",
    "MARGINAL_PAIRS",
    "reconstruct_from_qpd",
    "amps",
    "amps_multipole",
    "amps_grid",
    "gauss_hermite",
]

S_MAX = 1 - 1e-6


def _check_s(s: float) -> float:
    s = float(s)
    if s >= S_MAX:
        raise DomainError(
            f"s={s} is too close to 1: the normal-ordered (Glauber-Sudarshan) limit is singular"
        )
    if s < -1:
        raise DomainError(f"s={s} is below -1")
    return s


def t_element(s: float, n: int, m: int, alpha):
    """``<n|T^(s)(alpha)|m>``; vectorised over ``alpha``."""
    s = _check_s(s)
    if n < 0 or m < 0:
        raise DomainError("Fock indices must be non-negative")
    alpha = np.asarray(alpha, dtype=complex)
    if n > m:
        return t_element(s, m, n, np.conj(alpha))
    sm = 2 / (1 - s)
    u = (1 + s) / 2  # 1/s_p, finite at s = -1
    d = m - n
    z = np.abs(alpha) ** 2
    # (-s_m/s_p)^n L_n^(d)(s_p s_m z), expanded so that s = -1 needs no limit
    poly = np.zeros_like(z)
    for k in range(n + 1):
        poly = poly + ((-1) ** k * comb(n + d, n - k) / factorial(k)) * (-sm) ** n * u ** (n - k) * (sm * z) ** k
    pref = np.sqrt(factorial(n) / factorial(m)) * sm ** (d + 1)
    return pref * np.conj(alpha) ** d * poly * np.exp(-sm * z)


def t_matrix(s: float, alpha, dim: int = 2) -> np.ndarray:
    """All ``<n|T^(s)(alpha)|m>`` for ``n, m < dim``; shape ``(dim, dim, *alpha.shape)``."""
    alpha = np.asarray(alpha, dtype=complex)
    out = np.empty((dim, dim, *alpha.shape), dtype=complex)
    for n in range(dim):
        for m in range(n, dim):
            out[n, m] = t_element(s, n, m, alpha)
            if m != n:
                out[m, n] = t_element(s, n, m, np.conj(alpha))
    return out


def vacuum_qpd(s: float, alpha):
    s = _check_s(s)
    z = np.abs(np.asarray(alpha, dtype=complex)) ** 2
    return 2 / (np.pi * (1 - s)) * np.exp(-2 * z / (1 - s))


def qpd_single(sigma, s: float, alpha):
    """QPD of a single-mode state (QubitState or any d x d density matrix)."""
    m = density(sigma)
    t = t_matrix(s, alpha, m.shape[0])
    return np.einsum("mn,nm...->...", m, t).real / np.pi


def wigner_vops(p: float, x: complex, alpha):
    """Closed-form Wigner function of ``sigma(p, x)``."""
    alpha = np.asarray(alpha, dtype=complex)
    z = np.abs(alpha) ** 2
    return 2 / np.pi * ((1 - p) + p * (4 * z - 1) + 4 * np.real(x * alpha)) * np.exp(-2 * z)


def _mode_dims(m: np.ndarray, dims) -> tuple[int, int]:
    if dims is None:
        d = int(round(np.sqrt(m.shape[0])))
        dims = (d, d)
    if dims[0] * dims[1] != m.shape[0]:
        raise DomainError(f"dims {dims} do not match a {m.shape[0]}-dimensional state")
    return tuple(dims)


def qpd_two(rho, s: float, a1, a2, dims=None):
    """Two-mode QPD at the (broadcast) points ``(a1, a2)``."""
    m = density(rho)
    d1, d2 = _mode_dims(m, dims)
    a1, a2 = np.broadcast_arrays(np.asarray(a1, dtype=complex), np.asarray(a2, dtype=complex))
    t1, t2 = t_matrix(s, a1, d1), t_matrix(s, a2, d2)
    r = m.reshape(d1, d2, d1, d2)  # [m1, m2, n1, n2]
    return np.einsum("abcd,ca...,db...->...", r, t1, t2, optimize=True).real / np.pi**2


def qpd_two_outer(rho, s: float, a1, a2, dims=None) -> np.ndarray:
    """QPD on the outer product of two point sets; shape ``a1.shape + a2.shape``."""
    m = density(rho)
    d1, d2 = _mode_dims(m, dims)
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    t1 = t_matrix(s, a1.ravel(), d1)
    t2 = t_matrix(s, a2.ravel(), d2)
    r = m.reshape(d1, d2, d1, d2)
    w = np.einsum("abcd,cai,dbj->ij", r, t1, t2, optimize=True).real / np.pi**2
    return w.reshape(*a1.shape, *a2.shape)


def bs_phase_space_map(a1, a2, theta: float, mirror_second: bool = False):
    """Input-mode arguments whose QPD equals the splitter output at ``(a1, a2)``.

    For the splitter of :func:`vopsnc.states.bs_unitary` this is
    ``(t a1 - r a2, r a1 + t a2)``. With ``mirror_second=True`` the map is
    composed with ``a2 -> -a2`` (a pi phase shift on output mode 2), giving
    the reflecting-splitter form ``(t a1 + r a2, r a1 - t a2)``.
    """
    r, t = np.sin(theta / 2), np.cos(theta / 2)
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    if mirror_second:
        a2 = -a2
    return t * a1 - r * a2, r * a1 + t * a2


# ---------------------------------------------------------------------------
# displaced parity


def parity_kernel(alpha: complex, dim: int = 2, cutoff: int = 40) -> np.ndarray:
    """``<n| D(alpha) P D(alpha)^dag |m>`` for ``n, m < dim``.

    ``D`` is the exponential of the truncated ``alpha a^dag - alpha* a``.
    Raises if the truncated displacement misrepresents the low Fock columns
    by more than 1e-8 (cutoff too small for ``|alpha|``).
    """
    if cutoff < 12:
        raise DomainError(f"cutoff={cutoff} must be at least 12")
    a = annihilation(cutoff)
    D = scipy.linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)
    coh = coherent_amplitudes(alpha, cutoff, renormalize=False)
    # D|1> = (a^dag - alpha*) D|0>
    one = a.conj().T @ coh - np.conj(alpha) * coh
    defect = max(np.max(np.abs(D[:, 0] - coh)), np.max(np.abs(D[:-1, 1] - one[:-1])))
    if defect > 1e-8:
        raise DomainError(
            f"cutoff={cutoff} too small for |alpha|={abs(alpha):.3g} (displacement defect {defect:.2e})"
        )
    parity = np.where(np.arange(cutoff) % 2 == 0, 1.0, -1.0)
    Dl = D[:dim, :]
    return (Dl * parity) @ Dl.conj().T


def wigner_displaced_parity(rho, a1: complex, a2: complex, cutoff: int = 40) -> float:
    """Two-mode Wigner function as the expectation of displaced parity operators."""
    m = density(rho)
    d1, d2 = _mode_dims(m, None)
    k1 = parity_kernel(complex(a1), d1, cutoff)
    k2 = parity_kernel(complex(a2), d2, cutoff)
    r = m.reshape(d1, d2, d1, d2)
    return float(np.einsum("abcd,ca,db->", r, k1, k2).real * (2 / np.pi) ** 2)


def wigner_displaced_parity_outer(rho, a1, a2, cutoff: int = 40) -> np.ndarray:
    """Displaced-parity Wigner function on the outer product of two point sets."""
    m = density(rho)
    d1, d2 = _mode_dims(m, None)
    a1 = np.asarray(a1, dtype=complex)
    a2 = np.asarray(a2, dtype=complex)
    k1 = np.stack([parity_kernel(a, d1, cutoff) for a in a1.ravel()], axis=-1)
    k2 = np.stack([parity_kernel(a, d2, cutoff) for a in a2.ravel()], axis=-1)
    r = m.reshape(d1, d2, d1, d2)
    w = np.einsum("abcd,cai,dbj->ij", r, k1, k2, optimize=True).real * (2 / np.pi) ** 2
    return w.reshape(*a1.shape, *a2.shape)


# ---------------------------------------------------------------------------
# grids and marginals


@dataclass
class QpdGrid:
    """QPD samples on a rectangular grid; ``values[i, j]`` sits at ``(axes[0][i], axes[1][j])``."""

    s: float
    modes: int
    axes: tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    labels: tuple[str, str] = ("X", "Y")
    meta: dict = field(default_factory=dict)

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    def integral(self) -> float:
        inner = np.trapezoid(self.values, self.axes[1], axis=1)
        return float(np.trapezoid(inner, self.axes[0]))


@dataclass
class AmpsSurface:
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # [i_theta, j_phi]
    meta: dict = field(default_factory=lambda: {"normalization": "raw probability"})


def qpd_grid(sigma, s: float, xs, ys=None) -> QpdGrid:
    """Single-mode QPD on the grid ``X in xs``, ``Y in ys``."""
    xs = np.asarray(xs, dtype=float)
    ys = xs if ys is None else np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return QpdGrid(s, 1, (xs, ys), qpd_single(sigma, s, X + 1j * Y))


def gauss_hermite(n: int, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int f(u) exp(-c u^2) du``."""
    z, w = np.polynomial.hermite.hermgauss(n)
    return z / np.sqrt(c), w / np.sqrt(c)


MARGINAL_PAIRS = ("X1Y1", "X2Y2", "X1X2", "Y1Y2")


def _line_kernel(s, dim, kept, integrate_imag, nodes):
    # int T(alpha) over one quadrature, as a function of the other
    c = 2 / (1 - s)
    u, w = gauss_hermite(nodes, c)
    k = kept[:, None]
    alpha = k + 1j * u[None, :] if integrate_imag else u[None, :] + 1j * k
    t = t_matrix(s, alpha, dim) * np.exp(c * u * u)
    return np.einsum("nmij,j->nmi", t, w)


def _plane_kernel(s, dim, nodes):
    c = 2 / (1 - s)
    u, w = gauss_hermite(nodes, c)
    alpha = u[:, None] + 1j * u[None, :]
    t = t_matrix(s, alpha, dim) * np.exp(c * (u[:, None] ** 2 + u[None, :] ** 2))
    return np.einsum("nmij,i,j->nm", t, w, w)


def marginal(rho, pair: str, grid, grid2=None, s: float = 0.0, nodes: int = 32) -> QpdGrid:
    """Marginal of the two-mode QPD over the two quadratures not in ``pair``.

    ``pair`` is one of ``X1Y1``, ``X2Y2``, ``X1X2``, ``Y1Y2``; the integrated
    quadratures are handled by Gauss-Hermite quadrature matched to the
    Gaussian envelope of the QPD.
    """
    pair = pair.upper().replace(",", "").replace("(", "").replace(")", "").replace(" ", "")
    if pair not in MARGINAL_PAIRS:
        raise DomainError(f"unsupported marginal {pair!r}; choose from {MARGINAL_PAIRS}")
    s = _check_s(s)
    m = density(rho)
    d1, d2 = _mode_dims(m, None)
    r = m.reshape(d1, d2, d1, d2)
    g1 = np.asarray(grid, dtype=float)
    g2 = g1 if grid2 is None else np.asarray(grid2, dtype=float)
    if pair in ("X1Y1", "X2Y2"):
        G1, G2 = np.meshgrid(g1, g2, indexing="ij")
        local = t_matrix(s, G1 + 1j * G2, d1 if pair == "X1Y1" else d2)
        traced = _plane_kernel(s, d2 if pair == "X1Y1" else d1, nodes)
        if pair == "X1Y1":
            vals = np.einsum("abcd,caij,db->ij", r, local, traced)
        else:
            vals = np.einsum("abcd,ca,dbij->ij", r, traced, local)
    else:
        imag = pair == "X1X2"
        k1 = _line_kernel(s, d1, g1, imag, nodes)
        k2 = _line_kernel(s, d2, g2, imag, nodes)
        vals = np.einsum("abcd,cai,dbj->ij", r, k1, k2)
    return QpdGrid(s, 2, (g1, g2), vals.real / np.pi**2, labels=(pair[:2], pair[2:]))


# ---------------------------------------------------------------------------
# reconstruction


def reconstruct_from_qpd(sampler, s: float = 0.0, nodes: int = 24) -> TwoModeState:
    """Recover a two-mode density matrix from its s-parametrized QPD.

    Evaluates ``rho = int W^(s) T^(-s) d^2 alpha_1 d^2 alpha_2`` with a
    tensor-product Gauss-Hermite rule whose weight is the product of the
    Gaussian envelopes of ``W^(s)`` and ``T^(-s)``. ``sampler(a1, a2)``
    should accept broadcastable complex arrays; scalar-only callables are
    evaluated point by point.
    """
    s = float(s)
    if not -1 < s < 1:
        raise DomainError(f"reconstruction needs s in (-1, 1), got {s}")
    if nodes < 24:
        raise DomainError(f"use at least 24 nodes per axis, got {nodes}")
    dim = 2
    c = 2 / (1 - s) + 2 / (1 + s)
    u, w = gauss_hermite(nodes, c)
    X, Y = np.meshgrid(u, u, indexing="ij")
    pts = (X + 1j * Y).ravel()
    wts = np.outer(w, w).ravel() * np.exp(c * np.abs(pts) ** 2)
    kern = t_matrix(-s, pts, dim) * wts  # [m, n, point]
    try:
        values = np.asarray(sampler(pts[:, None], pts[None, :]), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != (pts.size, pts.size):
        # scalar-only sampler
        values = np.array([[float(sampler(a, b)) for b in pts] for a in pts])
    rho = np.einsum("ij,aci,bdj->abcd", values, kern, kern, optimize=True).reshape(dim * dim, dim * dim)
    try:
        validate_density(rho, tol=1e-4, name="reconstructed state")
    except DomainError as exc:
        raise NumericalError(f"inconsistent sampler: {exc}") from exc
    return TwoModeState(rho)


# ---------------------------------------------------------------------------
# angular-momentum probability surfaces

_JZ = np.diag([1.0, 0.0, -1.0]).astype(complex)
_JP = np.sqrt(2) * np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
_JX = (_JP + _JP.conj().T) / 2
_JY = (_JP - _JP.conj().T) / 2j
# |00>, |01>, |10> -> |1,-1>, |1,0>, |1,1>; spin basis ordered m = 1, 0, -1
_ENCODE = [2, 1, 0]


def _encode(rho) -> np.ndarray:
    m = density(rho)
    if m.shape != (4, 4):
        raise DomainError("AMPS needs a 4x4 two-mode state")
    if abs(m[3, 3]) > 1e-10:
        raise DomainError(f"state populates |11> ({m[3, 3].real:.3e}); not a qutrit")
    return m[np.ix_(_ENCODE, _ENCODE)]


def _direction_state(theta: float, phi: float) -> np.ndarray:
    R = scipy.linalg.expm(-1j * phi * _JZ) @ scipy.linalg.expm(-1j * theta * _JY)
    return R[:, 0]  # R |1, 1>


def amps(rho, theta: float, phi: float) -> float:
    """Probability of the maximal spin-1 projection along direction ``(theta, phi)``."""
    enc = _encode(rho)
    v = _direction_state(theta, phi)
    return float(np.vdot(v, enc @ v).real)


def amps_multipole(rho, theta: float, phi: float) -> float:
    """Same quantity from the projector ``(J.n)(J.n + 1)/2`` (dipole + quadrupole terms)."""
    enc = _encode(rho)
    n = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    jn = n[0] * _JX + n[1] * _JY + n[2] * _JZ
    proj = jn @ (jn + np.eye(3)) / 2
    return float(np.trace(enc @ proj).real)


def amps_grid(rho, thetas, phis) -> AmpsSurface:
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    enc = _encode(rho)
    vals = np.empty((thetas.size, phis.size))
    for i, th in enumerate(thetas):
        for j, ph in enumerate(phis):
            v = _direction_state(th, ph)
            vals[i, j] = np.vdot(v, enc @ v).real
    return AmpsSurface(thetas, phis, vals)
