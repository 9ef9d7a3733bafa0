import numpy as np
import pytest
from hypothesis import given, strategies as st

from vopsnc.exceptions import DomainError
from vopsnc.linalg import (
    clamp_spectrum,
    eig_hermitian,
    eigvals_hermitian,
    mat_sqrt_psd,
    partial_transpose,
    validate_density,
)
from vopsnc.states import mix_with_vacuum, vops

from _util import random_density

seeds = st.integers(0, 2**32 - 1)


def test_eig_identity_and_diagonal():
    assert np.allclose(eigvals_hermitian(np.eye(4)), 1)
    assert np.allclose(eigvals_hermitian(np.diag([0, 0.3, 0.7, 0])), [0, 0, 0.3, 0.7])


def test_eig_rejects_non_hermitian():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(DomainError, match="not Hermitian"):
        eig_hermitian(m)


def test_partial_transpose_bell_state():
    rho = mix_with_vacuum(vops(1, 0)).rho
    assert eigvals_hermitian(partial_transpose(rho))[0] == pytest.approx(-0.5, abs=1e-14)


def test_partial_transpose_wrong_shape():
    with pytest.raises(DomainError):
        partial_transpose(np.eye(3))
    with pytest.raises(DomainError):
        partial_transpose(np.eye(4), subsystem="third")


@given(seeds)
def test_partial_transpose_product_and_involution(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, 2), random_density(rng, 2)
    prod = np.kron(a, b)
    assert np.allclose(partial_transpose(prod), np.kron(a, b.T), atol=1e-15)
    assert np.allclose(partial_transpose(prod, "first"), np.kron(a.T, b), atol=1e-15)
    h = random_density(rng)
    for sub in ("first", "second"):
        assert np.allclose(partial_transpose(partial_transpose(h, sub), sub), h, atol=1e-15)


def test_sqrt_examples():
    assert np.allclose(mat_sqrt_psd(np.eye(4)), np.eye(4))
    assert np.allclose(mat_sqrt_psd(np.diag([4, 9, 0, 1.0])), np.diag([2, 3, 0, 1.0]))


@given(seeds, st.integers(1, 4))
def test_sqrt_squares_back(seed, rank):
    m = random_density(np.random.default_rng(seed), 4, rank)
    r = mat_sqrt_psd(m)
    assert np.allclose(r @ r, m, atol=1e-12)
    assert np.allclose(r, r.conj().T)


def test_clamp_and_reject():
    assert np.all(clamp_spectrum(np.array([-1e-12, 0.5])) >= 0)
    with pytest.raises(DomainError, match="positive semidefinite"):
        clamp_spectrum(np.array([-1e-6, 1.0]))
    with pytest.raises(DomainError):
        mat_sqrt_psd(np.diag([1.0, -0.1]))


def test_validate_density():
    validate_density(np.diag([0.5, 0.5]))
    with pytest.raises(DomainError, match="trace"):
        validate_density(np.diag([0.5, 0.6]))
    with pytest.raises(DomainError, match="negative eigenvalue"):
        validate_density(np.diag([1.2, -0.2]))
