"""Tests for the Lanczos recursion, Krylov amplitudes and the moments path."""

from __future__ import annotations

import numpy as np
import pytest

from tpmspread.dynamics import StateVector, evolved_initial_state
from tpmspread.hilbert import ContractError, Operator, eigendecompose
from tpmspread.krylov import (amplitudes, amplitudes_via_dse,
                              interpretation_equivalence, lanczos,
                              lanczos_from_moments, spectral_moments,
                              spread_complexity, thermo_identities)


def random_hermitian(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Operator((m + m.conj().T) / 2, hermitian=True)


def random_unitary(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    return Operator(q * (np.diag(r) / np.abs(np.diag(r))), unitary=True)


def random_state(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(v / np.linalg.norm(v))


SIGMA_X = Operator(np.array([[0, 1], [1, 0]], dtype=complex), hermitian=True)


class TestLanczos:
    def test_sigma_x_from_up_state(self):
        K = lanczos(SIGMA_X, StateVector(np.array([1.0, 0.0])))
        assert K.dim_krylov == 2
        assert np.allclose(K.a, [0.0, 0.0], atol=1e-14)
        assert np.allclose(K.b, [1.0], atol=1e-14)

    def test_eigenstate_terminates_immediately(self):
        rng = np.random.default_rng(0)
        H = random_hermitian(6, rng)
        dec = eigendecompose(H)
        K = lanczos(H, StateVector(dec.eigenvectors[:, 2]))
        assert K.dim_krylov == 1
        assert K.a[0] == pytest.approx(dec.eigenvalues[2], abs=1e-10)
        assert K.b.size == 0

    def test_orthonormality(self):
        rng = np.random.default_rng(1)
        H = random_hermitian(32, rng)
        K = lanczos(H, random_state(32, rng))
        gram = K.basis.conj().T @ K.basis
        assert np.max(np.abs(gram - np.eye(K.dim_krylov))) <= 1e-8

    def test_tridiagonal_residual(self):
        rng = np.random.default_rng(2)
        H = random_hermitian(32, rng)
        K = lanczos(H, random_state(32, rng))
        scale = np.linalg.norm(H.entries, 2)
        for n in range(K.dim_krylov):
            r = H.entries @ K.basis[:, n] - K.a[n] * K.basis[:, n]
            if n > 0:
                r -= K.b[n - 1] * K.basis[:, n - 1]
            if n < K.dim_krylov - 1:
                r -= K.b[n] * K.basis[:, n + 1]
            assert np.linalg.norm(r) <= 1e-8 * scale

    def test_offdiagonals_positive(self):
        rng = np.random.default_rng(3)
        H = random_hermitian(20, rng)
        K = lanczos(H, random_state(20, rng))
        assert np.all(K.b > 0)

    def test_max_dim_cap(self):
        rng = np.random.default_rng(4)
        H = random_hermitian(16, rng)
        K = lanczos(H, random_state(16, rng), max_dim=5)
        assert K.dim_krylov == 5

    def test_requires_hermitian(self):
        with pytest.raises(ContractError):
            lanczos(Operator(np.array([[0, 1], [0, 0]], dtype=complex)),
                    StateVector(np.array([1.0, 0.0])))


class TestAmplitudes:
    def test_initial_point(self):
        rng = np.random.default_rng(5)
        H = random_hermitian(10, rng)
        psi0 = random_state(10, rng)
        K = lanczos(H, psi0)
        trace = amplitudes(K, eigendecompose(H), psi0, np.linspace(0, 3, 30))
        assert trace.phi[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(trace.phi[1:, 0])) <= 1e-10
        assert trace.complexity[0] == pytest.approx(0.0, abs=1e-10)

    def test_sigma_x_closed_form(self):
        psi0 = StateVector(np.array([1.0, 0.0]))
        K = lanczos(SIGMA_X, psi0)
        u = np.linspace(0.0, 6.0, 100)
        trace = amplitudes(K, eigendecompose(SIGMA_X), psi0, u)
        assert np.max(np.abs(trace.phi[0] - np.cos(u))) <= 1e-12
        assert np.max(np.abs(trace.phi[1] + 1j * np.sin(u))) <= 1e-12
        assert np.max(np.abs(trace.complexity - np.sin(u) ** 2)) <= 1e-12
        assert np.max(np.abs(spread_complexity(trace) - trace.complexity)) == 0.0

    def test_first_amplitude_is_autocorrelation(self):
        rng = np.random.default_rng(6)
        H = random_hermitian(14, rng)
        dec = eigendecompose(H)
        psi0 = random_state(14, rng)
        K = lanczos(H, psi0)
        u = np.linspace(0.0, 8.0, 120)
        trace = amplitudes(K, dec, psi0, u)
        p = np.abs(dec.eigenvectors.conj().T @ psi0.amplitudes) ** 2
        acf = np.exp(-1j * np.outer(u, dec.eigenvalues)) @ p
        assert np.max(np.abs(trace.phi[0] - acf)) <= 1e-8

    def test_normalization_on_grid(self):
        rng = np.random.default_rng(7)
        H = random_hermitian(24, rng)
        psi0 = random_state(24, rng)
        K = lanczos(H, psi0)
        trace = amplitudes(K, eigendecompose(H), psi0, np.linspace(0, 40, 400))
        weights = np.sum(np.abs(trace.phi) ** 2, axis=0)
        assert np.max(np.abs(weights - 1.0)) <= 1e-6

    def test_chain_integration_agrees(self):
        rng = np.random.default_rng(8)
        H = random_hermitian(12, rng)
        psi0 = random_state(12, rng)
        K = lanczos(H, psi0)
        u = np.linspace(0.0, 5.0, 60)
        trace = amplitudes(K, eigendecompose(H), psi0, u)
        phi_ode = amplitudes_via_dse(K, u)
        assert np.max(np.abs(trace.phi - phi_ode)) <= 1e-6

    def test_rejects_foreign_initial_state(self):
        rng = np.random.default_rng(9)
        H = random_hermitian(8, rng)
        K = lanczos(H, random_state(8, rng))
        with pytest.raises(ValueError):
            amplitudes(K, eigendecompose(H), random_state(8, rng), np.linspace(0, 1, 5))


class TestLanczosFromMoments:
    def test_two_point_spectrum(self):
        # G(u) = cos(u): measure at +-1 with weights 1/2
        measure_moments = np.array([1.0, 0.0, 1.0, 0.0, 1.0])
        M = ((-1j) ** np.arange(5)) * measure_moments
        a, b = lanczos_from_moments(M)
        assert np.allclose(a, [0.0, 0.0], atol=1e-12)
        assert np.allclose(b, [1.0], atol=1e-12)

    def test_gaussian_moments(self):
        # G(u) = e^{-u^2/2}: even measure moments are (2m-1)!!
        measure = np.zeros(11)
        measure[0::2] = [1.0, 1.0, 3.0, 15.0, 105.0, 945.0]
        M = ((-1j) ** np.arange(11)) * measure
        a, b = lanczos_from_moments(M)
        assert np.max(np.abs(a)) <= 1e-9
        assert np.max(np.abs(b - np.sqrt(np.arange(1, 6)))) <= 1e-9

    def test_first_pair_is_mean_and_standard_deviation(self):
        rng = np.random.default_rng(10)
        H = random_hermitian(16, rng)
        dec = eigendecompose(H)
        psi = random_state(16, rng)
        p = np.abs(dec.eigenvectors.conj().T @ psi.amplitudes) ** 2
        mean = p @ dec.eigenvalues
        var = p @ dec.eigenvalues**2 - mean**2
        a, b = lanczos_from_moments(spectral_moments(psi, dec, 2))
        assert a[0] == pytest.approx(mean, abs=1e-10)
        assert b[0] ** 2 == pytest.approx(var, abs=1e-8)

    def test_matches_direct_recursion(self):
        rng = np.random.default_rng(11)
        H = random_hermitian(32, rng)
        dec = eigendecompose(H)
        psi = random_state(32, rng)
        a_m, b_m = lanczos_from_moments(spectral_moments(psi, dec, 16))
        K = lanczos(H, psi)
        assert np.max(np.abs(a_m - K.a[:8])) <= 1e-7
        assert np.max(np.abs(b_m - K.b[:8])) <= 1e-7

    def test_rejects_even_length(self):
        with pytest.raises(ValueError):
            lanczos_from_moments(np.array([1.0, 0.0]))

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            lanczos_from_moments(np.array([2.0, 0.0, -1.0]))

    def test_depth_cap(self):
        with pytest.raises(ValueError):
            lanczos_from_moments(np.zeros(2 * 13 + 1))


class TestThermoIdentities:
    def test_identity_perturbation(self):
        rng = np.random.default_rng(12)
        H = random_hermitian(6, rng)
        dec = eigendecompose(H)
        E0 = StateVector(dec.eigenvectors[:, 3])
        W = Operator(np.eye(6, dtype=complex), unitary=True)
        out = thermo_identities(E0, W, H, dec, dec, 0.7)
        assert out.a0 == pytest.approx(dec.eigenvalues[3], abs=1e-10)
        assert out.b1_sq == pytest.approx(0.0, abs=1e-12)

    def test_residuals_small_on_random_instance(self):
        rng = np.random.default_rng(13)
        H0_op = random_hermitian(20, rng)
        H0 = eigendecompose(H0_op)
        H1 = eigendecompose(random_hermitian(20, rng))
        E0 = StateVector(H0.eigenvectors[:, 10])
        W = random_unitary(20, rng)
        out = thermo_identities(E0, W, H0_op, H0, H1, 1.9)
        scale = np.linalg.norm(H0_op.entries, 2)
        assert out.a0_residual <= 1e-8 * scale
        assert out.b1_residual <= 1e-8 * scale**2

    def test_central_difference_of_acf_recovers_mean(self):
        rng = np.random.default_rng(14)
        H0_op = random_hermitian(10, rng)
        H0 = eigendecompose(H0_op)
        H1 = eigendecompose(random_hermitian(10, rng))
        E0 = StateVector(H0.eigenvectors[:, 5])
        W = random_unitary(10, rng)
        tau = 0.6
        out = thermo_identities(E0, W, H0_op, H0, H1, tau)
        psi_tau = evolved_initial_state(E0, W, H1, tau)
        p = np.abs(H0.eigenvectors.conj().T @ psi_tau.amplitudes) ** 2

        def G(u):
            return np.sum(p * np.exp(-1j * H0.eigenvalues * u))

        delta = 1e-4
        fd = 1j * (G(delta) - G(-delta)) / (2 * delta)
        assert abs(fd.real - out.a0) <= 1e-6
        assert abs(fd.imag) <= 1e-6


class TestInterpretationEquivalence:
    def test_identity_perturbation_exact(self):
        rng = np.random.default_rng(15)
        H0_op = random_hermitian(6, rng)
        H0 = eigendecompose(H0_op)
        H1 = eigendecompose(random_hermitian(6, rng))
        E0 = StateVector(H0.eigenvectors[:, 3])
        W = Operator(np.eye(6, dtype=complex), unitary=True)
        dev = interpretation_equivalence(E0, W, H0_op, H1, 0.8, np.linspace(0, 4, 40))
        assert dev <= 1e-12

    def test_random_instance(self):
        rng = np.random.default_rng(16)
        H0_op = random_hermitian(6, rng)
        H0 = eigendecompose(H0_op)
        H1 = eigendecompose(random_hermitian(6, rng))
        E0 = StateVector(H0.eigenvectors[:, 3])
        W = random_unitary(6, rng)
        dev = interpretation_equivalence(E0, W, H0_op, H1, 1.2, np.linspace(0, 8, 80))
        assert dev <= 1e-8
