"""Tests for operator construction and eigendecomposition."""

from __future__ import annotations

import numpy as np
import pytest

from tpmspread.hilbert import (ContractError, Operator, SpinChainSpec,
                               eigendecompose, ising_hamiltonian,
                               local_perturbation, parity_operator,
                               pauli_chain_operator)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


class TestOperator:
    def test_hermitian_flag_verified(self):
        with pytest.raises(ContractError):
            Operator(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian=True)

    def test_unitary_flag_verified(self):
        with pytest.raises(ContractError):
            Operator(2 * np.eye(2), unitary=True)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            Operator(np.zeros((2, 3)))


class TestPauliChainOperator:
    def test_single_site_z(self):
        op = pauli_chain_operator(1, "z", 1)
        assert np.array_equal(op.entries, np.diag([1.0, -1.0]))

    def test_two_site_x_on_second(self):
        op = pauli_chain_operator(2, "x", 2)
        expected = np.kron(np.eye(2), np.array([[0, 1], [1, 0]]))
        assert np.array_equal(op.entries, expected)

    def test_involution(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            n = int(rng.integers(1, 5))
            site = int(rng.integers(1, n + 1))
            axis = rng.choice(["x", "y", "z"])
            op = pauli_chain_operator(site, axis, n)
            assert np.allclose(op.entries @ op.entries, np.eye(2**n))

    def test_distinct_sites_commute(self):
        a = pauli_chain_operator(1, "x", 3).entries
        b = pauli_chain_operator(3, "z", 3).entries
        assert np.allclose(a @ b - b @ a, 0.0)

    def test_distinct_axes_same_site_anticommute(self):
        a = pauli_chain_operator(2, "x", 3).entries
        b = pauli_chain_operator(2, "y", 3).entries
        assert np.allclose(a @ b + b @ a, 0.0)

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            pauli_chain_operator(4, "x", 3)


class TestIsingHamiltonian:
    def test_pure_coupling_two_sites(self):
        spec = SpinChainSpec(n_sites=2, J=1.0, h=0.0, g=0.0)
        H = ising_hamiltonian(spec)
        sz1 = pauli_chain_operator(1, "z", 2).entries
        sz2 = pauli_chain_operator(2, "z", 2).entries
        assert np.allclose(H.entries, -2.0 * sz2 @ sz1)
        assert sorted(np.linalg.eigvalsh(H.entries)) == pytest.approx([-2, -2, 2, 2])

    def test_free_spins_two_sites(self):
        spec = SpinChainSpec(n_sites=2, J=0.0, h=1.0, g=0.0)
        H = ising_hamiltonian(spec)
        assert sorted(np.linalg.eigvalsh(H.entries)) == pytest.approx([-2, 0, 0, 2])

    def test_hermitian_for_random_specs(self):
        rng = np.random.default_rng(11)
        for _ in range(4):
            spec = SpinChainSpec(
                n_sites=int(rng.integers(2, 6)),
                J=float(rng.standard_normal()),
                h=float(rng.standard_normal()),
                g=float(rng.standard_normal()),
                boundary=rng.choice(["periodic", "open"]),
            )
            H = ising_hamiltonian(spec)
            assert np.max(np.abs(H.entries - H.entries.conj().T)) <= 1e-12

    def test_parity_symmetry_without_longitudinal_field(self):
        spec = SpinChainSpec(n_sites=4, J=1.0, h=0.4, g=0.0)
        H = ising_hamiltonian(spec).entries
        P = parity_operator(4).entries
        assert np.max(np.abs(H @ P - P @ H)) <= 1e-12

    def test_open_boundary_drops_one_bond(self):
        periodic = ising_hamiltonian(SpinChainSpec(3, J=1.0, h=0.0, g=0.0))
        open_bc = ising_hamiltonian(SpinChainSpec(3, J=1.0, h=0.0, g=0.0, boundary="open"))
        sz1 = pauli_chain_operator(1, "z", 3).entries
        sz3 = pauli_chain_operator(3, "z", 3).entries
        assert np.allclose(periodic.entries - open_bc.entries, -sz1 @ sz3)

    def test_desk_scale_dimension(self):
        spec = SpinChainSpec(n_sites=8, J=1.0, h=0.4, g=0.0)
        H = ising_hamiltonian(spec)
        assert H.dim == 256
        assert H.hermitian

    def test_too_short_chain_rejected(self):
        with pytest.raises(ValueError):
            SpinChainSpec(n_sites=1, J=1.0, h=0.0, g=0.0)


class TestLocalPerturbation:
    def test_zero_angle_is_identity(self):
        W = local_perturbation(1, 0.0, 2)
        assert np.allclose(W.entries, np.eye(4))

    def test_full_rotation_is_minus_identity(self):
        W = local_perturbation(1, np.pi, 2)
        assert np.allclose(W.entries, -np.eye(4))

    def test_quarter_rotation_single_site(self):
        W = local_perturbation(1, np.pi / 2, 1)
        assert np.allclose(W.entries, np.diag([-1j, 1j]))

    def test_unitary_flag(self):
        W = local_perturbation(2, 0.37, 3)
        assert W.unitary
        assert np.allclose(W.entries @ W.entries.conj().T, np.eye(8))


class TestEigendecompose:
    def test_already_diagonal(self):
        H = Operator(np.diag([3.0, 1.0, 2.0]).astype(complex), hermitian=True)
        dec = eigendecompose(H)
        assert np.allclose(dec.eigenvalues, [1.0, 2.0, 3.0])
        assert np.allclose(np.abs(dec.eigenvectors), np.eye(3)[:, [1, 2, 0]])

    def test_sigma_x(self):
        H = Operator(np.array([[0, 1], [1, 0]], dtype=complex), hermitian=True)
        dec = eigendecompose(H)
        assert np.allclose(dec.eigenvalues, [-1.0, 1.0])
        s = 1 / np.sqrt(2)
        assert np.allclose(dec.eigenvectors[:, 0], [s, -s])
        assert np.allclose(dec.eigenvectors[:, 1], [s, s])

    def test_reconstruction_of_known_spectrum(self):
        rng = np.random.default_rng(3)
        lam = np.sort(rng.standard_normal(16))
        q, _ = np.linalg.qr(rng.standard_normal((16, 16))
                            + 1j * rng.standard_normal((16, 16)))
        H = Operator((q * lam) @ q.conj().T, hermitian=True)
        dec = eigendecompose(H)
        assert np.allclose(dec.eigenvalues, lam, atol=1e-9)
        assert np.max(np.abs(dec.reconstruct() - H.entries)) <= 1e-9

    def test_trace_identity(self):
        rng = np.random.default_rng(5)
        H = Operator(random_hermitian(12, rng), hermitian=True)
        dec = eigendecompose(H)
        assert np.sum(dec.eigenvalues) == pytest.approx(np.trace(H.entries).real,
                                                        abs=1e-9 * 12)

    def test_requires_hermitian_flag(self):
        with pytest.raises(ContractError):
            eigendecompose(Operator(np.eye(2, dtype=complex)))

    def test_deterministic_ordering_with_degeneracies(self):
        spec = SpinChainSpec(n_sites=5, J=1.0, h=0.4, g=0.0)
        H = ising_hamiltonian(spec)
        d1 = eigendecompose(H)
        d2 = eigendecompose(H)
        assert np.array_equal(d1.eigenvectors, d2.eigenvectors)

    def test_propagator_unitary(self):
        rng = np.random.default_rng(9)
        dec = eigendecompose(Operator(random_hermitian(8, rng), hermitian=True))
        U = dec.propagator(1.7)
        assert np.max(np.abs(U @ U.conj().T - np.eye(8))) <= 1e-12
