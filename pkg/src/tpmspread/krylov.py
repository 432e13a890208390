"""
Lanczos tridiagonalization with full reorthogonalization, Krylov-basis
amplitude evolution, spread complexity, and the moments-to-Lanczos
recursion.

The amplitude path is spectral projection (exact); the discrete
Schrodinger chain integration is provided as an independent validation
path only.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .hilbert import ContractError, Operator, SpectralDecomposition, eigendecompose
from .dynamics import StateVector, evolved_initial_state

REORTH_TOL = 1e-10
BASIS_MATCH_TOL = 1e-8
NORMALIZATION_TOL = 1e-6
MOMENT_DEPTH_CAP = 12


@dataclass(frozen=True)
class KrylovDecomposition:
    """Orthonormal Krylov vectors (columns) with Lanczos coefficients.

    a has length dim_krylov, b has length dim_krylov - 1 and is strictly
    positive; the phase convention makes <K_{n+1}|(H - a_n)|K_n> real
    positive, which is what the recursion produces naturally.
    """

    basis: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def dim_krylov(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class ComplexityTrace:
    """Krylov amplitudes phi_n(u) with complexity and survival probability."""

    u_grid: np.ndarray
    phi: np.ndarray
    complexity: np.ndarray
    survival: np.ndarray

    def __post_init__(self):
        weights = np.sum(np.abs(self.phi) ** 2, axis=0)
        drift = np.max(np.abs(weights - 1.0))
        if drift > NORMALIZATION_TOL:
            raise ValueError(
                f"Krylov amplitude normalization drift {drift:.3e} exceeds {NORMALIZATION_TOL}"
            )
        if np.any(self.complexity < -1e-12):
            raise ValueError("negative spread complexity")
        if self.u_grid.size and self.u_grid[0] == 0.0 and abs(self.complexity[0]) > 1e-10:
            raise ValueError(f"C(0) = {self.complexity[0]:.3e} deviates from 0")


def default_termination_threshold(H: np.ndarray) -> float:
    """1e-10 times an upper bound on the spectral range (infinity norm based)."""
    return 1e-10 * 2.0 * float(np.linalg.norm(H, np.inf))


def lanczos(H: Operator, psi0: StateVector, max_dim: int | None = None,
            termination_threshold: float | None = None) -> KrylovDecomposition:
    """Three-term Lanczos recursion with full reorthogonalization.

    Stops when the off-diagonal coefficient falls below the termination
    threshold (invariant subspace reached) or when max_dim vectors have
    been produced.
    """
    if not H.hermitian:
        raise ContractError("lanczos requires a Hermitian operator")
    if psi0.dim != H.dim:
        raise ValueError(f"dimension mismatch: state {psi0.dim}, operator {H.dim}")
    Hm = H.entries
    dim = H.dim
    if max_dim is None:
        max_dim = dim
    max_dim = min(max_dim, dim)
    if termination_threshold is None:
        termination_threshold = default_termination_threshold(Hm)

    Q = np.empty((dim, max_dim), dtype=np.complex128)
    a = np.empty(max_dim)
    b = np.empty(max(max_dim - 1, 0))
    Q[:, 0] = psi0.amplitudes
    k = 1
    w = Hm @ Q[:, 0]
    a[0] = np.real(np.vdot(Q[:, 0], w))
    w = w - a[0] * Q[:, 0]
    while k < max_dim:
        # full reorthogonalization, with a second pass when the residual
        # still has a resolvable component along the existing basis
        active = Q[:, :k]
        w -= active @ (active.conj().T @ w)
        overlaps = active.conj().T @ w
        if np.max(np.abs(overlaps), initial=0.0) > REORTH_TOL * max(np.linalg.norm(w), 1e-300):
            w -= active @ overlaps
        beta = np.linalg.norm(w)
        if beta <= termination_threshold:
            break
        Q[:, k] = w / beta
        b[k - 1] = beta
        w = Hm @ Q[:, k]
        a[k] = np.real(np.vdot(Q[:, k], w))
        w = w - a[k] * Q[:, k] - beta * Q[:, k - 1]
        k += 1
    return KrylovDecomposition(basis=Q[:, :k].copy(), a=a[:k].copy(), b=b[: k - 1].copy())


def spread_complexity_from_phi(phi: np.ndarray) -> np.ndarray:
    n = np.arange(phi.shape[0])
    return n @ (np.abs(phi) ** 2)


def amplitudes(K: KrylovDecomposition, H0: SpectralDecomposition, psi0: StateVector,
               u_grid: np.ndarray) -> ComplexityTrace:
    """phi_n(u) = <K_n| e^{-i H0 u} |psi0> by spectral evolution and projection."""
    if K.basis.shape[0] != psi0.dim or psi0.dim != H0.dim:
        raise ValueError("dimension mismatch between Krylov basis, state and spectrum")
    if np.linalg.norm(K.basis[:, 0] - psi0.amplitudes) > BASIS_MATCH_TOL:
        raise ValueError("Krylov decomposition was not built from the given initial state")
    u = np.asarray(u_grid, dtype=float)
    v = H0.eigenvectors
    c0 = v.conj().T @ psi0.amplitudes
    proj = (v.conj().T @ K.basis).conj().T  # K x dim, rows <K_n|E_m>
    phases = np.exp(-1j * H0.eigenvalues[:, None] * u[None, :]) * c0[:, None]
    phi = proj @ phases
    complexity = spread_complexity_from_phi(phi)
    survival = np.abs(phi[0]) ** 2
    return ComplexityTrace(u_grid=u, phi=phi, complexity=complexity, survival=survival)


def spread_complexity(trace: ComplexityTrace) -> np.ndarray:
    """C(u) = sum_n n |phi_n(u)|^2."""
    return spread_complexity_from_phi(trace.phi)


def amplitudes_via_dse(K: KrylovDecomposition, u_grid: np.ndarray,
                       rtol: float = 1e-9, atol: float = 1e-12) -> np.ndarray:
    """Integrate the discrete Schrodinger chain i phi_n' = a_n phi_n
    + b_n phi_{n-1} + b_{n+1} phi_{n+1} from phi(0) = e_0.

    Validation path for the spectral-projection amplitudes; the chain is
    the standard tridiagonal one.
    """
    u = np.asarray(u_grid, dtype=float)
    k = K.dim_krylov
    T = np.diag(K.a.astype(complex))
    if k > 1:
        T += np.diag(K.b, 1) + np.diag(K.b, -1)

    def rhs(_, y):
        phi = y[:k] + 1j * y[k:]
        dphi = -1j * (T @ phi)
        return np.concatenate([dphi.real, dphi.imag])

    y0 = np.zeros(2 * k)
    y0[0] = 1.0
    sol = solve_ivp(rhs, (u[0], u[-1]), y0, t_eval=u, rtol=rtol, atol=atol,
                    method="DOP853")
    if not sol.success:
        raise RuntimeError(f"chain integration failed: {sol.message}")
    return sol.y[:k] + 1j * sol.y[k:]


def lanczos_from_moments(moments: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Recover Lanczos coefficients from characteristic-function moments.

    The input is M_n = d^n G / du^n at u = 0 = (-i)^n <E^n>, n = 0..2k.
    Internally the measure moments are standardized (shifted by the mean,
    scaled by the standard deviation) and the Hankel Cholesky recursion
    runs in extended precision; the (a, b) are mapped back afterwards.

    Returns (a, b) with len(a) = k and len(b) = k.  A Hankel pivot at or
    below tolerance means the moment sequence is exhausted at that depth
    and shorter arrays are returned.
    """
    M = np.asarray(moments, dtype=complex)
    if M.size % 2 == 0:
        raise ValueError("need an odd number of moments M_0..M_2k")
    k = (M.size - 1) // 2
    if k > MOMENT_DEPTH_CAP:
        raise ValueError(
            f"at most {MOMENT_DEPTH_CAP} Lanczos pairs can be recovered from raw moments"
        )
    mu = (1j ** np.arange(M.size)) * M
    if np.max(np.abs(mu.imag)) > 1e-8 * max(1.0, np.max(np.abs(mu.real))):
        raise ValueError("moments are not consistent with a real measure")
    mu = mu.real
    if abs(mu[0] - 1.0) > 1e-10:
        raise ValueError(f"M_0 must be 1, got {mu[0]}")
    if k == 0:
        return np.empty(0), np.empty(0)
    mean = mu[1]
    var = mu[2] - mean**2
    if var <= 0:
        # single-point measure: Krylov dimension 1
        return np.array([mean]), np.empty(0)
    sigma = np.sqrt(var)

    with mpmath.workdps(60):
        m_mean = mpmath.mpf(mean)
        m_sigma = mpmath.mpf(sigma)
        raw = [mpmath.mpf(x) for x in mu]
        # standardized central moments nu_n = E[((X - mean)/sigma)^n]
        nu = []
        for n in range(2 * k + 1):
            s = mpmath.mpf(0)
            for j in range(n + 1):
                s += mpmath.binomial(n, j) * raw[j] * (-m_mean) ** (n - j)
            nu.append(s / m_sigma**n)
        # Hankel Cholesky H = L L^T; a failing pivot at row d means the
        # measure has exactly d support points (Krylov dimension d)
        size = k + 1
        L = [[mpmath.mpf(0)] * size for _ in range(size)]
        depth = size
        for i in range(size):
            stop = False
            for j in range(i + 1):
                s = nu[i + j] - mpmath.fsum(L[i][t] * L[j][t] for t in range(j))
                if i == j:
                    if s <= mpmath.mpf("1e-40"):
                        depth = i
                        stop = True
                        break
                    L[i][i] = mpmath.sqrt(s)
                else:
                    L[i][j] = s / L[j][j]
            if stop:
                break
        # R = L^T upper triangular; standard moment-to-recurrence relations.
        # On full rank we can recover k of each; on exhaustion at depth d,
        # a_0..a_{d-1} and b_1..b_{d-1} (row d of L holds R[., d] entries
        # computed before the pivot failed).
        def R(i, j):
            return L[j][i]

        n_a = k if depth == size else depth
        n_b = k if depth == size else depth - 1
        a_std, b_std = [], []
        for j in range(n_a):
            if j == 0:
                a_std.append(R(0, 1) / R(0, 0))
            else:
                a_std.append(R(j, j + 1) / R(j, j) - R(j - 1, j) / R(j - 1, j - 1))
        for j in range(1, n_b + 1):
            b_std.append(R(j, j) / R(j - 1, j - 1))
        a = np.array([float(m_sigma * x + m_mean) for x in a_std])
        b = np.array([float(m_sigma * x) for x in b_std])
    return a, b


def spectral_moments(psi: StateVector, H0: SpectralDecomposition, order: int) -> np.ndarray:
    """Exact characteristic-function moments M_0..M_order from spectral data."""
    p = np.abs(H0.eigenvectors.conj().T @ psi.amplitudes) ** 2
    ev = H0.eigenvalues.astype(np.longdouble)
    mu = np.array([float(np.sum(p.astype(np.longdouble) * ev**n)) for n in range(order + 1)])
    return ((-1j) ** np.arange(order + 1)) * mu


@dataclass(frozen=True)
class ThermoIdentities:
    """First Lanczos pair against the direct mean/variance of H0."""

    a0: float
    mean_h0: float
    a0_residual: float
    b1_sq: float
    variance_h0: float
    b1_residual: float


def thermo_identities(E0: StateVector, W: Operator, H0_op: Operator,
                      H0: SpectralDecomposition, H1: SpectralDecomposition,
                      tau: float) -> ThermoIdentities:
    """Check a_0 = <H0> and b_1^2 = Var(H0) in the state W_tau|E0>."""
    psi_tau = evolved_initial_state(E0, W, H1, tau)
    p = np.abs(H0.eigenvectors.conj().T @ psi_tau.amplitudes) ** 2
    mean = float(p @ H0.eigenvalues)
    variance = float(p @ H0.eigenvalues**2 - mean**2)
    K = lanczos(H0_op, psi_tau, max_dim=2)
    a0 = float(K.a[0])
    b1_sq = float(K.b[0] ** 2) if K.dim_krylov > 1 else 0.0
    return ThermoIdentities(
        a0=a0, mean_h0=mean, a0_residual=abs(a0 - mean),
        b1_sq=b1_sq, variance_h0=variance, b1_residual=abs(b1_sq - variance),
    )


def interpretation_equivalence(E0: StateVector, W: Operator, H0_op: Operator,
                               H1: SpectralDecomposition, tau: float,
                               u_grid: np.ndarray) -> float:
    """Max deviation between the two readings of the auto-correlation function.

    Interpretation 1 evolves W_tau|E0> with H0; interpretation 2 evolves
    |E0> with the conjugated generator W_tau^dag H0 W_tau.  Both Krylov
    chains are built independently and the amplitudes compared pointwise.
    """
    if not W.unitary:
        raise ValueError("interpretation_equivalence requires a unitary W")
    H0 = eigendecompose(H0_op)
    psi1 = evolved_initial_state(E0, W, H1, tau)
    K1 = lanczos(H0_op, psi1)
    phi1 = amplitudes(K1, H0, psi1, u_grid).phi

    Wt = H1.propagator(tau) @ W.entries @ H1.propagator(-tau)
    M = Wt.conj().T @ H0_op.entries @ Wt
    O_ef = Operator((M + M.conj().T) / 2, hermitian=True)
    K2 = lanczos(O_ef, E0)
    phi2 = amplitudes(K2, eigendecompose(O_ef), E0, u_grid).phi

    n = min(phi1.shape[0], phi2.shape[0])
    dev = float(np.max(np.abs(phi1[:n] - phi2[:n]))) if n else 0.0
    for extra in (phi1[n:], phi2[n:]):
        if extra.size:
            dev = max(dev, float(np.max(np.abs(extra))))
    return dev
