"""
Spectrally exact time and u evolution: characteristic functions,
OTOC/FOTOC, survival probability, and inverse participation ratio.

All evolutions go through SpectralDecomposition, so there is no
integrator error anywhere in this module.  The characteristic function
is returned in the raw auto-correlation convention, without the
e^{+i u E_0} prefactor (that constant phase only shifts the mean of the
measured distribution and is applied inside otoc_four_point only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import DEGENERACY_TOL, Operator, SpectralDecomposition

NORM_TOL = 1e-10
EIGENSTATE_RESIDUAL_TOL = 1e-8


class PreconditionError(ValueError):
    """An operation precondition (normalization, eigenstate residual, ...) failed."""


@dataclass(frozen=True)
class StateVector:
    """Normalized complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > NORM_TOL:
            raise PreconditionError(f"state norm {norm:.12f} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class CFTrace:
    """Characteristic function G(u, tau) sampled on an ascending u grid."""

    tau: float
    u_grid: np.ndarray
    values: np.ndarray
    phase_convention: str = "raw_acf"

    def __post_init__(self):
        if np.any(np.abs(self.values) > 1 + 1e-10):
            raise ValueError("characteristic function modulus exceeds 1")
        if self.u_grid.size and self.u_grid[0] == 0.0:
            if abs(self.values[0] - 1.0) > 1e-10:
                raise ValueError("G(0) deviates from 1")


def _check_dims(*dims: int):
    if len(set(dims)) != 1:
        raise ValueError(f"dimension mismatch: {dims}")


def heisenberg_evolve(W: Operator, H1: SpectralDecomposition, tau: float) -> Operator:
    """W_tau = e^{-i H1 tau} W e^{+i H1 tau}."""
    if not W.unitary:
        raise PreconditionError("heisenberg_evolve expects a unitary W")
    _check_dims(W.dim, H1.dim)
    U = H1.propagator(tau)
    return Operator(U @ W.entries @ U.conj().T, unitary=True)


def u_evolve(psi: StateVector, H0: SpectralDecomposition, u: float) -> StateVector:
    """e^{-i H0 u} |psi> via the spectral sum."""
    _check_dims(psi.dim, H0.dim)
    v = H0.eigenvectors
    c = v.conj().T @ psi.amplitudes
    return StateVector(v @ (np.exp(-1j * H0.eigenvalues * u) * c))


def _eigenstate_residual(psi: StateVector, H0: SpectralDecomposition) -> float:
    Hpsi = H0.eigenvectors @ (H0.eigenvalues * (H0.eigenvectors.conj().T @ psi.amplitudes))
    energy = np.real(np.vdot(psi.amplitudes, Hpsi))
    return float(np.linalg.norm(Hpsi - energy * psi.amplitudes))


def _require_eigenstate(psi: StateVector, H0: SpectralDecomposition):
    residual = _eigenstate_residual(psi, H0)
    if residual > EIGENSTATE_RESIDUAL_TOL:
        raise PreconditionError(
            f"initial state is not an eigenstate: residual {residual:.3e} > {EIGENSTATE_RESIDUAL_TOL}"
        )


def evolved_initial_state(E0: StateVector, W: Operator, H1: SpectralDecomposition,
                          tau: float) -> StateVector:
    """|E0, tau> = W_tau |E0>, the initial state of the u-evolution."""
    Wt = heisenberg_evolve(W, H1, tau)
    return StateVector(Wt.entries @ E0.amplitudes)


def spectral_weights(psi: StateVector, H0: SpectralDecomposition) -> np.ndarray:
    """Populations |<E_m|psi>|^2 in the H0 eigenbasis."""
    return np.abs(H0.eigenvectors.conj().T @ psi.amplitudes) ** 2


def characteristic_function(E0: StateVector, W: Operator, H0: SpectralDecomposition,
                            H1: SpectralDecomposition, tau: float,
                            u_grid: np.ndarray) -> CFTrace:
    """G(u, tau) = <E0, tau| e^{-i H0 u} |E0, tau> with |E0, tau> = W_tau |E0>."""
    _check_dims(E0.dim, W.dim, H0.dim, H1.dim)
    _require_eigenstate(E0, H0)
    psi_tau = evolved_initial_state(E0, W, H1, tau)
    p = spectral_weights(psi_tau, H0)
    u = np.asarray(u_grid, dtype=float)
    values = np.exp(-1j * np.outer(u, H0.eigenvalues)) @ p
    # clip tiny overshoot from rounding so the modulus invariant is exact
    mod = np.abs(values)
    over = mod > 1.0
    values[over] *= 1.0 / mod[over]
    return CFTrace(tau=tau, u_grid=u, values=values)


def otoc_four_point(O0: StateVector, W: Operator, O: SpectralDecomposition,
                    H: SpectralDecomposition, tau: float, u: float) -> complex:
    """Four-point function <O0| W_tau^† V^† W_tau V |O0> with V = e^{i u O}."""
    _check_dims(O0.dim, W.dim, O.dim, H.dim)
    _require_eigenstate(O0, O)
    Wt = heisenberg_evolve(W, H, tau).entries
    v = O.eigenvectors
    V = (v * np.exp(1j * O.eigenvalues * u)) @ v.conj().T
    psi = O0.amplitudes
    return complex(psi.conj() @ (Wt.conj().T @ (V.conj().T @ (Wt @ (V @ psi)))))


def fotoc(E0: StateVector, W: Operator, H0: SpectralDecomposition,
          H1: SpectralDecomposition, tau: float, u_grid: np.ndarray) -> np.ndarray:
    """|G(u, tau)|^2, the survival probability of |E0, tau> under H0."""
    trace = characteristic_function(E0, W, H0, H1, tau, u_grid)
    return np.abs(trace.values) ** 2


def _grouped_level_weights(psi: StateVector, basis: SpectralDecomposition) -> np.ndarray:
    """Populations of distinct energy levels, grouping eigenvalues within tolerance.

    Degenerate periodic chains (momentum pairs) make the grouping necessary:
    the long-u average and the level IPR are only basis-independent per
    degenerate subspace, not per individual eigenvector.
    """
    p = spectral_weights(psi, basis)
    ev = basis.eigenvalues
    groups = np.concatenate(([0], np.cumsum(np.diff(ev) > DEGENERACY_TOL)))
    return np.bincount(groups, weights=p)


def fotoc_long_u_average(E0: StateVector, W: Operator, H0: SpectralDecomposition,
                         H1: SpectralDecomposition, tau: float) -> float:
    """lim_{U->inf} (1/U) int_0^U |G|^2 du = sum over levels of squared populations."""
    _check_dims(E0.dim, W.dim, H0.dim, H1.dim)
    _require_eigenstate(E0, H0)
    psi_tau = evolved_initial_state(E0, W, H1, tau)
    q = _grouped_level_weights(psi_tau, H0)
    return float(np.sum(q**2))


def ipr(psi: StateVector, basis: SpectralDecomposition) -> float:
    """Inverse participation ratio over the (level-grouped) eigenbasis."""
    _check_dims(psi.dim, basis.dim)
    q = _grouped_level_weights(psi, basis)
    return float(np.sum(q**2))


def fotoc_finite_u_average(E0: StateVector, W: Operator, H0: SpectralDecomposition,
                           H1: SpectralDecomposition, tau: float, U: float) -> float:
    """(1/U) int_0^U |G|^2 du evaluated in closed form.

    |G|^2 = sum_{m,n} p_m p_n e^{-i(E_m-E_n)u}; each pair integrates to
    sinc((E_m-E_n)U).  Used as the quadrature-side oracle for the long-u
    identity.
    """
    _check_dims(E0.dim, W.dim, H0.dim, H1.dim)
    _require_eigenstate(E0, H0)
    psi_tau = evolved_initial_state(E0, W, H1, tau)
    p = spectral_weights(psi_tau, H0)
    delta = H0.eigenvalues[:, None] - H0.eigenvalues[None, :]
    kernel = np.sinc(delta * U / np.pi)
    return float(p @ kernel @ p)
