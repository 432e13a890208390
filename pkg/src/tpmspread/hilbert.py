"""
Hilbert-space construction: Pauli chain operators, Ising Hamiltonians,
local unitary perturbations, and Hermitian eigendecompositions.

Everything is dense; the intended scale is chains of up to 12 sites
(dimension 4096), where exact diagonalization is cheap and free of
Trotter error.  Basis ordering is the computational basis with site 1
as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
DEGENERACY_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


class ContractError(ValueError):
    """A declared operator property (hermitian/unitary flag) does not hold."""


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix with optional hermitian/unitary flags.

    The flags are verified at construction time; a violated flag raises
    ContractError.
    """

    entries: np.ndarray
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator entries must be square, got shape {m.shape}")
        object.__setattr__(self, "entries", m)
        if self.hermitian:
            defect = np.max(np.abs(m - m.conj().T))
            if defect > HERMITICITY_TOL * max(1.0, np.max(np.abs(m))):
                raise ContractError(f"hermitian flag set but defect {defect:.3e}")
        if self.unitary:
            defect = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
            if defect > UNITARITY_TOL:
                raise ContractError(f"unitary flag set but defect {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SpinChainSpec:
    """Ising chain parameters: H = -sum_i [J s^z_{i+1} s^z_i + h s^x_i + g s^z_i]."""

    n_sites: int
    J: float
    h: float
    g: float = 0.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")

    @property
    def dim(self) -> int:
        return 2**self.n_sites


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian operator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def propagator(self, t: float) -> np.ndarray:
        """Dense matrix e^{-iHt} assembled spectrally."""
        v = self.eigenvectors
        return (v * np.exp(-1j * self.eigenvalues * t)) @ v.conj().T

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _kron_chain(ops: list[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def pauli_chain_operator(site: int, axis: str, n_sites: int) -> Operator:
    """I x ... x sigma_axis x ... x I with sigma at 1-based position `site`.

    Site 1 is the most significant tensor factor.
    """
    if axis not in _PAULI:
        raise ValueError(f"axis must be one of 'x','y','z', got {axis!r}")
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} out of range 1..{n_sites}")
    ops = [np.eye(2, dtype=np.complex128)] * n_sites
    ops[site - 1] = _PAULI[axis]
    return Operator(_kron_chain(ops), hermitian=True, unitary=True)


def ising_hamiltonian(spec: SpinChainSpec) -> Operator:
    """H = -sum_i [J s^z_{i+1} s^z_i + h s^x_i + g s^z_i].

    With periodic boundary the coupling sum runs over i = 1..N with
    site N+1 identified with site 1; with open boundary it stops at N-1.
    """
    n = spec.n_sites
    dim = spec.dim
    H = np.zeros((dim, dim), dtype=np.complex128)
    sz = [pauli_chain_operator(i, "z", n).entries for i in range(1, n + 1)]
    sx = [pauli_chain_operator(i, "x", n).entries for i in range(1, n + 1)]
    n_bonds = n if spec.boundary == "periodic" else n - 1
    for i in range(n_bonds):
        H -= spec.J * (sz[(i + 1) % n] @ sz[i])
    for i in range(n):
        H -= spec.h * sx[i]
        H -= spec.g * sz[i]
    return Operator(H, hermitian=True)


def local_perturbation(site: int, theta: float, n_sites: int) -> Operator:
    """W = exp(-i theta s^z_site) = cos(theta) I - i sin(theta) s^z_site."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} out of range 1..{n_sites}")
    sz = pauli_chain_operator(site, "z", n_sites).entries
    dim = 2**n_sites
    W = np.cos(theta) * np.eye(dim, dtype=np.complex128) - 1j * np.sin(theta) * sz
    return Operator(W, unitary=True)


def _order_degenerate_blocks(eigenvalues: np.ndarray, eigenvectors: np.ndarray):
    """Deterministic tie-break: within each degenerate block, sort columns
    lexicographically by the absolute values of their components."""
    n = eigenvalues.shape[0]
    i = 0
    while i < n:
        j = i + 1
        while j < n and eigenvalues[j] - eigenvalues[i] <= DEGENERACY_TOL:
            j += 1
        if j - i > 1:
            block = eigenvectors[:, i:j]
            keys = [tuple(np.round(np.abs(block[:, k]), 12)) for k in range(j - i)]
            order = sorted(range(j - i), key=lambda k: keys[k])
            eigenvectors[:, i:j] = block[:, order]
        i = j
    return eigenvalues, eigenvectors


def _fix_phases(eigenvectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    idx = np.argmax(np.abs(eigenvectors), axis=0)
    pivots = eigenvectors[idx, np.arange(eigenvectors.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return eigenvectors / phases


def eigendecompose(H: Operator) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian operator with deterministic ordering."""
    if not H.hermitian:
        raise ContractError("eigendecompose requires the hermitian flag")
    eigenvalues, eigenvectors = np.linalg.eigh(H.entries)
    eigenvalues = eigenvalues.astype(float)
    eigenvalues, eigenvectors = _order_degenerate_blocks(eigenvalues, eigenvectors)
    eigenvectors = _fix_phases(eigenvectors)
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def parity_operator(n_sites: int) -> Operator:
    """Product of sigma^x over all sites; commutes with the g=0 Ising chain."""
    ops = [SIGMA_X] * n_sites
    return Operator(_kron_chain(ops), hermitian=True, unitary=True)
