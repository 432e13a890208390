"""
Closed-form su(2)/su(1,1) engine: effective observable via nested
commutators, analytic Lanczos coefficients and Krylov bases,
coherent-state amplitudes, closed-form spread complexity, and the
IPR / b1 model with a single-site su(1,1) drive.

The su(2) representation is exact (dimension 2j+1); su(1,1) is realized
on a truncated ladder and, where truncation cannot converge (the
hyperbolic regime at large tau), on the exact 2x2 defining
representation of the group, from which the normal-ordering functions
are read off in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln, hyp2f1

from .hilbert import Operator
from .krylov import ComplexityTrace, spread_complexity_from_phi

COMMUTATOR_TOL = 1e-10


class TruncationError(RuntimeError):
    """The truncated ladder representation cannot reach the requested accuracy."""


DRIVES: dict[str, Callable[[float], float]] = {
    "linear": lambda tau: tau,
    "sin": np.sin,
    "const": lambda tau: 1.0,
}


@dataclass(frozen=True)
class AlgebraModel:
    """su(2) or su(1,1) model: representation label, coupling, drive, cutoff."""

    kind: str
    alpha: float
    j: float | None = None
    bargmann_h: float = 0.25
    f_tau: str = "linear"
    cutoff: int = 256

    def __post_init__(self):
        if self.kind not in ("su2", "su11"):
            raise ValueError(f"kind must be 'su2' or 'su11', got {self.kind!r}")
        if self.kind == "su2":
            if self.j is None or self.j < 0.5 or (2 * self.j) % 1 != 0:
                raise ValueError(f"su2 requires half-integer j >= 1/2, got {self.j}")
        else:
            if self.cutoff < 32:
                raise ValueError(f"su11 cutoff must be >= 32, got {self.cutoff}")
        if self.f_tau not in DRIVES:
            raise ValueError(f"unknown drive {self.f_tau!r}; choose from {sorted(DRIVES)}")

    @property
    def rep_dim(self) -> int:
        return int(2 * self.j + 1) if self.kind == "su2" else self.cutoff

    def drive(self, tau: float) -> float:
        return float(DRIVES[self.f_tau](tau))


@dataclass(frozen=True)
class EffectiveCoefficients:
    """O_ef = A0 K0 + i A1 (K+ - K-)."""

    A0: float
    A1: float


def generator_matrices(model: AlgebraModel) -> tuple[Operator, Operator, Operator]:
    """Ladder matrices realizing the K0, K+, K- actions on the representation basis.

    su(2): basis |j, -j+n>, n = 0..2j, exact.  su(1,1): basis |h, n>
    truncated at `cutoff` levels; commutation relations hold on the
    interior block only.
    """
    dim = model.rep_dim
    n = np.arange(dim, dtype=float)
    if model.kind == "su2":
        j = model.j
        k0_diag = n - j
        up = np.sqrt((n[:-1] + 1) * (2 * j - n[:-1]))
    else:
        h = model.bargmann_h
        k0_diag = n + h
        up = np.sqrt((n[:-1] + 1) * (2 * h + n[:-1]))
    K0 = np.diag(k0_diag).astype(np.complex128)
    Kplus = np.diag(up, -1).astype(np.complex128)
    Kminus = np.diag(up, 1).astype(np.complex128)
    return (
        Operator(K0, hermitian=True),
        Operator(Kplus),
        Operator(Kminus),
    )


def effective_coefficients(model: AlgebraModel, tau: float) -> EffectiveCoefficients:
    """A0 and A1 of the conjugated observable, trigonometric for su(2),
    hyperbolic for su(1,1)."""
    arg = 2 * model.alpha * model.drive(tau)
    if model.kind == "su2":
        return EffectiveCoefficients(A0=2 * model.alpha * np.cos(arg),
                                     A1=model.alpha * np.sin(arg))
    return EffectiveCoefficients(A0=2 * model.alpha * np.cosh(arg),
                                 A1=model.alpha * np.sinh(arg))


def effective_observable(model: AlgebraModel, tau: float) -> tuple[EffectiveCoefficients, Operator]:
    """Assemble O_ef = A0 K0 + i A1 (K+ - K-) from the generator matrices."""
    coeffs = effective_coefficients(model, tau)
    K0, Kp, Km = generator_matrices(model)
    M = coeffs.A0 * K0.entries + 1j * coeffs.A1 * (Kp.entries - Km.entries)
    return coeffs, Operator(M, hermitian=True)


def closed_form_lanczos(model: AlgebraModel, tau: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Analytic Lanczos coefficients: a_n = A0 (n - j) and b_n = A1 sqrt(n (2j - n + 1))
    for su(2); a_n = A0 (n + h), b_n = A1 sqrt(n (2h + n - 1)) for su(1,1)."""
    if model.kind == "su2" and n_max > 2 * model.j:
        raise ValueError(f"n_max {n_max} exceeds 2j = {2 * model.j}")
    if model.kind == "su11" and n_max > model.cutoff // 2:
        raise ValueError(f"n_max {n_max} exceeds cutoff/2 = {model.cutoff // 2}")
    coeffs = effective_coefficients(model, tau)
    n = np.arange(n_max + 1, dtype=float)
    if model.kind == "su2":
        a = coeffs.A0 * (n - model.j)
        b = coeffs.A1 * np.sqrt(n[1:] * (2 * model.j - n[1:] + 1))
    else:
        h = model.bargmann_h
        a = coeffs.A0 * (n + h)
        b = coeffs.A1 * np.sqrt(n[1:] * (2 * h + n[1:] - 1))
    return a, b


def _log_coherent_norms(n_levels: int) -> np.ndarray:
    """log of |N_n| = sqrt(Gamma(n + 1/2) / (n! sqrt(pi)))."""
    n = np.arange(n_levels)
    return 0.5 * (gammaln(n + 0.5) - gammaln(n + 1) - 0.5 * np.log(np.pi))


def _phase_factors(n_levels: int) -> np.ndarray:
    """i^{-n}: the analytic construction labels the basis with i^{-(n+1)},
    a global phase i away from the numeric convention (off-diagonal Lanczos
    coefficients real positive) in which phi_0 equals the ACF."""
    return (-1j) ** np.arange(n_levels)


def su11_disentangling(model: AlgebraModel, tau: float, u_grid: np.ndarray):
    """C+(tau, u) and C0(tau, u)^{1/4} of the normal-ordered u-evolution.

    With Theta = i u alpha the auxiliary function reduces to
    g = cos(u alpha) + i cosh(2 alpha f) sin(u alpha); then
    C+ = sinh(2 alpha f) sin(u alpha) / g and C0 = g^{-2}.  The quarter
    root is taken on the branch continuous along the grid with
    C0^{1/4}(0) = 1.
    """
    if model.kind != "su11":
        raise ValueError("disentangling amplitudes are su(1,1) only")
    u = np.asarray(u_grid, dtype=float)
    arg = 2 * model.alpha * model.drive(tau)
    phase = u * model.alpha
    g = np.cos(phase) + 1j * np.cosh(arg) * np.sin(phase)
    c_plus = np.sinh(arg) * np.sin(phase) / g
    theta = np.unwrap(np.angle(g))
    c0_quarter = np.abs(g) ** -0.5 * np.exp(-0.5j * theta)
    return c_plus, c0_quarter


def su11_coherent_amplitudes(model: AlgebraModel, tau: float, u_grid: np.ndarray) -> ComplexityTrace:
    """phi_n = N_n C0^{1/4} C+^n on the ladder, trace-normalized per grid point."""
    if model.bargmann_h != 0.25:
        raise ValueError("the coherent amplitude formulas are specialized to h = 1/4")
    c_plus, c0_quarter = su11_disentangling(model, tau, u_grid)
    bad = np.abs(c_plus) >= 1
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ValueError(
            f"|C+| >= 1 at (tau={tau}, u={u_grid[k]}): truncation-breaking regime"
        )
    n_levels = model.cutoff
    log_norms = _log_coherent_norms(n_levels)
    phases = _phase_factors(n_levels)
    u = np.asarray(u_grid, dtype=float)
    # phi[n, k] = N_n C0^{1/4}(u_k) C+(u_k)^n, built in log space for the tail
    cp_abs = np.abs(c_plus)
    log_cp = np.log(np.maximum(cp_abs, 1e-300))
    mags = np.exp(log_norms[:, None] + np.arange(n_levels)[:, None] * log_cp[None, :])
    cp_phase = np.where(cp_abs > 0, c_plus / np.where(cp_abs > 0, cp_abs, 1), 1.0)
    phi = phases[:, None] * mags * cp_phase[None, :] ** np.arange(n_levels)[:, None] * c0_quarter[None, :]
    norms = np.sqrt(np.sum(np.abs(phi) ** 2, axis=0))
    phi = phi / norms[None, :]
    return ComplexityTrace(
        u_grid=u, phi=phi,
        complexity=spread_complexity_from_phi(phi),
        survival=np.abs(phi[0]) ** 2,
    )


def su11_spread_complexity_closed(model: AlgebraModel, tau: float, u_grid: np.ndarray) -> np.ndarray:
    """C(tau, u) = |phi_1|^2 / (1 - F)^{3/2} with F = |C+|^2."""
    c_plus, _ = su11_disentangling(model, tau, u_grid)
    F = np.abs(c_plus) ** 2
    if np.any(F >= 1):
        raise ValueError("|C+| >= 1: closed-form complexity diverges")
    # normalized first amplitude: |phi_1|^2 = (F/2) sqrt(1 - F)
    phi1_sq = 0.5 * F * np.sqrt(1 - F)
    return phi1_sq / (1 - F) ** 1.5


# --- 2x2 defining representation of su(1,1) ---------------------------------

K0_2 = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=np.complex128)
KP_2 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
KM_2 = np.array([[0.0, 0.0], [-1.0, 0.0]], dtype=np.complex128)


def normal_order_defining(M: np.ndarray) -> tuple[complex, complex, complex]:
    """Read (A+, A0, A-) of exp(A+ K+) exp(ln(A0) K0) exp(A- K-) off a 2x2
    group element: M = [[s - A+A-/s, A+/s], [-A-/s, 1/s]] with s = sqrt(A0)."""
    m22 = M[1, 1]
    if m22 == 0:
        raise ValueError("normal-ordered form does not exist (M_22 = 0)")
    a_plus = complex(M[0, 1] / m22)
    a_minus = complex(-M[1, 0] / m22)
    a0 = complex(1.0 / m22**2)
    return a_plus, a0, a_minus


def w_tau_defining(alpha: float, tau: float) -> np.ndarray:
    """W_tau = e^{-i H1 tau} W e^{i H1 tau} in the 2x2 defining representation,
    for H1 = alpha (K+ + K-) + K0 and W = exp(i (K+ + K-))."""
    H1 = alpha * (KP_2 + KM_2) + K0_2
    W = expm(1j * (KP_2 + KM_2))
    U = expm(-1j * tau * H1)
    return U @ W @ np.linalg.inv(U)


def heisenberg_W_decomposition(alpha: float, tau: float, cutoff: int = 256,
                               max_cutoff: int = 4096,
                               residual_tol: float = 1e-6):
    """(A+, A0, A-) of W_tau extracted from the truncated ladder representation
    by matching the <0|.|0>, <1|.|0>, <0|.|1> matrix elements of the
    normal-ordered form.  The cutoff doubles until the reassembly residual on
    the leading block passes, or TruncationError is raised.
    """
    h = 0.25
    while True:
        model = AlgebraModel(kind="su11", alpha=alpha, cutoff=cutoff)
        _, Kp, Km = generator_matrices(model)
        K0 = np.diag(np.arange(cutoff) + h).astype(np.complex128)
        H1 = alpha * (Kp.entries + Km.entries) + K0
        W = expm(1j * (Kp.entries + Km.entries))
        evals, evecs = np.linalg.eigh(H1)
        U = (evecs * np.exp(-1j * evals * tau)) @ evecs.conj().T
        Wt = U @ W @ U.conj().T
        q = Wt[0, 0]  # A0^{1/4}
        s2h = np.sqrt(2 * h)
        a_plus = Wt[1, 0] / (s2h * q)
        a_minus = Wt[0, 1] / (s2h * q)
        a0 = q**4
        # reassemble on the leading block and measure the residual
        block = min(10, cutoff)
        middle = np.diag(q * a0 ** np.arange(cutoff))
        N = expm(a_plus * Kp.entries) @ middle @ expm(a_minus * Km.entries)
        residual = float(np.max(np.abs(N[:block, :block] - Wt[:block, :block])))
        if residual <= residual_tol:
            return complex(a_plus), complex(a0), complex(a_minus)
        if cutoff >= max_cutoff:
            raise TruncationError(
                f"matching residual {residual:.3e} > {residual_tol} at cutoff {cutoff}; "
                "regime outside truncated-ladder reach"
            )
        cutoff *= 2


def w_decomposition_exact(alpha: float, tau: float) -> tuple[complex, complex, complex]:
    """(A+, A0, A-) of W_tau from the exact 2x2 defining representation.

    Identical to heisenberg_W_decomposition where the ladder converges, but
    valid for all (alpha, tau) including the hyperbolic regime alpha > 1/2.
    """
    return normal_order_defining(w_tau_defining(alpha, tau))


def _occupation_weight(a_plus: complex) -> float:
    F = abs(a_plus) ** 2
    if F >= 1:
        raise ValueError(f"|A+|^2 = {F} >= 1: state is not normalizable")
    return F


def _occupation_split(alpha: float, tau: float) -> tuple[float, float]:
    """(F, 1 - F) with F = |A+|^2 for W_tau|h,0>.

    1 - F is evaluated as 1/|M_22|^2 via the group identity
    |M_22|^2 - |M_12|^2 = 1, which stays accurate when F -> 1 where the
    direct difference cancels catastrophically.
    """
    Wt = w_tau_defining(alpha, tau)
    one_minus_f = 1.0 / abs(Wt[1, 1]) ** 2
    return 1.0 - one_minus_f, one_minus_f


def ipr_model(alpha: float, tau_grid: np.ndarray) -> np.ndarray:
    """IPR(tau) of W_tau|h,0> in the |h,n> basis, h = 1/4.

    The level populations are p_n = sqrt(1-F) (1/2)_n / n! F^n with
    F = |A+|^2, so the IPR sums to (1-F) 2F1(1/2, 1/2; 1; F^2) exactly.
    """
    out = np.empty(len(tau_grid))
    for i, tau in enumerate(np.asarray(tau_grid, dtype=float)):
        F, one_minus_f = _occupation_split(alpha, tau)
        # 1 - F^2 = (1 - F)(1 + F), kept exact so the logarithmic
        # singularity of 2F1 at unit argument is resolved correctly
        eps = one_minus_f * (1.0 + F)
        if eps < 1e-8:
            # 2F1(1/2, 1/2; 1; x) -> ln(16/(1-x)) / pi as x -> 1
            out[i] = one_minus_f * np.log(16.0 / eps) / np.pi
        else:
            out[i] = one_minus_f * hyp2f1(0.5, 0.5, 1.0, 1.0 - eps)
    return out


def b1_model(alpha: float, tau_grid: np.ndarray) -> np.ndarray:
    """b1(tau) = sqrt(Var K0) in W_tau|h,0>; the geometric ladder gives
    Var = F / (2 (1-F)^2)."""
    out = np.empty(len(tau_grid))
    for i, tau in enumerate(np.asarray(tau_grid, dtype=float)):
        F, one_minus_f = _occupation_split(alpha, tau)
        out[i] = np.sqrt(0.5 * F) / one_minus_f
    return out


def acf_from_B_decomposition(alpha: float, tau: float, u_grid: np.ndarray) -> np.ndarray:
    """G(u, tau) = B0(u, tau)^{1/4} with B the normal-ordering functions of
    W_tau^dag e^{-i H0 u} W_tau, evaluated in the defining representation.

    The quarter root is taken on the branch continuous along the u grid
    with G(0) = 1.
    """
    Wt = w_tau_defining(alpha, tau)
    m22 = np.empty(len(u_grid), dtype=np.complex128)
    for i, u in enumerate(np.asarray(u_grid, dtype=float)):
        Eu = np.diag(np.exp(np.array([-0.5j * u, 0.5j * u])))
        # the defining representation is not unitary: the adjoint of the
        # group element W_tau is represented by the matrix inverse
        M = np.linalg.inv(Wt) @ Eu @ Wt
        m22[i] = M[1, 1]
    # B0^{1/4} = m22^{-1/2}, continuous branch
    theta = np.unwrap(np.angle(m22))
    return np.abs(m22) ** -0.5 * np.exp(-0.5j * theta)


def commutator_residual(model: AlgebraModel) -> float:
    """Max defect of the algebra relations on the interior block (top two
    ladder levels excluded for su(1,1))."""
    K0, Kp, Km = (op.entries for op in generator_matrices(model))
    sigma = -1.0 if model.kind == "su2" else 1.0
    r1 = Km @ Kp - Kp @ Km - 2 * sigma * K0
    r2 = K0 @ Kp - Kp @ K0 - Kp
    r3 = K0 @ Km - Km @ K0 + Km
    interior = slice(None) if model.kind == "su2" else slice(0, model.rep_dim - 2)
    return max(float(np.max(np.abs(r[interior, interior]))) for r in (r1, r2, r3))
