"""Spread complexity, Lanczos coefficients, OTOC/FOTOC and IPR for
two-point measurement protocols on spin chains, with a closed-form
su(2)/su(1,1) engine as an independent oracle."""

__version__ = "0.1.0"

from .hilbert import (Operator, SpinChainSpec, SpectralDecomposition,
                      eigendecompose, ising_hamiltonian, local_perturbation,
                      pauli_chain_operator)
from .dynamics import (CFTrace, StateVector, characteristic_function, fotoc,
                       fotoc_long_u_average, heisenberg_evolve, ipr,
                       otoc_four_point, u_evolve)
from .krylov import (ComplexityTrace, KrylovDecomposition, amplitudes,
                     interpretation_equivalence, lanczos, lanczos_from_moments,
                     spread_complexity, thermo_identities)
from .liealg import (AlgebraModel, EffectiveCoefficients, b1_model,
                     closed_form_lanczos, effective_observable,
                     generator_matrices, heisenberg_W_decomposition, ipr_model,
                     su11_coherent_amplitudes, su11_spread_complexity_closed)
from .scenarios import ScenarioConfig, preset_config, run, saturation_stats
