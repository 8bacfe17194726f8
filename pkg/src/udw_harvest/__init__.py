"""Leading-order entanglement harvesting by two Unruh-DeWitt detectors.

The entangling term is computed as ``M = M+ + M-``: the anticommutator part
``M+`` through flipped-gap mutual-information integrals (or its closed form)
and the commutator part ``M-`` from its light-cone support, each checked
against brute-force regulated double integrals.
"""

from .errors import (BudgetExhausted, ConfigError, ExtrapolationUnstable, HarvestError,
                     InvalidRadius, NonDecayingIntegrand, OnLightCone, OverflowRange,
                     PerturbativityWarning, UnsupportedScenario)
from .harvest import (ComparisonReport, DensityMatrixBlocks, TwoDetectorState, assemble_rho,
                      compare_methods, compute_blocks, e_integral_reference, figure_scale,
                      l_ij_mode, l_ij_oracle, m_minus_closed, m_minus_integral, m_oracle,
                      m_plus_closed, m_plus_identity, negativity, scaled_m)
from .model import (CorrelatorKernel, Detector, ModeFamily, Scenario, anticommutator_pointlike,
                    commutator_lightcone, minkowski_mode_family, wightman_from_modes,
                    wightman_pointlike)
from .quad import (QuadratureResult, Tolerance, integrate_1d, integrate_2d_ordered,
                   integrate_semi_infinite_oscillatory)
from .specfun import dawson, erf_complex, erfc_complex, erfi_real, faddeeva_w, gauss_erfi

__version__ = "0.1.0"
