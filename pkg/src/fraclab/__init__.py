"""fraclab: a numerically verified laboratory for nonlocal operators.

Pointwise fractional Laplacians (singular integral, extension method,
regional and master variants), spectral operators on tori and intervals,
Caputo/Marchaud time derivatives with their memory models, heavy-tailed
heat kernels, and reproducible long-jump random walks.  Every closed-form
identity the package relies on is re-verified numerically by the test
suite and by ``fraclab verify``.
"""

from .core import (Domain, FracOrder, FunctionHandle, GridFunction,
                   Normalization, QuadratureSpec, gamma, mean_value_deficit,
                   normalization_constant)
from .pointops import (CoefficientMatrix, KernelSpec, MasterKernel,
                       classical_limit_coefficients, decay_profile,
                       extension_halflap, fraclap, fraclap_detailed,
                       master_operator, nonlocal_classical_lap,
                       regional_fraclap)

__version__ = "0.1.0"
