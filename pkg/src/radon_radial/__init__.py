"""d-plane Abel transforms of radial functions and their endpoint estimates.

Modules
-------
profiles      step and general radial profiles, radial measures, seeded families
lorentz       distribution functions, rearrangements, Lorentz norms
quadrature    adaptive Gauss-Kronrod with endpoint-singularity removal
grassmann     affine Grassmannian transform and its endpoint/L^p-L^q ratios
hyperbolic    hyperbolic-space transform, weak type, divergence probe
sphere        spherical transform, Catalan check, counterexamples
inequalities  alternating-power and exponential-weight checks
harness       verification scenarios and the ``radon`` command line
"""

from .errors import (AccuracyError, ArgumentError, ConfigError, DomainError, IntegrabilityError,
                     RadonError)
from .lorentz import LorentzIndex, lorentz_norm
from .profiles import RadialMeasure, RadialProfile, StepProfile, random_step_profile

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ArgumentError",
    "ConfigError",
    "DomainError",
    "IntegrabilityError",
    "RadonError",
    "LorentzIndex",
    "lorentz_norm",
    "RadialMeasure",
    "RadialProfile",
    "StepProfile",
    "random_step_profile",
    "__version__",
]
