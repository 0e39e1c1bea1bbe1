"""Non-Markovian open-system dynamics in hybrid bosonic/fermionic baths.

The package integrates the coefficient functions of the O and Q operators,
the master equations they induce, and an exact few-mode reference.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, HybridBathError, IntegrationError,  # noqa: E402
                     InvalidArgumentError, ResourceError, SingularityError)
from .kernels import CorrelationKernel, kernel_ou, kernel_single_mode  # noqa: E402
from .master import DissipatorTerm, MasterGenerator, evolve, positivity_monitor  # noqa: E402
from .models import ModelSpec, RunResult, build_model, default_parameters, run, sweep  # noqa: E402
from .oracle import TotalSystemSpec, compare_to_master, oracle_evolve  # noqa: E402

__all__ = [
    "ConfigError", "CorrelationKernel", "DissipatorTerm", "HybridBathError",
    "IntegrationError", "InvalidArgumentError", "MasterGenerator", "ModelSpec",
    "ResourceError", "RunResult", "SingularityError", "TotalSystemSpec", "build_model",
    "compare_to_master", "default_parameters", "evolve", "kernel_ou", "kernel_single_mode",
    "oracle_evolve", "positivity_monitor", "run", "sweep",
]
