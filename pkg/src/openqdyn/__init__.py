"""Dissipative two-state quantum dynamics in super-Ohmic environments."""

import os

# The propagation workload is many small LAPACK factorizations, where
# multi-threaded BLAS is counterproductive; parallelism happens across
# independent runs instead.  Respects values already set in the environment.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

from .bath import (EtaTable, SpectralDensity, Temperature, bath_correlation,
                   eta_coefficients, lineshape, spectral_density)
from .errors import (ConfigError, FitError, NumericalError, OpenQDynError,
                     ResourceError, ScanBracketError)
from .ibm import (WeakCouplingPrediction, decay_function,
                  decay_function_quadrature, decay_function_zero_T,
                  effective_coupling, effective_tunneling, ibm_polarization,
                  one_phonon_rate, overdamping_boundary,
                  weak_coupling_prediction)
from .tempo import (PathState, SystemConfig, TempoParams, Trajectory,
                    bloch_state, compress, free_propagator, influence_tensor,
                    propagate)

__version__ = "0.1.0"
