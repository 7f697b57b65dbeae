"""Spacing statistics of finite spectra, torus flows and type-A representations."""
from ._accel import backend
from .errors import (ConfigurationError, InputError, InvariantViolation,
                     SpacingLabError, UnsupportedOperatorError)
from .spacing import (AtomicMeasure, MGrid, OrderedTuple, ReferenceMeasure,
                      approx_tuple, histogram, ks_distance, mgrid_build, mgrid_ks,
                      nn_measure, nn_measure_circle, nn_measure_naive)

__version__ = "0.1.0"
