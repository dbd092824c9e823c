"""Lattice-point counting, spiralling statistics and second-moment computations."""

from .geometry import PRegion, RRegion, SphericalCap, cap_measure
from .lattice import LatticeBasis, count_points, dani_lattice, enumerate_points, linear_forms_lattice
from .approximates import counting_series, enumerate_approximates, spiralling_counts
from .experiment import EnvelopeSpec, ExperimentSeries, emit_report, fit_envelope
from .harness import SweepConfig, load_config, run_sweep

__version__ = "0.1.0"
