"""Set-valued spatiotemporal robustness monitoring for STL."""

from .envelope import Envelope, PerturbationLevel, env_max, env_min, pareto_strict, raster_maximal_points
from .errors import (
    BudgetExceeded, ConfigError, DimensionError, NegationRejected, OutOfDomain,
    ParseError, SpecSyntaxError, StrobustError, UnboundedHorizon, Unsupported,
    WindowOutOfRange,
)
from .formula import (
    Always, And, Atom, Eventually, Interval, Linear, Lipschitz, Or, Orientation,
    SignedDistance, TrueF, Until, evaluate_predicate, pretty_print, spatial_margin,
)
from .formula_monitor import explain, monitor, run_monitor, sliding_extremum
from .horizon import required_times
from .parser import parse_spec
from .predicate_monitor import MonitorConfig, predicate_envelope, shell_offsets
from .regions import Ball, Box, Halfspace, Polytope, Union
from .signal import Padding, Signal, load_csv, sample, sample_shifted, save_csv

__version__ = "0.1.0"
