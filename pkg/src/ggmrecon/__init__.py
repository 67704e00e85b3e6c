"""Bayesian reconstruction of missing observations with Gaussian Markov random fields."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateInputError,
    GgmError,
    InputError,
    NumericalError,
    ParameterError,
    ParseError,
)
from .graph import Graph, RoadNetworkDescription, build_road_graph, make_complete, make_lattice  # noqa: E402
from .ggm import GgmParams, Observation, exact_moments, precision_matrix, sample  # noqa: E402
from .inference import MfeConfig, reconstruct_exact, reconstruct_mfe  # noqa: E402

__all__ = [
    "DegenerateInputError",
    "GgmError",
    "InputError",
    "NumericalError",
    "ParameterError",
    "ParseError",
    "Graph",
    "RoadNetworkDescription",
    "build_road_graph",
    "make_complete",
    "make_lattice",
    "GgmParams",
    "Observation",
    "exact_moments",
    "precision_matrix",
    "sample",
    "MfeConfig",
    "reconstruct_exact",
    "reconstruct_mfe",
]
