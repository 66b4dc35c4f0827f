"""flatcensus - exact census of square-tiled half-translation surfaces.

Square-tiled surfaces are counted with automorphism weights and sorted by
the topological types of their horizontal and vertical cylinder core
multi-curves, for comparison with closed-form asymptotic constants.
"""

__version__ = "0.1.0"

from .census.models import CensusFilter, CountTable, empirical_b, mgn_estimate, s_value
from .census.runner import CensusRunner
from .census.runner import census as run_census
from .curve_type import DualGraph, TopType, classify, simple_curve_type
from .foliation import Direction, core_multicurve, cylinders
from .tiling import GluingTable, MarkedTiling, automorphisms, canonical_form

__all__ = [
    "__version__",
    "GluingTable",
    "MarkedTiling",
    "canonical_form",
    "automorphisms",
    "Direction",
    "cylinders",
    "core_multicurve",
    "DualGraph",
    "TopType",
    "classify",
    "simple_curve_type",
    "CensusFilter",
    "CountTable",
    "CensusRunner",
    "run_census",
    "s_value",
    "mgn_estimate",
    "empirical_b",
]
