"""Sublinear estimation of random-greedy MIS size and metric Steiner-Forest cost."""

from .core import (
    CountingAdjacencyOracle,
    CountingDistanceOracle,
    EdgeSetOracle,
    InputError,
    MetricInstance,
    Permutation,
    ThresholdGraphOracle,
    from_line,
    from_matrix,
    from_points,
    random_permutation,
    restrict_permutation,
)
from .mis import alg_add_mul, alg_mul, alg_mul_hp, mis_vertex_oracle, rgmis_exact
from .steiner import estimate_sf

__version__ = "0.1.0"
