"""Random-greedy MIS oracles and size estimators."""

from ._backend import available as available_backends, name as backend_name, set_backend
from .estimator import (
    MisEstimate,
    alg_add_mul,
    alg_mul,
    alg_mul_hp,
    hp_instances,
    sample_count,
    sqrt_budget,
)
from .goodperm import (
    exhaustive_good_rate,
    good_permutation_rate,
    good_restriction_first_counts,
    is_good_permutation,
)
from .oracle import (
    OracleCallStats,
    abstract_oracle_reference,
    mis_vertex_oracle,
    new_cache,
    rgmis_exact,
    rgmis_mask,
    sample_call_stats,
)
