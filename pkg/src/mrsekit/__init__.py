"""Structural entropy (SE), random-surfing SE and multi-relational SE.

Entropy functionals over encoding trees, greedy two-level minimization for
community detection, synthetic graph generation and clustering metrics.
"""
__version__ = "0.1.0"

from .errors import ConvergenceError, InputError, PartitionError  # noqa: E402
from .graph import (  # noqa: E402
    MultiRelationalGraph,
    SingleRelationalGraph,
    consolidate,
    reduce_to_single,
)
from .surfing import (  # noqa: E402
    SurfConfig,
    build_multirel_transitions,
    build_transition,
    multirank,
    power_method,
)
from .tree import EncodingTree, Partition, height1_tree, singleton_tree  # noqa: E402
from .entropy import (  # noqa: E402
    decoded_fraction,
    delta_mrse_exact,
    delta_mrse_paper,
    delta_se,
    mrse,
    mrse_1d,
    rsse,
    rsse_1d,
    se,
    se_1d,
)
from .minimize import (  # noqa: E402
    MinimizeConfig,
    hierarchical_minimize,
    minimize_2d,
    minimize_recursive,
)
from .metrics import acc, ari, nmi  # noqa: E402
