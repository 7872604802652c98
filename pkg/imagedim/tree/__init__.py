"""Finite M-ary trees: join sets, orbits, combinatorial inequalities and multipotential sums."""

from imagedim.tree.counting import (
    SeriesCheck,
    config_bound,
    count_level_configs,
    series_bound_check,
    tail_bound,
    unlabeled_shapes,
)
from imagedim.tree.inequalities import (
    InequalityResult,
    frac_inequality_sweep,
    integer_inequality_sweep,
    orbit_partition_total,
    verify_frac_inequality,
    verify_integer_inequality,
)
from imagedim.tree.measure import TreeMeasure
from imagedim.tree.multipotential import (
    ConvergenceFit,
    condition_profile,
    convergence_ratio,
    inner_integrals,
    partial_J,
    partial_J_sequence,
)
from imagedim.tree.orbits import OrbitSignature, enumerate_orbits, orbit_table, signature_of
from imagedim.tree.words import JoinSet, JoinVertex, Word, curtail, join_set, meet, multipotential_phi, top_vertex

__all__ = [
    "ConvergenceFit",
    "InequalityResult",
    "JoinSet",
    "JoinVertex",
    "OrbitSignature",
    "SeriesCheck",
    "TreeMeasure",
    "Word",
    "condition_profile",
    "config_bound",
    "convergence_ratio",
    "count_level_configs",
    "curtail",
    "enumerate_orbits",
    "frac_inequality_sweep",
    "inner_integrals",
    "integer_inequality_sweep",
    "join_set",
    "meet",
    "multipotential_phi",
    "orbit_partition_total",
    "orbit_table",
    "partial_J",
    "partial_J_sequence",
    "series_bound_check",
    "signature_of",
    "tail_bound",
    "top_vertex",
    "unlabeled_shapes",
    "verify_frac_inequality",
    "verify_integer_inequality",
]
