"""Measures on [0,1)^N with exact cylinder masses."""

from imagedim.measures.io import (
    dump_measure_config,
    export_atoms_csv,
    load_measure_config,
    read_atoms_csv,
    read_curve_csv,
    write_curve_csv,
)
from imagedim.measures.models import (
    AtomsMeasure,
    CubeAddress,
    MeasureModel,
    MomentCurve,
    MomentEntry,
    MultinomialMeasure,
    UniformMeasure,
    cube_indices,
    measure_adapter,
)
from imagedim.measures.moments import (
    analytic_dq,
    correlation_curve,
    correlation_integral,
    cube_masses,
    cylinder_mass,
    discretize,
    moment_curve,
    moment_sum,
    rescale_to_half_cube,
    source_dimension,
)

__all__ = [
    "AtomsMeasure",
    "CubeAddress",
    "MeasureModel",
    "MomentCurve",
    "MomentEntry",
    "MultinomialMeasure",
    "UniformMeasure",
    "analytic_dq",
    "correlation_curve",
    "correlation_integral",
    "cube_indices",
    "cube_masses",
    "cylinder_mass",
    "discretize",
    "dump_measure_config",
    "export_atoms_csv",
    "load_measure_config",
    "measure_adapter",
    "moment_curve",
    "moment_sum",
    "read_atoms_csv",
    "read_curve_csv",
    "rescale_to_half_cube",
    "source_dimension",
    "write_curve_csv",
]
