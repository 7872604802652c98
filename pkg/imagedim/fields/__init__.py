"""Gaussian random fields: laws, samplers and increment-variance diagnostics."""

from imagedim.fields.covariance import covariance, covariance_matrix, fbm_covariance, structure_function
from imagedim.fields.diagnostics import (
    check_lacunarity,
    conditional_variance,
    doubling_constant,
    holder_ratio,
    modulus_of_continuity,
    psi_for_spec,
    psi_indices,
    sln_ratio_scan,
    spectral_truncation_error,
    variogram,
)
from imagedim.fields.io import export_field_csv, export_field_metadata
from imagedim.fields.samplers import SAMPLERS, sample_field
from imagedim.fields.specs import (
    DyadicPiecewisePsi,
    FbmSpec,
    FieldSample,
    FieldSpec,
    Grid,
    InfinityScaleSpec,
    PowerLawPsi,
    PsiModel,
    RieszBesselSpec,
    TabulatedPsi,
    regular_grid,
    unit_grid,
)

__all__ = [
    "DyadicPiecewisePsi",
    "FbmSpec",
    "FieldSample",
    "FieldSpec",
    "Grid",
    "InfinityScaleSpec",
    "PowerLawPsi",
    "PsiModel",
    "RieszBesselSpec",
    "SAMPLERS",
    "TabulatedPsi",
    "check_lacunarity",
    "conditional_variance",
    "covariance",
    "covariance_matrix",
    "doubling_constant",
    "export_field_csv",
    "export_field_metadata",
    "fbm_covariance",
    "holder_ratio",
    "modulus_of_continuity",
    "psi_for_spec",
    "psi_indices",
    "regular_grid",
    "sample_field",
    "sln_ratio_scan",
    "spectral_truncation_error",
    "structure_function",
    "unit_grid",
    "variogram",
]
