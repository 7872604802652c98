"""Predicted image dimensions min{d, D_q(μ)/α} from the indices of ψ."""

from typing import Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field

from imagedim.errors import UnsupportedRegimeError
from imagedim.fields.diagnostics import psi_for_spec, psi_indices
from imagedim.fields.specs import FieldSpec, RieszBesselSpec


class Prediction(BaseModel):
    case: Literal["exact", "interval", "preserved"] = Field(..., description="Which branch of the law applies")
    value: float = Field(..., description="The asserted lower-dimension value (interval: its lower endpoint)")
    lower: float = Field(..., description="min{d, D_q(μ)/α^*}")
    upper: float = Field(..., description="min{d, D_q(μ)/α_*}")
    alpha_lower: Optional[float] = Field(None, description="α_*")
    alpha_upper: Optional[float] = Field(None, description="α^*")
    d: int = Field(..., description="Range dimension")
    space_filling: bool = Field(False, description="The cap d binds and exceeds the domain dimension N")


def field_indices(spec: FieldSpec) -> Tuple[float, float]:
    """(α_*, α^*) of a field law."""
    return psi_indices(psi_for_spec(spec))


def predicted_dimension(q: float, spec: FieldSpec, d: int, dq_mu: Union[float, Tuple[float, float]]) -> Prediction:
    """Dimension of the image measure μ_X predicted from D_q(μ) and the indices of ψ.

    dq_mu may be a pair (lower, upper) of generalized dimensions of μ.
    """
    low_mu, high_mu = (dq_mu, dq_mu) if isinstance(dq_mu, (int, float)) else dq_mu
    if isinstance(spec, RieszBesselSpec) and spec.effective_index > 1:
        return Prediction(case="preserved", value=min(float(d), low_mu), lower=min(float(d), low_mu), upper=min(float(d), high_mu), d=d)
    if isinstance(spec, RieszBesselSpec) and spec.effective_index == 1:
        raise UnsupportedRegimeError("γ+β-N/2 = 1 sits between the Hölder and smooth regimes")
    alpha_low, alpha_high = field_indices(spec)
    if not 0 < alpha_low <= alpha_high < 1:
        raise UnsupportedRegimeError(f"indices ({alpha_low}, {alpha_high}) fall outside (0, 1)")
    lower = min(float(d), low_mu / alpha_high)
    space_filling = d > spec.N and low_mu / alpha_high >= d
    upper = min(float(d), high_mu / alpha_low)
    case = "exact" if alpha_low == alpha_high else "interval"
    return Prediction(
        case=case,
        value=lower,
        lower=lower,
        upper=upper,
        alpha_lower=alpha_low,
        alpha_upper=alpha_high,
        d=d,
        space_filling=space_filling,
    )


def default_tolerance(prediction: Prediction) -> float:
    """0.10, widened to 0.20 when the image fills R^d with d > N."""
    return 0.20 if prediction.space_filling else 0.10
