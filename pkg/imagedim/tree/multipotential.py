"""Depth-K truncation of the multipotential integral

    J = ∫ [ ∫...∫ φ(i_1, ..., i_n, j) dμ(i_1)...dμ(i_n) ]^((q-1)/n) dμ(j),

keeping the tuples whose n + 1 words are distinct at depth K (all join levels < K).
The inner integral is the coefficient of x^n in a product of per-vertex
polynomials, built bottom-up over subtrees and top-down along each path.
"""

import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from imagedim.errors import InvalidParameterError
from imagedim.tree.measure import TreeMeasure

logger = logging.getLogger(__name__)


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise product of truncated polynomials (last axis = coefficient of x^t)."""
    degree = a.shape[-1]
    out = np.zeros(np.broadcast(a, b).shape)
    for i in range(degree):
        out[..., i:] += a[..., i:i + 1] * b[..., : degree - i]
    return out


def _subtree_polynomials(tm: TreeMeasure, f: Callable[[int], float], n: int) -> List[np.ndarray]:
    """G_w(x) = Σ over nonempty leaf sets S below w of x^|S| μ^|S|(S) Π f(level)^(branches - 1)."""
    polys = [None] * (tm.K + 1)
    leaf = np.zeros((tm.M ** tm.K, n + 1))
    if n >= 1:
        leaf[:, 1] = tm.leaves
    polys[tm.K] = leaf
    for level in range(tm.K - 1, -1, -1):
        children = polys[level + 1].reshape(tm.M ** level, tm.M, n + 1)
        # elementary symmetric polynomials e_t of the children
        e = [np.zeros((tm.M ** level, n + 1)) for _ in range(tm.M + 1)]
        e[0][:, 0] = 1.0
        for c in range(tm.M):
            for t in range(c + 1, 0, -1):
                e[t] = e[t] + _poly_mul(e[t - 1], children[:, c, :])
        fl = float(f(level))
        g = np.zeros((tm.M ** level, n + 1))
        for t in range(1, tm.M + 1):
            g += fl ** (t - 1) * e[t]
        polys[level] = g
    return polys


def inner_integrals(tm: TreeMeasure, f: Callable[[int], float], n: int) -> np.ndarray:
    """S(j) = ∫ φ(i_1, ..., i_n, j) dμ^n over tuples distinct from each other and from j, per leaf j."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    polys = _subtree_polynomials(tm, f, n)
    along = np.zeros((1, n + 1))
    along[0, 0] = 1.0
    for level in range(tm.K):
        fl = float(f(level))
        children = polys[level + 1].reshape(tm.M ** level, tm.M, n + 1)
        factors = fl * children
        factors[..., 0] += 1.0
        # product over the other children of each child, via prefix and suffix products
        prefix = np.zeros_like(factors)
        suffix = np.zeros_like(factors)
        prefix[:, 0, 0] = 1.0
        suffix[:, -1, 0] = 1.0
        for c in range(1, tm.M):
            prefix[:, c] = _poly_mul(prefix[:, c - 1], factors[:, c - 1])
            suffix[:, tm.M - 1 - c] = _poly_mul(suffix[:, tm.M - c], factors[:, tm.M - c])
        siblings = _poly_mul(prefix, suffix)
        along = _poly_mul(along[:, None, :], siblings).reshape(tm.M ** (level + 1), n + 1)
    return math.factorial(n) * along[:, n]


def partial_J(tm: TreeMeasure, f: Callable[[int], float], q: float, n: int) -> float:
    """Σ_j μ(j) S(j)^((q-1)/n) at the measure's depth K, for n <= q < n + 1."""
    if not (q > 1 and n <= q < n + 1):
        raise InvalidParameterError(f"need n <= q < n + 1 with q > 1, got q={q}, n={n}")
    s = inner_integrals(tm, f, n)
    return float(np.sum(tm.leaves * np.maximum(s, 0.0) ** ((q - 1.0) / n)))


def partial_J_sequence(
    weights: Sequence[float], f: Callable[[int], float], q: float, n: int, depths: Sequence[int]
) -> List[float]:
    """partial_J of a multinomial cascade at each depth."""
    return [partial_J(TreeMeasure.from_multinomial(weights, K), f, q, n) for K in depths]


def condition_profile(tm: TreeMeasure, f: Callable[[int], float], q: float) -> List[Tuple[int, float]]:
    """(l, log c(l) / l) with c(l) = f(l)^(q-1) Σ_{|u|=l} μ(C_u)^q, for 1 <= l <= K."""
    out = []
    for level in range(1, tm.K + 1):
        c = float(f(level)) ** (q - 1.0) * tm.moment_sum(level, q)
        out.append((level, math.log(c) / level if c > 0 else -math.inf))
    return out


class ConvergenceFit(BaseModel):
    ratio: float = Field(..., description="Fitted geometric ratio of successive differences")
    differences: List[float] = Field(..., description="J(K+1) - J(K)")
    monotone: bool = Field(..., description="Partial values never decrease")


def convergence_ratio(partials: Sequence[float]) -> ConvergenceFit:
    """Fit log(J(K+1) - J(K)) linearly in K; the ratio is exp(slope)."""
    values = np.asarray(partials, dtype=float)
    if values.size < 3:
        raise InvalidParameterError("need at least three partial values")
    diffs = np.diff(values)
    monotone = bool(np.all(diffs >= -1e-12 * np.abs(values[1:])))
    positive = diffs > 0
    if positive.sum() < 2:
        return ConvergenceFit(ratio=0.0, differences=diffs.tolist(), monotone=monotone)
    steps = np.arange(diffs.size)[positive]
    slope = stats.linregress(steps, np.log(diffs[positive])).slope
    return ConvergenceFit(ratio=float(math.exp(slope)), differences=diffs.tolist(), monotone=monotone)
