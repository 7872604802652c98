"""Translated m-adic ultrametrics d_a on [0, 1/2)^N.

Coordinates are snapped to integers X with x = X / m^K, so x + a = P / ((m - 1) m^K)
with P = X (m - 1) + j m^K, and every cube comparison is integer arithmetic.
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from imagedim.errors import (
    DepthSaturationError,
    DuplicateWordError,
    InvalidParameterError,
    TranslateNotFoundError,
)
from imagedim.tree.words import JoinSet, Word, join_set

logger = logging.getLogger(__name__)

# Snapping resolution: m^K >= 2^60.
SNAP_BITS = 60


def default_depth(m: int) -> int:
    return math.ceil(SNAP_BITS / math.log2(m))


class UltrametricId(BaseModel):
    """(m, a) with a = j / (m - 1) and each j_l in [0, m/2 - 1]."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=2, description="Even base of the cube hierarchy")
    j: Tuple[int, ...] = Field(..., min_length=1, description="Translation numerators, a_l = j_l / (m - 1)")

    @field_validator("m")
    @classmethod
    def _even(cls, m: int) -> int:
        if m % 2:
            raise ValueError(f"m must be even, got {m}")
        return m

    @model_validator(mode="after")
    def _in_family(self) -> "UltrametricId":
        if any(not 0 <= jl <= self.m // 2 - 1 for jl in self.j):
            raise ValueError(f"translation numerators must lie in [0, {self.m // 2 - 1}], got {self.j}")
        return self

    @property
    def N(self) -> int:
        return len(self.j)

    @property
    def a(self) -> Tuple[float, ...]:
        return tuple(jl / (self.m - 1) for jl in self.j)


def translate_family(m: int, N: int) -> List[UltrametricId]:
    """All (m/2)^N translates, lexicographic in j."""
    return [UltrametricId(m=m, j=j) for j in itertools.product(range(m // 2), repeat=N)]


class SnappedPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    X: Tuple[int, ...] = Field(..., description="Integer coordinates, x = X / m^K")
    m: int = Field(..., description="Base")
    K: int = Field(..., description="Representation depth")
    snap_error: float = Field(0.0, description="max |x - X / m^K| over coordinates")


def snap(point: Sequence[float], m: int, K: Optional[int] = None) -> SnappedPoint:
    """Exact rational snap of a point of [0, 1/2)^N onto the m^-K lattice."""
    K = K or default_depth(m)
    scale = m ** K
    coords, error = [], 0.0
    for x in point:
        if not 0.0 <= x < 0.5:
            raise InvalidParameterError(f"coordinate {x} is outside [0, 1/2)")
        X = min(round(Fraction(x) * scale), scale // 2 - 1)
        error = max(error, abs(float(Fraction(x) - Fraction(X, scale))))
        coords.append(X)
    return SnappedPoint(X=tuple(coords), m=m, K=K, snap_error=error)


def _snapped(point, uid: UltrametricId, K: Optional[int]) -> SnappedPoint:
    p = point if isinstance(point, SnappedPoint) else snap(point, uid.m, K)
    if len(p.X) != uid.N:
        raise InvalidParameterError(f"point has dimension {len(p.X)}, translate has {uid.N}")
    return p


def shifted_digits(p: SnappedPoint, uid: UltrametricId) -> Tuple[int, ...]:
    """Q_l = floor((x_l + a_l) m^K); the level-k cube of x + a has index Q // m^(K - k)."""
    scale = p.m ** p.K
    return tuple((X * (p.m - 1) + jl * scale) // (p.m - 1) for X, jl in zip(p.X, uid.j))


class CubeAgreement(BaseModel):
    level: int = Field(..., description="Greatest k whose cube of C_k^a holds both points")
    saturated: bool = Field(False, description="Distinct points sharing the depth-K cube")
    coincident: bool = Field(False, description="Points snapped to the same lattice point")


def agreement_level(x, y, uid: UltrametricId, K: Optional[int] = None) -> CubeAgreement:
    px, py = _snapped(x, uid, K), _snapped(y, uid, K)
    if px.K != py.K:
        raise InvalidParameterError("points snapped at different depths")
    if px.X == py.X:
        return CubeAgreement(level=px.K, coincident=True)
    qx, qy = shifted_digits(px, uid), shifted_digits(py, uid)
    s = 0
    while any(a != b for a, b in zip(qx, qy)):
        qx = tuple(v // px.m for v in qx)
        qy = tuple(v // px.m for v in qy)
        s += 1
    return CubeAgreement(level=px.K - s, saturated=s == 0)


def d_a(x, y, uid: UltrametricId, K: Optional[int] = None) -> float:
    """m^-k for the greatest shared level k; 0 for equal points; m^-K when depth-saturated."""
    agreement = agreement_level(x, y, uid, K)
    if agreement.coincident:
        return 0.0
    return float(uid.m) ** -agreement.level


def _squared_gap(px: SnappedPoint, py: SnappedPoint) -> int:
    return sum((a - b) ** 2 for a, b in zip(px.X, py.X))


def _upper_violated(px: SnappedPoint, py: SnappedPoint, uid: UltrametricId) -> bool:
    """d_a > 8 m (m - 1) |x - y|, compared on squares of integers."""
    agreement = agreement_level(px, py, uid)
    if agreement.coincident:
        return False
    m = uid.m
    return m ** (2 * (px.K - agreement.level)) > 64 * m * m * (m - 1) ** 2 * _squared_gap(px, py)


def _lower_holds(px: SnappedPoint, py: SnappedPoint, uid: UltrametricId) -> bool:
    """|x - y| <= N^(1/2) d_a(x, y)."""
    agreement = agreement_level(px, py, uid)
    if agreement.coincident:
        return True
    return _squared_gap(px, py) <= uid.N * uid.m ** (2 * (px.K - agreement.level))


def lower_bound_check(x, y, uid: UltrametricId, K: Optional[int] = None) -> bool:
    return _lower_holds(_snapped(x, uid, K), _snapped(y, uid, K), uid)


def exception_count(x, y, m: int, K: Optional[int] = None) -> int:
    """Number of translates a with d_a(x, y) > 8 m (m - 1) |x - y|."""
    N = len(x.X) if isinstance(x, SnappedPoint) else len(x)
    family = translate_family(m, N)
    px, py = _snapped(x, family[0], K), _snapped(y, family[0], K)
    if px.X == py.X:
        return 0
    return sum(_upper_violated(px, py, uid) for uid in family)


def exception_bound(m: int, N: int) -> int:
    return N * (m // 2) ** (N - 1)


def select_translate(points: Sequence[Sequence[float]], m: int, K: Optional[int] = None) -> UltrametricId:
    """First translate (lexicographic in j) that is bi-Lipschitz on every pair of points.

    Requires m even and m > 2 n^2 N.
    """
    if not points:
        raise InvalidParameterError("select_translate needs at least one point")
    n, N = len(points), len(points[0])
    if m % 2 or m <= 2 * n * n * N:
        raise InvalidParameterError(f"need even m > 2 n^2 N = {2 * n * n * N}, got m={m}")
    family = translate_family(m, N)
    if n == 1:
        return family[0]
    snapped = [_snapped(p, family[0], K) for p in points]
    pairs = list(itertools.combinations(snapped, 2))
    for uid in family:
        if all(_lower_holds(px, py, uid) and not _upper_violated(px, py, uid) for px, py in pairs):
            return uid
    raise TranslateNotFoundError(f"no translate among {len(family)} fits {n} points with m={m}")


def cube_word(p: SnappedPoint, uid: UltrametricId) -> Word:
    """Symbols (base m^N) of the cubes of C^a containing the point, levels 1..K."""
    q = shifted_digits(p, uid)
    word = []
    for level in range(1, p.K + 1):
        symbol = 0
        for Q in q:
            symbol = symbol * p.m + (Q // p.m ** (p.K - level)) % p.m
        word.append(symbol)
    return tuple(word)


def join_cubes(points: Sequence, uid: UltrametricId, K: Optional[int] = None) -> JoinSet:
    """Join set of the points in the tree of cubes of C^a."""
    snapped = [_snapped(p, uid, K) for p in points]
    words = [cube_word(p, uid) for p in snapped]
    try:
        return join_set(words)
    except DuplicateWordError:
        for (i, wi), (k, wk) in itertools.combinations(enumerate(words), 2):
            if wi == wk:
                raise DepthSaturationError(
                    f"points {i} and {k} share their depth-{snapped[0].K} cube", pair=(i, k)
                ) from None
        raise


def phi_a(points: Sequence, uid: UltrametricId, K: Optional[int] = None) -> float:
    """m^k(C_1) ... m^k(C_n) over the join cubes of n + 1 points."""
    value = 1.0
    for vertex in join_cubes(points, uid, K).vertices:
        value *= float(uid.m) ** (vertex.level * vertex.multiplicity)
    return value


def join_levels_a(points: Sequence, uid: UltrametricId, K: Optional[int] = None) -> List[int]:
    """Levels of the join cubes in C^a, with multiplicity, ascending."""
    return join_cubes(points, uid, K).levels
