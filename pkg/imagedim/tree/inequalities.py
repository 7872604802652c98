"""Exhaustive finite-depth checks of the orbit-measure inequalities.

Depth-K leaves act as mass-carrying points. Coincident leaves are joined at
level K, so the orbits below any vertex partition the whole tuple space.
"""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from imagedim.errors import InvalidParameterError
from imagedim.tree.measure import TreeMeasure
from imagedim.tree.orbits import OrbitSignature, orbit_table
from imagedim.tree.words import Word, index_word

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-9


class InequalityResult(BaseModel):
    """One verified instance: lhs <= rhs (1 + 1e-9)."""

    instance: Dict = Field(..., description="Instance descriptor")
    lhs: float
    rhs: float
    margin: float = Field(..., description="rhs (1 + slack) - lhs")
    holds: bool


def _result(instance: dict, lhs: float, rhs: float) -> InequalityResult:
    margin = rhs * (1.0 + RELATIVE_SLACK) - lhs
    return InequalityResult(instance=instance, lhs=lhs, rhs=rhs, margin=margin, holds=margin >= 0)


def tuple_masses(leaves: np.ndarray, n: int) -> np.ndarray:
    """μ^n of every ordered n-tuple of leaves, flattened in itertools.product order."""
    out = np.ones(1)
    for _ in range(n):
        out = np.multiply.outer(out, leaves).ravel()
    return out


def orbit_masses_below(tm: TreeMeasure, v: Word, n: int) -> Dict[OrbitSignature, float]:
    """μ^n of each orbit of n-tuples in C_v, keyed by absolute-level signatures."""
    ids, signatures = orbit_table(tm.M, tm.K - len(v), n)
    sums = np.bincount(ids, weights=tuple_masses(tm.block(v, tm.K), n), minlength=len(signatures))
    return {sig.shifted(len(v)): float(total) for sig, total in zip(signatures, sums)}


def _relative_id(orbit: OrbitSignature, M: int, depth: int, offset: int) -> int:
    _, signatures = orbit_table(M, depth, orbit.n)
    relative = orbit.shifted(-offset)
    try:
        return signatures.index(relative)
    except ValueError:
        raise InvalidParameterError(f"orbit {orbit.form} is not realizable below a level-{offset} vertex") from None


def integer_rhs(tm: TreeMeasure, v: Word, orbit: OrbitSignature, q: float, n: int) -> float:
    value = tm.mass(v) ** ((q - n) / (q - 1.0))
    for level in orbit.levels:
        value *= tm.moment_sum(level, q, below=v) ** (1.0 / (q - 1.0))
    return value


def verify_integer_inequality(tm: TreeMeasure, v: Word, orbit: OrbitSignature, q: float, n: int) -> InequalityResult:
    """μ^n(O(v)) <= μ(C_v)^((q-n)/(q-1)) Π_{l in L(O)} (Σ_{|u|=l, u⪰v} μ(C_u)^q)^(1/(q-1))."""
    v = tuple(v)
    if not (q > 1 and n >= 1 and q >= n):
        raise InvalidParameterError(f"need q > 1 and 1 <= n <= q, got q={q}, n={n}")
    if orbit.n != n:
        raise InvalidParameterError(f"orbit has {orbit.n} points, n = {n}")
    ids, signatures = orbit_table(tm.M, tm.K - len(v), n)
    target = _relative_id(orbit, tm.M, tm.K - len(v), len(v))
    lhs = float(np.sum(tuple_masses(tm.block(v, tm.K), n)[ids == target]))
    rhs = integer_rhs(tm, v, orbit, q, n)
    instance = {"v": list(v), "orbit": repr(orbit.form), "levels": orbit.levels, "q": q, "n": n}
    return _result(instance, lhs, rhs)


def integer_inequality_sweep(tm: TreeMeasure, q: float, n: int) -> List[InequalityResult]:
    """Every vertex v with |v| <= K and every orbit of n-tuples below it."""
    out = []
    for level in range(tm.K + 1):
        for index in range(tm.M ** level):
            v = index_word(index, level, tm.M)
            for orbit, lhs in orbit_masses_below(tm, v, n).items():
                instance = {"v": list(v), "orbit": repr(orbit.form), "levels": orbit.levels, "q": q, "n": n}
                out.append(_result(instance, lhs, integer_rhs(tm, v, orbit, q, n)))
    return out


def _suborbit_masses(tm: TreeMeasure, level: int, orbit: OrbitSignature) -> np.ndarray:
    """μ^m(O(w)) for every vertex w at `level`."""
    ids, _ = orbit_table(tm.M, tm.K - level, orbit.n)
    target = _relative_id(orbit, tm.M, tm.K - level, level)
    leaves = tm.leaves.reshape(tm.M ** level, -1)
    return np.array([np.sum(tuple_masses(row, orbit.n)[ids == target]) for row in leaves])


def verify_frac_inequality(
    tm: TreeMeasure,
    levels: Sequence[int],
    orbits: Sequence[OrbitSignature],
    q: float,
    n: int,
    cache: Optional[dict] = None,
) -> InequalityResult:
    """Σ_j μ(j) [Π_r μ^(m_r)(O_r(j|l_r))]^((q-1)/n) <= Π_{l in L} (Σ_{|u|=l} μ(C_u)^q)^(1/n)."""
    levels = list(levels)
    if not (q > 1 and n >= q - 1):
        raise InvalidParameterError(f"need q > 1 and n >= q - 1, got q={q}, n={n}")
    if len(levels) != len(orbits) or not levels:
        raise InvalidParameterError("need one orbit per distinguished level")
    if any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] < 0:
        raise InvalidParameterError(f"levels must be strictly increasing and nonnegative, got {levels}")
    if levels[-1] >= tm.K:
        raise InvalidParameterError(f"distinguished levels must stay below the depth K = {tm.K}")
    if sum(o.n for o in orbits) != n:
        raise InvalidParameterError(f"orbit sizes {[o.n for o in orbits]} do not sum to n = {n}")

    product = np.ones(tm.M ** tm.K)
    for level, orbit in zip(levels, orbits):
        key = (level, orbit)
        if cache is None or key not in cache:
            per_vertex = _suborbit_masses(tm, level, orbit)
            if cache is not None:
                cache[key] = per_vertex
        else:
            per_vertex = cache[key]
        product *= np.repeat(per_vertex, tm.M ** (tm.K - level))
    lhs = float(np.sum(tm.leaves * product ** ((q - 1.0) / n)))

    aggregate = list(levels)
    for orbit in orbits:
        aggregate.extend(orbit.levels)
    rhs = 1.0
    for level in aggregate:
        rhs *= tm.moment_sum(level, q) ** (1.0 / n)
    instance = {
        "levels": levels,
        "orbits": [repr(o.form) for o in orbits],
        "aggregate_levels": sorted(aggregate),
        "q": q,
        "n": n,
    }
    return _result(instance, lhs, rhs)


def compositions(n: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways of writing n as a sum of `parts` positive integers."""
    for cuts in itertools.combinations(range(1, n), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def frac_configurations(M: int, K: int, n: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[OrbitSignature, ...]]]:
    """All (l_1 < ... < l_p < K, O_1, ..., O_p) with O_r an orbit of m_r-tuples below level l_r."""
    for p in range(1, n + 1):
        for levels in itertools.combinations(range(K), p):
            for sizes in compositions(n, p):
                choices = []
                for level, size in zip(levels, sizes):
                    _, signatures = orbit_table(M, K - level, size)
                    choices.append([s.shifted(level) for s in signatures])
                for orbits in itertools.product(*choices):
                    yield levels, orbits


def frac_inequality_sweep(tm: TreeMeasure, q: float, n: int) -> List[InequalityResult]:
    cache: dict = {}
    return [
        verify_frac_inequality(tm, levels, orbits, q, n, cache=cache)
        for levels, orbits in frac_configurations(tm.M, tm.K, n)
    ]


def orbit_partition_total(tm: TreeMeasure, n: int) -> float:
    """Σ over all orbits of n-tuples of μ^n(O); equals 1."""
    return float(sum(orbit_masses_below(tm, (), n).values()))
