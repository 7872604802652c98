"""Counting level configurations (l_1 < ... < l_p, O_1, ..., O_p) with a prescribed level multiset."""

import itertools
import logging
import math
from functools import lru_cache
from typing import FrozenSet, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from imagedim.errors import CountBoundError, InvalidParameterError
from imagedim.tree.inequalities import compositions

logger = logging.getLogger(__name__)

MAX_COUNT_N = 4


def _partitions(total: int, parts: int, largest: int):
    """Non-increasing tuples of `parts` positive integers summing to `total`, each <= largest."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total - parts + 1, largest), 0, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def _shape_levels(shape) -> Tuple[int, ...]:
    if shape == ():
        return ()
    level, children = shape
    out = [level] * (len(children) - 1)
    for child in children:
        out.extend(_shape_levels(child))
    return tuple(out)


@lru_cache(maxsize=None)
def unlabeled_shapes(m: int, min_level: int, max_level: int, branching: Optional[int] = None) -> FrozenSet:
    """Unlabeled join trees of m points whose join levels lie in [min_level, max_level].

    A node at level l has between 2 and `branching` children, all joining strictly below l.
    """
    if m == 1:
        return frozenset({()})
    out = set()
    widest = m if branching is None else min(m, branching)
    for level in range(min_level, max_level + 1):
        for children in range(2, widest + 1):
            for sizes in _partitions(m, children, m):
                options = [sorted(unlabeled_shapes(s, level + 1, max_level, branching)) for s in sizes]
                for combo in itertools.product(*options):
                    out.add((level, tuple(sorted(combo))))
    return frozenset(out)


def config_bound(n: int) -> int:
    """2^n n!, the closed bound on N(k_1, ..., k_n)."""
    return 2 ** n * math.factorial(n)


def count_level_configs(ks: Sequence[int], n: Optional[int] = None, branching: Optional[int] = None) -> int:
    """N(k_1, ..., k_n): configurations whose aggregate levels {l_r} ∪ L(O_r) equal the multiset ks."""
    ks = tuple(sorted(ks))
    n = len(ks) if n is None else n
    if n != len(ks):
        raise InvalidParameterError(f"need exactly n = {n} levels, got {len(ks)}")
    if not 1 <= n <= MAX_COUNT_N:
        raise InvalidParameterError(f"count_level_configs enumerates n <= {MAX_COUNT_N}, got {n}")
    if ks[0] < 0:
        raise InvalidParameterError("levels must be nonnegative")
    top = ks[-1]
    distinct = sorted(set(ks))
    count = 0
    for p in range(1, n + 1):
        for levels in itertools.combinations(distinct, p):
            for sizes in compositions(n, p):
                options = [sorted(unlabeled_shapes(m, l, top, branching)) for l, m in zip(levels, sizes)]
                for shapes in itertools.product(*options):
                    aggregate = list(levels)
                    for shape in shapes:
                        aggregate.extend(_shape_levels(shape))
                    if tuple(sorted(aggregate)) == ks:
                        count += 1
    bound = config_bound(n)
    logger.debug(f"N{ks} = {count}")
    if count > bound:
        raise CountBoundError(f"N{ks} = {count} exceeds 2^n n! = {bound}")
    return count


def level_multisets(n: int, max_level: int):
    """All 0 <= k_1 <= ... <= k_n <= max_level."""
    return itertools.combinations_with_replacement(range(max_level + 1), n)


class SeriesCheck(BaseModel):
    n: int
    lam: float = Field(..., description="Geometric rate λ in (0, 1)")
    max_level: int = Field(..., description="Largest k_n included in the partial sum")
    partial_sum: float = Field(..., description="Σ N(k) λ^(Σk / n) over k_n <= max_level")
    bound: float = Field(..., description="2^n n! Σ_k (k+1)^(n-1) λ^(k/n)")
    holds: bool


def tail_bound(n: int, lam: float, tolerance: float = 1e-15) -> float:
    """2^n n! Σ_{k>=0} (k+1)^(n-1) λ^(k/n), summed until the terms fall below `tolerance`."""
    total, k = 0.0, 0
    while True:
        term = (k + 1) ** (n - 1) * lam ** (k / n)
        total += term
        if term < tolerance and k > n:
            break
        k += 1
    return config_bound(n) * total


def series_bound_check(n: int, lam: float, max_level: int) -> SeriesCheck:
    if not 0 < lam < 1:
        raise InvalidParameterError(f"λ must lie in (0, 1), got {lam}")
    partial = 0.0
    for ks in level_multisets(n, max_level):
        partial += count_level_configs(ks, n) * lam ** (sum(ks) / n)
    bound = tail_bound(n, lam)
    return SeriesCheck(n=n, lam=lam, max_level=max_level, partial_sum=partial, bound=bound, holds=partial <= bound)
