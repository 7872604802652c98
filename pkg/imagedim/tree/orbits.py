"""Orbit signatures of word tuples under root-fixing tree automorphisms.

A signature is the labeled join tree of the tuple: a leaf is the position of a
word in the tuple, an internal node is (level, children) with children ordered
by their smallest label. Two tuples share a signature exactly when an
automorphism maps one onto the other.
"""

import itertools
import logging
from functools import lru_cache
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from imagedim.errors import EnumerationGuardError, InvalidParameterError
from imagedim.settings import ENUMERATION_GUARD
from imagedim.tree.words import Word, index_word

logger = logging.getLogger(__name__)


def _min_label(form) -> int:
    return form if isinstance(form, int) else min(_min_label(c) for c in form[1])


def _shift(form, offset: int):
    if isinstance(form, int):
        return form
    return (form[0] + offset, tuple(_shift(c, offset) for c in form[1]))


def _levels(form) -> List[int]:
    if isinstance(form, int):
        return []
    out = [form[0]] * (len(form[1]) - 1)
    for child in form[1]:
        out.extend(_levels(child))
    return out


def _shape(form):
    if isinstance(form, int):
        return ()
    return (form[0], tuple(sorted(_shape(c) for c in form[1])))


class OrbitSignature(BaseModel):
    """Canonical labeled join tree of an n-tuple of depth-K words."""

    model_config = ConfigDict(frozen=True)

    form: Any = Field(..., description="Nested (level, children) tuples with integer leaf labels")
    n: int = Field(..., ge=1, description="Tuple size")
    depth: int = Field(..., ge=0, description="Working depth K; joins at K stand for coincident words")

    @property
    def levels(self) -> List[int]:
        """L(O): join levels with multiplicity, ascending (n - 1 of them)."""
        return sorted(_levels(self.form))

    @property
    def top_level(self) -> Optional[int]:
        return None if isinstance(self.form, int) else self.form[0]

    @property
    def shape(self):
        """Unlabeled shape: () for a leaf, (level, sorted child shapes) otherwise."""
        return _shape(self.form)

    @property
    def saturated(self) -> bool:
        return self.depth in self.levels

    def shifted(self, offset: int) -> "OrbitSignature":
        """The same orbit seen from a vertex `offset` levels further up."""
        return OrbitSignature(form=_shift(self.form, offset), n=self.n, depth=self.depth + offset)


def _form(labels: List[int], words: Sequence[Word], depth: int, length: int):
    if len(labels) == 1:
        return labels[0]
    while depth < length and len({words[i][depth] for i in labels}) == 1:
        depth += 1
    if depth == length:
        return (length, tuple(sorted(labels)))
    groups = {}
    for i in labels:
        groups.setdefault(words[i][depth], []).append(i)
    children = [_form(group, words, depth + 1, length) for group in groups.values()]
    return (depth, tuple(sorted(children, key=_min_label)))


def signature_of(words: Sequence[Word]) -> OrbitSignature:
    """Signature of an ordered tuple of equal-length words."""
    words = [tuple(w) for w in words]
    if not words:
        raise InvalidParameterError("signature_of needs at least one word")
    length = len(words[0])
    if any(len(w) != length for w in words):
        raise InvalidParameterError("signature_of expects words of equal length")
    return OrbitSignature(form=_form(list(range(len(words))), words, 0, length), n=len(words), depth=length)


def check_guard(M: int, K: int, n: int) -> int:
    total = (M ** K) ** n
    if total > ENUMERATION_GUARD:
        raise EnumerationGuardError(f"{M}^{K * n} = {total} tuples exceed the enumeration guard {ENUMERATION_GUARD}")
    return total


@lru_cache(maxsize=256)
def orbit_table(M: int, K: int, n: int) -> Tuple[np.ndarray, Tuple[OrbitSignature, ...]]:
    """Signature id of every ordered n-tuple of depth-K leaves, in itertools.product order.

    Signatures are listed in order of first appearance; coincident leaves get saturated signatures.
    """
    check_guard(M, K, n)
    leaves = [index_word(i, K, M) for i in range(M ** K)]
    ids = np.empty((M ** K) ** n, dtype=np.int64)
    seen = {}
    for pos, combo in enumerate(itertools.product(range(M ** K), repeat=n)):
        sig = signature_of([leaves[i] for i in combo])
        ids[pos] = seen.setdefault(sig, len(seen))
    logger.debug(f"Orbit table M={M} K={K} n={n}: {len(seen)} orbits over {ids.size} tuples")
    return ids, tuple(seen)


def enumerate_orbits(M: int, K: int, n: int, include_saturated: bool = False) -> List[OrbitSignature]:
    """All orbit signatures of n-tuples of depth-K leaves, sorted by their level sets."""
    _, signatures = orbit_table(M, K, n)
    out = [s for s in signatures if include_saturated or not s.saturated]
    return sorted(out, key=lambda s: (s.levels, repr(s.form)))
