"""Finite-depth measures on the M-ary tree: cylinder masses μ(C_v) for |v| <= K."""

import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from imagedim.errors import InvalidParameterError
from imagedim.tree.words import Word, word_index

logger = logging.getLogger(__name__)


class TreeMeasure(BaseModel):
    """Cylinder masses level by level; level l holds M^l masses indexed by word_index."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    M: int = Field(..., ge=2, description="Branching number")
    K: int = Field(..., ge=0, description="Depth of the leaves")
    levels: List[np.ndarray] = Field(..., description="levels[l][word_index(v)] = μ(C_v)")

    @model_validator(mode="after")
    def _check_consistency(self) -> "TreeMeasure":
        if len(self.levels) != self.K + 1:
            raise ValueError(f"need {self.K + 1} levels of masses, got {len(self.levels)}")
        for l, masses in enumerate(self.levels):
            if masses.shape != (self.M ** l,):
                raise ValueError(f"level {l} must hold {self.M ** l} masses")
            if np.any(masses < 0):
                raise ValueError("cylinder masses must be nonnegative")
        if abs(self.levels[0][0] - 1.0) > 1e-12:
            raise ValueError("root mass must be 1")
        return self

    @classmethod
    def from_leaf_masses(cls, M: int, K: int, leaves: Sequence[float]) -> "TreeMeasure":
        leaves = np.asarray(leaves, dtype=float)
        if leaves.shape != (M ** K,):
            raise InvalidParameterError(f"need {M ** K} leaf masses, got {leaves.shape}")
        leaves = leaves / leaves.sum()
        levels = [leaves]
        for _ in range(K):
            levels.append(levels[-1].reshape(-1, M).sum(axis=1))
        return cls(M=M, K=K, levels=list(reversed(levels)))

    @classmethod
    def from_multinomial(cls, weights: Sequence[float], K: int) -> "TreeMeasure":
        w = np.asarray(weights, dtype=float)
        leaves = np.ones(1)
        for _ in range(K):
            leaves = np.kron(leaves, w)
        return cls.from_leaf_masses(len(w), K, leaves)

    @classmethod
    def uniform(cls, M: int, K: int) -> "TreeMeasure":
        return cls.from_leaf_masses(M, K, np.full(M ** K, 1.0))

    @classmethod
    def point_mass(cls, M: int, K: int, leaf: int = 0) -> "TreeMeasure":
        leaves = np.zeros(M ** K)
        leaves[leaf] = 1.0
        return cls.from_leaf_masses(M, K, leaves)

    @classmethod
    def random(cls, M: int, K: int, rng: np.random.Generator, concentration: float = 1.0) -> "TreeMeasure":
        """Cascade with an independent Dirichlet split at every vertex."""
        leaves = np.ones(1)
        for l in range(K):
            splits = rng.dirichlet(np.full(M, concentration), size=M ** l)
            leaves = (leaves[:, None] * splits).ravel()
        return cls.from_leaf_masses(M, K, leaves)

    @property
    def leaves(self) -> np.ndarray:
        return self.levels[self.K]

    def mass(self, v: Word) -> float:
        return float(self.levels[len(v)][word_index(v, self.M)])

    def block(self, v: Word, level: int) -> np.ndarray:
        """Masses of the level-`level` descendants of v, in word order."""
        if level < len(v) or level > self.K:
            raise InvalidParameterError(f"level {level} is not between |v| = {len(v)} and K = {self.K}")
        width = self.M ** (level - len(v))
        start = word_index(v, self.M) * width
        return self.levels[level][start:start + width]

    def moment_sum(self, level: int, q: float, below: Optional[Word] = None) -> float:
        """Σ_{|u| = level, u ⪰ below} μ(C_u)^q."""
        masses = self.block(below or (), level)
        return float(np.sum(masses[masses > 0] ** q))

    def to_dict(self) -> dict:
        return {"M": self.M, "K": self.K, "leaves": self.leaves.tolist()}
