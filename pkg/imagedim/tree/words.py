"""Words of the M-ary tree, join sets and the multipotential kernel.

Words are tuples of 0-based symbols; the empty tuple is the root.
"""

from collections import Counter
from typing import Callable, Dict, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from imagedim.errors import DuplicateWordError, InvalidParameterError

Word = Tuple[int, ...]


def curtail(word: Word, k: int) -> Word:
    """word|_k, the first k symbols."""
    if k > len(word):
        raise InvalidParameterError(f"cannot curtail a word of length {len(word)} at {k}")
    return tuple(word[:k])


def meet(a: Word, b: Word) -> Word:
    """Longest common prefix a ∧ b."""
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return tuple(a[:k])


def word_index(word: Word, M: int) -> int:
    """Position of the word among the M^|word| words of its level, first symbol most significant."""
    index = 0
    for s in word:
        index = index * M + s
    return index


def index_word(index: int, level: int, M: int) -> Word:
    symbols = []
    for _ in range(level):
        index, s = divmod(index, M)
        symbols.append(s)
    return tuple(reversed(symbols))


class JoinVertex(BaseModel):
    model_config = ConfigDict(frozen=True)

    word: Word = Field(..., description="The join vertex")
    multiplicity: int = Field(..., ge=1, description="r - 1 for r pairwise-meeting branches")

    @property
    def level(self) -> int:
        return len(self.word)


class JoinSet(BaseModel):
    """Vertices of ∧(i_1, ..., i_n) with multiplicities summing to n - 1."""

    n: int = Field(..., ge=1, description="Number of input words")
    vertices: List[JoinVertex] = Field(default_factory=list, description="Join vertices, coarsest first")
    saturated: bool = Field(False, description="True when coincident words were joined at the working depth")

    @property
    def levels(self) -> List[int]:
        """Join levels counted with multiplicity, ascending."""
        out = []
        for v in self.vertices:
            out.extend([v.level] * v.multiplicity)
        return sorted(out)

    def total(self) -> int:
        return sum(v.multiplicity for v in self.vertices)


def _collect(words: List[Word], depth: int, length: int, saturate: bool, out: Dict[Word, int]) -> bool:
    if len(words) < 2:
        return False
    while depth < length and len({w[depth] for w in words}) == 1:
        depth += 1
    if depth == length:
        if not saturate:
            raise DuplicateWordError(f"{len(words)} copies of word {words[0]} cannot be joined at depth {length}")
        out[words[0]] = out.get(words[0], 0) + len(words) - 1
        return True
    branches: Dict[int, List[Word]] = {}
    for w in words:
        branches.setdefault(w[depth], []).append(w)
    out[tuple(words[0][:depth])] = len(branches) - 1
    saturated = False
    for group in branches.values():
        saturated |= _collect(group, depth + 1, length, saturate, out)
    return saturated


def join_set(words: Sequence[Word], saturate: bool = False) -> JoinSet:
    """Pairwise meets of equal-length words, each vertex with multiplicity (branches through it) - 1."""
    words = [tuple(w) for w in words]
    if len(words) < 2:
        raise InvalidParameterError("a join set needs at least two words")
    length = len(words[0])
    if any(len(w) != length for w in words):
        raise InvalidParameterError("join_set expects words of equal length")
    found: Dict[Word, int] = {}
    saturated = _collect(words, 0, length, saturate, found)
    vertices = [JoinVertex(word=w, multiplicity=k) for w, k in sorted(found.items(), key=lambda item: (len(item[0]), item[0]))]
    return JoinSet(n=len(words), vertices=vertices, saturated=saturated)


def top_vertex(js: JoinSet) -> Word:
    """The join vertex that is a prefix of every input word (the coarsest one)."""
    if not js.vertices:
        raise InvalidParameterError("empty join set has no top vertex")
    return js.vertices[0].word


def multipotential_phi(words: Sequence[Word], f: Callable[[int], float]) -> float:
    """f(l_1) ... f(l_n) over the join levels of the words, with multiplicity."""
    value = 1.0
    for level, count in Counter(join_set(words).levels).items():
        value *= f(level) ** count
    return value
