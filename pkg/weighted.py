"""Weighted automata over the rationals and their equivalence."""
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Deque, Dict, List, Mapping, Optional, Sequence, Tuple

from errors import AlphabetMismatch, AutomatonError, BoundExceeded, UnknownSymbol
from rationals import RationalMatrix, RationalVector, block_diagonal, matrix_from_entries
import settings

logger = logging.getLogger("Normcheck.Weighted")
logger.propagate = True

WeightKey = Tuple[int, str, int]


@dataclass(frozen=True)
class WeightedAutomaton:
    states: Tuple[int, ...]
    alphabet: Tuple[str, ...]
    weights: Mapping[WeightKey, Fraction]  # absent keys weigh 0
    initial: RationalVector
    final: RationalVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "weights", {k: Fraction(v) for k, v in self.weights.items()})
        if not isinstance(self.initial, RationalVector):
            object.__setattr__(self, "initial", RationalVector(self.initial))
        if not isinstance(self.final, RationalVector):
            object.__setattr__(self, "final", RationalVector(self.final))

        n = len(self.states)
        if len(set(self.states)) != n:
            raise AutomatonError("duplicate state identifiers")
        if len(self.initial) != n or len(self.final) != n:
            raise AutomatonError(
                f"initial/final vectors have lengths {len(self.initial)}/{len(self.final)}, expected {n}"
            )
        known = set(self.states)
        symbols = set(self.alphabet)
        for p, b, q in self.weights:
            if p not in known or q not in known:
                raise AutomatonError(f"weight ({p}, {b}, {q}) references an undeclared state")
            if b not in symbols:
                raise UnknownSymbol(b)

    @cached_property
    def index(self) -> Dict[int, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def matrices(self) -> Dict[str, RationalMatrix]:
        entries: Dict[str, List[Tuple[int, int, Fraction]]] = {b: [] for b in self.alphabet}
        for (p, b, q), weight in self.weights.items():
            entries[b].append((self.index[p], self.index[q], weight))
        return {b: matrix_from_entries(len(self.states), entries[b]) for b in self.alphabet}

    def matrix(self, symbol: str) -> RationalMatrix:
        if symbol not in self.matrices:
            raise UnknownSymbol(symbol)
        return self.matrices[symbol]

    def weight(self, p: int, symbol: str, q: int) -> Fraction:
        return self.weights.get((p, symbol, q), Fraction(0))

    def nonzero_weights(self) -> List[Tuple[WeightKey, Fraction]]:
        order = {b: i for i, b in enumerate(self.alphabet)}
        items = [(k, w) for k, w in self.weights.items() if w != 0]
        return sorted(items, key=lambda kw: (self.index[kw[0][0]], order[kw[0][1]], self.index[kw[0][2]]))


def word_weight(automaton: WeightedAutomaton, word: str) -> Fraction:
    """I · M_{w1} ⋯ M_{wk} · F."""
    for b in word:
        if b not in automaton.matrices:
            raise UnknownSymbol(b)
    vector = automaton.initial
    for b in word:
        vector = vector @ automaton.matrices[b]
    return vector.dot(automaton.final)


def uniform_automaton(alphabet: Sequence[str]) -> WeightedAutomaton:
    """One state with a 1/#B loop per symbol, so every word w weighs (#B)^-|w|."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise AutomatonError("uniform automaton needs a non-empty alphabet")
    share = Fraction(1, len(alphabet))
    return WeightedAutomaton(
        states=(1,),
        alphabet=alphabet,
        weights={(1, b, 1): share for b in alphabet},
        initial=RationalVector([1]),
        final=RationalVector([1]),
    )


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    witness: Optional[str] = None
    left: Optional[Fraction] = None
    right: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.equivalent


def _reduce(vector: List[Fraction], basis: List[Tuple[int, List[Fraction]]]) -> Optional[Tuple[int, List[Fraction]]]:
    residual = list(vector)
    for pivot, row in basis:
        factor = residual[pivot]
        if factor != 0:
            residual = [x - factor * y for x, y in zip(residual, row)]
    pivot = next((i for i, x in enumerate(residual) if x != 0), None)
    if pivot is None:
        return None
    lead = residual[pivot]
    return pivot, [x / lead for x in residual]


def equivalent(first: WeightedAutomaton, second: WeightedAutomaton) -> Equivalence:
    """Decide whether two automata give every word the same weight.

    Explores the forward space of the difference automaton breadth-first,
    keeping an echelon basis; a spanning vector not orthogonal to the final
    vector yields the (shortest found) witness.
    """
    if set(first.alphabet) != set(second.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {first.alphabet} vs {second.alphabet}")
    alphabet = first.alphabet
    start = first.initial.concat(-second.initial)
    final = first.final.concat(second.final)
    matrices = {b: block_diagonal(first.matrix(b), second.matrix(b)) for b in alphabet}

    basis: List[Tuple[int, List[Fraction]]] = []
    queue: Deque[Tuple[str, RationalVector]] = deque([("", start)])
    while queue:
        word, vector = queue.popleft()
        reduced = _reduce(vector.to_list(), basis)
        if reduced is None:
            continue
        if vector.dot(final) != 0:
            logger.debug(f"equivalent: witness {word!r} after {len(basis)} basis vectors")
            return Equivalence(False, word, word_weight(first, word), word_weight(second, word))
        basis.append(reduced)
        for b in alphabet:
            queue.append((word + b, vector @ matrices[b]))
    logger.debug(f"equivalent: forward space of dimension {len(basis)}, no witness")
    return Equivalence(True)


def brute_force_weights(automaton: WeightedAutomaton, k: int, bound: Optional[int] = None) -> Dict[str, Fraction]:
    """word_weight of every word of length <= k, enumerated shortest first."""
    bound = settings.max_brute() if bound is None else bound
    if k > bound:
        raise BoundExceeded(f"brute-force length {k} exceeds the bound {bound}")
    weights: Dict[str, Fraction] = {}
    layer = [("", automaton.initial)]
    for length in range(k + 1):
        next_layer = []
        for word, vector in layer:
            weights[word] = vector.dot(automaton.final)
            if length < k:
                for b in automaton.alphabet:
                    next_layer.append((word + b, vector @ automaton.matrices[b]))
        layer = next_layer
    return weights
