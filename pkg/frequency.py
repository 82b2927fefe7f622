"""The weighted automaton giving output-block frequencies of a strongly connected transducer.

For a normal input, the frequency of a block w in the output equals the weight
of w in the automaton built here: states are those of the normalized
transducer, the weight of p -b-> q is (E*·N_b)[p, q], initial weights are the
stationary distribution of P = Σ_b E*·N_b and every final weight is 1.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping

from errors import AllOutputsEmpty, InvalidTransducer, NotStronglyConnected, UnknownSymbol
from rationals import (
    RationalMatrix, RationalVector, check_stochastic, matrix_from_entries,
    stationary_distribution, star,
)
from transducer import Transducer, Transition, is_strongly_connected, normalize, require_valid
from weighted import WeightedAutomaton

logger = logging.getLogger("Normcheck.Frequency")
logger.propagate = True


@dataclass(frozen=True)
class WeightedTransducer:
    base: Transducer
    transition_weight: Mapping[Transition, Fraction]


@dataclass(frozen=True)
class FrequencyMatrices:
    E: RationalMatrix
    Estar: RationalMatrix
    N: Dict[str, RationalMatrix]
    P: RationalMatrix


@dataclass(frozen=True)
class FrequencyAutomaton:
    automaton: WeightedAutomaton
    matrices: FrequencyMatrices
    pi: RationalVector
    normalized: Transducer


def weigh_transitions(normalized: Transducer) -> WeightedTransducer:
    """Symbol-input transitions weigh 1/#A, ε-input transitions weigh 1."""
    share = Fraction(1, len(normalized.input_alphabet))
    weights = {t: (Fraction(1) if t.is_epsilon else share) for t in normalized.transitions}
    for q in normalized.states:
        total = sum((weights[t] for t in normalized.outgoing[q]), Fraction(0))
        if total != 1:
            raise InvalidTransducer(f"outgoing weights of state {q} sum to {total}, expected 1")
    return WeightedTransducer(normalized, weights)


def empty_output_matrix(weighted: WeightedTransducer) -> RationalMatrix:
    base = weighted.base
    index = base.index
    entries = [
        (index[t.source], index[t.target], weighted.transition_weight[t])
        for t in base.transitions
        if not t.output and not t.is_epsilon
    ]
    return matrix_from_entries(len(base.states), entries)


def output_matrix(weighted: WeightedTransducer, symbol: str) -> RationalMatrix:
    base = weighted.base
    if symbol not in base.output_alphabet:
        raise UnknownSymbol(symbol)
    index = base.index
    entries = [
        (index[t.source], index[t.target], weighted.transition_weight[t])
        for t in base.transitions
        if t.output == symbol
    ]
    return matrix_from_entries(len(base.states), entries)


def build_frequency_automaton(transducer: Transducer) -> FrequencyAutomaton:
    require_valid(transducer)
    if not is_strongly_connected(transducer):
        raise NotStronglyConnected("frequency construction needs a strongly connected transducer")
    if all(not t.output for t in transducer.transitions):
        raise AllOutputsEmpty("every transition has an empty output")

    normalized = normalize(transducer)
    weighted = weigh_transitions(normalized)
    e = empty_output_matrix(weighted)
    e_star = star(e)
    n = {b: output_matrix(weighted, b) for b in normalized.output_alphabet}
    step = {b: e_star @ n_b for b, n_b in n.items()}

    size = len(normalized.states)
    p = RationalMatrix.zeros(size)
    for m in step.values():
        p = p + m
    check_stochastic(p)
    pi = stationary_distribution(p)

    weights = {}
    for b, m in step.items():
        for i, source in enumerate(normalized.states):
            for j, target in enumerate(normalized.states):
                weights[(source, b, target)] = m[i, j]

    automaton = WeightedAutomaton(
        states=normalized.states,
        alphabet=normalized.output_alphabet,
        weights=weights,
        initial=pi,
        final=RationalVector.ones(size),
    )
    logger.debug(f"build_frequency_automaton: {size} states, pi={pi}")
    return FrequencyAutomaton(automaton, FrequencyMatrices(e, e_star, n, p), pi, normalized)
