"""Decide whether a deterministic complete transducer preserves normality.

A transducer preserves normality iff every recurrent component reachable from
its initial state does; a component does iff its frequency automaton is
equivalent to the uniform automaton over the output alphabet.
"""
import asyncio
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import FrozenSet, List, Optional, Tuple

from documents import render_template
from errors import DivergentStar, NonUniqueStationary
from frequency import FrequencyAutomaton, build_frequency_automaton
from transducer import Transducer, reachable_states, recurrent_sccs, require_valid, restrict
from weighted import equivalent, uniform_automaton, word_weight

logger = logging.getLogger("Normcheck.Decision")
logger.propagate = True

DIVERGENT_DIAGNOSTIC = "empty-output cycle reachable with probability 1"


class ComponentStatus(str, Enum):
    PRESERVING = "preserving"
    NON_PRESERVING = "non-preserving"
    ALL_EMPTY_OUTPUT = "all-empty-output"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ComponentVerdict:
    states: FrozenSet[int]
    status: ComponentStatus
    witness: Optional[str] = None
    automaton: Optional[FrequencyAutomaton] = None
    predicted: Optional[Fraction] = None
    required: Optional[Fraction] = None
    diagnostic: Optional[str] = None

    @property
    def preserving(self) -> bool:
        return self.status is ComponentStatus.PRESERVING


@dataclass(frozen=True)
class Verdict:
    preserves: bool
    components: Tuple[ComponentVerdict, ...]


def analyzed_components(transducer: Transducer) -> List[FrozenSet[int]]:
    """Recurrent components a run from the initial state can enter."""
    require_valid(transducer)
    reachable = reachable_states(transducer)
    components = [c for c in recurrent_sccs(transducer) if c & reachable]
    logger.debug(f"analyzed_components: {len(components)} reachable recurrent components")
    return components


def analyze_component(transducer: Transducer, component: FrozenSet[int]) -> ComponentVerdict:
    sub = restrict(transducer, component)
    if all(not t.output for t in sub.transitions):
        return ComponentVerdict(
            component, ComponentStatus.ALL_EMPTY_OUTPUT,
            diagnostic="every transition outputs the empty word",
        )
    try:
        built = build_frequency_automaton(sub)
    except DivergentStar:
        return ComponentVerdict(component, ComponentStatus.DEGENERATE, diagnostic=DIVERGENT_DIAGNOSTIC)
    except NonUniqueStationary as e:
        return ComponentVerdict(component, ComponentStatus.DEGENERATE, diagnostic=str(e))

    outcome = equivalent(built.automaton, uniform_automaton(sub.output_alphabet))
    if outcome.equivalent:
        return ComponentVerdict(component, ComponentStatus.PRESERVING, automaton=built)
    witness, predicted, required = _deficient_witness(built, outcome.witness, outcome.left, outcome.right)
    return ComponentVerdict(
        component, ComponentStatus.NON_PRESERVING,
        witness=witness, automaton=built,
        predicted=predicted, required=required,
    )


def _deficient_witness(
    built: FrequencyAutomaton, word: str, predicted: Fraction, required: Fraction
) -> Tuple[str, Fraction, Fraction]:
    """Prefer a word that occurs less often than normality requires.

    Every proper prefix of a shortest witness has its required weight and the
    weights of the one-symbol extensions of a prefix add up to the prefix's
    weight, so an over-represented witness has an under-represented sibling.
    """
    if predicted < required or not word:
        return word, predicted, required
    for b in built.automaton.alphabet:
        sibling = word[:-1] + b
        weight = word_weight(built.automaton, sibling)
        if weight < required:
            return sibling, weight, required
    return word, predicted, required


def _merge(components: List[ComponentVerdict]) -> Verdict:
    verdict = Verdict(all(c.preserving for c in components), tuple(components))
    logger.info(f"Verdict: preserves={verdict.preserves} over {len(components)} component(s)")
    return verdict


def preserves_normality(transducer: Transducer) -> Verdict:
    components = [analyze_component(transducer, c) for c in analyzed_components(transducer)]
    return _merge(components)


async def preserves_normality_async(transducer: Transducer, max_workers: int = 4) -> Verdict:
    """Same verdict as preserves_normality, analysing components in worker threads."""
    if max_workers < 1:
        raise ValueError(f"max_workers must be at least 1, got {max_workers}")
    semaphore = asyncio.Semaphore(max_workers)

    async def analyze(component: FrozenSet[int]) -> ComponentVerdict:
        async with semaphore:
            return await asyncio.to_thread(analyze_component, transducer, component)

    # gather keeps submission order, so the merge is independent of completion order
    results = await asyncio.gather(*(analyze(c) for c in analyzed_components(transducer)))
    return _merge(list(results))


def explain(verdict: Verdict) -> str:
    return render_template("explain.txt.j2", verdict=verdict)
