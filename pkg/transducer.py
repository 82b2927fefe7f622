"""Input-deterministic transducers: validation, runs, components, normalization."""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

from errors import IncompleteAtState, InvalidTransducer, NotRecurrent, NotStochastic
from rationals import RationalMatrix, check_stochastic, matrix_from_entries

logger = logging.getLogger("Normcheck.Transducer")
logger.propagate = True

EPSILON_LABEL = "ε"

StateSet = FrozenSet[int]


@dataclass(frozen=True)
class Transition:
    source: int
    input: Optional[str]  # None on the ε-input transitions created by normalize
    output: str
    target: int
    parent: Optional[int] = None

    @property
    def is_epsilon(self) -> bool:
        return self.input is None

    def label(self) -> str:
        return f"{self.input or EPSILON_LABEL}|{self.output or '-'}"


@dataclass(frozen=True)
class Transducer:
    states: Tuple[int, ...]
    input_alphabet: Tuple[str, ...]
    output_alphabet: Tuple[str, ...]
    transitions: Tuple[Transition, ...]
    initial: int
    # split state -> the state whose long output it continues
    parents: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "output_alphabet", tuple(self.output_alphabet))
        object.__setattr__(self, "transitions", tuple(dict.fromkeys(self.transitions)))
        object.__setattr__(self, "parents", dict(self.parents))

        if len(set(self.states)) != len(self.states):
            raise InvalidTransducer("duplicate state identifiers")
        known = set(self.states)
        if self.initial not in known:
            raise InvalidTransducer(f"initial state {self.initial} is not declared")
        inputs = set(self.input_alphabet)
        outputs = set(self.output_alphabet)
        for t in self.transitions:
            if t.source not in known or t.target not in known:
                raise InvalidTransducer(f"transition {t.source} -{t.label()}-> {t.target} references an undeclared state")
            if t.input is not None and t.input not in inputs:
                raise InvalidTransducer(f"input symbol {t.input!r} is not in the input alphabet")
            stray = next((b for b in t.output if b not in outputs), None)
            if stray is not None:
                raise InvalidTransducer(f"output symbol {stray!r} is not in the output alphabet")
        for child, parent in self.parents.items():
            if child not in known or parent not in known:
                raise InvalidTransducer(f"parent link {child} -> {parent} references an undeclared state")

    @cached_property
    def index(self) -> Dict[int, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def outgoing(self) -> Dict[int, Tuple[Transition, ...]]:
        table: Dict[int, List[Transition]] = {q: [] for q in self.states}
        for t in self.transitions:
            table[t.source].append(t)
        return {q: tuple(ts) for q, ts in table.items()}

    @cached_property
    def delta(self) -> Dict[Tuple[int, Optional[str]], Transition]:
        table: Dict[Tuple[int, Optional[str]], Transition] = {}
        for t in self.transitions:
            table.setdefault((t.source, t.input), t)
        return table

    def is_split(self, state: int) -> bool:
        return state in self.parents


@dataclass(frozen=True)
class ValidationReport:
    deterministic: bool
    complete: bool
    offending: Tuple[Tuple[int, str], ...] = ()

    @property
    def ok(self) -> bool:
        return self.deterministic and self.complete


def _is_normalized_split(transducer: Transducer, q: int, epsilon: List[Transition]) -> bool:
    """One ε move emitting one symbol, and a chain that ends at an ordinary state."""
    if len(epsilon) != 1 or len(epsilon[0].output) != 1:
        return False
    if transducer.is_split(transducer.parents[q]):
        return False
    seen = {q}
    state = epsilon[0].target
    while transducer.is_split(state):
        if state in seen:
            return False
        seen.add(state)
        step = transducer.delta.get((state, None))
        if step is None:
            return False
        state = step.target
    return True


def validate(transducer: Transducer) -> ValidationReport:
    deterministic = True
    complete = True
    offending: List[Tuple[int, str]] = []
    for q in transducer.states:
        by_input: Dict[Optional[str], List[Transition]] = {}
        for t in transducer.outgoing[q]:
            by_input.setdefault(t.input, []).append(t)
        epsilon = by_input.pop(None, [])
        if transducer.is_split(q):
            if by_input or not _is_normalized_split(transducer, q, epsilon):
                deterministic = False
                offending.append((q, EPSILON_LABEL))
            continue
        if epsilon:
            deterministic = False
            offending.append((q, EPSILON_LABEL))
        for a in transducer.input_alphabet:
            moves = by_input.get(a, [])
            if not moves:
                complete = False
                offending.append((q, a))
            elif len(moves) > 1:
                deterministic = False
                offending.append((q, a))
    report = ValidationReport(deterministic, complete, tuple(offending))
    if not report.ok:
        logger.debug(f"validate: offending pairs {report.offending}")
    return report


def require_valid(transducer: Transducer) -> None:
    report = validate(transducer)
    if not report.ok:
        witnesses = ", ".join(f"({q}, {a})" for q, a in report.offending)
        raise InvalidTransducer(
            f"transducer is not {'deterministic' if not report.deterministic else 'complete'}: {witnesses}"
        )


def _follow_epsilon(transducer: Transducer, state: int, out: List[str]) -> int:
    for _ in range(len(transducer.states)):
        if not transducer.is_split(state):
            return state
        t = transducer.delta.get((state, None))
        if t is None:
            raise IncompleteAtState(state, EPSILON_LABEL)
        out.append(t.output)
        state = t.target
    raise InvalidTransducer(f"ε-cycle through state {state}")


def iter_run(transducer: Transducer, source: Iterable[str]) -> Iterator[Tuple[str, int]]:
    """Yield (output, state reached) for each input symbol consumed.

    Reads ``source`` lazily, so it may be an unbounded stream.
    """
    state = transducer.initial
    delta = transducer.delta
    for symbol in source:
        t = delta.get((state, symbol))
        if t is None:
            raise IncompleteAtState(state, symbol)
        if transducer.parents:
            pieces = [t.output]
            state = _follow_epsilon(transducer, t.target, pieces)
            yield "".join(pieces), state
        else:
            state = t.target
            yield t.output, state


def run(transducer: Transducer, x: Iterable[str], n: int) -> str:
    pieces: List[str] = []
    consumed = 0
    for output, _ in iter_run(transducer, itertools.islice(x, n)):
        pieces.append(output)
        consumed += 1
    if consumed < n:
        raise ValueError(f"input stream ended after {consumed} of {n} symbols")
    return "".join(pieces)


def trace(transducer: Transducer, x: Iterable[str], n: int) -> List[int]:
    states = [transducer.initial]
    states.extend(state for _, state in iter_run(transducer, itertools.islice(x, n)))
    return states


def size(transducer: Transducer) -> int:
    return sum(len(t.input or "") + len(t.output) for t in transducer.transitions)


def reachable_states(transducer: Transducer) -> StateSet:
    seen = {transducer.initial}
    frontier = [transducer.initial]
    while frontier:
        q = frontier.pop()
        for t in transducer.outgoing[q]:
            if t.target not in seen:
                seen.add(t.target)
                frontier.append(t.target)
    return frozenset(seen)


def scc_decompose(transducer: Transducer) -> List[StateSet]:
    """Strongly connected components of the underlying graph (Tarjan, iterative)."""
    successors = {q: [t.target for t in transducer.outgoing[q]] for q in transducer.states}
    counter = itertools.count()
    index: Dict[int, int] = {}
    lowlink: Dict[int, int] = {}
    on_stack = set()
    stack: List[int] = []
    components: List[StateSet] = []

    for root in transducer.states:
        if root in index:
            continue
        index[root] = lowlink[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors[root]))]
        while work:
            v, children = work[-1]
            advanced = False
            for w in children:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.add(w)
                    if w == v:
                        break
                components.append(frozenset(component))

    components.sort(key=min)
    return components


def is_strongly_connected(transducer: Transducer) -> bool:
    return len(scc_decompose(transducer)) == 1


def recurrent_sccs(transducer: Transducer) -> List[StateSet]:
    recurrent = []
    for component in scc_decompose(transducer):
        if all(t.target in component for q in component for t in transducer.outgoing[q]):
            recurrent.append(component)
    return recurrent


def restrict(transducer: Transducer, component: Iterable[int]) -> Transducer:
    """Sub-transducer on a recurrent component; its initial state is the least one."""
    members = frozenset(component)
    if not members:
        raise NotRecurrent("empty component")
    unknown = members - set(transducer.states)
    if unknown:
        raise NotRecurrent(f"states {sorted(unknown)} are not in the transducer")
    for q in members:
        for t in transducer.outgoing[q]:
            if t.target not in members:
                raise NotRecurrent(f"transition {q} -{t.label()}-> {t.target} leaves the component")
    return Transducer(
        states=tuple(q for q in transducer.states if q in members),
        input_alphabet=transducer.input_alphabet,
        output_alphabet=transducer.output_alphabet,
        transitions=tuple(t for t in transducer.transitions if t.source in members),
        initial=min(members),
        parents={c: p for c, p in transducer.parents.items() if c in members and p in members},
    )


def normalize(transducer: Transducer) -> Transducer:
    """Split every long output through fresh ε-input states so each output has length <= 1.

    Fresh states are numbered after the existing ones, in transition order and
    then output position.
    """
    next_id = max(transducer.states) + 1
    states = list(transducer.states)
    parents = dict(transducer.parents)
    transitions: List[Transition] = []
    for t in transducer.transitions:
        if len(t.output) < 2:
            transitions.append(t)
            continue
        parent = t.source
        chain = list(range(next_id, next_id + len(t.output) - 1))
        next_id += len(chain)
        states.extend(chain)
        for q in chain:
            parents[q] = parent
        stops = [t.source] + chain + [t.target]
        transitions.append(Transition(t.source, t.input, t.output[0], stops[1], t.parent))
        for position in range(1, len(t.output)):
            transitions.append(
                Transition(stops[position], None, t.output[position], stops[position + 1], parent)
            )
    if len(states) > len(transducer.states):
        logger.debug(f"normalize: {len(transducer.states)} -> {len(states)} states")
    return Transducer(
        states=tuple(states),
        input_alphabet=transducer.input_alphabet,
        output_alphabet=transducer.output_alphabet,
        transitions=tuple(transitions),
        initial=transducer.initial,
        parents=parents,
    )


def default_weights(transducer: Transducer) -> Dict[Transition, Fraction]:
    share = Fraction(1, len(transducer.input_alphabet))
    return {t: (Fraction(1) if t.is_epsilon else share) for t in transducer.transitions}


def markov_matrix(transducer: Transducer, weights: Optional[Mapping[Transition, Fraction]] = None) -> RationalMatrix:
    """Row-stochastic matrix of the chain that moves along transitions with the given weights."""
    weights = default_weights(transducer) if weights is None else weights
    index = transducer.index
    entries = [(index[t.source], index[t.target], weights.get(t, 0)) for t in transducer.transitions]
    matrix = matrix_from_entries(len(transducer.states), entries)
    try:
        check_stochastic(matrix)
    except NotStochastic as exc:
        raise NotStochastic(f"transition weights are not stochastic: {exc}") from exc
    return matrix


@dataclass(frozen=True)
class SnakeAutomaton:
    transducer: Transducer
    windows: Mapping[int, Tuple[int, str]]  # state id -> (p, w) for the run p * w
    n: int

    def state_of(self, p: int, w: str) -> int:
        return self._lookup[(p, w)]

    @cached_property
    def _lookup(self) -> Dict[Tuple[int, str], int]:
        return {pw: q for q, pw in self.windows.items()}


def snake_automaton(transducer: Transducer, n: int) -> SnakeAutomaton:
    """Automaton on runs of length n: (p * bw) -a-> (q * wa) whenever p -b-> q."""
    if n < 0:
        raise ValueError("window length must be non-negative")
    if transducer.parents or any(t.is_epsilon for t in transducer.transitions):
        raise InvalidTransducer("snake automaton needs a transducer without ε-input transitions")
    if n == 0:
        return SnakeAutomaton(transducer, {p: (p, "") for p in transducer.states}, 0)

    alphabet = transducer.input_alphabet
    windows: Dict[int, Tuple[int, str]] = {}
    ids: Dict[Tuple[int, str], int] = {}
    for p in transducer.states:
        for letters in itertools.product(alphabet, repeat=n):
            w = "".join(letters)
            ids[(p, w)] = len(ids)
            windows[ids[(p, w)]] = (p, w)

    transitions = []
    for (p, bw), source in ids.items():
        step = transducer.delta.get((p, bw[0]))
        if step is None:
            raise IncompleteAtState(p, bw[0])
        for a in alphabet:
            transitions.append(Transition(source, a, step.output, ids[(step.target, bw[1:] + a)]))

    initial = ids[(transducer.initial, alphabet[0] * n)]
    lifted = Transducer(
        states=tuple(windows),
        input_alphabet=alphabet,
        output_alphabet=transducer.output_alphabet,
        transitions=tuple(transitions),
        initial=initial,
    )
    logger.debug(f"snake_automaton: n={n}, {len(windows)} states")
    return SnakeAutomaton(lifted, windows, n)
