"""Line-oriented text documents for transducers and weighted automata.

Transducer document::

    input-alphabet: a b
    output-alphabet: a b
    initial: 1
    states: 1 2 3
    trans: 1 b - 2          # '-' is the empty output

Weighted automaton document::

    alphabet: a b
    state: 1 init 2/3 final 1
    trans: 1 b 1/4 4

'#' starts a comment anywhere on a line.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from errors import NormcheckError, ParseError, UnknownState, UnknownSymbol
from frequency import FrequencyAutomaton
from rationals import RationalMatrix, RationalVector, format_rational, parse_rational
from settings import TEMPLATES_DIR
from transducer import EPSILON_LABEL, Transducer, Transition
from weighted import WeightedAutomaton

logger = logging.getLogger("Normcheck.Documents")
logger.propagate = True

EMPTY_WORD = "-"

_environment = Environment(
    loader=FileSystemLoader(TEMPLATES_DIR),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    undefined=StrictUndefined,
)
_environment.filters["rational"] = format_rational


def render_template(name: str, **context) -> str:
    return _environment.get_template(name).render(**context)


def _lines(text: str) -> List[Tuple[int, str, str]]:
    """(line number, keyword, rest) for every non-blank line, comments stripped."""
    parsed = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"expected '<keyword>: ...', got {line!r}", number)
        keyword, rest = line.split(":", 1)
        parsed.append((number, keyword.strip(), rest.strip()))
    return parsed


def _alphabet(rest: str, line: int) -> Tuple[str, ...]:
    symbols = tuple(rest.split())
    if not symbols:
        raise ParseError("empty alphabet", line)
    for s in symbols:
        if len(s) != 1 or s in (EMPTY_WORD, "#"):
            raise ParseError(f"symbols must be single characters other than '-' and '#', got {s!r}", line)
    if len(set(symbols)) != len(symbols):
        raise ParseError("repeated symbol in alphabet", line)
    return symbols


def _state_id(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"state identifiers are integers, got {token!r}", line) from None


def _known_state(token: str, states: Dict[int, None], line: int) -> int:
    state = _state_id(token, line)
    if state not in states:
        raise UnknownState(token, line)
    return state


def parse_transducer(text: str) -> Transducer:
    header: Dict[str, Tuple[int, str]] = {}
    body: List[Tuple[int, str, str]] = []
    for number, keyword, rest in _lines(text):
        if keyword in ("trans", "parent"):
            body.append((number, keyword, rest))
        elif keyword in ("input-alphabet", "output-alphabet", "initial", "states"):
            if keyword in header:
                raise ParseError(f"duplicate '{keyword}' line", number)
            header[keyword] = (number, rest)
        else:
            raise ParseError(f"unknown keyword {keyword!r}", number)
    for keyword in ("input-alphabet", "output-alphabet", "initial", "states"):
        if keyword not in header:
            raise ParseError(f"missing '{keyword}' line")

    inputs = _alphabet(header["input-alphabet"][1], header["input-alphabet"][0])
    outputs = _alphabet(header["output-alphabet"][1], header["output-alphabet"][0])
    states_line, states_rest = header["states"]
    states = dict.fromkeys(_state_id(tok, states_line) for tok in states_rest.split())
    if not states:
        raise ParseError("no states declared", states_line)
    initial_line, initial_rest = header["initial"]
    initial = _known_state(initial_rest, states, initial_line)

    parents: Dict[int, int] = {}
    transitions: List[Transition] = []
    for number, keyword, rest in body:
        fields = rest.split()
        if keyword == "parent":
            if len(fields) != 2:
                raise ParseError("expected 'parent: <state> <parent>'", number)
            parents[_known_state(fields[0], states, number)] = _known_state(fields[1], states, number)
            continue
        if len(fields) != 4:
            raise ParseError("expected 'trans: <src> <in> <out|-> <dst>'", number)
        source = _known_state(fields[0], states, number)
        target = _known_state(fields[3], states, number)
        symbol: Optional[str] = fields[1]
        if symbol == EPSILON_LABEL:
            symbol = None
        elif symbol not in inputs:
            raise UnknownSymbol(symbol, number)
        output = "" if fields[2] == EMPTY_WORD else fields[2]
        stray = next((b for b in output if b not in outputs), None)
        if stray is not None:
            raise UnknownSymbol(stray, number)
        transitions.append(Transition(source, symbol, output, target))

    if parents:
        transitions = [
            Transition(t.source, t.input, t.output, t.target, parents.get(t.source)) for t in transitions
        ]
    return Transducer(tuple(states), inputs, outputs, tuple(transitions), initial, parents)


def serialize_transducer(transducer: Transducer) -> str:
    lines = [
        f"input-alphabet: {' '.join(transducer.input_alphabet)}",
        f"output-alphabet: {' '.join(transducer.output_alphabet)}",
        f"initial: {transducer.initial}",
        f"states: {' '.join(str(q) for q in transducer.states)}",
    ]
    for child, parent in transducer.parents.items():
        lines.append(f"parent: {child} {parent}")
    for t in transducer.transitions:
        lines.append(f"trans: {t.source} {t.input or EPSILON_LABEL} {t.output or EMPTY_WORD} {t.target}")
    return "\n".join(lines) + "\n"


def parse_weighted_automaton(text: str) -> WeightedAutomaton:
    alphabet: Optional[Tuple[str, ...]] = None
    states: Dict[int, None] = {}
    initial: Dict[int, object] = {}
    final: Dict[int, object] = {}
    weights = {}
    pending: List[Tuple[int, List[str]]] = []

    for number, keyword, rest in _lines(text):
        fields = rest.split()
        if keyword == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate 'alphabet' line", number)
            alphabet = _alphabet(rest, number)
        elif keyword == "state":
            if not fields:
                raise ParseError("expected 'state: <id> [init <p/q>] [final <p/q>]'", number)
            state = _state_id(fields[0], number)
            if state in states:
                raise ParseError(f"state {state} declared twice", number)
            states[state] = None
            options = fields[1:]
            if len(options) % 2:
                raise ParseError("state options come in '<init|final> <p/q>' pairs", number)
            for key, value in zip(options[::2], options[1::2]):
                if key == "init":
                    initial[state] = parse_rational(value, number)
                elif key == "final":
                    final[state] = parse_rational(value, number)
                else:
                    raise ParseError(f"unknown state option {key!r}", number)
        elif keyword == "trans":
            if len(fields) != 4:
                raise ParseError("expected 'trans: <src> <sym> <p/q> <dst>'", number)
            pending.append((number, fields))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", number)

    if alphabet is None:
        raise ParseError("missing 'alphabet' line")
    for number, fields in pending:
        source = _known_state(fields[0], states, number)
        target = _known_state(fields[3], states, number)
        symbol = fields[1]
        if symbol not in alphabet:
            raise UnknownSymbol(symbol, number)
        key = (source, symbol, target)
        if key in weights:
            raise ParseError(f"duplicate transition {source} {symbol} {target}", number)
        weights[key] = parse_rational(fields[2], number)

    order = tuple(states)
    return WeightedAutomaton(
        states=order,
        alphabet=alphabet,
        weights=weights,
        initial=RationalVector(initial.get(q, 0) for q in order),
        final=RationalVector(final.get(q, 0) for q in order),
    )


def serialize_weighted_automaton(automaton: WeightedAutomaton) -> str:
    """Zero-weight transitions are left out."""
    lines = [f"alphabet: {' '.join(automaton.alphabet)}"]
    for i, q in enumerate(automaton.states):
        lines.append(
            f"state: {q} init {format_rational(automaton.initial[i])} final {format_rational(automaton.final[i])}"
        )
    for (p, b, q), weight in automaton.nonzero_weights():
        lines.append(f"trans: {p} {b} {format_rational(weight)} {q}")
    return "\n".join(lines) + "\n"


def format_grid(matrix: RationalMatrix, labels: Sequence[int]) -> List[str]:
    """Rows of a matrix as aligned text, headed by the state labels."""
    cells = [[str(q) for q in labels]] + [[format_rational(x) for x in row] for row in matrix.to_lists()]
    width = max(len(c) for row in cells for c in row)
    lines = []
    for label, row in zip([""] + [str(q) for q in labels], cells):
        lines.append(f"{label:>{width}} | " + " ".join(f"{c:>{width}}" for c in row))
    return lines


def render_matrices(built: FrequencyAutomaton) -> str:
    """Matrix dump (E, E*, N_b, E*N_b, P, π) of a FrequencyAutomaton."""
    labels = built.normalized.states
    m = built.matrices
    grids = [("E", format_grid(m.E, labels)), ("E*", format_grid(m.Estar, labels))]
    grids += [(f"N_{b}", format_grid(n_b, labels)) for b, n_b in m.N.items()]
    grids += [(f"E*N_{b}", format_grid(m.Estar @ n_b, labels)) for b, n_b in m.N.items()]
    grids.append(("P", format_grid(m.P, labels)))
    return render_template("matrices.txt.j2", grids=grids, states=labels, pi=built.pi.to_list())


def load_transducer(path: str) -> Tuple[Optional[Transducer], Optional[str]]:
    try:
        with open(path, "r") as f:
            text = f.read()
        return parse_transducer(text), None
    except (OSError, NormcheckError) as e:
        logger.error(f"load_transducer({path}): {e}")
        return None, f"{path}: {e}"


def load_weighted_automaton(path: str) -> Tuple[Optional[WeightedAutomaton], Optional[str]]:
    try:
        with open(path, "r") as f:
            text = f.read()
        return parse_weighted_automaton(text), None
    except (OSError, NormcheckError) as e:
        logger.error(f"load_weighted_automaton({path}): {e}")
        return None, f"{path}: {e}"
