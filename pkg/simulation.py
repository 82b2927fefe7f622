"""Empirical check of predicted frequencies on Champernowne-style normal inputs."""
import csv
import io
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from errors import EmptyPattern, EmptyPrefix, OutputTooShort, SimulationError, UnknownSource
from frequency import build_frequency_automaton
from rationals import format_rational, stationary_distribution
from transducer import (
    Transducer, is_strongly_connected, iter_run, markov_matrix, recurrent_sccs,
    require_valid, restrict, trace,
)
from weighted import word_weight

logger = logging.getLogger("Normcheck.Simulation")
logger.propagate = True

MIN_SAMPLES_PER_BLOCK = 100


# --- Normal inputs ---

def _expansion(n: int, alphabet: Sequence[str]) -> str:
    base = len(alphabet)
    if n == 0:
        return alphabet[0]
    digits = []
    while n:
        n, d = divmod(n, base)
        digits.append(alphabet[d])
    return "".join(reversed(digits))


def champernowne_stream(alphabet: Sequence[str]) -> Iterator[str]:
    """0·1·2·3⋯ written in base #alphabet, digit d spelled alphabet[d]."""
    if len(alphabet) < 2:
        raise ValueError("Champernowne words need an alphabet of at least two symbols")
    for n in itertools.count():
        yield from _expansion(n, alphabet)


def champernowne(alphabet: Sequence[str], n: int) -> str:
    if n == 0:
        return ""
    return "".join(itertools.islice(champernowne_stream(alphabet), n))


def random_stream(alphabet: Sequence[str], seed: int = 0, chunk: int = 1 << 16) -> Iterator[str]:
    """Uniform pseudo-random symbols from a seeded generator.

    Binary Champernowne prefixes under-represent 0 by roughly 1/(2 log2 n);
    at desk-scale lengths these symbols are much closer to uniform.
    """
    generator = np.random.default_rng(seed)
    symbols = np.array(alphabet, dtype=object)
    while True:
        yield from symbols[generator.integers(0, len(alphabet), size=chunk)]


def file_stream(path: str) -> Iterator[str]:
    with open(path, "r") as f:
        for line in f:
            for symbol in line:
                if not symbol.isspace():
                    yield symbol


def open_source(spec: str, alphabet: Sequence[str]) -> Iterator[str]:
    """Resolve 'champernowne[:<k>]', 'random[:<seed>]' or 'file:<path>' into a symbol stream."""
    kind, _, argument = spec.partition(":")
    if kind == "champernowne":
        if argument:
            try:
                base = int(argument)
            except ValueError:
                raise UnknownSource(f"bad base in {spec!r}") from None
            if base != len(alphabet):
                raise UnknownSource(
                    f"{spec!r} has base {base} but the input alphabet has {len(alphabet)} symbols"
                )
        return champernowne_stream(alphabet)
    if kind == "random":
        try:
            seed = int(argument) if argument else 0
        except ValueError:
            raise UnknownSource(f"bad seed in {spec!r}") from None
        return random_stream(alphabet, seed)
    if kind == "file" and argument:
        return file_stream(argument)
    raise UnknownSource(f"unknown input source {spec!r} (use champernowne:<k>, random:<seed> or file:<path>)")


# --- Occurrence counting ---

def count_occurrences(w: str, v: str) -> int:
    """|w|_v, overlapping occurrences included."""
    if not v:
        raise EmptyPattern("pattern must be non-empty")
    count = 0
    i = w.find(v)
    while i != -1:
        count += 1
        i = w.find(v, i + 1)
    return count


def empirical_frequency(x_prefix: str, v: str) -> float:
    if not v:
        raise EmptyPattern("pattern must be non-empty")
    if not x_prefix:
        raise EmptyPrefix("prefix must be non-empty")
    return count_occurrences(x_prefix, v) / len(x_prefix)


class BlockCounter:
    """Overlapping occurrence counts of every block of length <= max_len in a stream.

    Only the last max_len symbols are kept.
    """

    def __init__(self, max_len: int) -> None:
        if max_len < 1:
            raise ValueError("max_len must be at least 1")
        self.max_len = max_len
        self.counts: Counter = Counter()
        self.length = 0
        self._tail = ""

    def feed(self, symbols: str) -> None:
        for symbol in symbols:
            self._tail = (self._tail + symbol)[-self.max_len:]
            self.length += 1
            for k in range(1, len(self._tail) + 1):
                self.counts[self._tail[-k:]] += 1

    def frequency(self, v: str) -> float:
        if not v:
            raise EmptyPattern("pattern must be non-empty")
        if self.length == 0:
            raise EmptyPrefix("nothing counted yet")
        return self.counts[v] / self.length


# --- Reports ---

@dataclass(frozen=True)
class FrequencyEntry:
    word: str
    predicted: Fraction
    required: Fraction  # (#B)^-|w|, the frequency in a normal output
    empirical: float
    gap: float  # |empirical - predicted|

    @property
    def deviation(self) -> float:
        return abs(self.empirical - float(self.required))


@dataclass(frozen=True)
class FrequencyReport:
    entries: Tuple[FrequencyEntry, ...]
    input_length: int
    output_length: int
    component: Tuple[int, ...] = ()

    @property
    def max_gap(self) -> float:
        return max((e.gap for e in self.entries), default=0.0)

    def max_gap_up_to(self, length: int) -> float:
        return max((e.gap for e in self.entries if len(e.word) <= length), default=0.0)

    def entry(self, word: str) -> FrequencyEntry:
        for e in self.entries:
            if e.word == word:
                return e
        raise KeyError(word)

    def to_table(self) -> Table:
        table = Table(title=f"{self.input_length} input symbols, {self.output_length} output symbols")
        table.add_column("word")
        table.add_column("predicted", justify="right")
        table.add_column("required", justify="right")
        table.add_column("empirical", justify="right")
        table.add_column("gap", justify="right")
        for e in self.entries:
            table.add_row(e.word, format_rational(e.predicted), format_rational(e.required),
                          f"{e.empirical:.6f}", f"{e.gap:.6f}")
        return table

    def to_text(self, width: int = 100) -> str:
        buffer = io.StringIO()
        Console(file=buffer, width=width, color_system=None, force_terminal=False).print(self.to_table())
        return buffer.getvalue()

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["word", "predicted", "empirical", "gap"])
        for e in self.entries:
            writer.writerow([e.word, format_rational(e.predicted), f"{e.empirical:.6f}", f"{e.gap:.6f}"])
        return buffer.getvalue()


@dataclass(frozen=True)
class StateFrequencyEntry:
    state: int
    predicted: Fraction
    empirical: float
    gap: float


@dataclass(frozen=True)
class StateFrequencyReport:
    entries: Tuple[StateFrequencyEntry, ...]
    input_length: int

    @property
    def max_gap(self) -> float:
        return max((e.gap for e in self.entries), default=0.0)

    def to_table(self) -> Table:
        table = Table(title=f"state visits over {self.input_length} input symbols")
        table.add_column("state", justify="right")
        table.add_column("predicted", justify="right")
        table.add_column("empirical", justify="right")
        table.add_column("gap", justify="right")
        for e in self.entries:
            table.add_row(str(e.state), format_rational(e.predicted), f"{e.empirical:.6f}", f"{e.gap:.6f}")
        return table

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["state", "predicted", "empirical", "gap"])
        for e in self.entries:
            writer.writerow([e.state, format_rational(e.predicted), f"{e.empirical:.6f}", f"{e.gap:.6f}"])
        return buffer.getvalue()


def _settled_component(transducer: Transducer, last_state: int) -> Transducer:
    """The strongly connected part the run lives in once past its transient prefix."""
    if is_strongly_connected(transducer):
        return transducer
    for component in recurrent_sccs(transducer):
        if last_state in component:
            return restrict(transducer, component)
    raise SimulationError(f"run ended in transient state {last_state}; use a longer input")


def _words(alphabet: Sequence[str], max_len: int) -> Iterator[str]:
    for k in range(1, max_len + 1):
        for letters in itertools.product(alphabet, repeat=k):
            yield "".join(letters)


def compare_empirical(transducer: Transducer, n: int, max_len: int, source: Iterable[str]) -> FrequencyReport:
    """Run the transducer on n source symbols and compare block frequencies with predictions."""
    require_valid(transducer)
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    counter = BlockCounter(max_len)
    consumed = 0
    last_state = transducer.initial
    for output, state in iter_run(transducer, itertools.islice(source, n)):
        counter.feed(output)
        last_state = state
        consumed += 1
    if consumed < n:
        raise ValueError(f"input stream ended after {consumed} of {n} symbols")

    alphabet = transducer.output_alphabet
    needed = MIN_SAMPLES_PER_BLOCK * len(alphabet) ** max_len
    if counter.length < needed:
        raise OutputTooShort(f"output has {counter.length} symbols, need at least {needed}")

    component = _settled_component(transducer, last_state)
    built = build_frequency_automaton(component)
    entries = []
    for w in _words(alphabet, max_len):
        predicted = word_weight(built.automaton, w)
        empirical = counter.frequency(w)
        entries.append(FrequencyEntry(
            word=w,
            predicted=predicted,
            required=Fraction(1, len(alphabet) ** len(w)),
            empirical=empirical,
            gap=abs(empirical - float(predicted)),
        ))
    report = FrequencyReport(tuple(entries), consumed, counter.length, component.states)
    logger.info(f"compare_empirical: n={n}, output={counter.length}, max gap={report.max_gap:.6f}")
    return report


def compare_state_frequencies(transducer: Transducer, n: int, source: Iterable[str]) -> StateFrequencyReport:
    """Visit frequencies of the states of a run against the stationary distribution."""
    require_valid(transducer)
    states = trace(transducer, source, n)[1:]
    if not states:
        raise EmptyPrefix("no input consumed")
    visits = Counter(states)
    consumed = len(states)

    component = _settled_component(transducer, states[-1])
    pi = stationary_distribution(markov_matrix(component))
    entries = []
    for i, q in enumerate(component.states):
        empirical = visits[q] / consumed
        entries.append(StateFrequencyEntry(q, pi[i], empirical, abs(empirical - float(pi[i]))))
    return StateFrequencyReport(tuple(entries), consumed)
