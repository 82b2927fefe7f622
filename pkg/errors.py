from typing import Optional


class NormcheckError(Exception):
    """Base class for every error raised by normcheck."""


# --- Linear algebra ---

class LinalgError(NormcheckError):
    pass

class SingularMatrix(LinalgError):
    pass

class DivergentStar(LinalgError):
    pass

class NotStochastic(LinalgError):
    pass

class NonUniqueStationary(LinalgError):
    pass


# --- Transducers ---

class TransducerError(NormcheckError):
    pass

class IncompleteAtState(TransducerError):
    def __init__(self, state: int, symbol: str) -> None:
        super().__init__(f"no transition from state {state} on input {symbol!r}")
        self.state = state
        self.symbol = symbol

class NotRecurrent(TransducerError):
    pass

class InvalidTransducer(TransducerError):
    pass

class NotStronglyConnected(TransducerError):
    pass


# --- Weighted automata ---

class AutomatonError(NormcheckError):
    pass

class UnknownSymbol(AutomatonError):
    def __init__(self, symbol: str, line: Optional[int] = None) -> None:
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown symbol {symbol!r}{where}")
        self.symbol = symbol
        self.line = line

class AlphabetMismatch(AutomatonError):
    pass

class BoundExceeded(AutomatonError):
    pass


# --- Frequency construction ---

class FrequencyError(NormcheckError):
    pass

class AllOutputsEmpty(FrequencyError):
    pass


# --- Simulation ---

class SimulationError(NormcheckError):
    pass

class EmptyPattern(SimulationError):
    pass

class EmptyPrefix(SimulationError):
    pass

class OutputTooShort(SimulationError):
    pass

class UnknownSource(SimulationError):
    pass


# --- Documents ---

class DocumentError(NormcheckError):
    pass

class ParseError(DocumentError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line

class UnknownState(DocumentError):
    def __init__(self, state: str, line: Optional[int] = None) -> None:
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown state {state!r}{where}")
        self.state = state
        self.line = line

class NegativeDenominator(DocumentError):
    def __init__(self, text: str, line: Optional[int] = None) -> None:
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"negative denominator in {text!r}{where}")
        self.line = line
