"""Finite-trace reactive synthesis with duties and exercisable rights."""

from .errors import (
    EngineError,
    EnvUnrealizableError,
    FormulaSyntaxError,
    HistoryOutsideRegionError,
    HorizonExceededError,
    IllegalEnvMoveError,
    IncompatibleHistoryError,
    MalformedArenaError,
    ResourceLimitError,
    SessionError,
    SpecFileError,
    UndeclaredAtomError,
    UndefinedTransitionError,
)
from .ltlf import evaluate, evaluate_all_prefixes, parse
from .automata import (
    Dfa,
    PropSet,
    Reach,
    ReachSafe,
    Safe,
    compile_prefix_safety_dfa,
    compile_reach_dfa,
    minimize,
    product,
    run_on,
)

__version__ = "0.1.0"

__all__ = [
    "EngineError",
    "EnvUnrealizableError",
    "FormulaSyntaxError",
    "HistoryOutsideRegionError",
    "HorizonExceededError",
    "IllegalEnvMoveError",
    "IncompatibleHistoryError",
    "MalformedArenaError",
    "ResourceLimitError",
    "SessionError",
    "SpecFileError",
    "UndeclaredAtomError",
    "UndefinedTransitionError",
    "evaluate",
    "evaluate_all_prefixes",
    "parse",
    "Dfa",
    "PropSet",
    "Reach",
    "ReachSafe",
    "Safe",
    "compile_prefix_safety_dfa",
    "compile_reach_dfa",
    "minimize",
    "product",
    "run_on",
    "__version__",
]
