"""Exception taxonomy shared across the package."""


class EngineError(Exception):
    """Base class for every error raised by this package."""


class FormulaSyntaxError(EngineError):
    """Formula text could not be parsed; carries line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UndeclaredAtomError(EngineError):
    """A formula mentions a proposition that was never declared."""

    def __init__(self, name: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"undeclared proposition '{name}'{where}")
        self.name = name
        self.line = line
        self.column = column


class SpecFileError(EngineError):
    """A problem-spec file is malformed; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class ResourceLimitError(EngineError):
    """A construction exceeded the configured state budget."""


class EnvUnrealizableError(EngineError):
    """The environment itself cannot enforce its safety spec."""


class MalformedArenaError(EngineError):
    """A non-goal arena state offers the environment no move at all."""


class UndefinedTransitionError(EngineError):
    """A run hit an undefined transition; carries the step index."""

    def __init__(self, step: int):
        super().__init__(f"undefined transition at step {step}")
        self.step = step


class HistoryOutsideRegionError(EngineError):
    """A seed history leaves the winning region it must stay inside."""

    def __init__(self, step: int):
        super().__init__(f"history leaves the winning region at step {step}")
        self.step = step


class IncompatibleHistoryError(EngineError):
    """An environment move contradicts the history a strategy replays."""

    def __init__(self, step: int):
        super().__init__(f"environment move incompatible with seed history at step {step}")
        self.step = step


class IllegalEnvMoveError(EngineError):
    """The environment played a move outside its own safety spec."""


class SessionError(EngineError):
    """A session operation was invalid in the current session state."""


class HorizonExceededError(EngineError):
    """A session failed to stop within its state-count horizon."""


class BaseUnrealizableError(EngineError):
    """Further duties were injected on top of an unrealizable base problem."""
