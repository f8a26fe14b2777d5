"""Exception hierarchy shared by the services and the command line."""


class StateLearnError(Exception):
    """Base class for every error raised on purpose by this package."""


class ConfigError(StateLearnError):
    """Invalid configuration, unknown preset or violated precondition."""


class DataError(StateLearnError):
    """The input data cannot support the requested computation."""


class UnknownVariableError(DataError):
    def __init__(self, names):
        self.names = tuple(names)
        super().__init__(f"Unknown variable(s): {', '.join(self.names)}")


class InsufficientRowsError(DataError):
    def __init__(self, rows: int, required: int):
        self.rows = rows
        self.required = required
        super().__init__(f"Need at least {required} rows, got {rows}")


class InsufficientColumnsError(DataError):
    def __init__(self, columns: int, required: int):
        self.columns = columns
        self.required = required
        super().__init__(f"Need at least {required} observables, got {columns}")


class DegenerateDesignError(DataError):
    """Regressor block is rank deficient; ``columns`` names the dependent columns."""

    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(
            "Rank-deficient regressor block; linearly dependent column(s): "
            + ", ".join(self.columns)
        )


class DegenerateInputError(DataError):
    """A tested series has zero raw variance, so no correlation can be formed."""


class ConstantColumnError(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Column '{column}' is constant")


class CsvFormatError(DataError):
    """CSV input could not be parsed into a numeric frame."""


class NonStationaryError(StateLearnError):
    """A coefficient matrix has spectral radius (or a diagonal entry) of modulus >= 1."""


class ControlShockError(StateLearnError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(
            f"Cannot shock control '{name}': changes to controls are by construction "
            "not propagated to future periods; shock an exogenous or endogenous state"
        )
