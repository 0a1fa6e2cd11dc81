"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the process exit
status the command line maps it to.
"""


class LabprodError(Exception):
    code = "error"
    exit_status = 1


class ConfigError(LabprodError):
    code = "config"
    exit_status = 2


class ParameterError(ConfigError):
    code = "parameter"


class DataError(LabprodError):
    code = "data"
    exit_status = 3


class DomainError(DataError, ValueError):
    code = "domain"


class InsufficientDataError(DataError):
    code = "insufficient-data"


class AlignmentError(DataError):
    code = "alignment"


class LoadError(DataError):
    code = "load"


class GenerationError(DataError):
    code = "generation"


class NothingToForecastError(DataError):
    code = "nothing-to-forecast"


class DegeneracyError(LabprodError):
    """The population recursion hit a non-positive growth factor."""

    code = "degeneracy"
    exit_status = 4

    def __init__(self, message, year=None):
        super().__init__(message)
        self.year = year


class CalibrationError(LabprodError):
    code = "calibration-failed"
    exit_status = 5


class UndefinedFitError(CalibrationError):
    code = "undefined-fit"
