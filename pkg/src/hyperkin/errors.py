#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

class HyperkinError(Exception):
    """Root of every error raised on purpose by hyperkin."""


class ShapeError(HyperkinError, ValueError):
    def __init__(self, message, *shapes):
        if shapes:
            message = message + ' (shapes: ' + ', '.join(str(tuple(s)) for s in shapes) + ')'
        super().__init__(message)
        self.shapes = tuple(tuple(s) for s in shapes)


class DomainError(HyperkinError, ValueError):
    """Value outside the domain of an operation, after epsilon guarding.
    The offending value is kept in ``value``.
    """
    def __init__(self, message, value = None):
        if value is not None:
            message = message + ' (offending value: ' + repr(value) + ')'
        super().__init__(message)
        self.value = value


class NumericalError(HyperkinError, ArithmeticError):
    pass


class TapeError(HyperkinError, RuntimeError):
    pass


class ConfigError(HyperkinError, ValueError):
    pass


class EmptyInputError(HyperkinError, ValueError):
    pass


class TrainingError(HyperkinError, RuntimeError):
    def __init__(self, message, dump_path = None):
        if dump_path is not None:
            message = message + ', diagnostic dump written to ' + str(dump_path)
        super().__init__(message)
        self.dump_path = dump_path
