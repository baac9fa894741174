#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dual Dyson Error Hierarchy
==========================

Every failure raised by the library derives from DualDysonError and carries
the process exit status the command line maps it to:

    2  configuration (parse, validation, unknown keys)
    3  numerical (series engine, models, spectrum)
    4  I/O (unreadable configuration, artifact directory or file)
"""

from typing import Optional


class DualDysonError(Exception):
    """Base error. Subclasses set exit_code."""

    exit_code: int = 1


# ============================================================================
# CONFIGURATION
# ============================================================================

class ConfigError(DualDysonError):
    exit_code = 2


class ParseError(ConfigError):
    """The configuration document is not valid JSON."""


class ValidationError(ConfigError, ValueError):
    """A field is missing, has the wrong type or lies out of range."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnknownKey(ConfigError):
    """The configuration carries a key no section understands."""

    def __init__(self, key: str, section: Optional[str] = None):
        self.key = key
        self.section = section
        where = f" in section '{section}'" if section else ""
        super().__init__(f"unknown key '{key}'{where}")


# ============================================================================
# NUMERICAL
# ============================================================================

class NumericalError(DualDysonError, ValueError):
    exit_code = 3


class NotHermitian(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class BadIndex(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


class DegeneracyCrossing(NumericalError):
    pass


class ZeroDetuning(NumericalError):
    pass


class ZeroCoupling(NumericalError):
    pass


class OrderTooLarge(NumericalError):
    pass


class CutoffTooSmall(NumericalError):
    pass


class TurningPoint(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class BadLength(NumericalError):
    pass


class EmptySpectrum(NumericalError):
    pass


# ============================================================================
# I/O
# ============================================================================

class InputError(DualDysonError):
    exit_code = 4


class OutputError(DualDysonError):
    exit_code = 4
