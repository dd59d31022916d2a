"""Exception hierarchy shared by the algebra modules.

Every error carries the name of the module that raised it and a short reason
string; the CLI prints ``<module>: <reason>`` and exits with code 1.
"""
from __future__ import annotations


class AlgebraError(Exception):
    module = "core"

    def __init__(self, reason: str, module: str | None = None):
        super().__init__(reason)
        self.reason = reason
        if module is not None:
            self.module = module

    def __str__(self) -> str:
        return f"{self.module}: {self.reason}"


# --- ffield ---

class InvalidModulusError(AlgebraError):
    module = "ffield"


class FieldMismatchError(AlgebraError):
    module = "ffield"


class ZeroElementError(AlgebraError):
    module = "ffield"


# --- psl2 ---

class ModulusMismatchError(AlgebraError):
    module = "psl2"


class ResourceLimitError(AlgebraError):
    module = "psl2"


# --- chartab ---

class UnsupportedCongruenceError(AlgebraError):
    module = "chartab"


class DegenerateTableError(AlgebraError):
    module = "chartab"


class CharacterIndexError(AlgebraError):
    module = "chartab"


# --- signatures ---

class UnsupportedPeriodError(AlgebraError):
    module = "signatures"


class MissingPeriodError(AlgebraError):
    module = "signatures"


class ConditionViolatedError(AlgebraError):
    module = "signatures"


class NumericInstabilityError(AlgebraError):
    module = "signatures"


class SearchExhaustedError(AlgebraError):
    """Budget ran out. Says nothing about admissibility."""
    module = "signatures"


class NotAdmissibleError(AlgebraError):
    module = "signatures"


class NoFuchsianGroupError(AlgebraError):
    module = "signatures"


class SignatureFormatError(AlgebraError):
    module = "signatures"


# --- growth ---

class GrowthInputError(AlgebraError):
    module = "growth"


# --- cache ---

class CacheError(AlgebraError):
    module = "cache"
