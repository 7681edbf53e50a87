"""Exception hierarchy.

Two families matter to the command line runner: ``ValidationError`` (bad
program text or ill-formed definitions, exit status 1) and ``SemanticError``
(failures while evaluating a well-formed program, exit status 2).
"""

from __future__ import annotations


class FolxError(Exception):
    """Base class for every error raised by the engine."""

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        line, col = self.span
        return f"{line}:{col}: {self.message}"


class ValidationError(FolxError):
    pass


class SemanticError(FolxError):
    pass


# relational algebra
class IndexNotPresent(SemanticError):
    pass


class CompositionTypeMismatch(SemanticError):
    pass


class IndexSetMismatch(SemanticError):
    pass


class UniverseMismatch(SemanticError):
    pass


class IndexSetOverlap(SemanticError):
    pass


class MixedIndexSet(SemanticError):
    pass


# syntax and definitions
class FolSyntaxError(ValidationError):
    pass


class UnknownDirective(ValidationError):
    pass


class DuplicateSymbol(ValidationError):
    pass


class RecursiveFunction(ValidationError):
    pass


class RecursiveRelationOutsideHornBlock(ValidationError):
    pass


class ParameterMismatch(ValidationError):
    pass


class NonHornClause(ValidationError):
    pass


class VariableCapture(ValidationError):
    pass


class UseBeforeDefinition(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class UnknownSymbol(SemanticError):
    pass


class UninterpretedSymbol(ValidationError):
    """A theory symbol that the bound interpretation does not provide."""


# universes and interpretations
class InvalidModulus(ValidationError):
    pass


class PartialFunctionTable(ValidationError):
    pass


class LiteralOutOfRange(SemanticError):
    pass


# evaluation
class UnboundVariable(SemanticError):
    pass


class NonClosedFormula(SemanticError):
    pass


class NonClosedAxiom(SemanticError):
    pass


class FreeVariableMismatch(SemanticError):
    pass


class FixpointDivergence(SemanticError):
    """Raised when a fixpoint exceeds the iteration cap (an engine bug)."""
