"""Domain errors raised by the services.

Every error is a ``ValueError`` so callers that only care about "bad input"
can catch one type; the command layer maps them to exit code 1.
"""
from typing import Optional, Sequence


class SwarmnetError(ValueError):
    pass


class ParameterError(SwarmnetError):
    pass


class InvalidScenario(SwarmnetError):
    pass


class UnrecognizedIntent(SwarmnetError):
    def __init__(self, message: str, candidates: Sequence[str] = ()):
        self.candidates = list(candidates)
        if self.candidates:
            message = f"{message}; try one of: {', '.join(self.candidates)}"
        super().__init__(message)


class IncompleteMission(SwarmnetError):
    pass


class DocumentError(SwarmnetError):
    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        locus = []
        if line is not None:
            locus.append(f"line {line}")
        if field:
            locus.append(f"field '{field}'")
        if locus:
            message = f"{' '.join(locus)}: {message}"
        super().__init__(message)


class InvalidPerimeter(SwarmnetError):
    pass


class NoChargingStation(SwarmnetError):
    pass


class SchemaViolation(SwarmnetError):
    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message)


class KnowledgeBaseMismatch(SwarmnetError):
    pass


class MalformedPayload(SwarmnetError):
    pass


class UnknownTaskKind(SwarmnetError):
    pass


class MissionValidationError(SwarmnetError):
    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(f"{v.code.value}: {v.message}" for v in self.violations)
        super().__init__(f"mission is invalid ({detail})")
