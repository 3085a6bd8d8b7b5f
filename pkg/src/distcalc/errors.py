"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class DistCalcError(Exception):
    """Base class; the CLI turns any of these into a structured error record."""

    kind = "error"

    def record(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class InvalidInterval(DistCalcError):
    kind = "InvalidInterval"


class NonConvergence(DistCalcError):
    kind = "NonConvergence"


class MissingCertificate(DistCalcError):
    kind = "MissingCertificate"


class ModeMismatch(DistCalcError):
    kind = "ModeMismatch"


class OrderCap(DistCalcError):
    kind = "OrderCap"


class CertificateViolated(DistCalcError):
    kind = "CertificateViolated"

    def __init__(self, message: str, radius: float):
        super().__init__(message)
        self.radius = radius

    def record(self) -> dict:
        return {**super().record(), "radius": self.radius}


class ProbeFamilyUnsupported(DistCalcError):
    kind = "ProbeFamilyUnsupported"


class MollifierInvalid(DistCalcError):
    kind = "MollifierInvalid"


class BoundViolated(DistCalcError):
    kind = "BoundViolated"

    def __init__(self, message: str, k: float):
        super().__init__(message)
        self.k = k

    def record(self) -> dict:
        return {**super().record(), "k": self.k}


class DSLSyntaxError(DistCalcError):
    kind = "SyntaxError"

    def __init__(self, offset: int, expected: str, text: str = ""):
        super().__init__(f"at offset {offset}: expected {expected}")
        self.offset = offset
        self.expected = expected
        self.text = text

    def record(self) -> dict:
        return {**super().record(), "offset": self.offset, "expected": self.expected}


class UnknownName(DistCalcError):
    kind = "UnknownName"

    def __init__(self, identifier: str):
        super().__init__(f"unknown name {identifier!r}")
        self.identifier = identifier

    def record(self) -> dict:
        return {**super().record(), "identifier": self.identifier}


class TypeMismatch(DistCalcError):
    """An expression was used where a different kind of object is required."""

    kind = "TypeMismatch"
