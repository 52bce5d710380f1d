"""
Exception hierarchy for the recollement toolkit
"""

from typing import Optional


class RecollementToolkitError(Exception):
    """Base class for every error raised by the toolkit"""


# Linear algebra

class NoSolution(RecollementToolkitError):
    """Right-hand side lies outside the row space"""


class SingularMatrix(RecollementToolkitError):
    """Matrix is not invertible over the prime field"""


# Algebras

class NonAdmissible(RecollementToolkitError):
    """Relation ideal is not admissible for the declared nilpotency bound"""


class RelationEndpointMismatch(RecollementToolkitError):
    """A relation mixes paths with different endpoints"""

    def __init__(self, index: int, message: str):
        super().__init__(f"relation {index}: {message}")
        self.index = index


class EmptyVertexSet(RecollementToolkitError):
    """An idempotent was requested from an empty vertex set"""


class BimoduleMismatch(RecollementToolkitError):
    """Bimodule data does not fit the algebras it is attached to"""


class UnknownVertex(RecollementToolkitError):
    """Vertex label is not a vertex of the algebra"""


class AlgebraMismatch(RecollementToolkitError):
    """Objects over different algebras were combined"""


class InvariantViolation(RecollementToolkitError):
    """A constructed object failed one of its structural checks"""

    def __init__(self, check: str, message: str = ""):
        super().__init__(f"{check}: {message}" if message else check)
        self.check = check


# Modules and sequences

class NotAHomomorphism(RecollementToolkitError):
    """Matrix does not intertwine the two module actions"""


class NotExact(RecollementToolkitError):
    """A sequence failed its exactness verification"""


class DecompositionInconclusive(RecollementToolkitError):
    """Randomised idempotent search ran out of trials"""


# Constructions

class ChainMismatch(RecollementToolkitError):
    """Chain tail is not stably isomorphic to the expected module"""


class FunctorNotExact(RecollementToolkitError):
    """A probed functor failed to preserve exactness"""


class FunctorNotProjectivePreserving(RecollementToolkitError):
    """A probed functor sent a projective to a non-projective"""


class LNotExact(RecollementToolkitError):
    """The left adjoint l of the recollement is not exact"""


class QNotExact(RecollementToolkitError):
    """The left adjoint q of the recollement is not exact"""


class ProbeCriterionDisagreement(RecollementToolkitError):
    """Module-theoretic exactness criterion and empirical probe disagree"""


class NotMoritaProvenance(RecollementToolkitError):
    """The algebra was not built as a Morita context ring"""


# Certificates

class Inconclusive(RecollementToolkitError):
    """A capped semi-decision did not reach a verdict"""

    def __init__(self, message: str, cap: Optional[int] = None):
        super().__init__(message)
        self.cap = cap


class OracleRefusal(RecollementToolkitError):
    """An oracle was asked about a module outside its certified class"""


class HypothesisFailure(RecollementToolkitError):
    """A transformer hypothesis bit is false"""

    def __init__(self, bit: str, message: str = ""):
        super().__init__(f"hypothesis '{bit}' failed" + (f": {message}" if message else ""))
        self.bit = bit


class RelativeGldimInfinite(RecollementToolkitError):
    """Relative global dimension exceeded its cap"""


class CertificateRejected(RecollementToolkitError):
    """A chain failed verification at certificate assembly"""


# Input

class SpecFileError(RecollementToolkitError):
    """Malformed algebra or module spec file"""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
