"""Interactive proof engine for the Calculus of Constructions where
meta-variables are existentially quantified context variables."""

from .context import Classification, Context
from .engine import EngineState
from .errors import ProverError
from .tactics import ProofState
from .term import Term
from .vernacular import Session, parse_term

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "Context",
    "EngineState",
    "ProverError",
    "ProofState",
    "Term",
    "Session",
    "parse_term",
    "__version__",
]

__all__ = [
    "Classification",
    "Context",
    "EngineState",
    "ProofState",
    "ProverError",
    "Session",
    "Term",
    "parse_term",
    "__version__",
]
