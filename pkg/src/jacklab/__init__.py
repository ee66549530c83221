"""Jack unitary characters: exact evaluation, integral representations, Pieri
integrals and boundary asymptotics."""

from .errors import AccuracyError, CapacityError, DomainError, JacklabError
from .partitions import (
    FrobeniusCoords,
    Partition,
    Signature,
    conjugate,
    diagram_stats,
    frobenius,
    interlaces,
    shift,
    split_signature,
)
from .jack_core import (
    CharacterQuery,
    jack_character,
    jack_eval,
    jack_eval_ones,
    pochhammer,
    psi_branching,
)

__version__ = "0.1.0"
