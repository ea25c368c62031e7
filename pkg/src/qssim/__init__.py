"""Singlet-based multiparty quantum secret sharing: protocol, attacks, detection."""

__version__ = "0.1.0"

from .quantum import (
    BellKind,
    GOutcome,
    LocalOp,
    MeasBasis,
    PureState,
    apply,
    apply_word,
    distribution,
    fidelity_up_to_phase,
    measure,
    prepare_bell,
    tensor,
)

__all__ = [
    "BellKind",
    "GOutcome",
    "LocalOp",
    "MeasBasis",
    "PureState",
    "apply",
    "apply_word",
    "distribution",
    "fidelity_up_to_phase",
    "measure",
    "prepare_bell",
    "tensor",
    "__version__",
]
