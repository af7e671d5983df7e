"""Vector moments, residue expansions and Löwner classes of two-variable Pick functions."""

from .errors import (DegenerateDesign, InvalidRepresentation, NotHermitian, NotReal,
                     OrderTooHigh, PickError, SingularMatrix)
from .numkernel import BACKEND
from .representation import (DiscreteMeasure, Direction, TypeIRep, evaluate, evaluate_many,
                             from_discrete_measure, load_rep, pick_certificate, save_rep,
                             z_weighted)
from .moments import beta, scalar_moment, telescope_residual, vector_moment, weighted_inverse_apply

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DegenerateDesign", "DiscreteMeasure", "Direction", "InvalidRepresentation",
    "NotHermitian", "NotReal", "OrderTooHigh", "PickError", "SingularMatrix", "TypeIRep",
    "beta", "evaluate", "evaluate_many", "from_discrete_measure", "load_rep", "pick_certificate",
    "save_rep", "scalar_moment", "telescope_residual", "vector_moment",
    "weighted_inverse_apply", "z_weighted",
]
