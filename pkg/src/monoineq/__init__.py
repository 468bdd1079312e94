"""Satisfiability of linear integer constraints with monomial inequalities.

Atoms are either linear (``sum c_i x_i rel k``) or monomial (``x <= y^n`` or
``x >= y^n``) over the naturals. Systems using only one monomial direction
are decidable; see ``solve``.
"""

__version__ = "0.1.0"

from .errors import (
    BoundIncomplete,
    InputError,
    InternalConsistencyError,
    MonoIneqError,
    ResourceExhausted,
    SourceError,
)
from .model import (
    EQ,
    GE,
    LE,
    ConstraintSystem,
    Direction,
    LinearAtom,
    LinearSet,
    MonomialAtom,
    NatVec,
    SemilinearSet,
    SolveStats,
    Status,
    Verdict,
    Witness,
)
from .semilinear import EngineLimits, decompose, minimal_solutions
from .normal_form import NormalFormInstance, check_normal, normalize
from .oracle import check_witness, oracle_alpha_search, oracle_x_search
from .solver import SolverConfig, decide_less, decide_more, decide_solved, solve

__all__ = [
    "BoundIncomplete", "InputError", "InternalConsistencyError", "MonoIneqError",
    "ResourceExhausted", "SourceError", "EQ", "GE", "LE", "ConstraintSystem", "Direction",
    "LinearAtom", "LinearSet", "MonomialAtom", "NatVec", "SemilinearSet", "SolveStats",
    "Status", "Verdict", "Witness", "EngineLimits", "decompose", "minimal_solutions",
    "NormalFormInstance", "check_normal", "normalize", "check_witness",
    "oracle_alpha_search", "oracle_x_search", "SolverConfig", "decide_less",
    "decide_more", "decide_solved", "solve",
]
