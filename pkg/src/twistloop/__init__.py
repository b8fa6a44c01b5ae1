"""Twisted 1-loop invariants of hyperbolic once-punctured torus bundles.

Three routes to the same Laurent polynomial: the twisted edge equation
determinant, the full edge-coordinate recursion Jacobian, and the
characteristic polynomial of the 3x3 monodromy Jacobian.  See the cli
module for the command line entry point.
"""

from .bundle import (
    InvalidWordError,
    RLWord,
    gluing_exponents,
    meridian_exponents,
    monodromy_matrix,
    parse_word,
    ptolemy_schedule,
    twisted_row_pattern,
)
from .geometry import (
    ShapeSolution,
    SolveError,
    SolverOptions,
    bloch_wigner,
    multiplicative_residual,
    solve_geometric,
    volume,
)
from .laurent import (
    LaurentMatrix,
    LaurentPoly,
    UnitAlignment,
    compare_up_to_unit,
    normalize_unit,
    poly_det,
)
from .oneloop import (
    DegenerateShapeError,
    FlatteningError,
    OneLoopResult,
    TwistedGluingData,
    bundle_gluing_data,
    one_loop_at_lambda,
    one_loop_big_jacobian,
    one_loop_det_x,
    one_loop_general,
    validate_flattening,
    x_matrix,
)
from .ptolemy import (
    AlexanderResult,
    AssignmentMismatchError,
    Dual3,
    PtolemyAssignment,
    PtolemySolveError,
    alexander_polynomial,
    character_coords,
    homogeneity_check,
    shapes_from_ptolemy,
    solve_ptolemy,
)

__all__ = [
    "AlexanderResult",
    "AssignmentMismatchError",
    "DegenerateShapeError",
    "Dual3",
    "FlatteningError",
    "InvalidWordError",
    "LaurentMatrix",
    "LaurentPoly",
    "OneLoopResult",
    "PtolemyAssignment",
    "PtolemySolveError",
    "RLWord",
    "ShapeSolution",
    "SolveError",
    "SolverOptions",
    "TwistedGluingData",
    "UnitAlignment",
    "alexander_polynomial",
    "bloch_wigner",
    "bundle_gluing_data",
    "character_coords",
    "compare_up_to_unit",
    "gluing_exponents",
    "homogeneity_check",
    "meridian_exponents",
    "monodromy_matrix",
    "multiplicative_residual",
    "normalize_unit",
    "one_loop_at_lambda",
    "one_loop_big_jacobian",
    "one_loop_det_x",
    "one_loop_general",
    "parse_word",
    "poly_det",
    "ptolemy_schedule",
    "shapes_from_ptolemy",
    "solve_geometric",
    "solve_ptolemy",
    "twisted_row_pattern",
    "validate_flattening",
    "volume",
    "x_matrix",
]

__version__ = "0.1.0"
