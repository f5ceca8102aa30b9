"""Exact computation of lgl(L) for linear differential operators over Q(z).

lgl(L) is the space of right-hand sides g in Q(z) for which L(y) = g has a
formal solution at every place but no global rational solution. The package
gives closed-form dimensions for the classes where they are known, and a
brute-force oracle that works for any scalar operator or first-order system.
The small cohomology computations behind the formulas live in ``cohom``.
"""
from .cohom import (
    GeneratorFamily,
    NilpotentAction,
    SolutionSpaceData,
    constant_system_dims,
    cyclic_generator_h1,
    formal_irregularity,
    free_unipotent_cohomology,
    ga_cohomology,
    malgrange_check,
)
from .diffop import DiffOp, DiffSystem, adjoint, apply, apply_series, clear_denominators, companion, parse_operator
from .errors import LglError
from .lgl import (
    FuchsianInput,
    LglReport,
    classify_rank1,
    fuchsian_system,
    lgl_fuchsian,
    lgl_ga_nilpotent,
    lgl_genus_formula,
    lgl_rank1,
)
from .local import (
    classify_rank1_place,
    indicial_polynomial,
    irregularity,
    local_solvable,
    singular_places,
    t0_of_residue_matrix,
)
from .oracle import OracleReport, lgl_class, lgl_oracle, lgl_oracle_system, poly_cokernel
from .ratcore import INF, LaurentSeries, Place, Poly, RatFunc, laurent_expand, order_at, partial_fractions, residue

__version__ = "0.1.0"

__all__ = [
    "GeneratorFamily",
    "NilpotentAction",
    "SolutionSpaceData",
    "constant_system_dims",
    "cyclic_generator_h1",
    "formal_irregularity",
    "free_unipotent_cohomology",
    "ga_cohomology",
    "malgrange_check",
    "DiffOp",
    "DiffSystem",
    "adjoint",
    "apply",
    "apply_series",
    "clear_denominators",
    "companion",
    "parse_operator",
    "LglError",
    "FuchsianInput",
    "LglReport",
    "classify_rank1",
    "fuchsian_system",
    "lgl_fuchsian",
    "lgl_ga_nilpotent",
    "lgl_genus_formula",
    "lgl_rank1",
    "classify_rank1_place",
    "indicial_polynomial",
    "irregularity",
    "local_solvable",
    "singular_places",
    "t0_of_residue_matrix",
    "OracleReport",
    "lgl_class",
    "lgl_oracle",
    "lgl_oracle_system",
    "poly_cokernel",
    "INF",
    "LaurentSeries",
    "Place",
    "Poly",
    "RatFunc",
    "laurent_expand",
    "order_at",
    "partial_fractions",
    "residue",
]
