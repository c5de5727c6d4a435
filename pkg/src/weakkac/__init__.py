"""Computational kernel for finite-dimensional weak Kac algebras.

The package works with explicit structure-constant tensors.  Typical flow:
build or load a ``WeakKacAlgebra``, run :func:`verify_wka` or the bundled
:func:`analyze`, then feed the result to the Markov, crossed product and
tower layers.  Every construction returns a :class:`~weakkac.report.Report`
listing named checks with residuals.
"""

from .algebra import FiniteStarAlgebra, matrix_algebra, verify_star_algebra
from .config import (DecompositionError, DimensionMismatch, NotStarAlgebra,
                     NotWeakKac, ParseError, SolveError, ToleranceConfig,
                     WkaError)
from .crossed import (ActionSpec, CrossedProduct, crossed_product,
                      dual_action, duality_isomorphism, kac_subalgebra_input,
                      module_expectation, trivial_action,
                      two_sided_crossed_product, validate_action)
from .expectations import (ConditionalExpectation, basic_construction,
                           trace_conditional_expectation)
from .kernels import warmup
from .markov import markov_analysis, prime_dimension_report
from .report import Report
from .serialize import from_json, parse, serialize, to_json
from .tower import (arithmetic_report, build_tower, commuting_square_check,
                    left_right_iso_check, relative_commutant_checks,
                    tower_context)
from .weak_kac import (WeakKacAlgebra, analyze, cyclic_group_table, dual,
                       from_dual_group, from_group, from_pair_groupoid,
                       haar_data, verify_wka)
from .wedderburn import (SubalgebraEmbedding, block_decompose,
                         generated_subalgebra, subalgebra_from_basis)

__version__ = "0.1.0"

__all__ = [
    "ActionSpec",
    "ConditionalExpectation",
    "CrossedProduct",
    "DecompositionError",
    "DimensionMismatch",
    "FiniteStarAlgebra",
    "NotStarAlgebra",
    "NotWeakKac",
    "ParseError",
    "Report",
    "SolveError",
    "SubalgebraEmbedding",
    "ToleranceConfig",
    "WeakKacAlgebra",
    "WkaError",
    "__version__",
    "analyze",
    "arithmetic_report",
    "basic_construction",
    "block_decompose",
    "build_tower",
    "commuting_square_check",
    "crossed_product",
    "cyclic_group_table",
    "dual",
    "dual_action",
    "duality_isomorphism",
    "from_dual_group",
    "from_group",
    "from_json",
    "from_pair_groupoid",
    "generated_subalgebra",
    "haar_data",
    "kac_subalgebra_input",
    "left_right_iso_check",
    "markov_analysis",
    "matrix_algebra",
    "module_expectation",
    "parse",
    "prime_dimension_report",
    "relative_commutant_checks",
    "serialize",
    "subalgebra_from_basis",
    "to_json",
    "tower_context",
    "trace_conditional_expectation",
    "trivial_action",
    "two_sided_crossed_product",
    "validate_action",
    "verify_star_algebra",
    "verify_wka",
    "warmup",
]
