"""Exact and approximate implication between conditional-independence
statements over discrete variables, with machine-checkable certificates."""

from .core import (
    CapExceeded,
    CIError,
    CISet,
    CITriple,
    InternalCheckError,
    ParseError,
    Universe,
    VarSet,
    classify,
    elemental_decompose,
    parse_ci_lines,
    parse_ci_triple,
    read_ci_file,
)
from .dag import Dag, d_separated, parse_dag, read_dag_file, recursive_basis
from .polymatroids import PolymatroidTable, cond_mutual_information, is_polymatroid
from .atoms import (
    AtomMeasure,
    AtomSet,
    Verdict,
    atoms_of,
    atoms_of_set,
    implies_positive,
    measure_from_table,
    polymatroid_from_atoms,
    reduce_antecedents,
    single_atom_polymatroid,
)
from .distributions import (
    JointDistribution,
    atom_measure,
    entropic_table,
    entropy,
    parity_distribution,
    random_distribution,
    read_distribution,
    write_distribution,
)
from .implication import (
    RelaxationCertificate,
    ValidationReport,
    check_marginal,
    check_recursive,
    parity_refutation,
    semigraphoid_closure,
    tightness_family,
    validate_bound,
)
from .lp import (
    UNBOUNDED,
    ConeProgram,
    LinearFunctional,
    SimplexResult,
    check_ai_gamma,
    elemental_inequalities,
    optimal_lambda,
    simplex_solve,
)

__version__ = "0.1.0"

__all__ = [
    "AtomMeasure",
    "AtomSet",
    "CIError",
    "CISet",
    "CITriple",
    "CapExceeded",
    "ConeProgram",
    "Dag",
    "InternalCheckError",
    "JointDistribution",
    "LinearFunctional",
    "ParseError",
    "PolymatroidTable",
    "RelaxationCertificate",
    "SimplexResult",
    "UNBOUNDED",
    "Universe",
    "ValidationReport",
    "VarSet",
    "Verdict",
    "atom_measure",
    "atoms_of",
    "atoms_of_set",
    "check_ai_gamma",
    "check_marginal",
    "check_recursive",
    "classify",
    "cond_mutual_information",
    "d_separated",
    "elemental_decompose",
    "elemental_inequalities",
    "entropic_table",
    "entropy",
    "implies_positive",
    "is_polymatroid",
    "measure_from_table",
    "optimal_lambda",
    "parity_distribution",
    "parity_refutation",
    "parse_ci_lines",
    "parse_ci_triple",
    "parse_dag",
    "polymatroid_from_atoms",
    "random_distribution",
    "read_ci_file",
    "read_dag_file",
    "read_distribution",
    "recursive_basis",
    "reduce_antecedents",
    "semigraphoid_closure",
    "simplex_solve",
    "single_atom_polymatroid",
    "tightness_family",
    "validate_bound",
    "write_distribution",
]
