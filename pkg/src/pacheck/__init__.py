"""Process-algebra verification workbench.

Parses behavioral models into process terms, derives labeled transition
systems by structural operational semantics, decides strong and weak
bisimilarity with distinguishing-formula diagnostics, model-checks
Hennessy-Milner logic properties, and ships a corpus of offline-payment
threat models with machine-checkable verdicts.
"""

from .casestudies import (
    CaseStudy,
    Check,
    CheckOutcome,
    Corpus,
    EquivalenceCheck,
    FormulaCheck,
    ReachabilityCheck,
    build_corpus,
    build_double_spend,
    build_offline_chain,
    build_producer_consumer,
    build_torn_transaction,
    format_outcome,
    load_corpus,
    run_corpus,
)
from .cli import RunReport, main, run
from .equivalence import (
    EquivalenceVerdict,
    OracleSizeCapError,
    Partition,
    StatesEquivalentError,
    check_equivalence,
    disjoint_union,
    distinguishing_formula,
    minimize_lts,
    naive_equivalence_oracle,
    refine_partition,
    saturate_weak,
)
from .formats import export_aut, export_dot, parse_aut
from .hml import (
    And,
    Box,
    Diamond,
    EvalResult,
    Ff,
    HmlFormula,
    Not,
    Or,
    Tt,
    WeakBox,
    WeakDiamond,
    evaluate_formula,
    render_formula,
    render_trace,
)
from .parsing import (
    DeclaredProperty,
    ModelFile,
    ModelSyntaxError,
    SourceDiagnostic,
    parse_formula,
    parse_model_file,
    parse_term,
    render_model_file,
)
from .semantics import (
    DEFAULT_MAX_STATES,
    InvalidEnvironmentError,
    Lts,
    StateBoundExceededError,
    UnboundConstantError,
    build_lts,
    reachable_action_set,
    state_label,
    step_transitions,
)
from .terms import (
    TAU,
    Action,
    Choice,
    Const,
    Environment,
    Hide,
    Nil,
    Parallel,
    Prefix,
    ProcessTerm,
    observable,
    render_term,
    structurally_equal,
    validate_environment,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "And",
    "Box",
    "CaseStudy",
    "Check",
    "CheckOutcome",
    "Choice",
    "Const",
    "Corpus",
    "DEFAULT_MAX_STATES",
    "DeclaredProperty",
    "Diamond",
    "Environment",
    "EquivalenceCheck",
    "EquivalenceVerdict",
    "EvalResult",
    "Ff",
    "FormulaCheck",
    "Hide",
    "HmlFormula",
    "InvalidEnvironmentError",
    "Lts",
    "ModelFile",
    "ModelSyntaxError",
    "Nil",
    "Not",
    "Or",
    "OracleSizeCapError",
    "Parallel",
    "Partition",
    "Prefix",
    "ProcessTerm",
    "ReachabilityCheck",
    "RunReport",
    "SourceDiagnostic",
    "StateBoundExceededError",
    "StatesEquivalentError",
    "TAU",
    "Tt",
    "UnboundConstantError",
    "WeakBox",
    "WeakDiamond",
    "build_corpus",
    "build_double_spend",
    "build_lts",
    "build_offline_chain",
    "build_producer_consumer",
    "build_torn_transaction",
    "check_equivalence",
    "disjoint_union",
    "distinguishing_formula",
    "evaluate_formula",
    "export_aut",
    "export_dot",
    "format_outcome",
    "load_corpus",
    "main",
    "minimize_lts",
    "naive_equivalence_oracle",
    "observable",
    "parse_aut",
    "parse_formula",
    "parse_model_file",
    "parse_term",
    "reachable_action_set",
    "refine_partition",
    "render_formula",
    "render_model_file",
    "render_term",
    "render_trace",
    "run",
    "run_corpus",
    "saturate_weak",
    "state_label",
    "step_transitions",
    "structurally_equal",
    "validate_environment",
    "__version__",
]
