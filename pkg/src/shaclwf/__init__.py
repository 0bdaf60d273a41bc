"""Static analysis for recursive SHACL under well-founded semantics.

The package provides, over one shared document model:

- validation of data graphs under the well-founded fixpoint, with the
  full iteration trace (`wf`),
- enumeration of supported (stable two-valued) models and brave
  validation (`supported`),
- a full hybrid mu-calculus with parsing, printing, naive fixpoint
  evaluation, binder cleanup, and dualization (`mu`),
- the constraint-to-formula translation plus the document-level
  satisfiability and implication reductions (`translate`),
- bounded model search over canonical graph enumeration, with a
  compiled kernel when available (`kernel`, `search`),
- two-way alternating parity tree automata for the same checks,
  decided via coBüchi games (`automata`),
- file formats and a command line front end (`syntax`, `cli`).
"""

from .kernel import HAVE_COMPILED
from .model import (
    And,
    BudgetExceeded,
    Concept,
    ConstraintSet,
    DataGraph,
    Document,
    EngineError,
    Exists,
    ForAll,
    IncompatibleGraph,
    Nominal,
    NotShape,
    Or,
    ParseError,
    Role,
    ShaclError,
    ShapeExpr,
    ShapeRef,
    Target,
    TranslationBudget,
    UndefinedShape,
    check_compatible,
    normalize,
    restrict_to,
    shape_deps,
    sub,
)
from .mu import cln, dualize, mu_to_text, parse_mu
from .mu import eval as mu_eval
from .search import (
    SearchOutcome,
    crosscheck,
    doc_sat_bounded,
    implies_bounded,
    shape_sat_bounded,
)
from .supported import enumerate_supported_models, is_supported_model, stratify
from .syntax import (
    document_to_text,
    expr_to_text,
    graph_to_text,
    parse_document,
    parse_expr,
    parse_graph,
)
from .translate import (
    doc_sat_formula,
    implication_formula,
    lambda_,
    theta,
    translate,
)
from .wf import format_trace, validates, well_founded_model

__version__ = "0.1.0"

__all__ = [
    "And", "BudgetExceeded", "Concept", "ConstraintSet", "DataGraph",
    "Document", "EngineError", "Exists", "ForAll", "HAVE_COMPILED",
    "IncompatibleGraph", "Nominal", "NotShape", "Or", "ParseError", "Role",
    "SearchOutcome", "ShaclError", "ShapeExpr", "ShapeRef", "Target",
    "TranslationBudget", "UndefinedShape", "check_compatible", "cln",
    "crosscheck", "doc_sat_bounded", "doc_sat_formula", "document_to_text",
    "dualize", "enumerate_supported_models", "expr_to_text", "format_trace",
    "graph_to_text", "implication_formula", "implies_bounded",
    "is_supported_model", "lambda_", "mu_eval", "mu_to_text", "normalize",
    "parse_document", "parse_expr", "parse_graph", "parse_mu", "restrict_to",
    "shape_deps", "shape_sat_bounded", "stratify", "sub", "theta",
    "translate", "validates", "well_founded_model", "__version__",
]
