"""Linear integer arithmetic: formulas, quantifier elimination, orderings."""

from .syntax import (
    FALSE,
    TRUE,
    And,
    Dvd,
    Eq,
    Exists,
    Forall,
    Formula,
    Le,
    Not,
    NotDvd,
    Or,
    Term,
    conj,
    disj,
    dvd,
    eq,
    eval_assignment,
    exists,
    forall,
    format_formula,
    free_vars,
    ge,
    gt,
    implies,
    le,
    lt,
    ne,
    neg,
    node_count,
    node_size,
    num,
    rename_vars,
    simplify,
    subst_var,
    var,
)
from .cooper import decide_sentence, qe_cooper
from .parser import parse_formula
from .monotonicity import (
    MonotonicityVerdict,
    check_strong_monotonicity,
    dickson_ordering,
    monotonicity_sentence,
)
from .ordering_search import (
    AxiomsReport,
    OrderingSearchResult,
    WellnessEvidence,
    enumerate_orderings,
    find_structuring_ordering,
    ordering_axioms_check,
    refute_wellness_bounded,
)
