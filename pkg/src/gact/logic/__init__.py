"""First-order formulas over G-structures: syntax, semantics, quantifier elimination."""
from .formula import (FALSE, TRUE, And, Bottom, Eq, Exists, Forall, Formula, Implies,
                      Not, Or, Rel, Term, Top, conj, disj, free_vars, quantifier_depth,
                      substitute, to_text)
from .parser import parse
from .qe import (QEResult, decide_sentence, qe, qe_empty, qe_graph,
                 relativize_to_invariants)
from .semantics import dnf, evaluate, nnf, simplify

eval_formula = evaluate

__all__ = [
    "FALSE", "TRUE", "And", "Bottom", "Eq", "Exists", "Forall", "Formula", "Implies", "Not",
    "Or", "Rel", "Term", "Top", "conj", "disj", "free_vars", "quantifier_depth", "substitute",
    "to_text", "parse", "QEResult", "decide_sentence", "qe", "qe_empty", "qe_graph",
    "relativize_to_invariants", "dnf", "evaluate", "nnf", "simplify", "eval_formula",
]
