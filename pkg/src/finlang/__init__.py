"""Deciding finiteness of the tree languages of nondeterministic higher-order
recursion schemes, with an intersection type system carrying flags and markers.
"""

__version__ = "0.1.0"

from .sorts import O, Arrow, Base, Sort, arity, order, parse_sort
from .terms import (App, Const, Lam, Term, TermError, Var, Y, alpha_equivalent, beta_step,
                    free_vars, sort_check, sort_of, substitute)
from .syntax import ParseError, Scheme, SchemeError, parse_scheme, parse_term, print_scheme, scheme_to_term
from .unfold import SubtermRef, complexity, subterm_closure, unfold
from .itypes import (FullType, TypeEnv, arrow_type, comp, enumerate_full_types, full, parse_full_type,
                     render, rho)
from .rules import Derivation, Judgment, RuleError, ValidationReport, validate
from .engine import (BudgetExhausted, NotFound, Verdict, Witness, decide_finiteness, find_derivation,
                     pump, saturate)
from .export import export_derivation, from_json, to_dot, to_json, to_text, verdict_to_dict
from .oracle import (DIVERGED, FiniteTree, bohm_expand, growth_report, language_upto, parse_tree,
                     replay)
from .validation import check_scheme, check_term, check_terms
from .estimator import FinitenessClassifier

__all__ = [
    "O", "Arrow", "Base", "Sort", "arity", "order", "parse_sort",
    "App", "Const", "Lam", "Term", "TermError", "Var", "Y", "alpha_equivalent", "beta_step",
    "free_vars", "sort_check", "sort_of", "substitute",
    "ParseError", "Scheme", "SchemeError", "parse_scheme", "parse_term", "print_scheme",
    "scheme_to_term",
    "SubtermRef", "complexity", "subterm_closure", "unfold",
    "FullType", "TypeEnv", "arrow_type", "comp", "enumerate_full_types", "full",
    "parse_full_type", "render", "rho",
    "Derivation", "Judgment", "RuleError", "ValidationReport", "validate",
    "BudgetExhausted", "NotFound", "Verdict", "Witness", "decide_finiteness", "find_derivation",
    "pump", "saturate",
    "export_derivation", "from_json", "to_dot", "to_json", "to_text", "verdict_to_dict",
    "DIVERGED", "FiniteTree", "bohm_expand", "growth_report", "language_upto", "parse_tree",
    "replay",
    "check_scheme", "check_term", "check_terms", "FinitenessClassifier",
]
