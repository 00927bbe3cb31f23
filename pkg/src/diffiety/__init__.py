"""Exact symbolic computation on diffieties.

Expressions are rational functions over Q in coordinate atoms and formal
function symbols (``expr``); ``jet`` builds jet spaces with constraints
and their total derivatives; ``forms`` and ``fields`` hold one-forms,
vector fields and the variation checks; ``reduce`` has the worked
reductions; ``kdv`` the isospectral workflow; ``parse``/``cli`` the model
language and command line.
"""

from .expr import ONE, ZERO, Expr, const, fn, jet, ln, param, var
from .fields import (
    PointField,
    StandardField,
    check_variation,
    commutator,
    contact_check,
    contact_field,
    evolutionary,
    group_check,
    poisson_bracket,
)
from .forms import NotInSpan, OneForm, contact_form, contract, lie_field, lie_total, represent
from .jet import Diffiety, free_jets
from .parse import parse_expr, parse_model
from .render import render

__version__ = "0.1.0"

__all__ = [
    "ONE",
    "ZERO",
    "Expr",
    "const",
    "fn",
    "jet",
    "ln",
    "param",
    "var",
    "Diffiety",
    "free_jets",
    "OneForm",
    "NotInSpan",
    "contact_form",
    "contract",
    "lie_field",
    "lie_total",
    "represent",
    "PointField",
    "StandardField",
    "check_variation",
    "commutator",
    "contact_check",
    "contact_field",
    "evolutionary",
    "group_check",
    "poisson_bracket",
    "parse_expr",
    "parse_model",
    "render",
]
