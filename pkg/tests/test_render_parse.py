import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffiety.expr import Expr, Fn, Jet, fn, jet, ln, param, var
from diffiety.parse import ParseError, parse_expr, parse_model, vocabulary
from diffiety.forms import represent
from diffiety.reduce import standard_basis_ode2
from diffiety.render import combo_latex, latex, render, text
from strategies import DIM1, LAMBDA, Q, rationals

u0, u1, v1 = jet("u"), jet("u", 1), jet("v", 1)
x = var("x")

ATOMS = DIM1 + Q[:3] + [LAMBDA, fn("F", x, u0, u1), ln(u0)]


def test_render_examples():
    assert render(u0**2 * v1) == "u0^2*v1"
    assert json.loads(render(0, "json")) == {"op": "const", "value": "0"}


def test_render_pi0_latex():
    f = standard_basis_ode2(u0 * v1).forms
    c = represent(f["pi0"], [f["beta"], f["gamma"]])
    assert combo_latex(list(zip(c, ["beta", "gamma"]))) == r"u_0\beta+u_1\gamma"


def test_text_orders_by_degree_then_atoms():
    e = parse_expr("u1 + u0^2*v1 + 3 - u0")
    assert text(e) == "u0^2*v1 - u0 + u1 + 3"


def test_latex_subscripts():
    assert latex(jet("q", 1, 1) * param("lambda")) == r"\lambda q_2"


def test_json_is_a_tree():
    tree = json.loads(render(u0 / (u1 + 1), "json"))
    assert tree["op"] == "div"
    assert all("op" in a for a in tree["args"])


@settings(max_examples=200, deadline=None)
@given(rationals(ATOMS))
def test_parse_render_round_trip(e):
    assert parse_expr(text(e)) == e


# -- parser ---------------------------------------------------------------------


def test_precedence():
    assert parse_expr("-u0^2") == -(u0**2)
    assert parse_expr("2*u0/4 - -u1") == u0 / 2 + u1
    assert parse_expr("(u0+u1)^2") == (u0 + u1) ** 2
    assert parse_expr("u0/u1/u1") == u0 / u1**2


def test_formal_symbols_and_partials():
    F = parse_expr("F(x,u0,u1)")
    (a,) = F.atoms()
    assert isinstance(a, Fn) and a.args == (x.atoms().pop(), Jet("u", ()), Jet("u", (1,)))
    dF = parse_expr("F_u1(x,u0,u1)")
    assert dF.atoms().pop().derivs == (2,)


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("model ode2; F = u0*;", "line 1, column 20: unexpected ';'"),
        ("model ode2; F = q0;", "unknown coordinate 'q0'"),
        ("model ode2; F = ln(u0, u1);", "ln takes exactly one argument"),
        ("model ode2; F = G(u0) + G(u0, u1);", "G used with 2 arguments, earlier with 1"),
        ("model ode2;\nF = u0 $ 1;", "line 2, column 8"),
        ("F = u0;", "definition before model statement"),
        ("model torus;", "unknown model kind"),
        ("", "missing model statement"),
    ],
)
def test_model_errors(src, fragment):
    with pytest.raises(ParseError) as info:
        parse_model(src)
    assert fragment in str(info.value)


def test_model_examples():
    m = parse_model("model ode2; F = u0*v1;")
    assert m.kind == "ode2" and m["F"] == u0 * v1
    assert parse_model("model kdv;").kind == "kdv"


def test_model_definitions_options_and_positions():
    src = "model jets 2 2;\n# comment\nZ_w1 = w[1][1,2] + x1;\noption seed 3;\nG = Z_w1^2;\n"
    m = parse_model(src)
    assert (m.m, m.n) == (2, 2)
    assert m["Z_w1"] == Expr.atom(Jet("w1", (1, 2), 2)) + var("x1")
    assert m["G"] == m["Z_w1"] ** 2
    assert m.options == {"seed": 3}
    assert m.positions["G"] == (5, 1)


def test_pde1_names():
    v = vocabulary("pde1")
    assert v.lookup("vxy") == Jet("v", (1, 2), 2)
    assert v.lookup("u2") == Jet("u", (1, 1), 2)
    assert v.lookup("u0") is None or v.lookup("u0") == Jet("u", (), 2)


def test_w_index_out_of_range():
    with pytest.raises(ParseError, match="out of range"):
        parse_model("model jets 1 2; Z = w[1][3];")


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="u0v1+-*/^() ", max_size=12))
def test_parser_fails_only_with_parse_errors(src):
    try:
        parse_expr(src)
    except ParseError:
        pass
