import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffiety.expr import ONE, Expr, Fn, Jet, jet, partial, var
from diffiety.jet import (
    ConstraintError,
    Diffiety,
    OrderBoundError,
    ScopeError,
    contains,
    difference,
    free_jets,
    multi_index,
)
from diffiety.kdv import isospectral_diffiety
from diffiety.reduce import ode2_diffiety, pde1_diffiety
from diffiety.reduce.ode2 import formal_F
from strategies import coefficients

x, u0, u1, u2, v0, v1, v2, v3 = (
    var("x"), jet("u"), jet("u", 1), jet("u", 1, 1), jet("v"), jet("v", 1), jet("v", 1, 1), jet("v", 1, 1, 1)
)


def W(j, *I):
    return Expr.atom(Jet(f"w{j}", I, 2))


def test_multi_index_helpers():
    assert multi_index(2, 1, 2) == (1, 2, 2)
    assert contains((1, 2, 2), (2, 1))
    assert not contains((1, 2), (1, 1))
    assert difference((1, 1, 2), (1,)) == (1, 2)


def test_resolve_leader_and_above():
    F = formal_F()
    d = ode2_diffiety()
    assert d.resolve("u", (1, 1)) == F
    d2 = ode2_diffiety(u0 * v1)
    assert d2.resolve("u", (1, 1, 1)) == u1 * v1 + u0 * v2


def test_free_coordinates_resolve_to_themselves():
    d = free_jets(2, 2)
    assert d.resolve("w1", (1, 2)) == W(1, 1, 2)
    assert d.is_free


def test_total_derivative_examples():
    d = ode2_diffiety(u0 * v1)
    D = d.derivation(1)
    assert D(x) == ONE
    assert D(u0) == u1
    assert D.power(u0, 2) == u0 * v1
    assert d.iterated((), u0 * v2) == u0 * v2


def test_total_derivative_of_formal_symbol():
    d = ode2_diffiety()
    F = formal_F()
    args = [a for a in F.atoms().pop().args]

    def Fp(k):
        return Expr.atom(Fn("F", args, [k]))

    expected = Fp(0) + u1 * Fp(1) + v1 * Fp(2) + F * Fp(3) + v2 * Fp(4) + v3 * Fp(5)
    assert d.derivation(1)(F) == expected


def test_pde1_y_derivative_of_u():
    d = pde1_diffiety()
    Fp = d.resolve("u", (2,))
    u = lambda r: Expr.atom(Jet("u", (1,) * r, 2))
    assert d.total(2, u(0)) == Fp
    assert d.total(2, u(2)) == d.iterated((1, 1), Fp)


def test_isospectral_leader():
    d = isospectral_diffiety()
    lam, q0 = Expr.atom(d.params[0]), Expr.atom(Jet("q", (), 1))
    vv = Expr.atom(Jet("v", (), 1))
    assert d.resolve("v", (1, 1)) == -(lam + q0) * vv


def test_scope_errors():
    d = ode2_diffiety()
    with pytest.raises(ScopeError):
        d.total(1, Expr.atom(Jet("q", (), 1)))
    q = Diffiety(1, ["q"], independents=())
    with pytest.raises(ScopeError):
        q.total(1, x)


def test_bad_constraints():
    with pytest.raises(ConstraintError):
        Diffiety(1, ["u"], {Jet("u", (1,)): v0, Jet("u", (1, 1)): v0})
    with pytest.raises(ConstraintError):
        Diffiety(1, ["u"], {Jet("q", (1,)): v0})


def test_order_bound_is_an_error():
    d = ode2_diffiety(u0 * v1, order_bound=5)
    with pytest.raises(OrderBoundError):
        d.resolve("u", (1,) * 6)


def test_confluence_between_paths():
    a = W(1, 1)
    d = Diffiety(2, ["w1"], {Jet("w1", (2,), 2): a * W(1) + W(1, 1, 1)})
    via_xy = d.total(2, d.total(1, W(1, 1)))
    via_yx = d.total(1, d.total(2, W(1, 1)))
    assert via_xy == via_yx
    assert d.resolve("w1", (1, 1, 2)) == d.total(1, d.resolve("w1", (1, 2)))


def test_memo_is_idempotent_under_threads():
    d = ode2_diffiety(u0 * v1)
    out = []
    ts = [threading.Thread(target=lambda: out.append(d.resolve("u", (1,) * 6))) for _ in range(6)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert len({str(e) for e in out}) == 1


FREE = [W(j, *I) for j in (1, 2) for I in [(), (1,), (2,), (1, 1), (1, 2)]] + [var("x1"), var("x2")]


@st.composite
def free_polys(draw):
    out = Expr.const(0)
    for _ in range(draw(st.integers(1, 3))):
        m = Expr.const(draw(coefficients))
        for a in draw(st.lists(st.sampled_from(FREE), min_size=1, max_size=3)):
            m = m * a
        out = out + m
    return out


@settings(max_examples=30, deadline=None)
@given(free_polys())
def test_total_derivatives_commute_on_free_jets(f):
    d = free_jets(2, 2)
    assert d.total(1, d.total(2, f)) == d.total(2, d.total(1, f))


@settings(max_examples=30, deadline=None)
@given(free_polys())
def test_total_derivative_matches_textbook_formula(f):
    d = free_jets(2, 2)
    for i in (1, 2):
        expected = partial(f, var(f"x{i}").atoms().pop())
        for c in f.coords():
            if isinstance(c, Jet):
                expected = expected + Expr.atom(Jet(c.family, c.index + (i,), 2)) * partial(f, c)
        assert d.total(i, f) == expected


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([u0, u1, v0, v1, v2]), st.sampled_from([u0, u1, v1]))
def test_constrained_derivation_is_a_derivation(a, b):
    d = ode2_diffiety(u0 * v1)
    D = d.derivation(1)
    assert D(a * b) == D(a) * b + a * D(b)
