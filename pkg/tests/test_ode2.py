from hypothesis import given, settings
from hypothesis import strategies as st

from diffiety.expr import ONE, ZERO, Expr, Fn, fn, jet, partial
from diffiety.fields import Generates, StandardField
from diffiety.forms import NotInSpan, OneForm, lie_field, lie_total
from diffiety.reduce import (
    Classification,
    determining_ode2,
    evolutionary_restriction_ode2,
    standard_basis_ode2,
    symmetry_check_ode2,
    variation_solution_ode2,
)
from diffiety.reduce.ode2 import ODE2_ARGS, adjoint_probe, formal_F
from strategies import coefficients

x, u0, v0, u1, v1, v2 = ODE2_ARGS
X = next(iter(x.atoms()))


def A(e):
    return next(iter(e.atoms()))


def test_standard_basis_u0v1():
    sb = standard_basis_ode2(u0 * v1)
    f = sb.forms
    assert sb.A == u0
    assert f["beta"] == f["alpha1"] - f["beta0"] * u0
    assert f["gamma"] == f["alpha0"]
    assert f["pi0"] == f["beta"] * u0 + f["gamma"] * u1
    assert f["pi1"] == f["beta"] * (2 * u1) + f["gamma"] * (2 * u0 * v1)
    assert sb.Delta == 2 * u0**2 * v1 - 2 * u1**2
    assert sb.classification is Classification.CONTROLLABLE


def test_degenerate_classifications():
    sb = standard_basis_ode2(v2)
    assert sb.B.is_zero and sb.C.is_zero
    assert sb.classification is Classification.DEGENERATE_SECOND_ORDER
    assert sb.G == v0
    sb = standard_basis_ode2(v1 + u1)
    assert not (sb.B.is_zero and sb.C.is_zero)
    assert (sb.C * sb.N + sb.B * sb.M).is_zero
    assert sb.classification is Classification.DEGENERATE_FIRST_ORDER
    assert sb.G == u0 + v0


def _identities(sb):
    d, f, F = sb.diffiety, sb.forms, sb.F
    Fu0, Fu1 = partial(F, A(u0)), partial(F, A(u1))
    yield lie_total(d, f["beta"]) - (f["gamma"] * Fu0 + f["beta"] * Fu1 + f["beta0"] * sb.B)
    yield lie_total(d, f["gamma"]) - (f["beta"] + f["beta0"] * sb.C)
    yield lie_total(d, f["pi0"]) - f["pi1"]


def test_identities_for_formal_F():
    sb = standard_basis_ode2(formal_F(), find_potential=False)
    assert all(r.is_zero for r in _identities(sb))


@st.composite
def small_F(draw):
    out = Expr.const(0)
    for _ in range(draw(st.integers(1, 3))):
        m = Expr.const(draw(coefficients))
        for a in draw(st.lists(st.sampled_from(ODE2_ARGS), min_size=1, max_size=2)):
            m = m * a
        out = out + m
    return out


@settings(max_examples=15, deadline=None)
@given(small_F())
def test_identities_for_random_F(F):
    sb = standard_basis_ode2(F, find_potential=False)
    assert all(r.is_zero for r in _identities(sb))


def test_dictionary_round_trip():
    sb = standard_basis_ode2(u0 * v1)
    pis = sb.pi_forms(4)
    for name in ("alpha0", "alpha1", "beta0"):
        combo = sb.dict_entry(name)
        assert combo.evaluate(pis) == sb.forms[name]


@settings(max_examples=6, deadline=None)
@given(small_F())
def test_dictionary_round_trip_random(F):
    sb = standard_basis_ode2(F, find_potential=False)
    if not sb.controllable:
        return
    for name in ("alpha0", "beta0"):
        combo = sb.dict_entry(name)
        assert combo.evaluate(sb.pi_forms(combo.top)) == sb.forms[name]


# -- variations ----------------------------------------------------------------------


def test_variation_solution_examples():
    sb = standard_basis_ode2(u0 * v1)
    Delta = sb.Delta
    assert variation_solution_ode2(sb, 1)[0] == -2 * u1 / Delta
    assert variation_solution_ode2(sb, u0**2)[0].is_zero


def test_variation_solution_generic_p():
    sb = standard_basis_ode2(u0 * v1)
    p = fn("p", x, u0, u1, v0)
    z0, zv = variation_solution_ode2(sb, p)
    D = sb.D
    assert z0 == (-2 * u1 * p + u0 * D(p)) / sb.Delta
    assert (D.power(z0, 2) - (v1 * z0 + u0 * D(zv))).is_zero


# -- determining system ----------------------------------------------------------


def test_determining_system_shape():
    sb = standard_basis_ode2(u0 * v1)
    ds = determining_ode2(sb)
    labels = [q.label for q in ds.nontrivial()]
    assert "beta1" in labels and "beta2" in labels
    eqs = {q.label: q.expr for q in ds.equations}
    assert str(eqs["beta1"]).startswith("p_v1")
    residual = eqs["beta0"]
    p = ds.formal("p")
    Dp = {a: Expr.atom(Fn("p", A(p).args, [k])) for k, a in enumerate(A(p).args)}
    mechanical = (
        u0**2 * (Dp[X] + u1 * Dp[A(u0)])
        + u1**2 * (Dp[A(v0)] + u0 * Dp[A(u1)])
        - 2 * u0 * u1 * p
        + u0**2 * v2 * Dp[A(v1)]
        + u0**2 * jet("v", 1, 1, 1) * Dp[A(v2)]
    )
    assert (residual + mechanical).is_zero or (residual - mechanical).is_zero


def test_candidates_on_determining_system():
    sb = standard_basis_ode2(u0 * v1)
    ds = determining_ode2(sb)
    assert ds.satisfied_by({"p": u0**2})
    assert ds.satisfied_by({"p": ZERO})
    chk = symmetry_check_ode2(sb, u0**2, ds)
    assert chk.passed and chk.z.is_zero and chk.lam.is_zero


def test_u0u1_is_mechanically_a_symmetry():
    sb = standard_basis_ode2(u0 * v1)
    chk = symmetry_check_ode2(sb, u0 * u1)
    assert chk.passed and chk.lam == ONE
    assert isinstance(chk.group, Generates)


def test_soundness_end_to_end():
    sb = standard_basis_ode2(u0 * v1)
    ds = determining_ode2(sb)
    for p in (ZERO, u0**2, u0 * u1, 3 * u0**2 - u0 * u1):
        if ds.satisfied_by({"p": p}):
            vals = ds.solve_for({"p": p})
            Z = StandardField(sb, p, vals["z"])
            assert (lie_field(sb.diffiety, sb.forms["pi0"], Z) - sb.forms["pi0"] * vals["lambda"]).is_zero


def test_non_symmetry_is_rejected():
    sb = standard_basis_ode2(u0 * v1)
    ds = determining_ode2(sb)
    assert not ds.satisfied_by({"p": v1})
    assert not symmetry_check_ode2(sb, u0 * x, ds).passed


def test_evolutionary_restriction():
    sb = standard_basis_ode2(u0 * v1)
    ev = evolutionary_restriction_ode2(determining_ode2(sb), sb)
    assert ev.solved["z"].is_zero
    assert ev.satisfied_by({"p": ZERO})
    assert ev.solve_for({"p": u0 * u1})["lambda"] == ONE
    assert ev.solve_for({"p": u0**2})["lambda"].is_zero


def test_adjoint_probe_reports_a_verdict():
    sb = standard_basis_ode2(u0 * v1)
    from diffiety.expr import ln

    probe = adjoint_probe(sb, [u0 / u1, u0 * v0 - u1 * ln(u0), 2 * x - u0 * u1])
    assert probe.verdict in ("in span", "not in span")
    if probe.modulo_dx is not NotInSpan:
        total = OneForm()
        from diffiety.forms import differential

        for c, phi in zip(probe.modulo_dx, probe.functions):
            total = total + differential(phi) * c
        assert (total - sb.forms["pi0"]).drop_dx().is_zero
