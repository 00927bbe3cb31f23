from diffiety.expr import ZERO, Expr, Jet, fn, var
from diffiety.fields import TotalField, contact_field, evolutionary, from_point_generators
from diffiety.jet import free_jets
from diffiety.reduce import (
    Preserved,
    Violated,
    filtration_basis,
    order_preservation_check,
    pencil_candidate_check,
    pencil_conditions_m2,
)

x1, x2 = var("x1"), var("x2")


def W(j, *I, n=2):
    return Expr.atom(Jet(f"w{j}", I, n))


def test_filtration_basis_labels():
    d = free_jets(2, 2)
    assert [lab for lab, _ in filtration_basis(d, 1)] == ["w1", "w1[1]", "w1[2]", "w2", "w2[1]", "w2[2]"]
    assert len(filtration_basis(d, 2)) == 2 * (1 + 2 + 3)


def test_point_field_preserves_filtration():
    d = free_jets(2, 2)
    Z = from_point_generators(d, [x1 * W(1), ZERO], {"w1": W(2) * x2, "w2": W(1) ** 2})
    for l in (0, 1):
        res = order_preservation_check(d, Z, l)
        assert isinstance(res, Preserved) and res.point_form
    assert str(order_preservation_check(d, Z, 1)) == "preserved at l=1, point form confirmed"


def test_first_order_generator_violates_level_zero():
    d = free_jets(2, 2)
    res = order_preservation_check(d, evolutionary(d, {"w1": W(2, 1)}), 0)
    assert isinstance(res, Violated) and not res
    assert res.witness == "w1"
    assert not res.image.drop_dx().is_zero


def test_total_derivative_raises_order():
    d = free_jets(2, 2)
    D = TotalField(d, 1)
    for l in (0, 1):
        res = order_preservation_check(d, D, l)
        assert isinstance(res, Violated)
        assert res.witness == ("w1" if l == 0 else "w1[1]")


def test_contact_field_preserves_first_order_when_m_is_one():
    d = free_jets(1, 1)
    Z = contact_field(d, W(1, 1, n=1) ** 2)
    res = order_preservation_check(d, Z, 1)
    assert isinstance(res, Preserved) and res.point_form is None


# -- pencil -------------------------------------------------------------------------


def test_pencil_constant_a():
    a = Expr.const(3)
    z2 = W(1) + a * W(2)
    chk = pencil_candidate_check(a, a * z2, z2)
    assert chk.passed
    assert chk.lam == Expr.const(6)


def test_pencil_zero_candidate():
    chk = pencil_candidate_check(Expr.const(3), ZERO, ZERO)
    assert chk.passed and chk.lam.is_zero
    assert all(v.is_zero for _, v in chk.system_residuals)


def test_pencil_x_dependent_a():
    a = fn("a", x1, x2)
    ds = pencil_conditions_m2(a)
    assert [q.label for q in ds.equations] == ["Dz1 + a*Dz2 - Za", "D1z1 - a*D1z2", "D2z1 - a*D2z2"]
    assert any("x only" in n for n in ds.notes)
    d = ds.meta["diffiety"]
    expected = ds.solved["z_1"] * d.total(1, a) + ds.solved["z_2"] * d.total(2, a)
    assert ds.meta["Za"] == expected


def test_pencil_rejects_bad_candidate():
    a = Expr.const(2)
    chk = pencil_candidate_check(a, W(1, 1), W(2))
    assert not chk.passed
