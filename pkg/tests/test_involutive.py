from diffiety.jet import free_jets
from diffiety.reduce import filtration_basis, involutive_family
from diffiety.reduce.involutive import InvolutiveFamily


def family(m, n, l, **kw):
    d = free_jets(m, n)
    return involutive_family(d, [w for _, w in filtration_basis(d, l)], level=l, **kw)


def test_m12_level1():
    fam = family(1, 2, 1)
    assert fam.sigma == (2, 1)
    assert fam.stable
    assert [s for _, s in fam.certificate] == [(2, 1)] * 3
    assert all(fam.verify_exact())


def test_m11_level1():
    # Omega_1 = <w, w_1>; L_D w = w_1 is already inside, only L_D w_1 = w_11 is new
    fam = family(1, 1, 1)
    assert fam.sigma == (1,)
    assert fam.selected == [[1]]
    assert all(fam.verify_exact())


def test_m12_level2_and_m22():
    assert family(1, 2, 2).sigma == (3, 1)
    fam = family(2, 2, 1)
    assert fam.sigma == (4, 2)
    assert all(fam.verify_exact())


def test_empty_basis():
    d = free_jets(1, 3)
    fam = involutive_family(d, [])
    assert fam.sigma == (0, 0, 0)
    assert isinstance(fam, InvolutiveFamily)


def test_direction_order_is_respected():
    fam = family(1, 2, 1, directions=(2, 1))
    assert fam.directions == (2, 1)
    assert fam.sigma == (2, 1)


def test_seeds_are_recorded():
    fam = family(1, 2, 1, seeds=(7, 11))
    assert [s for s, _ in fam.certificate] == [7, 11]

