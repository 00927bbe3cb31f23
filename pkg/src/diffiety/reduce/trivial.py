"""Checks on the trivial diffieties ``M(m, n)``: order preservation and the ``m = 2`` pencil problem."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from ..expr import ZERO, Expr, Fn, Jet, partial
from ..fields import PointField, VectorField
from ..forms import NotInSpan, OneForm, contact_form, lie_field, lie_total, represent
from ..jet import Diffiety, free_jets
from .systems import DeterminingSystem

__all__ = [
    "filtration_basis",
    "order_preservation_check",
    "Preserved",
    "Violated",
    "pencil_conditions_m2",
    "pencil_field",
    "pencil_candidate_check",
    "PencilCheck",
]


def filtration_basis(d: Diffiety, l: int) -> list:
    """``[(label, w^j_I)]`` for every family ``j`` and ``|I| <= l``."""
    out = []
    for fam in d.family_names:
        for k in range(l + 1):
            for I in combinations_with_replacement(range(1, d.n + 1), k):
                out.append((f"{fam}{list(I)}" if I else fam, contact_form(d, d.w(fam, *I))))
    return out


@dataclass(frozen=True)
class Preserved:
    level: int
    point_form: bool | None  # None when m == 1 (not asked)

    def __bool__(self):
        return True

    def __str__(self):
        extra = "" if self.point_form is None else f", point form {'confirmed' if self.point_form else 'NOT confirmed'}"
        return f"preserved at l={self.level}{extra}"


@dataclass(frozen=True)
class Violated:
    level: int
    witness: str  # label of a basis form w with L_Z w outside Omega_l
    image: OneForm

    def __bool__(self):
        return False

    def __str__(self):
        return f"violated at l={self.level}: L_Z w[{self.witness}] leaves Omega_l"


def order_preservation_check(d: Diffiety, Z: VectorField, l: int):
    """Does ``L_Z`` map ``Omega_l`` into itself (modulo ``dx``)?"""
    if not d.is_free:
        raise ValueError("order_preservation_check needs a trivial diffiety")
    basis = filtration_basis(d, l)
    forms = [w for _, w in basis]
    for label, w in basis:
        img = lie_field(d, w, Z)
        if represent(img, forms, modulo_dx=True) is NotInSpan:
            return Violated(l, label, img)
    point = None
    if len(d.family_names) > 1:
        low = set(d.independents) | {Jet(f, (), d.n) for f in d.family_names}
        comps = [Z.component(x) for x in d.independents] + [Z.component(Jet(f, (), d.n)) for f in d.family_names]
        point = all(c.coords() <= low for c in comps)
    return Preserved(l, point)


# --------------------------------------------------------------------------
# m = 2 pencil: L_Z pi = lam pi, L_Z w2 = mu^j w^j + lam_i L_{D_i} pi, pi = w1 + a w2


def _first_order_args(d: Diffiety) -> tuple:
    args = list(d.independents)
    for f in d.family_names:
        args.append(Jet(f, (), d.n))
    for f in d.family_names:
        for i in range(1, d.n + 1):
            args.append(Jet(f, (i,), d.n))
    return tuple(args)


def _pencil_ops(d: Diffiety, a: Expr):
    w1, w2 = (Jet(f, (), d.n) for f in d.family_names)

    def Dcal(f):
        return a * partial(f, w1) - partial(f, w2)

    def Dcal_i(i, f):
        return a * partial(f, Jet(d.family_names[0], (i,), d.n)) - partial(f, Jet(d.family_names[1], (i,), d.n))

    return Dcal, Dcal_i


def pencil_conditions_m2(a: Expr, n: int = 2, d: Diffiety | None = None) -> DeterminingSystem:
    """Conditions on first-order ``z^1, z^2`` (values ``w^j(Z)``) and ``z_i = Z x_i``.

    Emits ``Dc z1 + a Dc z2 - Z a`` and ``Dc_i z1 - a Dc_i z2`` with
    ``Dc = a d/dw1 - d/dw2``, ``Dc_i = a d/dw1_i - d/dw2_i``; the ``z_i`` are
    solved as ``Dc_i z2``, and ``Z a = sum z_i D_i a + sum D_I z^j da/dw^j_I``.
    """
    d = d or free_jets(2, n)
    if len(d.family_names) != 2 or not d.is_free:
        raise ValueError("pencil conditions need M(2, n)")
    args = _first_order_args(d)
    z1, z2 = (Expr.atom(Fn(nm, args)) for nm in ("z1", "z2"))
    Dcal, Dcal_i = _pencil_ops(d, a)
    zi = [Dcal_i(i, z2) for i in range(1, d.n + 1)]
    Za = _Z_of(d, a, zi, {d.family_names[0]: z1, d.family_names[1]: z2})
    ds = DeterminingSystem(unknowns={"z1": args, "z2": args})
    ds.solved = {f"z_{i}": v for i, v in enumerate(zi, 1)}
    ds.add("Dz1 + a*Dz2 - Za", Dcal(z1) + a * Dcal(z2) - Za)
    for i in range(1, d.n + 1):
        ds.add(f"D{i}z1 - a*D{i}z2", Dcal_i(i, z1) - a * Dcal_i(i, z2))
    ds.meta.update(a=a, diffiety=d, Za=Za)
    if a.coords() <= set(d.independents):
        ds.notes.append("a depends on x only: Za = sum z_i D_i a")
    return ds


def _Z_of(d: Diffiety, a: Expr, zi, zj) -> Expr:
    """``Z a`` for ``Z = sum z_i D_i + sum D_I z^j d/dw^j_I``."""
    out = ZERO
    for i, z in enumerate(zi, 1):
        if z:
            out = out + z * d.total(i, a)
    for c in a.coords():
        if isinstance(c, Jet):
            da = partial(a, c)
            if da:
                out = out + d.iterated(c.index, zj[c.family]) * da
    return out


def pencil_field(d: Diffiety, z1: Expr, z2: Expr, zi) -> PointField:
    """``Z = sum z_i D_i + sum D_I z^j d/dw^j_I`` as a point-generator field."""
    f1, f2 = d.family_names
    zw = {}
    for f, z in ((f1, z1), (f2, z2)):
        v = z
        for i, s in enumerate(zi, 1):
            v = v + d.w(f, i) * s
        zw[f] = v
    return PointField(d, list(zi), zw)


@dataclass
class PencilCheck:
    system_residuals: list
    lam: Expr | None
    second: list | None  # coefficients of L_Z w2 on (w1, w2, L_{D_i} pi), or None
    field: VectorField = field(repr=False, default=None)

    @property
    def passed(self) -> bool:
        return all(v.is_zero for _, v in self.system_residuals) and self.lam is not None and self.second is not None


def pencil_candidate_check(a: Expr, z1: Expr, z2: Expr, n: int = 2) -> PencilCheck:
    """Check a candidate against the emitted conditions and end to end against the Lie derivatives."""
    ds = pencil_conditions_m2(a, n)
    d = ds.meta["diffiety"]
    cand = {"z1": z1, "z2": z2}
    res = ds.residuals(cand)
    zi = [ds.solve_for(cand)[f"z_{i}"] for i in range(1, d.n + 1)]
    Z = pencil_field(d, z1, z2, zi)
    f1, f2 = d.family_names
    w1, w2 = contact_form(d, d.w(f1)), contact_form(d, d.w(f2))
    pi = w1 + w2 * a
    c = represent(lie_field(d, pi, Z), [pi])
    lam = c[0] if c else None
    basis = [w1, w2] + [lie_total(d, pi, i) for i in range(1, d.n + 1)]
    c2 = represent(lie_field(d, w2, Z), basis)
    return PencilCheck(res, lam, list(c2) if c2 else None, Z)
