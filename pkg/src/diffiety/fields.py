"""Lazily resolved vector fields, variation checks, group and contact tests, brackets."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

from .expr import ONE, ZERO, Atom, Expr, Jet, Param, Var, derive, partial
from .forms import OneForm, contact_form, contract, lie_field, lie_total, represent
from .jet import Diffiety, multi_index

__all__ = [
    "VectorField",
    "PointField",
    "ExplicitField",
    "TotalField",
    "SumField",
    "CommutatorField",
    "StandardField",
    "from_point_generators",
    "evolutionary",
    "contact_field",
    "commutator",
    "check_variation",
    "VariationReport",
    "Residual",
    "group_check",
    "Generates",
    "Exceeds",
    "contact_check",
    "Contact",
    "NOT_CONTACT",
    "poisson_bracket",
    "order_zero_forms",
]


class VectorField:
    """Derivation ``Z`` given by its values ``Z a`` on coordinate atoms.

    Subclasses implement ``_component``; results are memoized.
    """

    def __init__(self):
        self._memo: dict[Atom, Expr] = {}
        self._lock = threading.RLock()

    def _component(self, a: Atom) -> Expr:
        raise NotImplementedError

    def component(self, a) -> Expr:
        if isinstance(a, Expr):
            (a,) = a.atoms()
        with self._lock:
            if a in self._memo:
                return self._memo[a]
        v = self._component(a)
        with self._lock:
            return self._memo.setdefault(a, v)

    def apply(self, f: Expr) -> Expr:
        if not isinstance(f, Expr):
            return ZERO
        return derive(f, self.component)

    __call__ = apply

    def __add__(self, other: "VectorField") -> "VectorField":
        return SumField([(ONE, self), (ONE, other)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return SumField([(ONE, self), (-ONE, other)])

    def __rmul__(self, g) -> "VectorField":
        g = g if isinstance(g, Expr) else Expr.const(g)
        return SumField([(g, self)])


class PointField(VectorField):
    """Field prolonged from generators ``z_i = Z x_i`` and ``z^j = Z w^j``.

    The jet components follow the infinitesimal prolongation recurrence,
    written through the characteristic ``Q^j = z^j - sum_i w^j_i z_i``:
    ``Z w^j_I = D_I Q^j + sum_i w^j_{Ii} z_i``.  On a constrained diffiety
    only internal coordinates get components; tangency is not assumed.
    """

    def __init__(self, d: Diffiety, z: Sequence[Expr] | None = None, zw: Mapping[str, Expr] | None = None):
        super().__init__()
        self.d = d
        z = list(z) if z is not None else []
        z = [e if isinstance(e, Expr) else Expr.const(e) for e in z]
        self.z = z + [ZERO] * (len(d.independents) - len(z))
        zw = dict(zw or {})
        for j in zw:
            if j not in d.family_names:
                raise ValueError(f"unknown family {j!r}")
        self.zw = {j: (v if isinstance(v, Expr) else Expr.const(v)) for j, v in zw.items()}
        self._char: dict[tuple, Expr] = {}

    def characteristic(self, family: str) -> Expr:
        q = self.zw.get(family, ZERO)
        for i, zi in enumerate(self.z, 1):
            if zi:
                q = q - self.d.w(family, i) * zi
        return q

    def _dq(self, family: str, index: tuple) -> Expr:
        key = (family, index)
        if key not in self._char:
            if not index:
                v = self.characteristic(family)
            else:
                v = self.d.total(index[-1], self._dq(family, index[:-1]))
            self._char[key] = v
        return self._char[key]

    def _component(self, a: Atom) -> Expr:
        d = self.d
        if isinstance(a, Var):
            if a in d.independents:
                return self.z[d.independents.index(a)]
            return ZERO
        if isinstance(a, Param):
            return ZERO
        if isinstance(a, Jet):
            if not d.is_internal(a):
                raise ValueError(f"{a} is not an internal coordinate")
            if not a.index and not any(self.z):
                return self.zw.get(a.family, ZERO)
            out = self._dq(a.family, a.index)
            for i, zi in enumerate(self.z, 1):
                if zi:
                    out = out + d.resolve(a.family, multi_index(*a.index, i)) * zi
            return out
        return ZERO


def from_point_generators(d: Diffiety, z: Sequence[Expr], zw: Sequence[Expr] | Mapping[str, Expr]) -> PointField:
    if not isinstance(zw, Mapping):
        zw = dict(zip(d.family_names, zw))
    return PointField(d, z, zw)


def evolutionary(d: Diffiety, generators: Sequence[Expr] | Mapping[str, Expr]) -> PointField:
    """Field with ``Z x_i = 0`` and ``Z w^j = G^j``."""
    return from_point_generators(d, [], generators)


def contact_field(d: Diffiety, Q: Expr, family: str | None = None) -> PointField:
    """The point-type representative ``X_Q - sum_i Q_{w_i} D_i`` of an evolutionary class.

    For a single family and a characteristic of first order this is the
    classical Lie contact field with characteristic ``Q``.
    """
    family = family or d.family_names[0]
    z = [-partial(Q, Jet(family, (i,), d.n)) for i in range(1, d.n + 1)]
    zw = Q
    for i, zi in enumerate(z, 1):
        zw = zw + d.w(family, i) * zi
    return PointField(d, z, {family: zw})


class ExplicitField(VectorField):
    """Finitely many prescribed components, zero elsewhere."""

    def __init__(self, components: Mapping):
        super().__init__()
        self.components = {}
        for a, v in components.items():
            if isinstance(a, Expr):
                (a,) = a.atoms()
            self.components[a] = v if isinstance(v, Expr) else Expr.const(v)

    def _component(self, a):
        return self.components.get(a, ZERO)


class TotalField(VectorField):
    """``g * D_i``."""

    def __init__(self, d: Diffiety, i: int = 1, g: Expr = ONE):
        super().__init__()
        self.d, self.i, self.g = d, i, g if isinstance(g, Expr) else Expr.const(g)

    def _component(self, a):
        return self.g * self.d.atom_total(self.i, a)


class SumField(VectorField):
    """``sum c_k Z_k`` with function coefficients."""

    def __init__(self, terms: Sequence[tuple]):
        super().__init__()
        self.terms = list(terms)

    def _component(self, a):
        out = ZERO
        for c, Z in self.terms:
            v = Z.component(a)
            if v:
                out = out + c * v
        return out


class CommutatorField(VectorField):
    """``[X, Y] a = X(Y a) - Y(X a)`` on coordinates."""

    def __init__(self, X: VectorField, Y: VectorField):
        super().__init__()
        self.X, self.Y = X, Y

    def _component(self, a):
        return self.X.apply(self.Y.component(a)) - self.Y.apply(self.X.component(a))


def commutator(X: VectorField, Y: VectorField, probe: Sequence[OneForm] = ()) -> CommutatorField:
    """The bracket ``[X, Y]``.

    With ``probe`` forms given, the returned field carries
    ``probe_residuals``: for each form ``w`` the pair of values
    ``w([X,Y]) - X w(Y) + (L_X w)(Y)`` and ``w([X,Y]) + Y w(X) - (L_Y w)(X)``,
    both zero for every one-form.  They serve as a consistency check.
    """
    C = CommutatorField(X, Y)
    res = []
    for w in probe:
        wc = contract(w, C)
        res.append(wc - X.apply(contract(w, Y)) + contract(lie_field(None, w, X), Y))
        res.append(wc + Y.apply(contract(w, X)) - contract(lie_field(None, w, Y), X))
    C.probe_residuals = res
    return C


class StandardField(VectorField):
    """``Z = z D + sum D^r p d/d pi_r`` built on a controllable standard basis.

    ``sb`` must provide ``diffiety`` and ``contact_value(coord, p)``, the value
    of the contact form of an internal coordinate on the field with
    ``pi_0(Z) = p`` and ``Z x = 0``.
    """

    def __init__(self, sb, p: Expr, z: Expr = ZERO):
        super().__init__()
        self.sb = sb
        self.d = sb.diffiety
        self.p = p if isinstance(p, Expr) else Expr.const(p)
        self.z = z if isinstance(z, Expr) else Expr.const(z)

    def _component(self, a):
        d = self.d
        if isinstance(a, Var):
            return self.z if a in d.independents else ZERO
        if isinstance(a, Param):
            return ZERO
        out = self.sb.contact_value(a, self.p)
        if self.z:
            out = out + self.z * d.atom_total(1, a)
        return out


# --------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class Residual:
    form: int  # index into the basis
    index: tuple  # multi-index I of the iterate L_{D_I} w
    direction: int
    order: int
    value: Expr

    @property
    def ok(self) -> bool:
        return self.value.is_zero


@dataclass
class VariationReport:
    order: int
    residuals: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.residuals)

    @property
    def failures(self) -> list:
        return [r for r in self.residuals if not r.ok]

    @property
    def first_failure_order(self):
        f = self.failures
        return min(r.order for r in f) if f else None

    def __bool__(self):
        return self.passed


def order_zero_forms(d: Diffiety) -> list[OneForm]:
    """Contact forms of the order-zero coordinates (and ``dlambda`` for parameters)."""
    out = [contact_form(d, d.w(f)) for f in d.family_names]
    out += [OneForm.d(p) for p in d.params]
    return out


def check_variation(d: Diffiety, Z: VectorField, basis: Sequence[OneForm] | None = None, k: int = 4) -> VariationReport:
    """Test ``(L_{D_i} w)(Z) = D_i w(Z)`` on ``w = L_{D_I} b`` for basis forms ``b``, ``|I| < k``.

    A residual at ``|I| = l`` is reported with order ``l + 1``.
    """
    basis = list(basis) if basis is not None else order_zero_forms(d)
    report = VariationReport(k)
    for bi, b in enumerate(basis):
        iterates = {(): b}
        for level in range(k):
            for I in combinations_with_replacement(range(1, d.n + 1), level):
                w = iterates.get(I)
                if w is None:
                    w = lie_total(d, iterates[I[:-1]], I[-1])
                    iterates[I] = w
                wz = contract(w, Z)
                for i in range(1, d.n + 1):
                    wi = lie_total(d, w, i)
                    iterates.setdefault(multi_index(*I, i), wi)
                    r = contract(wi, Z) - d.total(i, wz)
                    report.residuals.append(Residual(bi, I, i, level + 1, r))
    return report


@dataclass(frozen=True)
class Generates:
    k: int

    def __bool__(self):
        return True

    def __str__(self):
        return f"generates (k={self.k})"


@dataclass(frozen=True)
class Exceeds:
    k: int

    def __bool__(self):
        return False

    def __str__(self):
        return f"exceeds bound k={self.k} (inconclusive)"


def group_check(Z: VectorField, gamma: Sequence[OneForm], k: int = 6):
    """Smallest ``kk <= k`` with ``L_Z^{kk+1} G`` inside ``G + L_Z G + ... + L_Z^kk G``."""
    layers = [list(gamma)]
    span = list(gamma)
    for kk in range(k + 1):
        nxt = [lie_field(None, w, Z) for w in layers[-1]]
        if all(w.is_zero or represent(w, span) for w in nxt):
            return Generates(kk)
        layers.append(nxt)
        span = span + nxt
    return Exceeds(k)


@dataclass(frozen=True)
class Contact:
    factor: Expr

    def __bool__(self):
        return True

    def __str__(self):
        return f"contact (factor {self.factor})"


class _NotContact:
    def __bool__(self):
        return False

    def __repr__(self):
        return "not_contact"

    __str__ = __repr__


NOT_CONTACT = _NotContact()


def contact_check(d: Diffiety, Z: VectorField):
    """``Contact(lam)`` when ``L_Z w = lam w`` modulo ``dx`` for the single contact form ``w``."""
    if len(d.family_names) != 1 or not d.is_free:
        raise ValueError("contact_check needs a trivial diffiety with one dependent variable")
    w = contact_form(d, d.w(d.family_names[0]))
    c = represent(lie_field(d, w, Z), [w], modulo_dx=True)
    return Contact(c[0]) if c else NOT_CONTACT


def poisson_bracket(F: Expr, G: Expr, f: Expr, d: Diffiety) -> Expr:
    """Generator ``X G - Y F`` of the bracket of the evolutionary fields with ``w_f(X) = F``, ``w_f(Y) = G``."""
    atoms = f.atoms()
    if len(atoms) != 1 or f != Expr.atom(next(iter(atoms))):
        raise ValueError("f must be a single coordinate")
    (c,) = atoms
    if not isinstance(c, Jet) or c.index:
        raise ValueError("f must be an order-zero dependent coordinate")
    X = evolutionary(d, {c.family: F})
    Y = evolutionary(d, {c.family: G})
    return X.apply(G) - Y.apply(F)
