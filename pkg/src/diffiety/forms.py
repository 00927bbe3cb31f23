"""One-forms on a diffiety.

A one-form is a finite combination of coordinate differentials ``dx_i``,
``dw^j_I`` and ``dlambda`` with expression coefficients.  Lie derivatives
are expanded with the Leibniz rule ``L(g dh) = (Lg) dh + g d(Lh)`` on this
cobasis, so two-forms never appear.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from .expr import ONE, ZERO, Atom, Expr, Var, partial
from .jet import Diffiety
from . import linalg

__all__ = [
    "OneForm",
    "differential",
    "contact_form",
    "lie_total",
    "contract",
    "lie_field",
    "represent",
    "Coefficients",
    "NotInSpan",
    "combination",
]


class OneForm:
    """Immutable finite map from coordinate atoms to coefficients (``{a: c}`` means ``c da``)."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[Atom, Expr] | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c = {}
        for a, v in items:
            if not isinstance(a, Atom) or not a.is_coordinate:
                raise TypeError(f"d{a} is not a coordinate differential")
            if not isinstance(v, Expr):
                v = Expr.const(v)
            if a in c:
                v = c[a] + v
            if v:
                c[a] = v
            else:
                c.pop(a, None)
        self._c = dict(sorted(c.items()))
        self._hash = None

    @staticmethod
    def d(a) -> "OneForm":
        if isinstance(a, Expr):
            (a,) = a.atoms()
        return OneForm({a: ONE})

    def items(self):
        return self._c.items()

    def support(self) -> list:
        return list(self._c)

    def __getitem__(self, a: Atom) -> Expr:
        return self._c.get(a, ZERO)

    @property
    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero
        return isinstance(other, OneForm) and self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._c.items()))
        return self._hash

    def __add__(self, other: "OneForm") -> "OneForm":
        if not isinstance(other, OneForm):
            return NotImplemented
        out = dict(self._c)
        for a, v in other._c.items():
            out[a] = out[a] + v if a in out else v
        return OneForm(out)

    def __neg__(self):
        return OneForm({a: -v for a, v in self._c.items()})

    def __sub__(self, other: "OneForm") -> "OneForm":
        if not isinstance(other, OneForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, g) -> "OneForm":
        if isinstance(g, OneForm):
            return NotImplemented
        if not isinstance(g, Expr):
            g = Expr.const(g)
        if not g:
            return OneForm()
        return OneForm({a: v * g for a, v in self._c.items()})

    __rmul__ = __mul__

    def __truediv__(self, g) -> "OneForm":
        if not isinstance(g, Expr):
            g = Expr.const(g)
        return self * (ONE / g)

    def drop_dx(self) -> "OneForm":
        """The form with every ``dx_i`` term removed."""
        return OneForm({a: v for a, v in self._c.items() if not isinstance(a, Var)})

    def __str__(self):
        from .render import render

        return render(self, "text")

    def __repr__(self):
        return f"OneForm({self})"


def differential(f: Expr) -> OneForm:
    """``df`` expanded over the coordinates ``f`` depends on (formal symbols by the chain rule)."""
    if not isinstance(f, Expr):
        f = Expr.const(f)
    return OneForm({c: partial(f, c) for c in f.coords()})


def contact_form(d: Diffiety, f: Expr) -> OneForm:
    """``w_f = df - sum_i (D_i f) dx_i``."""
    df = differential(f)
    if not d.independents:
        return df
    corr = OneForm({x: d.total(i, f) for i, x in enumerate(d.independents, 1)})
    return df - corr


def lie_total(d: Diffiety, w: OneForm, i: int = 1) -> OneForm:
    """Lie derivative of ``w`` along the total derivative ``D_i``."""
    out = OneForm()
    for a, g in w.items():
        out = out + OneForm({a: d.total(i, g)}) + differential(d.atom_total(i, a)) * g
    return out


def contract(w: OneForm, Z) -> Expr:
    """``w(Z)``; ``Z`` is anything with a ``component(atom)`` method, or a callable on atoms."""
    comp: Callable[[Atom], Expr] = getattr(Z, "component", Z)
    out = ZERO
    for a, g in w.items():
        z = comp(a)
        if z:
            out = out + g * z
    return out


def lie_field(d: Diffiety | None, w: OneForm, Z) -> OneForm:
    """Lie derivative of ``w`` along a vector field: ``sum (Zg) dh + g d(Zh)``."""
    out = OneForm()
    for a, g in w.items():
        out = out + OneForm({a: Z.apply(g)}) + differential(Z.component(a)) * g
    return out


class Coefficients(list):
    """Coefficient list returned by :func:`represent` (always truthy)."""

    def __bool__(self):
        return True


class _NotInSpan:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        return False

    def __repr__(self):
        return "NotInSpan"


NotInSpan = _NotInSpan()


def represent(w: OneForm, basis: Sequence[OneForm], modulo_dx: bool = False):
    """Coefficients ``c`` with ``w = sum c_k basis_k`` (optionally modulo ``dx_i``), or ``NotInSpan``.

    The coefficients are found by exact elimination over the function field.
    When the basis is dependent, one solution is returned with the
    redundant coefficients set to zero.
    """
    rows = set(w.support())
    for b in basis:
        rows.update(b.support())
    if modulo_dx:
        rows = {a for a in rows if not isinstance(a, Var)}
    rows = sorted(rows)
    if not basis:
        return Coefficients() if all(not w[a] for a in rows) else NotInSpan
    matrix = [[b[a] for b in basis] for a in rows]
    sol = linalg.solve(matrix, [w[a] for a in rows])
    return NotInSpan if sol is None else Coefficients(sol)


def combination(coeffs: Sequence[Expr], basis: Sequence[OneForm]) -> OneForm:
    out = OneForm()
    for c, b in zip(coeffs, basis):
        if c:
            out = out + b * c
    return out
