"""Jet spaces, diffieties in solved form and total derivatives.

A :class:`Diffiety` is an infinite jet space together with solved-form
constraints ``w^j_L = rhs`` on leader coordinates.  Coordinates above a
leader are never stored; they resolve lazily by prolonging the leader's
right-hand side with total derivatives, and the result is memoized.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .expr import ONE, ZERO, Atom, Expr, Jet, Param, Var, derive

__all__ = [
    "MultiIndex",
    "multi_index",
    "contains",
    "difference",
    "Family",
    "JetSpec",
    "Diffiety",
    "Derivation",
    "ScopeError",
    "ConstraintError",
    "OrderBoundError",
    "build_diffiety",
    "free_jets",
    "DEFAULT_ORDER_BOUND",
]

DEFAULT_ORDER_BOUND = 32

MultiIndex = tuple


class ScopeError(ValueError):
    """An expression mentions an atom the diffiety does not know."""


class ConstraintError(ValueError):
    pass


class OrderBoundError(RuntimeError):
    pass


def multi_index(*dirs: int) -> tuple:
    return tuple(sorted(dirs))


def contains(big: tuple, small: tuple) -> bool:
    """Multiset containment ``small <= big``."""
    rest = list(big)
    for i in small:
        try:
            rest.remove(i)
        except ValueError:
            return False
    return True


def difference(big: tuple, small: tuple) -> tuple:
    rest = list(big)
    for i in small:
        rest.remove(i)
    return tuple(rest)


@dataclass(frozen=True)
class Family:
    name: str
    leaders: tuple = ()  # multi-indices of constrained leader coordinates


@dataclass(frozen=True)
class JetSpec:
    n: int
    families: tuple
    independents: tuple = ()
    params: tuple = ()

    def family(self, name: str) -> Family:
        for f in self.families:
            if f.name == name:
                return f
        raise KeyError(name)


class Diffiety:
    """Jet space with solved-form constraints and lazily prolonged coordinates.

    Parameters
    ----------
    n : number of total derivatives (directions ``1..n``).
    families : names of the dependent-variable families.
    constraints : ``{Jet leader: rhs}``; right-hand sides may only mention
        internal (unconstrained) coordinates.
    independents : names of the independent variables, one per direction;
        an empty tuple gives a *restricted* derivation without ``d/dx`` terms.
    params : names of parameters (constant along every total derivative).
    """

    def __init__(
        self,
        n: int,
        families: Sequence[str],
        constraints: Mapping[Jet, Expr] | None = None,
        independents: Sequence[str] | None = None,
        params: Sequence[str] = (),
        order_bound: int = DEFAULT_ORDER_BOUND,
    ):
        if independents is None:
            independents = ("x",) if n == 1 else tuple(f"x{i}" for i in range(1, n + 1))
        if independents and len(independents) != n:
            raise ValueError("need one independent variable per direction")
        self.n = n
        self.family_names = tuple(families)
        self.independents = tuple(Var(x) for x in independents)
        self.params = tuple(Param(p) for p in params)
        self.order_bound = order_bound
        self._rhs: dict[Jet, Expr] = {}
        leaders: dict[str, list] = {f: [] for f in self.family_names}
        for lead, rhs in (constraints or {}).items():
            if not isinstance(lead, Jet):
                lead = next(iter(lead.atoms()))
            if lead.family not in leaders or lead.dim != n:
                raise ConstraintError(f"leader {lead} is not a coordinate of this jet space")
            leaders[lead.family].append(lead.index)
            self._rhs[lead] = rhs if isinstance(rhs, Expr) else Expr.const(rhs)
        for fam, ls in leaders.items():
            for a in ls:
                for b in ls:
                    if a != b and contains(a, b):
                        raise ConstraintError(f"leader {fam}{list(a)} lies above {fam}{list(b)}")
        self._leaders = {f: tuple(sorted(ls)) for f, ls in leaders.items()}
        self.spec = JetSpec(
            n,
            tuple(Family(f, self._leaders[f]) for f in self.family_names),
            tuple(independents),
            tuple(params),
        )
        for lead, rhs in self._rhs.items():
            self._check_scope(rhs)
            for c in rhs.coords():
                if isinstance(c, Jet) and not self.is_internal(c):
                    raise ConstraintError(
                        f"right-hand side of {lead} uses constrained coordinate {c}"
                    )
        self._memo: dict[Jet, Expr] = {}
        self._dmemo: dict[tuple, Expr] = {}
        self._lock = threading.RLock()

    # coordinates
    def coord(self, family: str, *dirs: int) -> Jet:
        if family not in self._leaders:
            raise ScopeError(f"unknown family {family!r}")
        return Jet(family, dirs, self.n)

    def x(self, i: int = 1) -> Expr:
        return Expr.atom(self.independents[i - 1])

    def w(self, family: str, *dirs: int) -> Expr:
        """Resolved value of the coordinate ``family_dirs``."""
        return self.resolve(family, multi_index(*dirs))

    def leader_of(self, c: Jet):
        for lead in self._leaders.get(c.family, ()):
            if contains(c.index, lead):
                return lead
        return None

    def is_internal(self, c: Atom) -> bool:
        if isinstance(c, Jet):
            return c.family in self._leaders and c.dim == self.n and self.leader_of(c) is None
        return c in self.independents or c in self.params

    @property
    def is_free(self) -> bool:
        return not self._rhs

    def constraints(self) -> dict:
        return dict(self._rhs)

    def resolve(self, family: str, index: Iterable[int]) -> Expr:
        c = Jet(family, index, self.n)
        if family not in self._leaders:
            raise ScopeError(f"unknown family {family!r}")
        if c.order > self.order_bound:
            raise OrderBoundError(f"{c} exceeds the order bound {self.order_bound}")
        lead = self.leader_of(c)
        if lead is None:
            return Expr.atom(c)
        with self._lock:
            if c in self._memo:
                return self._memo[c]
        if c.index == lead:
            value = self._rhs[Jet(family, lead, self.n)]
        else:
            rest = difference(c.index, lead)
            i = max(rest)
            value = self.total(i, self.resolve(family, difference(c.index, (i,))))
        with self._lock:
            return self._memo.setdefault(c, value)

    def reduce(self, e: Expr) -> Expr:
        """Replace every constrained coordinate in ``e`` by its resolved value."""
        from .expr import substitute

        self._check_scope(e)
        bind = {c: self.resolve(c.family, c.index) for c in e.coords() if isinstance(c, Jet) and not self.is_internal(c)}
        return substitute(e, bind) if bind else e

    def _check_scope(self, e: Expr):
        for c in e.coords():
            if isinstance(c, Jet):
                if c.family not in self._leaders or c.dim != self.n:
                    raise ScopeError(f"{c} is not a coordinate of this diffiety")
            elif isinstance(c, Var):
                if c not in self.independents:
                    raise ScopeError(f"{c} is not an independent variable of this diffiety")
            elif isinstance(c, Param):
                if c not in self.params:
                    raise ScopeError(f"{c} is not a declared parameter")

    # total derivatives
    def atom_total(self, i: int, c: Atom) -> Expr:
        """``D_i`` of a coordinate atom."""
        key = (i, c)
        with self._lock:
            if key in self._dmemo:
                return self._dmemo[key]
        if isinstance(c, Var):
            if c not in self.independents:
                raise ScopeError(f"{c} is not an independent variable of this diffiety")
            value = ONE if self.independents.index(c) == i - 1 else ZERO
        elif isinstance(c, Param):
            if c not in self.params:
                raise ScopeError(f"{c} is not a declared parameter")
            value = ZERO
        elif isinstance(c, Jet):
            if c.family not in self._leaders or c.dim != self.n:
                raise ScopeError(f"{c} is not a coordinate of this diffiety")
            if self.leader_of(c) is not None:
                value = self.total(i, self.resolve(c.family, c.index))
            else:
                value = self.resolve(c.family, c.index + (i,))
        else:
            raise ScopeError(f"{c} is not a coordinate")
        with self._lock:
            return self._dmemo.setdefault(key, value)

    def total(self, i: int, f: Expr) -> Expr:
        """Apply the total derivative ``D_i`` to ``f``."""
        if not 1 <= i <= self.n:
            raise ValueError(f"direction {i} out of range 1..{self.n}")
        return derive(f, lambda c: self.atom_total(i, c))

    def iterated(self, index: Iterable[int], f: Expr) -> Expr:
        """``D_I f`` for a multi-index ``I``."""
        for i in index:
            f = self.total(i, f)
        return f

    def derivation(self, i: int = 1) -> "Derivation":
        return Derivation(self, i)

    def __repr__(self):
        cons = ", ".join(f"{k} = {v}" for k, v in self._rhs.items())
        return f"Diffiety(n={self.n}, families={self.family_names}, {{{cons}}})"


@dataclass(frozen=True)
class Derivation:
    """The total derivative ``D_direction`` of a diffiety, as a callable."""

    diffiety: Diffiety
    direction: int = 1

    def __call__(self, f: Expr) -> Expr:
        return self.diffiety.total(self.direction, f)

    def power(self, f: Expr, r: int) -> Expr:
        for _ in range(r):
            f = self(f)
        return f


def build_diffiety(spec: JetSpec, constraints: Mapping[Jet, Expr] | None = None, **kw) -> Diffiety:
    return Diffiety(
        spec.n,
        [f.name for f in spec.families],
        constraints,
        independents=spec.independents or None,
        params=spec.params,
        **kw,
    )


def free_jets(m: int, n: int, **kw) -> Diffiety:
    """The trivial diffiety ``M(m, n)`` with families ``w1..wm``."""
    return Diffiety(n, [f"w{j}" for j in range(1, m + 1)], **kw)
