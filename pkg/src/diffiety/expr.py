"""Exact symbolic kernel.

Expressions are canonical rational functions over Q in a set of *atoms*:
independent variables, parameters, jet coordinates, formal function symbols
(with a record of the partial derivatives taken) and a small table of
elementary functions.  Two expressions are equal iff their canonical forms
are identical, so ``==`` is decidable and deterministic.

Polynomials are sparse dicts ``{monomial: coefficient}`` where a monomial is
a tuple of ``(atom, exponent)`` pairs sorted by atom key.  Multivariate gcd
cancellation of non-monomial denominators is delegated to sympy's sparse
polynomial rings; everything else is done here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Callable, Iterable, Mapping, Union

from sympy import QQ
from sympy.polys.rings import ring

__all__ = [
    "Atom",
    "Var",
    "Param",
    "Jet",
    "Fn",
    "Elem",
    "Expr",
    "ZERO",
    "ONE",
    "ZeroDenominatorError",
    "SubstitutionDepthError",
    "NotPolynomialError",
    "const",
    "sym",
    "var",
    "param",
    "jet",
    "fn",
    "ln",
    "normalize",
    "partial",
    "derive",
    "substitute",
    "substitute_function",
    "collect",
    "euler_operator",
    "ELEMENTARY",
]


class ZeroDenominatorError(ZeroDivisionError):
    pass


class SubstitutionDepthError(RuntimeError):
    pass


class NotPolynomialError(ValueError):
    pass


# --------------------------------------------------------------------------
# atoms


class Atom:
    """Base class of the indeterminates.

    Atoms are immutable and totally ordered by ``key``; the first entry of
    every key is the kind rank, so atoms of different kinds never compare
    equal.
    """

    __slots__ = ("key", "_hash")
    rank = -1

    def _set_key(self, key):
        self.key = key
        self._hash = hash(key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Atom) and self.key == other.key

    def __lt__(self, other):
        return self.key < other.key

    def __le__(self, other):
        return self.key <= other.key

    def __gt__(self, other):
        return self.key > other.key

    def __ge__(self, other):
        return self.key >= other.key

    def __repr__(self):
        return f"{type(self).__name__}<{self}>"

    def __str__(self):
        from .render import atom_text

        return atom_text(self)

    @property
    def is_coordinate(self) -> bool:
        return False


class Var(Atom):
    """Independent variable ``x_i``."""

    __slots__ = ("name",)
    rank = 0

    def __init__(self, name: str):
        self.name = name
        self._set_key((0, name))

    @property
    def is_coordinate(self):
        return True


class Param(Atom):
    """A parameter such as the spectral parameter lambda; constant along total derivatives."""

    __slots__ = ("name",)
    rank = 1

    def __init__(self, name: str):
        self.name = name
        self._set_key((1, name))

    @property
    def is_coordinate(self):
        return True


class Jet(Atom):
    """Jet coordinate ``w^j_I``; the multi-index is stored sorted.

    ``dim`` is the number of independent variables of the ambient jet space;
    it only matters for naming and for scope checks.
    """

    __slots__ = ("family", "index", "dim")
    rank = 2

    def __init__(self, family: str, index: Iterable[int] = (), dim: int = 1):
        index = tuple(sorted(index))
        self.family = family
        self.index = index
        self.dim = dim
        self._set_key((2, family, dim, len(index), index))

    @property
    def order(self) -> int:
        return len(self.index)

    @property
    def is_coordinate(self):
        return True

    def shifted(self, direction: int) -> "Jet":
        return Jet(self.family, self.index + (direction,), self.dim)


class Fn(Atom):
    """Formal function symbol applied to coordinate atoms.

    ``derivs`` is the sorted multiset of argument positions already
    differentiated, so ``F_{u1}`` is ``Fn("F", args, (pos_of_u1,))``.
    """

    __slots__ = ("name", "args", "derivs")
    rank = 3

    def __init__(self, name: str, args: Iterable[Atom], derivs: Iterable[int] = ()):
        args = tuple(args)
        for a in args:
            if not isinstance(a, Atom) or not a.is_coordinate:
                raise TypeError(f"function arguments must be coordinates, got {a!r}")
        if len(set(args)) != len(args):
            raise ValueError("repeated function argument")
        derivs = tuple(sorted(derivs))
        if any(k < 0 or k >= len(args) for k in derivs):
            raise ValueError("derivative position out of range")
        self.name = name
        self.args = args
        self.derivs = derivs
        self._set_key((3, name, tuple(a.key for a in args), derivs))

    def diff(self, position: int) -> "Fn":
        return Fn(self.name, self.args, self.derivs + (position,))

    def derivative(self, coord: Atom) -> "Expr":
        """Formal partial by a coordinate; zero when ``coord`` is not an argument."""
        try:
            k = self.args.index(coord)
        except ValueError:
            return ZERO
        return Expr.atom(self.diff(k))

    @property
    def base(self) -> "Fn":
        return Fn(self.name, self.args)


class Elem(Atom):
    """Elementary function of one coordinate, differentiated by a registered rule."""

    __slots__ = ("name", "arg")
    rank = 4

    def __init__(self, name: str, arg: Atom):
        if name not in ELEMENTARY:
            raise ValueError(f"unknown elementary function {name!r}")
        if not isinstance(arg, Atom) or not arg.is_coordinate:
            raise TypeError("elementary function argument must be a coordinate")
        self.name = name
        self.arg = arg
        self._set_key((4, name, arg.key))


# --------------------------------------------------------------------------
# sparse polynomials over Q

Coeff = Union[int, Fraction]
ONE_POLY = {(): 1}


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, ex = a[i]
        y, ey = b[j]
        if x.key == y.key:
            out.append((x, ex + ey))
            i += 1
            j += 1
        elif x.key < y.key:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _padd(a, b, scale=1):
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pscale(a, c):
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def _pmul(a, b):
    if not a or not b:
        return {}
    if len(a) == 1 and () in a:
        return _pscale(b, a[()])
    if len(b) == 1 and () in b:
        return _pscale(a, b[()])
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _ppartial(a, atom):
    out = {}
    for m, c in a.items():
        for k, (x, e) in enumerate(m):
            if x == atom:
                nm = m[:k] + ((x, e - 1),) + m[k + 1 :] if e > 1 else m[:k] + m[k + 1 :]
                out[nm] = out.get(nm, 0) + c * e
                break
    return {m: c for m, c in out.items() if c}


def _patoms(a):
    return {x for m in a for x, _ in m}


def _mono_order_key(m):
    return (sum(e for _, e in m), tuple((x.key, e) for x, e in m))


def _lead(a):
    return max(a, key=_mono_order_key)


def _as_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


def _tidy(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@lru_cache(maxsize=64)
def _ring(k):
    return ring(",".join(f"t{i}" for i in range(k)), QQ)[0]


def _sympy_cancel(num, den):
    atoms = sorted(_patoms(num) | _patoms(den))
    pos = {a: i for i, a in enumerate(atoms)}
    R = _ring(len(atoms))

    def to_ring(p):
        d = {}
        for m, c in p.items():
            v = [0] * len(atoms)
            for x, e in m:
                v[pos[x]] = e
            c = _as_fraction(c)
            d[tuple(v)] = QQ(c.numerator, c.denominator)
        return R.from_dict(d)

    def from_ring(p):
        out = {}
        for exps, c in p.items():
            m = tuple((atoms[i], e) for i, e in enumerate(exps) if e)
            out[m] = _tidy(Fraction(int(c.numerator), int(c.denominator)))
        return out

    p, q = to_ring(num).cancel(to_ring(den))
    return from_ring(p), from_ring(q)


def _canonical(num, den):
    """Reduce ``num/den`` to canonical form (gcd 1, primitive integral denominator)."""
    if not den:
        raise ZeroDenominatorError("division by zero expression")
    if not num:
        return {}, ONE_POLY
    if len(den) == 1:
        (m, c), = den.items()
        if m:
            # monomial denominator: cancel the common monomial factor only
            common = dict(m)
            for nm in num:
                exps = dict(nm)
                for x in list(common):
                    e = min(common[x], exps.get(x, 0))
                    if e:
                        common[x] = e
                    else:
                        del common[x]
                if not common:
                    break
            if common:
                num = {_mono_div(nm, common): v for nm, v in num.items()}
                m = _mono_div(m, common)
        if not m:
            return {k: _tidy(_as_fraction(v) / c) for k, v in num.items()}, ONE_POLY
        return {k: _tidy(_as_fraction(v) / c) for k, v in num.items()}, {m: 1}
    num, den = _sympy_cancel(num, den)
    if len(den) == 1 and () in den:
        c = den[()]
        return {k: _tidy(_as_fraction(v) / c) for k, v in num.items()}, ONE_POLY
    # primitive integral denominator with positive leading coefficient
    fr = [_as_fraction(v) for v in den.values()]
    l = 1
    for f in fr:
        l = l * f.denominator // gcd(l, f.denominator)
    g = 0
    for f in fr:
        g = gcd(g, f.numerator * (l // f.denominator))
    scale = Fraction(l, g)
    if den[_lead(den)] < 0:
        scale = -scale
    return (
        {k: _tidy(_as_fraction(v) * scale) for k, v in num.items()},
        {k: _tidy(_as_fraction(v) * scale) for k, v in den.items()},
    )


def _mono_div(m, common):
    out = []
    for x, e in m:
        e -= common.get(x, 0)
        if e:
            out.append((x, e))
    return tuple(out)


# --------------------------------------------------------------------------
# expressions


def _coerce(other):
    if isinstance(other, Expr):
        return other
    if isinstance(other, Atom):
        return Expr.atom(other)
    if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
        return Expr.const(other)
    return NotImplemented


class Expr:
    """Canonical fraction ``num/den`` of sparse polynomials over Q."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=None, den=None, *, canonical=False):
        num = {} if num is None else num
        den = ONE_POLY if den is None else den
        if not canonical:
            num, den = _canonical(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # constructors
    @staticmethod
    def const(value) -> "Expr":
        value = Fraction(value)
        if not value:
            return ZERO
        return Expr({(): _tidy(value)}, canonical=True)

    @staticmethod
    def atom(a: Atom) -> "Expr":
        return Expr({((a, 1),): 1}, canonical=True)

    # structure
    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and () in self.den

    @property
    def is_constant(self) -> bool:
        return self.is_polynomial and (not self.num or (len(self.num) == 1 and () in self.num))

    @property
    def value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError("expression is not a constant")
        return Fraction(self.num.get((), 0))

    def atoms(self) -> set:
        return _patoms(self.num) | _patoms(self.den)

    def coords(self) -> set:
        """Coordinate atoms, looking through function and elementary arguments."""
        out = set()
        for a in self.atoms():
            if isinstance(a, Fn):
                out.update(a.args)
            elif isinstance(a, Elem):
                out.add(a.arg)
            else:
                out.add(a)
        return out

    def free_of(self, a: Atom) -> bool:
        return a not in self.coords() and a not in self.atoms()

    def numerator(self) -> "Expr":
        return Expr(self.num, canonical=True)

    def denominator(self) -> "Expr":
        return Expr(self.den, canonical=True)

    def terms(self):
        """``(coefficient, monomial)`` pairs of a polynomial, in render order."""
        if not self.is_polynomial:
            raise NotPolynomialError("expression has a denominator")
        items = sorted(self.num.items(), key=lambda t: _mono_order_key(t[0]), reverse=True)
        return [(Fraction(c), m) for m, c in items]

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.num), default=0)

    # comparisons
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # arithmetic
    def __neg__(self):
        return Expr({m: -c for m, c in self.num.items()}, self.den, canonical=True)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            num = _padd(self.num, other.num)
            if self.is_polynomial:
                return Expr(num, canonical=True)
            return Expr(num, self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return Expr(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.is_polynomial and other.is_polynomial:
            return Expr(_pmul(self.num, other.num), canonical=True)
        return Expr(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDenominatorError("division by zero expression")
        return Expr(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            if not self.num:
                raise ZeroDenominatorError("negative power of zero")
            return Expr(self.den, self.num) ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __str__(self):
        from .render import text

        return text(self)

    def __repr__(self):
        return f"Expr({self})"


ZERO = Expr({}, canonical=True)
ONE = Expr({(): 1}, canonical=True)


def const(value) -> Expr:
    return Expr.const(value)


def sym(a: Atom) -> Expr:
    return Expr.atom(a)


def var(name: str) -> Expr:
    return Expr.atom(Var(name))


def param(name: str) -> Expr:
    return Expr.atom(Param(name))


def jet(family: str, *index: int, dim: int = 1) -> Expr:
    return Expr.atom(Jet(family, index, dim))


def _atom_of(e) -> Atom:
    if isinstance(e, Atom):
        return e
    if isinstance(e, Expr) and len(e.atoms()) == 1 and e == Expr.atom(next(iter(e.atoms()))):
        return next(iter(e.atoms()))
    raise TypeError(f"expected a single atom, got {e}")


def fn(name: str, *args, derivs: Iterable = ()) -> Expr:
    """Formal function symbol; ``derivs`` may name arguments or positions."""
    atoms = tuple(_atom_of(a) for a in args)
    pos = []
    for d in derivs:
        pos.append(d if isinstance(d, int) else atoms.index(_atom_of(d)))
    return Expr.atom(Fn(name, atoms, pos))


def ln(arg) -> Expr:
    return Expr.atom(Elem("ln", _atom_of(arg)))


ELEMENTARY: Mapping[str, Callable[[Atom], Expr]] = {
    "ln": lambda a: ONE / Expr.atom(a),
}


def normalize(tree) -> Expr:
    """Canonical form of a raw tree of nested ``(op, *args)`` tuples.

    Leaves are atoms, numbers or expressions; ops are ``+ - * / ^``.
    """
    if isinstance(tree, tuple):
        op, *args = tree
        vals = [normalize(a) if not (op == "^" and i == 1) else a for i, a in enumerate(args)]
        if op == "+":
            out = ZERO
            for v in vals:
                out = out + v
            return out
        if op == "*":
            out = ONE
            for v in vals:
                out = out * v
            return out
        if op == "-":
            return -vals[0] if len(vals) == 1 else vals[0] - vals[1]
        if op == "/":
            return vals[0] / vals[1]
        if op == "^":
            return vals[0] ** int(vals[1])
        raise ValueError(f"unknown operator {op!r}")
    out = _coerce(tree)
    if out is NotImplemented:
        raise TypeError(f"cannot normalize {tree!r}")
    return out


# --------------------------------------------------------------------------
# calculus


def _atom_image(b: Atom, image: Callable[[Atom], Expr]) -> Expr:
    if isinstance(b, Fn):
        out = ZERO
        for k, a in enumerate(b.args):
            da = image(a)
            if da:
                out = out + da * Expr.atom(b.diff(k))
        return out
    if isinstance(b, Elem):
        da = image(b.arg)
        return ELEMENTARY[b.name](b.arg) * da if da else ZERO
    return image(b)


def _derive_poly(poly, images) -> Expr:
    acc = {}
    rational = {}
    for b, img in images.items():
        pb = _ppartial(poly, b)
        if not pb:
            continue
        if img.is_polynomial:
            acc = _padd(acc, _pmul(pb, img.num))
        else:
            key = frozenset(img.den.items())
            den, part = rational.get(key, (img.den, {}))
            rational[key] = (den, _padd(part, _pmul(pb, img.num)))
    out = Expr(acc, canonical=True)
    for den, part in rational.values():
        out = out + Expr(part, den)
    return out


def derive(e: Expr, image: Callable[[Atom], Expr]) -> Expr:
    """Apply the derivation that sends each coordinate atom ``c`` to ``image(c)``.

    Function symbols and elementary functions are expanded by the chain rule
    over their arguments.
    """
    images = {}
    for b in e.atoms():
        v = _atom_image(b, image)
        if v:
            images[b] = v
    if not images:
        return ZERO
    dn = _derive_poly(e.num, images)
    if e.is_polynomial:
        return dn
    dd = _derive_poly(e.den, images)
    num, den = e.numerator(), e.denominator()
    return (dn * den - num * dd) / (den * den)


def partial(e: Expr, a: Atom) -> Expr:
    """Partial derivative treating distinct coordinates as independent.

    Differentiating by a function-symbol atom itself treats it as an
    indeterminate.
    """
    a = _atom_of(a)
    if not a.is_coordinate:
        images = {a: ONE} if a in e.atoms() else {}
        if not images:
            return ZERO
        dn = _derive_poly(e.num, images)
        if e.is_polynomial:
            return dn
        dd = _derive_poly(e.den, images)
        num, den = e.numerator(), e.denominator()
        return (dn * den - num * dd) / (den * den)
    return derive(e, lambda c: ONE if c == a else ZERO)


def _rename_fn(b: Fn, bindings) -> Atom:
    args = []
    for a in b.args:
        if a in bindings:
            try:
                args.append(_atom_of(bindings[a]))
            except TypeError:
                raise ValueError(
                    f"substitution would give {b.name} a compound argument"
                ) from None
        else:
            args.append(a)
    return Fn(b.name, args, b.derivs)


def _eval_poly(poly, bindings) -> Expr:
    cache = {}

    def power(x, e):
        k = (x, e)
        if k not in cache:
            cache[k] = bindings[x] ** e
        return cache[k]

    free = {}
    out = ZERO
    for m, c in poly.items():
        keep = []
        factor = None
        for x, e in m:
            if x in bindings:
                p = power(x, e)
                factor = p if factor is None else factor * p
            else:
                keep.append((x, e))
        if factor is None:
            free[tuple(keep)] = free.get(tuple(keep), 0) + c
        else:
            out = out + factor * Expr({tuple(keep): c}, canonical=True)
    return out + Expr({m: c for m, c in free.items() if c}, canonical=True)


def substitute(e: Expr, bindings: Mapping, depth: int | None = None) -> Expr:
    """Simultaneous substitution of atoms, then normalization.

    With ``depth`` set, substitution is repeated until no bound atom
    remains, raising :class:`SubstitutionDepthError` past ``depth`` rounds.
    """
    b = {}
    for k, v in bindings.items():
        k = _atom_of(k)
        v = _coerce(v)
        if v is NotImplemented:
            raise TypeError(f"cannot bind {k} to {v!r}")
        b[k] = v
    if not b:
        return e
    rounds = 0
    while True:
        result = _substitute_once(e, b)
        if depth is None:
            return result
        if not (result.atoms() | result.coords()) & b.keys():
            return result
        rounds += 1
        if rounds >= depth:
            raise SubstitutionDepthError(f"substitution not stable after {depth} rounds")
        e = result


def _substitute_once(e: Expr, b) -> Expr:
    renames = {}
    for a in e.atoms():
        if isinstance(a, Fn) and any(x in b for x in a.args) and a not in b:
            renames[a] = Expr.atom(_rename_fn(a, b))
        elif isinstance(a, Elem) and a.arg in b and a not in b:
            renames[a] = Expr.atom(Elem(a.name, _atom_of(b[a.arg])))
    full = {**renames, **b}
    num = _eval_poly(e.num, full)
    if e.is_polynomial:
        return num
    den = _eval_poly(e.den, full)
    if den.is_zero:
        raise ZeroDenominatorError("substitution makes the denominator vanish")
    return num / den


def substitute_function(e: Expr, name: str, candidate) -> Expr:
    """Replace every formal symbol ``name`` (and its recorded partials) by ``candidate``.

    ``candidate`` must be written in the symbol's argument coordinates.
    """
    candidate = _coerce(candidate)
    bindings = {}
    for a in e.atoms():
        if isinstance(a, Fn) and a.name == name:
            extra = candidate.coords() - set(a.args)
            if extra:
                raise ValueError(
                    f"candidate for {name} uses {sorted(map(str, extra))} outside its arguments"
                )
            v = candidate
            for k in a.derivs:
                v = partial(v, a.args[k])
            bindings[a] = v
    return substitute(e, bindings) if bindings else e


def collect(e: Expr, a) -> list:
    """Coefficients of ``e`` as a polynomial in ``a``, by descending degree."""
    a = _atom_of(a)
    if a in _patoms(e.den):
        raise NotPolynomialError(f"expression is not polynomial in {a}")
    groups = {}
    for m, c in e.num.items():
        k = 0
        rest = []
        for x, ex in m:
            if x == a:
                k = ex
            else:
                rest.append((x, ex))
        g = groups.setdefault(k, {})
        g[tuple(rest)] = g.get(tuple(rest), 0) + c
    den = e.denominator()
    return [
        (k, Expr(groups[k], canonical=True) / den if not e.is_polynomial else Expr(groups[k], canonical=True))
        for k in sorted(groups, reverse=True)
    ]


def euler_operator(e: Expr, family: str, derivation) -> Expr:
    """Variational derivative ``sum_r (-D)^r d e / d q_r`` for one jet family.

    ``derivation`` is a one-direction derivation (callable on expressions)
    whose scope covers ``e``; its ``direction`` attribute names the direction
    the family is differentiated along.
    """
    direction = derivation.direction
    orders = {}
    for c in e.coords():
        if isinstance(c, Jet) and c.family == family:
            if any(i != direction for i in c.index):
                raise ValueError(f"{c} is not on the derivation's direction")
            orders[c.order] = c
    if not orders:
        # still validate the scope of e
        derivation(e)
        return ZERO
    dim = next(iter(orders.values())).dim
    out = ZERO
    for r in range(max(orders) + 1):
        term = partial(e, Jet(family, (direction,) * r, dim))
        for _ in range(r):
            term = -derivation(term)
        out = out + term
    return out
