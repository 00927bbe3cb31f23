"""Standard basis and symmetry conditions for ``u'' = F(x, u, v, u', v', v'')``.

Coordinates are ``x, u0, u1, v0, v1, ...`` with the constraint ``u2 = F``.
Starting from the contact basis ``alpha0, alpha1, beta_r`` the reduction
passes to ``beta, gamma, beta_r`` with

    L_D beta  = F_u0 gamma + F_u1 beta + B beta0
    L_D gamma = beta + C beta0

and, when ``det(C, -B; M, N) != 0``, to the standard basis
``pi0 = C beta - B gamma``, ``pi_{r+1} = L_D pi_r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..expr import ONE, ZERO, Expr, Fn, Jet, Param, fn, jet, partial, substitute, var
from ..fields import StandardField, group_check
from ..forms import NotInSpan, OneForm, contact_form, differential, lie_field, lie_total, represent
from ..jet import Diffiety
from .. import linalg
from .systems import DeterminingSystem, PivotError

__all__ = [
    "ODE2_ARGS",
    "ode2_diffiety",
    "formal_F",
    "Classification",
    "PiCombo",
    "StandardBasisResult",
    "standard_basis_ode2",
    "variation_solution_ode2",
    "determining_ode2",
    "evolutionary_restriction_ode2",
    "symmetry_check_ode2",
    "SymmetryCheck",
    "adjoint_probe",
    "AdjointProbe",
]

X = var("x")
U0, U1 = jet("u"), jet("u", 1)
V = [jet("v", *(1,) * r) for r in range(12)]
ODE2_ARGS = (X, U0, V[0], U1, V[1], V[2])


def formal_F() -> Expr:
    return fn("F", *ODE2_ARGS)


def ode2_diffiety(F: Expr | None = None, **kw) -> Diffiety:
    F = formal_F() if F is None else F
    return Diffiety(1, ["u", "v"], {Jet("u", (1, 1)): F}, **kw)


class Classification(Enum):
    CONTROLLABLE = "controllable"
    DEGENERATE_FIRST_ORDER = "degenerate-first-order"  # F = D G, G = G(x, u0, v0, u1, v1)
    DEGENERATE_SECOND_ORDER = "degenerate-second-order"  # F = D^2 G, G = G(x, u0, v0)


class PiCombo:
    """``sum_r c_r pi_r`` with function coefficients; ``D`` acts by ``L_D pi_r = pi_{r+1}``."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = {r: v for r, v in (c or {}).items() if v}

    def __add__(self, o):
        out = dict(self.c)
        for r, v in o.c.items():
            out[r] = out.get(r, ZERO) + v
        return PiCombo(out)

    def __sub__(self, o):
        return self + o.scale(-ONE)

    def scale(self, g: Expr) -> "PiCombo":
        return PiCombo({r: v * g for r, v in self.c.items()})

    def lie(self, D) -> "PiCombo":
        out = {}
        for r, v in self.c.items():
            out[r] = out.get(r, ZERO) + D(v)
            out[r + 1] = out.get(r + 1, ZERO) + v
        return PiCombo(out)

    @property
    def top(self) -> int:
        return max(self.c, default=-1)

    def evaluate(self, values) -> Expr:
        """``sum c_r values[r]`` (``values[r]`` is ``pi_r(Z)`` or the form ``pi_r``)."""
        out = None
        for r, v in sorted(self.c.items()):
            t = values[r] * v
            out = t if out is None else out + t
        return out if out is not None else ZERO


@dataclass
class StandardBasisResult:
    F: Expr
    diffiety: Diffiety
    A: Expr
    B: Expr
    C: Expr
    M: Expr
    N: Expr
    Delta: Expr
    forms: dict  # alpha0, alpha1, alpha, beta, gamma, beta0.., pi0, pi1
    classification: Classification
    dictionary: dict = field(default_factory=dict)  # name -> PiCombo
    G: Expr | None = None  # potential found for degenerate cases
    _pvals: dict = field(default_factory=dict, repr=False)

    @property
    def D(self):
        return self.diffiety.derivation(1)

    @property
    def controllable(self) -> bool:
        return self.classification is Classification.CONTROLLABLE

    def beta_form(self, r: int) -> OneForm:
        return contact_form(self.diffiety, V[r])

    def pi_forms(self, k: int) -> list:
        out = [self.forms["pi0"]]
        for _ in range(k):
            out.append(lie_total(self.diffiety, out[-1]))
        return out

    def dict_entry(self, name: str) -> PiCombo:
        """Dictionary entry for ``alpha0``, ``alpha1``, ``beta``, ``gamma`` or ``beta<r>``."""
        if not self.controllable:
            raise ValueError(f"standard basis is {self.classification.value}; no dictionary")
        if not self.dictionary:
            _build_dictionary(self)  # deferred: costly for large F
        if name not in self.dictionary:
            if name.startswith("beta") and name[4:].isdigit():
                r = int(name[4:])
                self.dictionary[name] = self.dict_entry(f"beta{r - 1}").lie(self.D)
            else:
                raise KeyError(name)
        return self.dictionary[name]

    def _p_iterates(self, p: Expr, k: int) -> list:
        seq = self._pvals.setdefault(p, [p])
        while len(seq) <= k:
            seq.append(self.D(seq[-1]))
        return seq

    def value(self, name: str, p: Expr) -> Expr:
        """Value on the field with ``pi0(Z) = p`` and ``Z x = 0``."""
        combo = self.dict_entry(name)
        return combo.evaluate(self._p_iterates(p, combo.top))

    def contact_value(self, a, p: Expr) -> Expr:
        if isinstance(a, Jet) and a.family == "u" and a.order <= 1:
            return self.value(f"alpha{a.order}", p)
        if isinstance(a, Jet) and a.family == "v":
            return self.value(f"beta{a.order}", p)
        raise ValueError(f"{a} is not an internal coordinate")


def _coefficients(w: OneForm, basis: list, what: str) -> list:
    c = represent(w, basis)
    if c is NotInSpan:
        raise ArithmeticError(f"{what} is not in the span of the expected forms")
    return c


def standard_basis_ode2(F: Expr | None = None, find_potential: bool = True) -> StandardBasisResult:
    d = ode2_diffiety(F)
    F = d.constraints()[Jet("u", (1, 1))]
    D = d.derivation(1)
    Fu0, Fu1, Fv0, Fv1, Fv2 = (partial(F, a) for a in (U0, U1, V[0], V[1], V[2]))

    alpha0 = contact_form(d, U0)
    alpha1 = contact_form(d, U1)
    b = [contact_form(d, V[r]) for r in range(3)]
    alpha = alpha1 - b[1] * Fv2
    A = Fv1 + Fu1 * Fv2 - D(Fv2)
    beta = alpha - b[0] * A
    gamma = alpha0 - b[0] * Fv2
    B = Fu0 * Fv2 + Fu1 * A + Fv0 - D(A)
    C = A - D(Fv2)
    pi0 = beta * C - gamma * B
    pi1 = lie_total(d, pi0)
    MN = represent(pi1, [beta, gamma])
    if MN is NotInSpan:
        raise ArithmeticError("L_D pi0 left the span of beta and gamma")
    M, N = MN
    Delta = C * N + B * M
    if B.is_zero and C.is_zero:
        cls = Classification.DEGENERATE_SECOND_ORDER
    elif Delta.is_zero:
        cls = Classification.DEGENERATE_FIRST_ORDER
    else:
        cls = Classification.CONTROLLABLE
    forms = dict(alpha0=alpha0, alpha1=alpha1, alpha=alpha, beta=beta, gamma=gamma, pi0=pi0, pi1=pi1)
    for r in range(3):
        forms[f"beta{r}"] = b[r]
    sb = StandardBasisResult(F, d, A, B, C, M, N, Delta, forms, cls)
    if cls is not Classification.CONTROLLABLE and find_potential:
        sb.G = _find_potential(sb)
    return sb


def _build_dictionary(sb: StandardBasisResult):
    D = sb.D
    Fu0, Fu1, Fv2 = (partial(sb.F, a) for a in (U0, U1, V[2]))
    inv = ONE / sb.Delta
    beta = PiCombo({0: sb.N * inv, 1: sb.B * inv})
    gamma = PiCombo({0: -sb.M * inv, 1: sb.C * inv})
    if sb.B:
        beta0 = (beta.lie(D) - gamma.scale(Fu0) - beta.scale(Fu1)).scale(ONE / sb.B)
    else:
        beta0 = (gamma.lie(D) - beta).scale(ONE / sb.C)
    beta1 = beta0.lie(D)
    sb.dictionary.update(
        beta=beta,
        gamma=gamma,
        beta0=beta0,
        beta1=beta1,
        alpha0=gamma + beta0.scale(Fv2),
        alpha1=beta + beta0.scale(sb.A) + beta1.scale(Fv2),
    )


def _monomials(atoms, degree):
    idx = [()]
    for _ in range(degree):
        idx = sorted({tuple(sorted(m + (k,))) for m in idx for k in range(len(atoms))} | set(idx))
    return [tuple(atoms[k] for k in m) for m in idx]


def _find_potential(sb: StandardBasisResult, degree: int | None = None):
    """Polynomial ``G`` with ``F = D G`` or ``F = D^2 G`` for the degenerate classes, if one exists."""
    F = sb.F
    if not F.is_polynomial or any(isinstance(a, Fn) for a in F.atoms()):
        return None
    if sb.classification is Classification.DEGENERATE_SECOND_ORDER:
        args, times = (X, U0, V[0]), 2
    else:
        args, times = (X, U0, V[0], U1, V[1]), 1
    degree = degree if degree is not None else max(F.degree(), 1)
    monos = _monomials(args, degree)
    unknowns = [Param(f"_g{k}") for k in range(len(monos))]
    G = ZERO
    for c, m in zip(unknowns, monos):
        term = Expr.atom(c)
        for a in m:
            term = term * a
        G = G + term
    # D here is the total derivative of the free jet space (u2 is not
    # replaced by F); the ansatz coefficients are constants.
    from ..expr import derive

    free = Diffiety(1, ["u", "v"])

    def Dc(e):
        return derive(e, lambda a: ZERO if isinstance(a, Param) else free.atom_total(1, a))

    lhs = G
    for _ in range(times):
        lhs = Dc(lhs)
    sol = linalg.solve_linear_ansatz([lhs - F], unknowns)
    if sol is None:
        return None
    return substitute(G, sol)


# --------------------------------------------------------------------------
# variations


def variation_solution_ode2(sb: StandardBasisResult, p: Expr) -> tuple:
    """``(z^0, z_0) = (alpha0(Z), beta0(Z))`` for the variation with ``pi0(Z) = p``."""
    if not sb.controllable:
        raise ValueError(f"standard basis is {sb.classification.value}")
    p = p if isinstance(p, Expr) else Expr.const(p)
    return sb.value("alpha0", p), sb.value("beta0", p)


# --------------------------------------------------------------------------
# symmetries: L_Z pi0 = lambda pi0


def _atoms(seq) -> tuple:
    return tuple(next(iter(e.atoms())) if isinstance(e, Expr) else e for e in seq)


P_ARGS = _atoms((X, U0, U1, V[0], V[1], V[2]))


def determining_ode2(sb: StandardBasisResult, p_args=P_ARGS, reduced_args=None) -> DeterminingSystem:
    """Conditions on ``p = pi0(Z)`` for ``L_Z pi0 = lambda pi0``.

    ``L_Z pi0`` is expanded for ``Z = z D + (field with pi0(Z) = p)`` with
    formal ``p`` and ``z``, written in the basis ``dx, beta, gamma, beta_r``,
    and the ``beta``/``gamma`` coefficients are solved for ``z`` and
    ``lambda``.  The remaining coefficients are the conditions on ``p``.
    Coefficients that reduce to a single partial ``p_a`` make ``p`` free of
    ``a``; the system restricted accordingly (or to ``reduced_args`` when
    given) leaves the residual equation ``meta['residual']``.
    """
    if not sb.controllable:
        raise ValueError(f"standard basis is {sb.classification.value}")
    d = sb.diffiety
    p_args = _atoms(p_args)
    reduced_args = _atoms(reduced_args) if reduced_args is not None else None
    p = Expr.atom(Fn("p", p_args))
    z_atom = Fn("z", p_args)
    z = Expr.atom(z_atom)
    Z = StandardField(sb, p, z)
    L = lie_field(d, sb.forms["pi0"], Z)
    top = max((a.order for a in L.support() if isinstance(a, Jet) and a.family == "v"), default=0)
    names = ["dx", "beta", "gamma"] + [f"beta{r}" for r in range(top + 1)]
    basis = [OneForm.d(X), sb.forms["beta"], sb.forms["gamma"]] + [sb.beta_form(r) for r in range(top + 1)]
    coef = dict(zip(names, _coefficients(L, basis, "L_Z pi0")))

    a1 = partial(coef["beta"], z_atom)
    a2 = partial(coef["gamma"], z_atom)
    b1 = substitute(coef["beta"], {z_atom: ZERO})
    b2 = substitute(coef["gamma"], {z_atom: ZERO})
    # a1 z - C lam = -b1 ;  a2 z + B lam = -b2
    det = a1 * sb.B + sb.C * a2
    if det.is_zero:
        raise PivotError("the beta/gamma relations do not determine z and lambda")
    zsol = (-b1 * sb.B - sb.C * b2) / det
    lsol = (a1 * (-b2) + a2 * b1) / det

    ds = DeterminingSystem(unknowns={"p": p_args})
    ds.solved = {"z": zsol, "lambda": lsol}
    ds.meta.update(b_beta=b1, b_gamma=b2, a_beta=a1, a_gamma=a2, pivot=det, basis=names)
    for name in names:
        if name in ("beta", "gamma"):
            continue
        e = coef[name]
        if not e.free_of(z_atom):
            e = substitute(e, {z_atom: zsol})
        ds.add(name, e.numerator())

    # equations of the form p_a = 0 force p to be free of a
    vanishing = []
    for q in ds.equations:
        e = q.expr
        if len(e.num) == 1 and e.is_polynomial:
            (m, _), = e.num.items()
            if len(m) == 1 and m[0][1] == 1 and isinstance(m[0][0], Fn) and m[0][0].name == "p":
                f = m[0][0]
                if len(f.derivs) == 1:
                    vanishing.append(f.args[f.derivs[0]])
    if reduced_args is None:
        reduced_args = tuple(a for a in p_args if a not in vanishing)
    dropped = [a for a in p_args if a not in reduced_args]
    ds.meta.update(vanishing=vanishing, dropped=dropped, reduced_args=reduced_args)
    residuals = []
    for q in ds.equations:
        r = _restrict(q.expr, "p", p_args, reduced_args)
        if not r.is_zero:
            residuals.append((q.label, r))
    ds.meta["reduced"] = residuals
    ds.meta["residual"] = _primitive(residuals[0][1]) if len(residuals) == 1 else None
    return ds


def _restrict(e: Expr, name: str, args, reduced) -> Expr:
    """Set every partial of ``name`` by a dropped argument to zero and rename to the reduced symbol."""
    bind = {}
    for a in e.atoms():
        if isinstance(a, Fn) and a.name == name and a.args == tuple(args):
            if any(a.args[k] not in reduced for k in a.derivs):
                bind[a] = ZERO
            else:
                bind[a] = Expr.atom(Fn(name, reduced, [reduced.index(a.args[k]) for k in a.derivs]))
    return substitute(e, bind) if bind else e


def _primitive(e: Expr) -> Expr:
    """Scale a polynomial to integer coefficients with gcd 1 and positive leading term."""
    from fractions import Fraction
    from math import gcd

    if e.is_zero:
        return e
    terms = e.numerator().terms()
    den = 1
    for c, _ in terms:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    nums = [int(Fraction(c) * den) for c, _ in terms]
    g = 0
    for n in nums:
        g = gcd(g, n)
    scale = Fraction(den, g) * (1 if nums[0] > 0 else -1)
    return e.numerator() * Expr.const(scale)


def evolutionary_restriction_ode2(ds: DeterminingSystem, sb: StandardBasisResult) -> DeterminingSystem:
    """The system with ``z = 0``: ``lambda`` from the ``beta`` relation, compatibility from ``gamma``."""
    b1, b2 = ds.meta["b_beta"], ds.meta["b_gamma"]
    # b1 = lam C, b2 = -lam B
    out = DeterminingSystem(unknowns=dict(ds.unknowns))
    if sb.C:
        lam = b1 / sb.C
    elif sb.B:
        lam = -b2 / sb.B
    else:
        raise PivotError("both B and C vanish")
    out.solved = {"z": ZERO, "lambda": lam}
    out.add("z=0 compatibility", (b1 * sb.B + sb.C * b2).numerator())
    for q in ds.equations:
        out.add(q.label, q.expr)
    out.meta = dict(ds.meta)
    out.notes.append("z = 0 imposed")
    return out


@dataclass
class SymmetryCheck:
    p: Expr
    z: Expr
    lam: Expr
    residual: OneForm  # L_Z pi0 - lambda pi0
    system_failures: list
    group: object

    @property
    def passed(self) -> bool:
        return self.residual.is_zero and not self.system_failures


def symmetry_check_ode2(sb: StandardBasisResult, p: Expr, ds: DeterminingSystem | None = None, k: int = 0) -> SymmetryCheck:
    """Solve for ``z`` and ``lambda`` at a candidate ``p`` and verify ``L_Z pi0 = lambda pi0`` end to end."""
    ds = ds or determining_ode2(sb)
    p = p if isinstance(p, Expr) else Expr.const(p)
    vals = ds.solve_for({"p": p})
    Z = StandardField(sb, p, vals["z"])
    pi0 = sb.forms["pi0"]
    res = lie_field(sb.diffiety, pi0, Z) - pi0 * vals["lambda"]
    return SymmetryCheck(p, vals["z"], vals["lambda"], res, ds.failures({"p": p}), group_check(Z, [pi0], k))


@dataclass
class AdjointProbe:
    functions: list
    strict: object  # coefficients or NotInSpan
    modulo_dx: object

    @property
    def verdict(self) -> str:
        return "in span" if self.strict is not NotInSpan else "not in span"


def adjoint_probe(sb: StandardBasisResult, functions) -> AdjointProbe:
    """Is ``pi0`` a combination of the differentials ``d phi``?  Tried exactly and modulo ``dx``."""
    dfs = [differential(f) for f in functions]
    pi0 = sb.forms["pi0"]
    return AdjointProbe(list(functions), represent(pi0, dfs), represent(pi0, dfs, modulo_dx=True))
