"""Reduction and symmetry conditions for ``u_y = F(x, y, u, v, u_x, v_x, v_y)``.

Coordinates are ``x, y, u_r`` (``r`` x-derivatives) and ``v_rs``; every
``y``-derivative of ``u`` is eliminated through ``u_y = F``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..expr import ZERO, Expr, Fn, Jet, Var, partial, substitute
from ..fields import PointField
from ..forms import NotInSpan, OneForm, contact_form, lie_field, lie_total, represent
from ..jet import Diffiety
from .systems import DeterminingSystem

__all__ = [
    "PDE1_ARGS",
    "pde1_diffiety",
    "formal_F_pde1",
    "coords_pde1",
    "reduce_pde1",
    "PdeReduction",
    "determining_pde1",
    "LOWER_ORDER_ARGS",
    "variation_requirement_pde1",
]

_X, _Y = Var("x"), Var("y")
_U = [Jet("u", (1,) * r, 2) for r in range(6)]


def _v(r: int, s: int) -> Jet:
    return Jet("v", (1,) * r + (2,) * s, 2)


PDE1_ARGS = (_X, _Y, _U[0], _v(0, 0), _U[1], _v(1, 0), _v(0, 1))
LOWER_ORDER_ARGS = PDE1_ARGS


def coords_pde1() -> dict:
    """Named coordinate expressions ``x, y, u, u1, v, vx, vy, ...``."""
    names = {"x": _X, "y": _Y, "u": _U[0], "v": _v(0, 0)}
    for r in range(1, 6):
        names[f"u{r}"] = _U[r]
    for r in range(4):
        for s in range(4):
            if r + s:
                names["v" + "x" * r + "y" * s] = _v(r, s)
    return {k: Expr.atom(a) for k, a in names.items()}


def formal_F_pde1() -> Expr:
    return Expr.atom(Fn("F", PDE1_ARGS))


def pde1_diffiety(F: Expr | None = None, **kw) -> Diffiety:
    F = formal_F_pde1() if F is None else F
    return Diffiety(2, ["u", "v"], {Jet("u", (2,), 2): F}, independents=("x", "y"), **kw)


@dataclass
class PdeReduction:
    F: Expr
    diffiety: Diffiety
    gamma: OneForm
    A: Expr
    B: Expr
    alpha: OneForm
    beta: OneForm
    residual: OneForm  # L_{D_y} gamma - (F_u gamma + A beta + B beta_x + F_u1 L_{D_x} gamma)

    @property
    def identity_holds(self) -> bool:
        return self.residual.is_zero

    def partials(self) -> dict:
        return {str(a): partial(self.F, a) for a in PDE1_ARGS}


def reduce_pde1(F: Expr | None = None) -> PdeReduction:
    d = pde1_diffiety(F)
    F = d.constraints()[Jet("u", (2,), 2)]
    Dx, Dy = d.derivation(1), d.derivation(2)
    Fu, Fv, Fu1, Fvx, Fvy = (partial(F, a) for a in (_U[0], _v(0, 0), _U[1], _v(1, 0), _v(0, 1)))
    alpha = contact_form(d, Expr.atom(_U[0]))
    beta = contact_form(d, Expr.atom(_v(0, 0)))
    gamma = alpha - beta * Fvy
    A = Fv + Fu * Fvy - Dy(Fvy) + Fu1 * Dx(Fvy)
    B = Fvx + Fu1 * Fvy
    beta_x = lie_total(d, beta, 1)
    rhs = gamma * Fu + beta * A + beta_x * B + lie_total(d, gamma, 1) * Fu1
    return PdeReduction(F, d, gamma, A, B, alpha, beta, lie_total(d, gamma, 2) - rhs)


def variation_requirement_pde1(red: PdeReduction, b: Expr, c: Expr, dx_coefficient: str = "u1") -> Expr:
    """``D_y c - F_u c - A b - B D_x b - K D_x c`` with ``K = F_u1`` or ``K = F_vx``.

    ``K = F_u1`` is what the reduced identity for ``L_{D_y} gamma`` gives.
    """
    d, F = red.diffiety, red.F
    Dx, Dy = d.derivation(1), d.derivation(2)
    K = partial(F, _U[1] if dx_coefficient == "u1" else _v(1, 0))
    return Dy(c) - partial(F, _U[0]) * c - red.A * b - red.B * Dx(b) - K * Dx(c)


def _coframe(d: Diffiety, beta: OneForm, gamma: OneForm, order: int):
    """``dx, dy, beta, gamma, alpha_r (1 <= r), beta_rs (1 <= r + s)`` up to ``order``, with labels."""
    names = ["dx", "dy", "beta", "gamma"]
    forms = [OneForm.d(_X), OneForm.d(_Y), beta, gamma]
    for r in range(1, order + 1):
        names.append(f"alpha_{'x' * r}")
        forms.append(contact_form(d, Expr.atom(_U[r])))
    for k in range(1, order + 1):
        for r in range(k, -1, -1):
            s = k - r
            names.append("beta_" + "x" * r + "y" * s)
            forms.append(contact_form(d, Expr.atom(_v(r, s))))
    return names, forms


def _order_of(w: OneForm) -> int:
    return max((a.order for a in w.support() if isinstance(a, Jet)), default=0)


def determining_pde1(F: Expr | None = None, evolutionary: bool = False, args=LOWER_ORDER_ARGS) -> DeterminingSystem:
    """Conditions for ``L_Z beta = l1 beta + l2 gamma`` and ``L_Z gamma = m1 beta + m2 gamma``.

    ``Z`` has ``Z x = z1``, ``Z y = z2``, ``beta(Z) = b``, ``gamma(Z) = c``
    with ``b, c, z1, z2`` formal functions of ``args`` and jet components
    fixed by the prolongation recurrence.  Coefficients are read in the
    coframe ``dx, dy, beta, gamma, alpha_r, beta_rs``.

    The emitted equations are:

    * ``beta:<form>`` - the coefficients of ``L_Z beta`` off ``beta, gamma``;
    * ``gamma:<form>`` - those of ``L_Z gamma``, reduced modulo the
      ``beta`` relations (``b_vx -> -z1``, ``b_vy -> -z2``, ``b_u1 -> 0``);
    * ``variation`` - the ``dy`` coefficient of ``L_Z gamma``, which is the
      variation requirement on ``c`` and ``b``.
    """
    red = reduce_pde1(F)
    d, F = red.diffiety, red.F
    args = tuple(args)
    b, c = (Expr.atom(Fn(n, args)) for n in ("b", "c"))
    if evolutionary:
        z1 = z2 = ZERO
    else:
        z1, z2 = (Expr.atom(Fn(n, args)) for n in ("z1", "z2"))
    Fvy = partial(F, _v(0, 1))
    u1, vx, vy = (d.w("u", 1), d.w("v", 1), d.w("v", 2))
    Z = PointField(
        d,
        [z1, z2],
        {"u": c + Fvy * b + u1 * z1 + F * z2, "v": b + vx * z1 + vy * z2},
    )
    Lb = lie_field(d, red.beta, Z)
    Lg = lie_field(d, red.gamma, Z)
    order = max(_order_of(Lb), _order_of(Lg))
    names, frame = _coframe(d, red.beta, red.gamma, order)
    cb = represent(Lb, frame)
    cg = represent(Lg, frame)
    if cb is NotInSpan or cg is NotInSpan:
        raise ArithmeticError("Lie derivatives left the coframe span")
    cb, cg = dict(zip(names, cb)), dict(zip(names, cg))

    ds = DeterminingSystem(unknowns={n: args for n in ("b", "c")})
    if not evolutionary:
        ds.unknowns.update(z1=args, z2=args)
    ds.solved = {"lambda1": cb["beta"], "lambda2": cb["gamma"], "mu1": cg["beta"], "mu2": cg["gamma"]}

    for n in names:
        if n in ("beta", "gamma", "dy"):
            continue
        if not cb[n].is_zero:
            ds.add(f"beta:{n}", cb[n])
    pos = {a: k for k, a in enumerate(args)}
    lower = {
        Fn("b", args, [pos[_v(1, 0)]]): -z1,
        Fn("b", args, [pos[_v(0, 1)]]): -z2,
        Fn("b", args, [pos[_U[1]]]): ZERO,
    }
    if not cb["dy"].is_zero:
        ds.add("beta:dy", cb["dy"])
    for n in names:
        if n in ("beta", "gamma", "dy"):
            continue
        e = substitute(cg[n], lower)
        if not e.is_zero:
            ds.add(f"gamma:{n}", e)
    ds.add("variation", cg["dy"])
    ds.meta.update(coframe=names, raw_beta=cb, raw_gamma=cg, reduction=red, field=Z)
    # which coefficient multiplies D_x c in the variation requirement
    ds.meta["variation_form"] = {
        k: (variation_requirement_pde1(red, b, c, k) + cg["dy"]).is_zero
        or (variation_requirement_pde1(red, b, c, k) - cg["dy"]).is_zero
        for k in ("u1", "vx")
    }
    if evolutionary:
        ds.meta["frobenius"] = _frobenius_check(ds, args)
        ds.notes.append(
            "z1 = z2 = 0: first-order partials of c prescribed by b; "
            + ("cross-derivative test passes" if ds.meta["frobenius"] else "cross-derivative test fails")
        )
    return ds


def _frobenius_check(ds: DeterminingSystem, args) -> bool:
    """Compatibility of the prescribed ``c`` partials when ``b`` is free of ``u1, vx, vy``.

    The relations ``c_a = R_a`` (from ``gamma:<form>``, linear in ``c_a``) must
    satisfy ``d R_a / d a' = d R_a' / d a`` with ``b`` depending only on
    ``x, y, u, v``.
    """
    pos = {a: k for k, a in enumerate(args)}
    targets = [_U[1], _v(1, 0), _v(0, 1)]
    rhs = {}
    for q in ds.equations:
        if not q.label.startswith("gamma:"):
            continue
        e = q.expr
        for a in targets:
            ca = Fn("c", args, [pos[a]])
            k = partial(e, ca)
            if k.is_constant and not k.is_zero:
                rest = substitute(e, {ca: ZERO})
                if all(partial(rest, Fn("c", args, [pos[t]])).is_zero for t in targets):
                    rhs[a] = -rest / k
    if len(rhs) != 3:
        return False
    kill = {}
    for t in targets:
        kill[Fn("b", args, [pos[t]])] = ZERO

    def dd(e, a):
        out = partial(e, a)
        # b depends only on x, y, u, v: its partials by u1, vx, vy vanish
        bind = {}
        for at in out.atoms():
            if isinstance(at, Fn) and at.name == "b" and any(at.args[k] in targets for k in at.derivs):
                bind[at] = ZERO
        return substitute(out, bind) if bind else out

    for i, a in enumerate(targets):
        for b2 in targets[i + 1 :]:
            ra = substitute(rhs[a], kill)
            rb = substitute(rhs[b2], kill)
            if not (dd(ra, b2) - dd(rb, a)).is_zero:
                return False
    return True
