"""Isospectral deformations of ``v_xx + (lambda + q) v = 0`` and the KdV hierarchy.

The q-family lives on two diffieties: the isospectral one (coordinates
``x, lambda, v, v_x, q_r``) and a restricted one with only the ``q_r``,
whose total derivative is ``Dq = sum q_{r+1} d/dq_r``.  Coefficients
``B_k`` are computed on the restricted one, so anything that is not a pure
differential polynomial in ``q`` is a scope error there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

from . import linalg
from .expr import ONE, ZERO, Expr, Jet, Param, collect, euler_operator, partial, substitute
from .fields import PointField, VariationReport, check_variation
from .forms import OneForm, contact_form, contract, lie_total
from .jet import Derivation, Diffiety

__all__ = [
    "LAMBDA",
    "q",
    "v",
    "isospectral_diffiety",
    "q_diffiety",
    "Dq",
    "build_isospectral",
    "IsospectralReport",
    "ansatz_structure_check",
    "StructureReport",
    "dinverse",
    "NotExact",
    "hierarchy",
    "HierarchyResult",
    "verify_flow",
    "FlowReport",
    "PRINTED_FLOWS",
    "compare_printed",
    "Comparison",
    "result_from_B",
    "pi2_on_evolutionary",
]

LAMBDA = Expr.atom(Param("lambda"))
_LAM = Param("lambda")


def q(r: int) -> Expr:
    return Expr.atom(Jet("q", (1,) * r, 1))


def v(r: int = 0) -> Expr:
    """``v`` (r = 0) or ``v_x`` (r = 1)."""
    if r not in (0, 1):
        raise ValueError("only v and v_x are coordinates")
    return Expr.atom(Jet("v", (1,) * r, 1))


@lru_cache(maxsize=None)
def isospectral_diffiety() -> Diffiety:
    return Diffiety(1, ["v", "q"], {Jet("v", (1, 1), 1): -(LAMBDA + q(0)) * v(0)}, params=("lambda",))


@lru_cache(maxsize=None)
def q_diffiety() -> Diffiety:
    """Only the ``q_r``; ``lambda`` is admitted as a constant for the full ``B``."""
    return Diffiety(1, ["q"], independents=(), params=("lambda",))


def Dq() -> Derivation:
    return q_diffiety().derivation(1)


def _is_q_pure(e: Expr) -> bool:
    return all(isinstance(a, Jet) and a.family == "q" for a in e.atoms())


# --------------------------------------------------------------------------
# the diffiety and its standard basis


@dataclass
class IsospectralReport:
    diffiety: Diffiety
    basis: dict  # dlambda, alpha, alpha_x, beta_0.. as OneForms
    pi: list  # pi_0, pi_1, pi_2
    expected_pi2: OneForm
    checks: dict  # name -> bool

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def build_isospectral(beta_count: int = 3) -> tuple:
    """The isospectral diffiety and a check of its standard basis up to ``pi_2``."""
    d = isospectral_diffiety()
    alpha = contact_form(d, v(0))
    alpha_x = contact_form(d, v(1))
    dlam = OneForm.d(_LAM)
    basis = {"dlambda": dlam, "alpha": alpha, "alpha_x": alpha_x}
    for r in range(beta_count):
        basis[f"beta_{r}"] = contact_form(d, q(r))
    pi0 = alpha
    pi1 = lie_total(d, pi0, 1)
    pi2 = lie_total(d, pi1, 1)
    expected = alpha * (-(LAMBDA + q(0))) - (dlam + basis["beta_0"]) * v(0)
    checks = {
        "alpha_x = dv_x + (lambda + q0) v dx": (alpha_x - OneForm.d(v(1)) - OneForm.d(d.x()) * ((LAMBDA + q(0)) * v(0))).is_zero,
        "pi_1 = alpha_x": (pi1 - alpha_x).is_zero,
        "pi_2 = -(lambda + q) alpha - v (dlambda + beta_0)": (pi2 - expected).is_zero,
        "pi_2 dlambda coefficient = -v": (pi2[_LAM] + v(0)).is_zero,
    }
    return d, IsospectralReport(d, basis, [pi0, pi1, pi2], expected, checks)


def pi2_on_evolutionary(P: Expr, Qv: Expr) -> tuple:
    """``(pi_2(Z), -(lambda + q) P - v Q)`` for ``Zx = Z lambda = 0``, ``Zv = P``, ``Zq = Q``."""
    d, rep = build_isospectral()
    Z = PointField(d, [ZERO], {"v": P, "q": Qv})
    return contract(rep.pi[2], Z), -(LAMBDA + q(0)) * P - v(0) * Qv


# --------------------------------------------------------------------------
# structure of the ansatz


@dataclass
class StructureReport:
    second_partials: dict  # "P_vv" etc. -> Expr
    C: Expr | None
    closure: Expr | None  # 2 DA + D^2 B, must vanish
    C_condition: Expr | None  # coefficient forced to vanish, proportional to C

    @property
    def passed(self) -> bool:
        return all(e.is_zero for e in self.second_partials.values())

    @property
    def witnesses(self) -> dict:
        return {k: e for k, e in self.second_partials.items() if not e.is_zero}


def ansatz_structure_check(P: Expr) -> StructureReport:
    """Second ``v``-partials of ``P``; when they vanish, the decomposition ``P = A v + B v_x + C``.

    ``D^2 P + (lambda + q) P`` must be ``v`` times a function of ``q`` alone;
    for ``P = A v + B v_x + C`` its ``v_x`` coefficient is ``2 DA + D^2 B``
    and its ``v``-free part is ``D^2 C + (lambda + q) C``.
    """
    a0, a1 = (next(iter(v(r).atoms())) for r in (0, 1))
    sp = {
        "P_vv": partial(partial(P, a0), a0),
        "P_vvx": partial(partial(P, a0), a1),
        "P_vxvx": partial(partial(P, a1), a1),
    }
    rep = StructureReport(sp, None, None, None)
    if not rep.passed:
        return rep
    A = partial(P, a0)
    B = partial(P, a1)
    C = P - A * v(0) - B * v(1)
    if not (A.free_of(a0) and A.free_of(a1) and B.free_of(a0) and B.free_of(a1)):
        return rep
    d = isospectral_diffiety()
    D = d.derivation(1)
    rep.C = C
    rep.closure = 2 * D(A) + D(D(B))
    rep.C_condition = D(D(C)) + (LAMBDA + q(0)) * C
    return rep


# --------------------------------------------------------------------------
# formal integration


class NotExact(ArithmeticError):
    def __init__(self, f: Expr, residual: Expr):
        super().__init__(f"not a total derivative: Euler residual {residual}")
        self.f = f
        self.residual = residual


def _order(e: Expr) -> int:
    return max((a.order for a in e.coords() if isinstance(a, Jet)), default=-1)


def _monomials(order: int, degree: int) -> list:
    """Products of ``q_0..q_order`` of total degree ``1..degree``."""
    out = []
    for k in range(1, degree + 1):
        for combo in combinations_with_replacement(range(order + 1), k):
            m = ONE
            for r in combo:
                m = m * q(r)
            out.append(m)
    return out


def dinverse(f: Expr, D: Derivation | None = None) -> Expr:
    """``g`` with ``D g = f`` and no constant term; ``D`` defaults to the restricted ``Dq``."""
    D = D or Dq()
    if f.is_zero:
        return ZERO
    if not f.is_polynomial:
        raise ValueError("dinverse needs a differential polynomial")
    if not _is_q_pure(f):
        bad = sorted(a for a in f.atoms() if not (isinstance(a, Jet) and a.family == "q"))
        raise ValueError(f"dinverse: {bad[0]} is outside the q-family")
    res = euler_operator(f, "q", D)
    if not res.is_zero:
        raise NotExact(f, res)
    if any(not m for m, _ in f.terms()):
        raise NotExact(f, substitute(f, {a: ZERO for a in f.atoms()}))
    top = _order(f)
    if top < 1:
        raise NotExact(f, res)
    mons = _monomials(top - 1, f.degree())
    unknowns = [Param(f"_c{k}") for k in range(len(mons))]
    lhs = ZERO
    for c, m in zip(unknowns, mons):
        lhs = lhs + Expr.atom(c) * D(m)
    sol = linalg.solve_linear_ansatz([lhs - f], unknowns)
    if sol is None:
        raise NotExact(f, res)
    g = ZERO
    for c, m in zip(unknowns, mons):
        g = g + sol[c] * m
    return g


# --------------------------------------------------------------------------
# the hierarchy


@lru_cache(maxsize=None)
def _B(k: int) -> Expr:
    """``B_k`` with ``B_0 = 1`` and zero integration constants."""
    if k == 0:
        return ONE
    D = Dq()
    b = _B(k - 1)
    rhs = -(Fraction(1, 2) * D.power(b, 3) + 2 * q(0) * D(b) + q(1) * b) / 2
    return dinverse(rhs, D)


def _Q_full(B: Expr) -> Expr:
    D = Dq()
    return Fraction(1, 2) * D.power(B, 3) + 2 * (LAMBDA + q(0)) * D(B) + q(1) * B


def _lambda_coefficients(e: Expr) -> dict:
    return {k: c for k, c in collect(e, _LAM) if not c.is_zero}


@dataclass
class HierarchyResult:
    level: int
    B_coeffs: list
    B: Expr
    A: Expr
    Q: Expr
    normalization: list
    checks: dict = field(default_factory=dict)
    factored: tuple | None = None  # (c, G) with Q = c * Dq(G), G monic in its top q

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _monic_potential(Q: Expr):
    """``(c, G)`` with ``Q = c * Dq G`` and the top-order ``q`` of ``G`` having coefficient 1."""
    try:
        G = dinverse(Q)
    except NotExact:
        return None
    r = _order(G)
    lead = partial(G, Jet("q", (1,) * r, 1))
    if not lead.is_constant or lead.is_zero:
        return (ONE, G)
    return (lead, G / lead)


def hierarchy(n: int) -> HierarchyResult:
    """Level ``n``: ``B = sum_k B_k lambda^(n-k)`` and the flow ``q_t = Q``."""
    if n < 0:
        raise ValueError("level must be non-negative")
    D = Dq()
    coeffs = [_B(k) for k in range(n + 1)]
    B = ZERO
    for k, b in enumerate(coeffs):
        B = B + b * LAMBDA ** (n - k)
    full = _Q_full(B)
    by_power = _lambda_coefficients(full)
    Q = by_power.get(0, ZERO)
    A = -D(B) / 2
    checks = {
        "positive lambda powers vanish": all(k == 0 for k in by_power),
        "Q is lambda-free": Q.free_of(_LAM),
        "Q is x-free": all(isinstance(a, Jet) and a.family == "q" for a in Q.atoms()),
        "B_k are q-pure": all(_is_q_pure(b) for b in coeffs),
        "2 DA + D^2 B = 0": (2 * D(A) + D(D(B))).is_zero,
    }
    norm = ["B_0 = 1"] + [f"B_{k}: integration constant 0" for k in range(1, n + 1)]
    return HierarchyResult(n, coeffs, B, A, Q, norm, checks, _monic_potential(Q))


def result_from_B(coeffs) -> HierarchyResult:
    """A ``HierarchyResult`` for arbitrary coefficients; ``Q`` is the raw ``lambda^0`` part."""
    n = len(coeffs) - 1
    D = Dq()
    B = ZERO
    for k, b in enumerate(coeffs):
        B = B + b * LAMBDA ** (n - k)
    by_power = _lambda_coefficients(_Q_full(B))
    Q = by_power.get(0, ZERO)
    return HierarchyResult(n, list(coeffs), B, -D(B) / 2, Q, ["supplied coefficients"])


# --------------------------------------------------------------------------
# flows


@dataclass
class FlowReport:
    residual: Expr  # Q v + D^2 P + (lambda + q0) P
    witness_power: int | None  # highest lambda power with a nonzero coefficient
    variation: VariationReport | None

    @property
    def passed(self) -> bool:
        return self.residual.is_zero and (self.variation is None or self.variation.passed)


def verify_flow(result: HierarchyResult, k: int = 4) -> FlowReport:
    """The evolutionary field ``Zv = A v + B v_x``, ``Zq = Q`` against the isospectral diffiety."""
    d = isospectral_diffiety()
    D = d.derivation(1)
    P = result.A * v(0) + result.B * v(1)
    res = result.Q * v(0) + D(D(P)) + (LAMBDA + q(0)) * P
    witness = None
    if not res.is_zero:
        witness = max(_lambda_coefficients(res))
    Z = PointField(d, [ZERO], {"v": P, "q": result.Q})
    report = check_variation(d, Z, k=k) if k > 0 else None
    return FlowReport(res, witness, report)


# The displayed hierarchy as (potential, number of x-derivatives).
PRINTED_FLOWS = (
    (q(0), 1),
    (q(2) + 3 * q(0) ** 2, 1),
    (q(4) + 5 * q(1) ** 2 + 10 * q(0) * q(2) + 10 * q(0) ** 3, 2),
)


@dataclass
class Comparison:
    index: int
    level: int
    printed: str
    as_printed: Expr | None  # c with Q = c * D^d G, or None
    single_derivative: Expr | None  # c with Q = c * D G, or None


def _ratio(Q: Expr, T: Expr):
    if T.is_zero:
        return None
    c = Q / T
    return c if c.is_constant else None


def compare_printed(results) -> list:
    """Compare each computed flow with the displayed entry of the same position."""
    D = Dq()
    out = []
    for idx, (G, nd) in enumerate(PRINTED_FLOWS):
        r = next((x for x in results if x.level == idx), None)
        if r is None:
            continue
        printed = f"D^{nd}({G})"
        out.append(Comparison(idx, r.level, printed, _ratio(r.Q, D.power(G, nd)), _ratio(r.Q, D(G))))
    return out
