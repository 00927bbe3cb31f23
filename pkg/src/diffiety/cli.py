"""Command-line front end.

    diffiety <command> [--model FILE | --model-text TEXT] [--set NAME=EXPR ...] [--format text|latex|json] [flags]

Exit status: 0 on success, 2 when a check fails, 1 on usage or parse errors.
Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kdv as kdv_mod
from .expr import ZERO, Expr
from .fields import StandardField, check_variation, from_point_generators, poisson_bracket
from .forms import NotInSpan, OneForm, represent
from .jet import Diffiety, free_jets
from .parse import ModelFile, ParseError, parse_model
from .reduce.involutive import Inconclusive, involutive_family
from .reduce.ode2 import determining_ode2, evolutionary_restriction_ode2, standard_basis_ode2
from .reduce.pde1 import determining_pde1, reduce_pde1
from .reduce.systems import DeterminingSystem
from .reduce.trivial import filtration_basis, order_preservation_check, pencil_candidate_check, pencil_conditions_m2
from .render import atom_text, combo_json, combo_latex, combo_text, latex, text, to_json

__all__ = ["main", "run", "UsageError", "build_parser", "COMMANDS"]

OK, CHECK_FAILED, USAGE = 0, 2, 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# output


class Report:
    """Ordered ``(key, value)`` entries rendered in one of three formats."""

    def __init__(self, command: str, model: ModelFile | None):
        self.command = command
        self.model = model
        self.entries: list = []
        self.ok = True

    def add(self, key: str, value):
        self.entries.append((key, value))

    def fail(self):
        self.ok = False

    @staticmethod
    def _text(v) -> str:
        if isinstance(v, Expr):
            return text(v)
        if isinstance(v, OneForm):
            return combo_text([(c, "d" + atom_text(a)) for a, c in v.items()])
        if isinstance(v, Combo):
            return combo_text(v.pairs)
        if isinstance(v, bool):
            return "yes" if v else "no"
        if isinstance(v, (list, tuple)):
            return "(" + ", ".join(Report._text(x) for x in v) + ")"
        return str(v)

    @staticmethod
    def _latex(v) -> str:
        if isinstance(v, Expr):
            return latex(v)
        if isinstance(v, OneForm):
            from .render import atom_latex

            return combo_latex([(c, r"\mathrm{d}" + atom_latex(a)) for a, c in v.items()], True)
        if isinstance(v, Combo):
            return combo_latex(v.pairs)
        return Report._text(v)

    @staticmethod
    def _json(v):
        if isinstance(v, Expr):
            return to_json(v)
        if isinstance(v, OneForm):
            return combo_json([(c, "d" + atom_text(a)) for a, c in v.items()])
        if isinstance(v, Combo):
            return combo_json(v.pairs)
        if isinstance(v, bool) or isinstance(v, int):
            return v
        if isinstance(v, (list, tuple)):
            return [Report._json(x) for x in v]
        return str(v)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {
                "command": self.command,
                "model": self.model.kind if self.model else None,
                "ok": self.ok,
                "results": [{"key": k, "value": self._json(v)} for k, v in self.entries],
            }
            return json.dumps(doc, sort_keys=True, indent=1) + "\n"
        fn = self._latex if fmt == "latex" else self._text
        return "".join(f"{k} = {fn(v)}\n" for k, v in self.entries)


class Combo:
    """A one-form written in named basis forms."""

    def __init__(self, pairs):
        self.pairs = list(pairs)


def _combo(w: OneForm, named: dict) -> Combo | str:
    names = list(named)
    c = represent(w, [named[n] for n in names])
    if c is NotInSpan:
        return "not in span"
    return Combo(zip(c, names))


def _system(rep: Report, ds: DeterminingSystem):
    for k in sorted(ds.solved):
        rep.add(k, ds.solved[k])
    for q in ds.equations:
        rep.add(f"eq[{q.label}]", q.expr)
    for n in ds.notes:
        rep.add("note", n)


# --------------------------------------------------------------------------
# model helpers


def _need(model: ModelFile | None, *kinds) -> ModelFile:
    if model is None:
        raise UsageError(f"this command needs a model ({' or '.join(kinds)}); pass --model or --model-text")
    if model.kind not in kinds:
        raise UsageError(f"this command needs a {' or '.join(kinds)} model, got {model.kind}")
    return model


def _expr(model: ModelFile, src: str | None, what: str) -> Expr | None:
    if src is None:
        return None
    try:
        return model.expr(src)
    except ParseError as e:
        raise ParseError(f"{what}: {e.message}", e.line, e.column) from None


def _jets(model: ModelFile) -> Diffiety:
    return free_jets(model.m, model.n)


# --------------------------------------------------------------------------
# commands


def cmd_standard_basis(model, args, rep: Report):
    model = _need(model, "ode2")
    sb = standard_basis_ode2(model.get("F"))
    f = sb.forms
    rep.add("F", sb.F)
    for k in ("A", "B", "C", "M", "N", "Delta"):
        rep.add(k, getattr(sb, k))
    primary = {n: f[n] for n in ("alpha0", "alpha1", "beta0", "beta1", "beta2")}
    rep.add("beta", _combo(f["beta"], primary))
    rep.add("gamma", _combo(f["gamma"], primary))
    bg = {"beta": f["beta"], "gamma": f["gamma"]}
    rep.add("pi0", _combo(f["pi0"], bg))
    rep.add("pi1", _combo(f["pi1"], bg))
    rep.add("classification", sb.classification.value)
    if sb.G is not None:
        rep.add("G", sb.G)
    if sb.controllable:
        for n in ("beta", "gamma", "beta0", "alpha0", "alpha1"):
            e = sb.dict_entry(n)
            rep.add(f"dict[{n}]", Combo((c, f"pi{r}") for r, c in sorted(e.c.items())))


def cmd_variation(model, args, rep: Report):
    model = _need(model, "ode2")
    sb = standard_basis_ode2(model.get("F"))
    if not sb.controllable:
        raise UsageError(f"standard basis is {sb.classification.value}; variations need the controllable case")
    p = _expr(model, args.p, "--p")
    z = _expr(model, args.z, "--z") or ZERO
    Z = StandardField(sb, p, z)
    rep.add("p", p)
    rep.add("z", z)
    if p.is_zero:
        rep.add("field", "z*D" if not z.is_zero else "0")
    rep.add("alpha0(Z)", sb.value("alpha0", p))
    rep.add("beta0(Z)", sb.value("beta0", p))
    report = check_variation(sb.diffiety, Z, k=args.check_order)
    rep.add("checked orders", args.check_order)
    rep.add("residuals", "all zero" if report.passed else f"{len(report.failures)} nonzero")
    if not report.passed:
        rep.add("first failure order", report.first_failure_order)
        rep.fail()


def cmd_determining(model, args, rep: Report):
    model = _need(model, "ode2")
    sb = standard_basis_ode2(model.get("F"))
    if not sb.controllable:
        raise UsageError(f"standard basis is {sb.classification.value}; no determining system")
    ds = determining_ode2(sb)
    if args.evolutionary:
        ds = evolutionary_restriction_ode2(ds, sb)
    _system(rep, ds)
    rep.add("vanishing", tuple(atom_text(a) for a in ds.meta["vanishing"]))
    if ds.meta.get("residual") is not None:
        rep.add("residual", ds.meta["residual"])


def cmd_pde_reduce(model, args, rep: Report):
    model = _need(model, "pde1")
    red = reduce_pde1(model.get("F"))
    rep.add("F", red.F)
    rep.add("A", red.A)
    rep.add("B", red.B)
    rep.add("gamma", red.gamma)
    rep.add("identity", red.identity_holds)
    if not red.identity_holds:
        rep.fail()


def cmd_pde_determining(model, args, rep: Report):
    model = _need(model, "pde1")
    ds = determining_pde1(model.get("F"), evolutionary=args.evolutionary)
    _system(rep, ds)
    if args.evolutionary:
        rep.add("frobenius", ds.meta["frobenius"])


def cmd_pencil(model, args, rep: Report):
    model = _need(model, "pencil", "jets")
    if model.m != 2:
        raise UsageError("pencil needs two dependent variables")
    a = _expr(model, args.a, "--a")
    ds = pencil_conditions_m2(a, model.n)
    rep.add("a", a)
    _system(rep, ds)
    if args.z1 is not None or args.z2 is not None:
        z1, z2 = _expr(model, args.z1 or "0", "--z1"), _expr(model, args.z2 or "0", "--z2")
        chk = pencil_candidate_check(a, z1, z2, model.n)
        rep.add("candidate residuals zero", all(v.is_zero for _, v in chk.system_residuals))
        rep.add("L_Z pi = lambda pi", chk.lam if chk.lam is not None else "no")
        rep.add("L_Z w2 in span", chk.second is not None)
        if not chk.passed:
            rep.fail()


def cmd_involutive(model, args, rep: Report):
    model = _need(model, "jets")
    d = _jets(model)
    basis = [w for _, w in filtration_basis(d, args.level)]
    seeds = tuple(args.seed + k for k in range(args.trials))
    fam = involutive_family(d, basis, seeds=seeds, level=args.level)
    rep.add("level", args.level)
    rep.add("sigma", fam.sigma)
    rep.add("seeds", seeds)
    rep.add("stable", fam.stable)
    exact = fam.verify_exact()
    rep.add("exact independence", all(exact))
    if not (fam.stable and all(exact)):
        rep.fail()


def cmd_kdv(model, args, rep: Report):
    if model is not None:
        _need(model, "kdv")
    results = []
    for n in range(args.levels + 1):
        h = kdv_mod.hierarchy(n)
        results.append(h)
        rep.add(f"B{n}", h.B_coeffs[n])
    for h in results:
        rep.add(f"Q{h.level}", h.Q)
        if h.factored is not None:
            c, G = h.factored
            rep.add(f"Q{h.level} factored", f"({text(c)})*D({text(G)})")
        if not h.passed:
            rep.fail()
    if args.check_order:
        for h in results:
            fr = kdv_mod.verify_flow(h, args.check_order)
            rep.add(f"flow{h.level}", "passes" if fr.passed else "fails")
            if not fr.passed:
                rep.fail()


def cmd_bracket(model, args, rep: Report):
    model = _need(model, "jets")
    d = _jets(model)
    F, G, f = (_expr(model, s, n) for s, n in ((args.F, "--F"), (args.G, "--G"), (args.f, "--f")))
    try:
        b = poisson_bracket(F, G, f, d)
    except ValueError as e:
        raise UsageError(str(e)) from None
    rep.add("bracket", b)


def cmd_check_point(model, args, rep: Report):
    model = _need(model, "jets", "pencil")
    d = _jets(model)
    z = [model.get(f"Z_{atom_text(x)}", ZERO) for x in d.independents]
    zw = {fam: model.get(f"Z_{fam}", ZERO) for fam in d.family_names}
    Z = from_point_generators(d, z, zw)
    res = order_preservation_check(d, Z, args.l)
    rep.add("result", str(res))
    if not res or res.point_form is False:
        rep.fail()


COMMANDS = {
    "standard-basis": cmd_standard_basis,
    "variation": cmd_variation,
    "determining": cmd_determining,
    "pde-reduce": cmd_pde_reduce,
    "pde-determining": cmd_pde_determining,
    "pencil": cmd_pencil,
    "involutive": cmd_involutive,
    "kdv": cmd_kdv,
    "bracket": cmd_bracket,
    "check-point": cmd_check_point,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", help="model file")
    common.add_argument("--model-text", help="model source given inline")
    common.add_argument("--set", action="append", default=[], metavar="NAME=EXPR", help="add a definition")
    common.add_argument("--format", choices=("text", "latex", "json"), default="text")

    p = _Parser(prog="diffiety", description="Symbolic computations on diffieties.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("standard-basis", parents=[common])
    s = sub.add_parser("variation", parents=[common])
    s.add_argument("--p", required=True)
    s.add_argument("--z")
    s.add_argument("--check-order", type=int, default=4)
    s = sub.add_parser("determining", parents=[common])
    s.add_argument("--evolutionary", action="store_true")
    sub.add_parser("pde-reduce", parents=[common])
    s = sub.add_parser("pde-determining", parents=[common])
    s.add_argument("--evolutionary", action="store_true")
    s = sub.add_parser("pencil", parents=[common])
    s.add_argument("--a", required=True)
    s.add_argument("--z1")
    s.add_argument("--z2")
    s = sub.add_parser("involutive", parents=[common])
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=3)
    s = sub.add_parser("kdv", parents=[common])
    s.add_argument("--levels", type=int, default=2)
    s.add_argument("--check-order", type=int, default=0)
    s = sub.add_parser("bracket", parents=[common])
    s.add_argument("--F", required=True)
    s.add_argument("--G", required=True)
    s.add_argument("--f", required=True)
    s = sub.add_parser("check-point", parents=[common])
    s.add_argument("--l", type=int, required=True)
    return p


def _load_model(args) -> ModelFile | None:
    if args.model and args.model_text:
        raise UsageError("give --model or --model-text, not both")
    src = None
    if args.model:
        try:
            src = Path(args.model).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read model file: {e}") from None
    elif args.model_text:
        src = args.model_text
    model = parse_model(src) if src is not None else None
    for item in args.set:
        if model is None:
            raise UsageError("--set needs a model")
        name, sep, body = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--set expects NAME=EXPR, got {item!r}")
        model.definitions[name.strip()] = _expr(model, body, f"--set {name.strip()}")
    return model


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        model = _load_model(args)
        rep = Report(args.command, model)
        COMMANDS[args.command](model, args, rep)
    except (UsageError, ParseError) as e:
        print(f"diffiety: error: {e}", file=err)
        return USAGE
    except Inconclusive as e:
        print(f"diffiety: inconclusive: {e}", file=err)
        return CHECK_FAILED
    out.write(rep.render(args.format))
    if not rep.ok:
        print(f"diffiety: {args.command}: check failed", file=err)
        return CHECK_FAILED
    return OK


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
