"""Plain-text, LaTeX and JSON presentation of expressions and forms.

The text format is the parser's input language: ``parse(text(e)) == e``
for every canonical expression (given the model vocabulary the atoms were
named in).  Monomials are printed by descending total degree, then by
ascending atom order, so output is byte-stable.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .expr import Atom, Elem, Expr, Fn, Jet, Param, Var

_W_FAMILY = re.compile(r"w(\d+)$")
_GREEK = {
    "lambda": r"\lambda",
    "lam": r"\lambda",
    "mu": r"\mu",
    "alpha": r"\alpha",
    "beta": r"\beta",
    "gamma": r"\gamma",
    "pi": r"\pi",
    "omega": r"\omega",
    "Delta": r"\Delta",
}


def _pde_name(a: Jet) -> str | None:
    if a.dim != 2 or a.family not in ("u", "v"):
        return None
    if a.family == "u":
        if not a.index:
            return "u"
        if all(i == 1 for i in a.index):
            return f"u{a.order}"
        return None
    return "v" + "".join("x" if i == 1 else "y" for i in a.index)


def atom_text(a: Atom) -> str:
    if isinstance(a, (Var, Param)):
        return a.name
    if isinstance(a, Jet):
        m = _W_FAMILY.match(a.family)
        if m:
            s = f"w[{m.group(1)}]"
            return s + (f"[{','.join(map(str, a.index))}]" if a.index else "")
        if a.dim == 1:
            return f"{a.family}{a.order}"
        name = _pde_name(a)
        if name is not None:
            return name
        return f"{a.family}[{','.join(map(str, a.index))}]"
    if isinstance(a, Fn):
        head = a.name + "".join("_" + atom_text(a.args[k]) for k in a.derivs)
        return f"{head}({','.join(atom_text(x) for x in a.args)})"
    if isinstance(a, Elem):
        return f"{a.name}({atom_text(a.arg)})"
    raise TypeError(a)


def _sub(s: str) -> str:
    return s if len(s) == 1 else "{" + s + "}"


def atom_latex(a: Atom) -> str:
    if isinstance(a, Var):
        m = re.match(r"([a-zA-Z]+)(\d+)$", a.name)
        if m:
            return f"{m.group(1)}_{_sub(m.group(2))}"
        return _GREEK.get(a.name, a.name)
    if isinstance(a, Param):
        return _GREEK.get(a.name, a.name)
    if isinstance(a, Jet):
        m = _W_FAMILY.match(a.family)
        if m:
            s = f"w^{_sub(m.group(1))}"
            return s + (f"_{_sub(''.join(map(str, a.index)))}" if a.index else "")
        if a.dim == 1:
            return f"{a.family}_{_sub(str(a.order))}"
        name = _pde_name(a)
        if name is not None:
            return name[0] + (f"_{_sub(name[1:])}" if len(name) > 1 else "")
        return f"{a.family}_{_sub(''.join(map(str, a.index)))}"
    if isinstance(a, Fn):
        if not a.derivs:
            return a.name
        return a.name + "_{" + "".join(atom_latex(a.args[k]) for k in a.derivs) + "}"
    if isinstance(a, Elem):
        return rf"\{a.name}{{{atom_latex(a.arg)}}}" if a.name == "ln" else f"{a.name}({atom_latex(a.arg)})"
    raise TypeError(a)


def _render_key(m):
    return (-sum(e for _, e in m), tuple((x.key, -e) for x, e in m))


def _sorted_terms(poly):
    return sorted(poly.items(), key=lambda t: _render_key(t[0]))


def _frac_text(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono_text(m) -> str:
    return "*".join(atom_text(x) + (f"^{e}" if e != 1 else "") for x, e in m)


def _poly_text(poly) -> str:
    if not poly:
        return "0"
    parts = []
    for i, (m, c) in enumerate(_sorted_terms(poly)):
        c = Fraction(c)
        neg = c < 0
        mag = -c if neg else c
        if not m:
            body = _frac_text(mag)
        elif mag == 1:
            body = _mono_text(m)
        else:
            body = f"{_frac_text(mag)}*{_mono_text(m)}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def text(e: Expr) -> str:
    if e.is_polynomial:
        return _poly_text(e.num)
    return f"({_poly_text(e.num)})/({_poly_text(e.den)})"


_CONTROL_WORD = re.compile(r"\\[A-Za-z]+$")


def _glue(parts) -> str:
    """Concatenate LaTeX pieces, spacing after a bare control word."""
    out = ""
    for p in parts:
        if _CONTROL_WORD.search(out) and p[:1].isalpha():
            out += " "
        out += p
    return out


def _mono_latex(m) -> str:
    return _glue(atom_latex(x) + (f"^{{{e}}}" if e != 1 else "") for x, e in m)


def _poly_latex(poly) -> str:
    if not poly:
        return "0"
    parts = []
    for i, (m, c) in enumerate(_sorted_terms(poly)):
        c = Fraction(c)
        neg = c < 0
        mag = -c if neg else c
        if mag.denominator != 1:
            coef = rf"\frac{{{mag.numerator}}}{{{mag.denominator}}}"
        elif mag != 1 or not m:
            coef = str(mag.numerator)
        else:
            coef = ""
        body = _glue([coef, _mono_latex(m)]) if coef else _mono_latex(m)
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts)


def latex(e: Expr) -> str:
    if e.is_polynomial:
        return _poly_latex(e.num)
    return rf"\frac{{{_poly_latex(e.num)}}}{{{_poly_latex(e.den)}}}"


def _atom_json(a: Atom) -> dict:
    kind = {Var: "var", Param: "param", Jet: "jet", Fn: "function", Elem: "elementary"}[type(a)]
    return {"op": "atom", "kind": kind, "name": atom_text(a)}


def _const_json(c) -> dict:
    return {"op": "const", "value": _frac_text(Fraction(c))}


def _poly_json(poly) -> dict:
    if not poly:
        return _const_json(0)
    terms = []
    for m, c in _sorted_terms(poly):
        factors = []
        if c != 1 or not m:
            factors.append(_const_json(c))
        for x, e in m:
            node = _atom_json(x)
            factors.append(node if e == 1 else {"op": "pow", "args": [node, _const_json(e)]})
        terms.append(factors[0] if len(factors) == 1 else {"op": "mul", "args": factors})
    return terms[0] if len(terms) == 1 else {"op": "add", "args": terms}


def to_json(e: Expr) -> dict:
    """Nested ``{op, args}`` tree of a canonical expression."""
    if e.is_polynomial:
        return _poly_json(e.num)
    return {"op": "div", "args": [_poly_json(e.num), _poly_json(e.den)]}


# --------------------------------------------------------------------------
# named linear combinations (forms written in a chosen basis)


def _form_name_latex(name: str) -> str:
    m = re.match(r"([A-Za-z]+)(\d*)(.*)$", name)
    head, idx, rest = m.group(1), m.group(2), m.group(3)
    if head.startswith("d") and len(head) > 1 and head != "dx":
        return "d" + _GREEK.get(head[1:], head[1:]) + (f"_{_sub(idx)}" if idx else "") + rest
    body = _GREEK.get(head, head)
    return body + (f"_{_sub(idx)}" if idx else "") + rest


def combo_text(pairs) -> str:
    """``[(coefficient, name), ...]`` as ``c1*name1 + c2*name2``."""
    parts = []
    for coef, name in pairs:
        if coef.is_zero:
            continue
        if coef == 1:
            body, neg = name, False
        elif coef == -1:
            body, neg = name, True
        else:
            t = text(coef)
            if coef.is_polynomial and len(coef.num) == 1:
                neg = t.startswith("-")
                t = t[1:] if neg else t
                body = f"{t}*{name}"
            else:
                neg = False
                body = f"({t})*{name}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts) or "0"


def combo_latex(pairs, latex_names: bool = False) -> str:
    parts = []
    for coef, name in pairs:
        if coef.is_zero:
            continue
        lname = name if latex_names else _form_name_latex(name)
        if coef == 1:
            body, neg = lname, False
        elif coef == -1:
            body, neg = lname, True
        else:
            t = latex(coef)
            if coef.is_polynomial and len(coef.num) == 1:
                neg = t.startswith("-")
                t = t[1:] if neg else t
                body = _glue([t, lname])
            else:
                neg = False
                body = f"({t}){lname}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts) or "0"


def combo_json(pairs) -> list:
    return [{"form": name, "coefficient": to_json(c)} for c, name in pairs if not c.is_zero]


def render(value, fmt: str = "text") -> str:
    """Render an expression, a named combination or a one-form."""
    from .forms import OneForm

    if isinstance(value, OneForm):
        pairs = [(c, "d" + atom_text(a)) for a, c in value.items()]
        if fmt == "text":
            return combo_text(pairs)
        if fmt == "latex":
            return combo_latex([(c, r"\mathrm{d}" + atom_latex(a)) for a, c in value.items()], True)
        return json.dumps(combo_json(pairs), sort_keys=True)
    if isinstance(value, (int, Fraction)):
        value = Expr.const(value)
    if isinstance(value, Expr):
        if fmt == "text":
            return text(value)
        if fmt == "latex":
            return latex(value)
        if fmt == "json":
            return json.dumps(to_json(value), sort_keys=True)
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(value, (list, tuple)):
        if fmt == "text":
            return combo_text(value)
        if fmt == "latex":
            return combo_latex(value)
        return json.dumps(combo_json(value), sort_keys=True)
    raise TypeError(f"cannot render {type(value).__name__}")
