"""Model files and expression text.

Grammar::

    file   := stmt+
    stmt   := "model" kind ";" | ident "=" expr ";" | "option" ident value ";"
    kind   := "jets" int int | "ode2" | "pde1" | "pencil" [int] | "kdv"
    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" int)? | "-" factor
    base   := rational | coord | ident "(" expr ("," expr)* ")" | "(" expr ")"

Unary minus binds looser than ``^`` so ``-u0^2`` is ``-(u0^2)``.  Which
coordinate names are legal depends on the model kind; see ``Vocabulary``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .expr import Atom, Elem, Expr, Fn, Jet, Param, Var, ELEMENTARY

__all__ = [
    "ParseError",
    "Vocabulary",
    "vocabulary",
    "parse_expr",
    "parse_model",
    "ModelFile",
    "KINDS",
]

KINDS = ("jets", "ode2", "pde1", "pencil", "kdv")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


# --------------------------------------------------------------------------
# vocabularies


_DIM1 = re.compile(r"([uvq])(\d)$")
_PDE_U = re.compile(r"u(\d?)$")
_PDE_V = re.compile(r"v([xy]*)$")


@dataclass(frozen=True)
class Vocabulary:
    """Coordinate names a model admits.

    ``families`` holds the one-dimensional jet families (``u0``, ``q3``);
    ``pde`` switches ``u, u1, v, vx, vy, ...`` to the two-dimensional
    jets of the ``pde1`` model; ``w`` is ``(m, n)`` for ``w[j][I]``.
    """

    names: frozenset = frozenset()  # plain variables/parameters
    families: frozenset = frozenset()
    pde: bool = False
    w: tuple | None = None
    params: frozenset = frozenset()

    def lookup(self, name: str) -> Atom | None:
        if name in self.params:
            return Param(name)
        if name in self.names:
            return Var(name)
        if self.pde:
            m = _PDE_U.match(name)
            if m:
                return Jet("u", (1,) * int(m.group(1) or 0), 2)
            m = _PDE_V.match(name)
            if m:
                return Jet("v", tuple(1 if c == "x" else 2 for c in m.group(1)), 2)
        m = _DIM1.match(name)
        if m and m.group(1) in self.families:
            return Jet(m.group(1), (1,) * int(m.group(2)), 1)
        return None


def vocabulary(kind: str | None = None, m: int = 2, n: int = 2) -> Vocabulary:
    """Vocabulary for a model kind; ``None`` gives every one-dimensional name."""
    if kind is None:
        return Vocabulary(frozenset({"x", "y"}), frozenset("uvq"), params=frozenset({"lambda"}))
    if kind == "ode2":
        return Vocabulary(frozenset({"x"}), frozenset("uv"))
    if kind == "kdv":
        return Vocabulary(frozenset({"x"}), frozenset("vq"), params=frozenset({"lambda"}))
    if kind == "pde1":
        return Vocabulary(frozenset({"x", "y"}), pde=True)
    if kind in ("jets", "pencil"):
        xs = frozenset({"x"}) if n == 1 else frozenset(f"x{i}" for i in range(1, n + 1))
        return Vocabulary(xs, w=(m, n))
    raise ValueError(f"unknown model kind {kind!r}")


# --------------------------------------------------------------------------
# tokens


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*) |
    (?P<nl>\n) |
    (?P<num>\d+) |
    (?P<ident>[A-Za-z_][A-Za-z0-9_]*) |
    (?P<op>[-+*/^(),;=\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, end
    text: str
    line: int
    column: int


def tokenize(src: str) -> list:
    out = []
    line, start, pos = 1, 0, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("end", "", line, pos - start + 1))
    return out


# --------------------------------------------------------------------------
# expressions


class _Parser:
    def __init__(self, tokens, vocab: Vocabulary, defs: dict | None = None):
        self.toks = tokens
        self.i = 0
        self.vocab = vocab
        self.defs = defs or {}
        self.arity: dict = {}

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.column)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.tok
        if not self.accept(text):
            found = "end of input" if t.kind == "end" else repr(t.text)
            self.error(f"expected {text!r}, found {found}")
        return t

    def integer(self) -> int:
        t = self.tok
        if t.kind != "num":
            self.error("expected an integer")
        self.i += 1
        return int(t.text)

    def expr(self) -> Expr:
        out = self.term()
        while True:
            if self.accept("+"):
                out = out + self.term()
            elif self.accept("-"):
                out = out - self.term()
            else:
                return out

    def term(self) -> Expr:
        out = self.factor()
        while True:
            if self.accept("*"):
                out = out * self.factor()
            elif self.tok.kind == "op" and self.tok.text == "/":
                t = self.tok
                self.i += 1
                rhs = self.factor()
                if rhs.is_zero:
                    self.error("division by zero", t)
                out = out / rhs
            else:
                return out

    def factor(self) -> Expr:
        if self.accept("-"):
            return -self.factor()
        b = self.base()
        if self.accept("^"):
            return b ** self.integer()
        return b

    def base(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Expr.const(int(t.text))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.i += 1
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(t)
            if t.text == "w" and self.vocab.w is not None and self.tok.text == "[":
                return self.w_jet(t)
            return self.name(t)
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def name(self, t: Token) -> Expr:
        if t.text in self.defs:
            return self.defs[t.text]
        a = self.vocab.lookup(t.text)
        if a is None:
            self.error(f"unknown coordinate {t.text!r}", t)
        return Expr.atom(a)

    def bracket_ints(self) -> list:
        self.expect("[")
        out = [self.integer()]
        while self.accept(","):
            out.append(self.integer())
        self.expect("]")
        return out

    def w_jet(self, t: Token) -> Expr:
        m, n = self.vocab.w
        (j, *rest) = self.bracket_ints()
        if rest or not 1 <= j <= m:
            self.error(f"w needs a family index in 1..{m}", t)
        index = ()
        if self.tok.kind == "op" and self.tok.text == "[":
            index = tuple(self.bracket_ints())
            if any(not 1 <= i <= n for i in index):
                self.error(f"jet index out of range 1..{n}", t)
        return Expr.atom(Jet(f"w{j}", index, n))

    def call(self, t: Token) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        name, *derivs = t.text.split("_") if not t.text.startswith("_") else (t.text,)
        if name in ELEMENTARY:
            if len(args) != 1 or derivs:
                self.error(f"{name} takes exactly one argument", t)
            a = _single_atom(args[0])
            if a is None or not a.is_coordinate:
                self.error(f"{name} needs a coordinate argument", t)
            return Expr.atom(Elem(name, a))
        atoms = []
        for e in args:
            a = _single_atom(e)
            if a is None or not a.is_coordinate:
                self.error(f"arguments of {name} must be coordinates", t)
            atoms.append(a)
        known = self.arity.setdefault(name, len(atoms))
        if known != len(atoms):
            self.error(f"{name} used with {len(atoms)} arguments, earlier with {known}", t)
        from .render import atom_text

        texts = [atom_text(a) for a in atoms]
        pos = []
        for dname in derivs:
            if dname not in texts:
                self.error(f"{t.text}: {dname!r} is not an argument", t)
            pos.append(texts.index(dname))
        return Expr.atom(Fn(name, atoms, pos))


def _single_atom(e: Expr) -> Atom | None:
    atoms = e.atoms()
    if len(atoms) != 1:
        return None
    a = next(iter(atoms))
    return a if e == Expr.atom(a) else None


def parse_expr(text: str, vocab: Vocabulary | str | None = None, defs: dict | None = None) -> Expr:
    """Parse one expression; ``vocab`` may be a model kind name."""
    if not isinstance(vocab, Vocabulary):
        vocab = vocabulary(vocab)
    p = _Parser(tokenize(text), vocab, defs)
    e = p.expr()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    return e


# --------------------------------------------------------------------------
# model files


@dataclass
class ModelFile:
    kind: str
    m: int = 1
    n: int = 1
    definitions: dict = field(default_factory=dict)  # name -> Expr
    positions: dict = field(default_factory=dict)  # name -> (line, column)
    options: dict = field(default_factory=dict)

    @property
    def vocab(self) -> Vocabulary:
        return vocabulary(self.kind, self.m, self.n)

    def expr(self, text: str) -> Expr:
        """Parse expression text in this model's vocabulary (definitions visible)."""
        return parse_expr(text, self.vocab, self.definitions)

    def __getitem__(self, name: str) -> Expr:
        return self.definitions[name]

    def get(self, name: str, default=None):
        return self.definitions.get(name, default)


def parse_model(text: str) -> ModelFile:
    toks = tokenize(text)
    p = _Parser(toks, Vocabulary())
    model: ModelFile | None = None
    while p.tok.kind != "end":
        t = p.tok
        if t.kind != "ident":
            p.error(f"expected a statement, found {t.text!r}")
        if t.text == "model":
            p.i += 1
            if model is not None:
                p.error("second model statement", t)
            model = _model_kind(p)
            p.vocab = model.vocab
            p.defs = model.definitions
        elif t.text == "option":
            p.i += 1
            key = p.tok
            if key.kind != "ident":
                p.error("expected an option name")
            p.i += 1
            val = p.tok
            if val.kind not in ("ident", "num"):
                p.error("expected an option value")
            p.i += 1
            if model is None:
                p.error("option before model statement", t)
            model.options[key.text] = int(val.text) if val.kind == "num" else val.text
        else:
            p.i += 1
            if model is None:
                p.error("definition before model statement", t)
            p.expect("=")
            model.definitions[t.text] = p.expr()
            model.positions[t.text] = (t.line, t.column)
        p.expect(";")
    if model is None:
        raise ParseError("missing model statement", 1, 1)
    return model


def _model_kind(p: _Parser) -> ModelFile:
    t = p.tok
    if t.kind != "ident" or t.text not in KINDS:
        p.error(f"unknown model kind {t.text!r}; expected one of {', '.join(KINDS)}")
    p.i += 1
    if t.text == "jets":
        m, n = p.integer(), p.integer()
        if m < 1 or n < 1:
            p.error("jets needs m, n >= 1", t)
        return ModelFile("jets", m, n)
    if t.text == "pencil":
        n = p.integer() if p.tok.kind == "num" else 2
        return ModelFile("pencil", 2, n)
    if t.text == "pde1":
        return ModelFile("pde1", 2, 2)
    return ModelFile(t.text)
