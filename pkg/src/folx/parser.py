"""Concrete syntax of ``.fol`` programs, and rendering back to text.

A program is a sequence of statements::

    theory ED { const zero, unit; func add/2, sub/2, mul/2; rel lt/2; }
    interpretation M of ED = builtin mod(61);
    def double := lambda(x). add(x, x);
    def p := lambda(x, y). sum(x, x, y);
    rec gcd/3 {
      gcd(x, y, z) <- lt(x, y), gcd(x, sub(y, x), z);
      gcd(x, y, z) <- lt(y, x), gcd(sub(x, y), y, z);
      gcd(x, y, z) <- y = x, z = x;
    }
    query solve gcd(48, 36, Z);

Formula connectives, loosest first: ``->``/``<-``, ``|``, ``&``, ``!``.
Quantifiers ``exists x.``/``forall x, y.`` extend as far right as possible.
A bare identifier in a term is a constant if a 0-ary function of that name
is in scope, otherwise a variable.  ``#`` starts a comment.

The parser tracks which names are function symbols so that a ``def`` body
can be classified as a term (function definition) or a formula (relation
definition) without a separate keyword.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import FolSyntaxError, UnknownDirective
from .relalg import Relation, Tuple
from .syntax import (
    And,
    App,
    Atom,
    Clause,
    Eq,
    Exists,
    Forall,
    Formula,
    FuncDef,
    HornBlock,
    Implies,
    Lit,
    Not,
    Or,
    RelDef,
    Span,
    Term,
    TheoryDecl,
    Var,
)
from .universe import MOD_RING_FUNCTIONS

# ------------------------------------------------------------ statements


@dataclass(frozen=True)
class ModSpec:
    modulus: int


@dataclass(frozen=True)
class EnumSpec:
    elements: tuple[str, ...]
    relations: tuple[tuple[str, int, tuple[tuple[str, ...], ...]], ...] = ()
    functions: tuple[tuple[str, int, tuple[tuple[tuple[str, ...], str], ...]], ...] = ()


BuiltinSpec = Union[ModSpec, EnumSpec]


@dataclass(frozen=True)
class InterpBinding:
    name: str
    theory: str
    spec: BuiltinSpec
    span: Span = field(default=None, compare=False)


@dataclass(frozen=True)
class Query:
    """``kind`` is one of eval, holds, solve, dump, entails."""

    kind: str
    term: Term | None = None
    formula: Formula | None = None
    formula2: Formula | None = None
    symbol: str | None = None
    under: tuple[tuple[str, int], ...] = ()
    span: Span = field(default=None, compare=False)


Statement = Union[TheoryDecl, InterpBinding, FuncDef, RelDef, HornBlock, Query]


@dataclass(frozen=True)
class SourceProgram:
    statements: tuple[Statement, ...]

    def __iter__(self):
        return iter(self.statements)

    def __len__(self) -> int:
        return len(self.statements)


# -------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|<-|->|\|=|!=|[{}(),;./&|!=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.line, self.col)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FolSyntaxError(f"unexpected character {text[pos]!r}", (line, pos - line_start + 1))
        kind = m.lastgroup
        tok_text = m.group()
        if kind != "ws":
            out.append(Token(kind, tok_text, line, pos - line_start + 1))
        nl = tok_text.count("\n")
        if nl:
            line += nl
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# -------------------------------------------------------------- parser

DIRECTIVES = ("theory", "interpretation", "def", "rec", "query")
QUERY_KINDS = ("eval", "holds", "solve", "dump", "entails")


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.functions: dict[str, int] = dict(MOD_RING_FUNCTIONS)

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "name")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> FolSyntaxError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return FolSyntaxError(f"{msg}, found {found}", tok.span)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def name(self) -> str:
        if self.tok.kind != "name":
            raise self.error("expected a name")
        return self.advance().text

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise self.error("expected an integer")
        return int(self.advance().text)

    def names(self) -> list[str]:
        out = [self.name()]
        while self.at(","):
            self.advance()
            out.append(self.name())
        return out

    # -- program
    def program(self) -> SourceProgram:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement())
        return SourceProgram(tuple(stmts))

    def statement(self) -> Statement:
        t = self.tok
        if t.kind != "name" or t.text not in DIRECTIVES:
            if t.kind == "name":
                raise UnknownDirective(f"unknown directive {t.text!r}", t.span)
            raise self.error("expected a statement")
        return getattr(self, "stmt_" + t.text)()

    def stmt_theory(self) -> TheoryDecl:
        start = self.advance()
        name = self.name()
        self.expect("{")
        funcs: dict[str, int] = {}
        rels: dict[str, int] = {}
        seen: set[str] = set()

        def declare(table, sym, n, tok):
            if sym in seen:
                raise FolSyntaxError(f"symbol {sym!r} declared twice", tok.span)
            seen.add(sym)
            table[sym] = n

        while not self.at("}"):
            kw = self.tok
            if self.at("const"):
                self.advance()
                for c in self.names():
                    declare(funcs, c, 0, kw)
            elif self.at("func") or self.at("rel"):
                table = funcs if self.advance().text == "func" else rels
                while True:
                    sym = self.name()
                    self.expect("/")
                    declare(table, sym, self.integer(), kw)
                    if not self.at(","):
                        break
                    self.advance()
            else:
                raise self.error("expected 'const', 'func' or 'rel'")
            self.expect(";")
        self.expect("}")
        self._note_signature(funcs, rels)
        return TheoryDecl(name, funcs, rels, span=start.span)

    def _note_signature(self, funcs: dict[str, int], rels: Iterable[str]) -> None:
        for r in rels:
            self.functions.pop(r, None)
        self.functions.update(funcs)

    def stmt_interpretation(self) -> InterpBinding:
        start = self.advance()
        name = self.name()
        self.expect("of")
        theory = self.name()
        self.expect("=")
        self.expect("builtin")
        if self.at("mod"):
            self.advance()
            self.expect("(")
            m = self.integer()
            self.expect(")")
            spec: BuiltinSpec = ModSpec(m)
            self._note_signature(dict(MOD_RING_FUNCTIONS), ())
        elif self.at("enum"):
            spec = self.enum_spec()
        else:
            raise self.error("expected 'mod' or 'enum'")
        self.expect(";")
        return InterpBinding(name, theory, spec, span=start.span)

    def _row(self) -> tuple[str, ...]:
        self.expect("(")
        if self.at(")"):
            self.advance()
            return ()
        vals = self.names()
        self.expect(")")
        return tuple(vals)

    def enum_spec(self) -> EnumSpec:
        self.expect("enum")
        self.expect("{")
        elements: list[str] = []
        rels, funcs = [], []
        while not self.at("}"):
            if self.at("elements"):
                self.advance()
                elements.extend(self.names())
            elif self.at("rel") or self.at("func"):
                is_func = self.advance().text == "func"
                sym = self.name()
                arity = None
                if self.at("/"):
                    self.advance()
                    arity = self.integer()
                self.expect("=")
                self.expect("{")
                rows = []
                while not self.at("}"):
                    row = self._row()
                    if is_func:
                        self.expect("->")
                        rows.append((row, self.name()))
                    else:
                        rows.append(row)
                    if not self.at(","):
                        break
                    self.advance()
                self.expect("}")
                if arity is None:
                    if not rows:
                        raise self.error(f"empty table for {sym!r} needs an explicit arity")
                    arity = len(rows[0][0]) if is_func else len(rows[0])
                (funcs if is_func else rels).append((sym, arity, tuple(rows)))
            elif self.at("const"):
                self.advance()
                sym = self.name()
                self.expect("=")
                funcs.append((sym, 0, (((), self.name()),)))
            else:
                raise self.error("expected 'elements', 'rel', 'func' or 'const'")
            self.expect(";")
        self.expect("}")
        if not elements:
            raise self.error("enum universe needs an 'elements' clause")
        self._note_signature({e: 0 for e in elements}, [r[0] for r in rels])
        self._note_signature({f[0]: f[1] for f in funcs}, ())
        return EnumSpec(tuple(elements), tuple(rels), tuple(funcs))

    def stmt_def(self) -> Union[FuncDef, RelDef]:
        start = self.advance()
        sym = self.name()
        self.expect(":=")
        self.expect("lambda")
        self.expect("(")
        params: list[str] = [] if self.at(")") else self.names()
        self.expect(")")
        self.expect(".")
        saved = self.i
        body: Union[Term, Formula, None] = None
        try:
            t = self.term()
            if self.at(";") and self._is_term(t, params):
                body = t
        except FolSyntaxError:
            pass
        if body is None:
            self.i = saved
            body = self.formula()
        self.expect(";")
        if isinstance(body, (Var, Lit, App)):
            self.functions[sym] = len(params)
            return FuncDef(sym, tuple(params), body, span=start.span)
        return RelDef(sym, tuple(params), body, span=start.span)

    def _is_term(self, t: Term, params: list[str]) -> bool:
        if isinstance(t, Lit):
            return True
        if isinstance(t, Var):
            return t.name in params
        return t.symbol in self.functions

    def stmt_rec(self) -> HornBlock:
        start = self.advance()
        symbols = []
        while True:
            sym = self.name()
            self.expect("/")
            symbols.append((sym, self.integer()))
            if not self.at(","):
                break
            self.advance()
        self._note_signature({}, [s for s, _ in symbols])
        self.expect("{")
        clauses = []
        while not self.at("}"):
            clauses.append(self.clause())
        self.expect("}")
        return HornBlock(tuple(symbols), tuple(clauses), span=start.span)

    def clause(self) -> Clause:
        start = self.tok
        head = self.primary()
        if not isinstance(head, Atom):
            raise self.error("clause head must be an atom", start)
        body: list[Formula] = []
        if self.at("<-"):
            self.advance()
            while True:
                lit = self.formula()
                body.extend(lit.parts if isinstance(lit, And) else (lit,))
                if not self.at(","):
                    break
                self.advance()
        self.expect(";")
        return Clause(head, tuple(body), span=start.span)

    def stmt_query(self) -> Query:
        start = self.advance()
        kind_tok = self.tok
        kind = self.name()
        span = start.span
        if kind == "eval":
            t = self.term()
            under: list[tuple[str, int]] = []
            if self.at("under"):
                self.advance()
                self.expect("(")
                while True:
                    v = self.name()
                    self.expect("=")
                    under.append((v, self.integer()))
                    if not self.at(","):
                        break
                    self.advance()
                self.expect(")")
            q = Query("eval", term=t, under=tuple(under), span=span)
        elif kind in ("holds", "solve"):
            q = Query(kind, formula=self.formula(), span=span)
        elif kind == "dump":
            q = Query("dump", symbol=self.name(), span=span)
        elif kind == "entails":
            f0 = self.formula()
            self.expect("|=")
            q = Query("entails", formula=f0, formula2=self.formula(), span=span)
        else:
            raise UnknownDirective(f"unknown query kind {kind!r}", kind_tok.span)
        self.expect(";")
        return q

    # -- terms
    def term(self) -> Term:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Lit(int(t.text))
        if t.kind != "name":
            raise self.error("expected a term")
        self.advance()
        if self.at("("):
            return App(t.text, self.args())
        if self.functions.get(t.text) == 0:
            return App(t.text, ())
        return Var(t.text)

    def args(self) -> tuple[Term, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.term())
            while self.at(","):
                self.advance()
                out.append(self.term())
        self.expect(")")
        return tuple(out)

    # -- formulas
    def formula(self) -> Formula:
        lhs = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(lhs, self.formula())
        if self.at("<-"):
            self.advance()
            return Or((lhs, Not(self.formula())))
        return lhs

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.at("|"):
            self.advance()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.at("&"):
            self.advance()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("exists") or self.at("forall"):
            q = Exists if self.advance().text == "exists" else Forall
            names = self.names()
            self.expect(".")
            body = self.formula()
            for n in reversed(names):
                body = q(n, body)
            return body
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if self.at("true"):
            self.advance()
            return And(())
        if self.at("false"):
            self.advance()
            return Or(())
        if t.kind == "int":
            left = self.term()
            return self._equation(left)
        if t.kind != "name":
            raise self.error("expected a formula")
        self.advance()
        args = self.args() if self.at("(") else None
        if self.at("=") or self.at("!="):
            if args is not None:
                left: Term = App(t.text, args)
            elif self.functions.get(t.text) == 0:
                left = App(t.text, ())
            else:
                left = Var(t.text)
            return self._equation(left)
        return Atom(t.text, args or ())

    def _equation(self, left: Term) -> Formula:
        if self.at("="):
            self.advance()
            return Eq(left, self.term())
        if self.at("!="):
            self.advance()
            return Not(Eq(left, self.term()))
        raise self.error("expected '=' or '!='")


def parse_program(text: str) -> SourceProgram:
    return Parser(text).program()


def parse_formula(text: str, functions: dict[str, int] | None = None) -> Formula:
    p = Parser(text)
    if functions is not None:
        p.functions.update(functions)
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return f


def parse_term(text: str, functions: dict[str, int] | None = None) -> Term:
    p = Parser(text)
    if functions is not None:
        p.functions.update(functions)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return t


# ------------------------------------------------------------- rendering


def _element(e, universe) -> str:
    if universe is not None and isinstance(e, int) and e in universe:
        return universe.name(e)
    return str(e)


def render_tuple(t: Tuple, universe=None) -> str:
    if not t.index:
        return "()"
    if isinstance(t.index[0], int):
        return "(" + ", ".join(_element(v, universe) for v in t.values) + ")"
    return "(" + ", ".join(f"{i}={_element(v, universe)}" for i, v in t.items()) + ")"


def render(value, universe=None) -> str:
    """Deterministic text for a relation, tuple or element."""
    if isinstance(value, Relation):
        if not value.index:
            return "true" if value.rows else "false"
        return "{" + ", ".join(render_tuple(t, value.universe) for t in value) + "}"
    if isinstance(value, Tuple):
        return render_tuple(value, universe)
    if isinstance(value, bool):
        return "true" if value else "false"
    return _element(value, universe)


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return str(t.value)
    if not t.args:
        return t.symbol
    return f"{t.symbol}({', '.join(render_term(a) for a in t.args)})"


def _single(F: Formula) -> Formula:
    # a one-part conjunction or disjunction has no surface form of its own
    while isinstance(F, (And, Or)) and len(F.parts) == 1:
        F = F.parts[0]
    return F


def _wrap(F: Formula) -> str:
    F = _single(F)
    s = render_formula(F)
    if isinstance(F, (Atom, Eq)) or (isinstance(F, (And, Or)) and not F.parts):
        return s
    if isinstance(F, Not) and isinstance(_single(F.body), (Atom, Eq, Not)):
        return s
    return f"({s})"


def render_formula(F: Formula) -> str:
    F = _single(F)
    if isinstance(F, Atom):
        return F.symbol if not F.args else f"{F.symbol}({', '.join(render_term(a) for a in F.args)})"
    if isinstance(F, Eq):
        return f"{render_term(F.left)} = {render_term(F.right)}"
    if isinstance(F, And):
        return " & ".join(_wrap(p) for p in F.parts) if F.parts else "true"
    if isinstance(F, Or):
        return " | ".join(_wrap(p) for p in F.parts) if F.parts else "false"
    if isinstance(F, Not):
        if isinstance(_single(F.body), Eq):
            return f"!({render_formula(F.body)})"
        return "!" + _wrap(F.body)
    if isinstance(F, Implies):
        return f"{_wrap(F.antecedent)} -> {_wrap(F.consequent)}"
    if isinstance(F, (Exists, Forall)):
        q = "exists" if isinstance(F, Exists) else "forall"
        return f"{q} {F.var}. {_wrap(F.body)}"
    raise TypeError(f"not a formula: {F!r}")


def render_statement(s: Statement) -> str:
    if isinstance(s, TheoryDecl):
        parts = []
        consts = [f for f, n in s.functions.items() if n == 0]
        funcs = [f"{f}/{n}" for f, n in s.functions.items() if n > 0]
        rels = [f"{r}/{n}" for r, n in s.relations.items()]
        if consts:
            parts.append(f"const {', '.join(consts)};")
        if funcs:
            parts.append(f"func {', '.join(funcs)};")
        if rels:
            parts.append(f"rel {', '.join(rels)};")
        return f"theory {s.name} {{ {' '.join(parts)} }}"
    if isinstance(s, InterpBinding):
        if isinstance(s.spec, ModSpec):
            spec = f"mod({s.spec.modulus})"
        else:
            items = [f"elements {', '.join(s.spec.elements)};"]
            for sym, n, rows in s.spec.relations:
                items.append(f"rel {sym}/{n} = {{{', '.join('(' + ', '.join(r) + ')' for r in rows)}}};")
            for sym, n, rows in s.spec.functions:
                cells = ", ".join(f"({', '.join(a)}) -> {v}" for a, v in rows)
                items.append(f"func {sym}/{n} = {{{cells}}};")
            spec = f"enum {{ {' '.join(items)} }}"
        return f"interpretation {s.name} of {s.theory} = builtin {spec};"
    if isinstance(s, FuncDef):
        return f"def {s.symbol} := lambda({', '.join(s.params)}). {render_term(s.body)};"
    if isinstance(s, RelDef):
        return f"def {s.symbol} := lambda({', '.join(s.params)}). {render_formula(s.body)};"
    if isinstance(s, HornBlock):
        head = ", ".join(f"{p}/{n}" for p, n in s.symbols)
        lines = [f"rec {head} {{"]
        for c in s.clauses:
            h = render_formula(c.head)
            if c.body:
                lines.append(f"  {h} <- {', '.join(_wrap(b) for b in c.body)};")
            else:
                lines.append(f"  {h};")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(s, Query):
        if s.kind == "eval":
            under = ""
            if s.under:
                under = " under (" + ", ".join(f"{v}={n}" for v, n in s.under) + ")"
            return f"query eval {render_term(s.term)}{under};"
        if s.kind in ("holds", "solve"):
            return f"query {s.kind} {render_formula(s.formula)};"
        if s.kind == "dump":
            return f"query dump {s.symbol};"
        return f"query entails {render_formula(s.formula)} |= {render_formula(s.formula2)};"
    raise TypeError(f"not a statement: {s!r}")


def render_program(p: SourceProgram) -> str:
    return "\n".join(render_statement(s) for s in p.statements) + "\n"
