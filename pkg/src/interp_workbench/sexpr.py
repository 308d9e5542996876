"""S-expression reader and printer for terms, formulas and the artifact files.

Grammar (documented in README):

    term    ::= xN | SYMBOL | (SYMBOL term*)          ; xN is a variable
    formula ::= false
              | (REL term*)
              | (and f f) | (or f f) | (-> f f) | (not f)
              | (forall xN f) | (exists xN f)
              | (ball xN term f)  | (bex xN term f)   ; x < t
              | (balle xN term f) | (bexle xN term f) ; x <= t

Arity errors are reported with source positions.  Printing is canonical, so
print-then-parse is the identity on syntax trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .syntax import (
    And,
    App,
    Atom,
    BExists,
    BForall,
    Bot,
    BOT,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Signature,
    SyntaxError_,
    Term,
    Var,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Sym:
    text: str
    line: int
    col: int

    def __repr__(self):
        return self.text


SExpr = Union[Sym, list]

_TOKEN = re.compile(r"""\(|\)|;[^\n]*|[^\s();]+""")
_VAR = re.compile(r"^x(\d+)$")


def tokenize(text: str) -> Iterator[Sym]:
    line = 1
    start = 0
    for m in _TOKEN.finditer(text):
        line += text.count("\n", start, m.start())
        nl = text.rfind("\n", 0, m.start())
        col = m.start() - nl
        start = m.start()
        tok = m.group(0)
        if tok.startswith(";"):
            continue
        yield Sym(tok, line, col)


def read_all(text: str) -> list[SExpr]:
    """Parse text into a list of nested Sym lists."""
    stack: list[list] = [[]]
    opens: list[Sym] = []
    for tok in tokenize(text):
        if tok.text == "(":
            stack.append([])
            opens.append(tok)
        elif tok.text == ")":
            if len(stack) == 1:
                raise ParseError("unmatched ')'", tok.line, tok.col)
            done = stack.pop()
            opens.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        o = opens[-1]
        raise ParseError("unclosed '('", o.line, o.col)
    return stack[0]


def read_one(text: str) -> SExpr:
    items = read_all(text)
    if len(items) != 1:
        raise ParseError(f"expected exactly one s-expression, got {len(items)}")
    return items[0]


def _pos(sx: SExpr) -> tuple[int, int]:
    if isinstance(sx, Sym):
        return sx.line, sx.col
    if sx:
        return _pos(sx[0])
    return 0, 0


def _head(sx: SExpr) -> Optional[str]:
    if isinstance(sx, list) and sx and isinstance(sx[0], Sym):
        return sx[0].text
    return None


_CONNECTIVES = {"and", "or", "->", "not", "forall", "exists", "ball", "bex", "balle", "bexle", "false"}


def term_of_sexpr(sx: SExpr, sig: Signature) -> Term:
    if isinstance(sx, Sym):
        m = _VAR.match(sx.text)
        if m:
            return Var(int(m.group(1)))
        if sig.has_function(sx.text):
            if sig.fun_arity(sx.text) != 0:
                raise ParseError(f"function {sx.text!r} needs arguments", sx.line, sx.col)
            return App(sx.text, ())
        raise ParseError(f"unknown term symbol {sx.text!r}", sx.line, sx.col)
    if not sx or not isinstance(sx[0], Sym):
        raise ParseError("malformed term", *_pos(sx))
    head = sx[0]
    if not sig.has_function(head.text):
        raise ParseError(f"unknown function symbol {head.text!r}", head.line, head.col)
    want = sig.fun_arity(head.text)
    args = sx[1:]
    if len(args) != want:
        raise ParseError(
            f"function {head.text!r} expects {want} arguments, got {len(args)}", head.line, head.col
        )
    return App(head.text, tuple(term_of_sexpr(a, sig) for a in args))


def _var_of(sx: SExpr) -> int:
    if isinstance(sx, Sym):
        m = _VAR.match(sx.text)
        if m:
            return int(m.group(1))
    raise ParseError("expected a variable (xN)", *_pos(sx))


def formula_of_sexpr(sx: SExpr, sig: Signature) -> Formula:
    if isinstance(sx, Sym):
        if sx.text == "false":
            return BOT
        raise ParseError(f"expected a formula, got {sx.text!r}", sx.line, sx.col)
    head = _head(sx)
    if head is None:
        raise ParseError("malformed formula", *_pos(sx))
    h = sx[0]
    args = sx[1:]
    if head in ("and", "or", "->"):
        if len(args) != 2:
            raise ParseError(f"{head!r} takes two formulas", h.line, h.col)
        cls = {"and": And, "or": Or, "->": Imp}[head]
        return cls(formula_of_sexpr(args[0], sig), formula_of_sexpr(args[1], sig))
    if head == "not":
        if len(args) != 1:
            raise ParseError("'not' takes one formula", h.line, h.col)
        return Not(formula_of_sexpr(args[0], sig))
    if head in ("forall", "exists"):
        if len(args) != 2:
            raise ParseError(f"{head!r} takes a variable and a body", h.line, h.col)
        v = _var_of(args[0])
        body = formula_of_sexpr(args[1], sig)
        return (Forall if head == "forall" else Exists)(v, body)
    if head in ("ball", "bex", "balle", "bexle"):
        if len(args) != 3:
            raise ParseError(f"{head!r} takes a variable, a bound term and a body", h.line, h.col)
        v = _var_of(args[0])
        bound = term_of_sexpr(args[1], sig)
        body = formula_of_sexpr(args[2], sig)
        strict = head in ("ball", "bex")
        cls = BForall if head in ("ball", "balle") else BExists
        try:
            return cls(v, bound, strict, body)
        except SyntaxError_ as e:
            raise ParseError(str(e), h.line, h.col)
    # atom
    if not sig.has_relation(head):
        raise ParseError(f"unknown relation symbol {head!r}", h.line, h.col)
    want = sig.rel_arity(head)
    if len(args) != want:
        raise ParseError(f"relation {head!r} expects {want} arguments, got {len(args)}", h.line, h.col)
    return Atom(head, tuple(term_of_sexpr(a, sig) for a in args))


def parse_term(text: str, sig: Signature) -> Term:
    return term_of_sexpr(read_one(text), sig)


def parse_formula(text: str, sig: Signature) -> Formula:
    return formula_of_sexpr(read_one(text), sig)


# ---------------------------------------------------------------------------
# Printing


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"x{t.index}"
    if not t.args:
        return t.symbol
    return "(" + " ".join([t.symbol] + [print_term(a) for a in t.args]) + ")"


def print_formula(phi: Formula) -> str:
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Atom):
        parts = [phi.rel] + [print_term(a) for a in phi.args]
        return "(" + " ".join(parts) + ")"
    if isinstance(phi, And):
        return f"(and {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, Or):
        return f"(or {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, Imp):
        return f"(-> {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, Not):
        return f"(not {print_formula(phi.body)})"
    if isinstance(phi, Forall):
        return f"(forall x{phi.var} {print_formula(phi.body)})"
    if isinstance(phi, Exists):
        return f"(exists x{phi.var} {print_formula(phi.body)})"
    if isinstance(phi, BForall):
        head = "ball" if phi.strict else "balle"
        return f"({head} x{phi.var} {print_term(phi.bound)} {print_formula(phi.body)})"
    if isinstance(phi, BExists):
        head = "bex" if phi.strict else "bexle"
        return f"({head} x{phi.var} {print_term(phi.bound)} {print_formula(phi.body)})"
    raise SyntaxError_(f"not a formula: {phi!r}")


def print_sexpr(sx) -> str:
    """Print a nested list/str structure; used for proof and artifact files."""
    if isinstance(sx, str):
        return sx
    if isinstance(sx, Sym):
        return sx.text
    return "(" + " ".join(print_sexpr(x) for x in sx) + ")"
