"""Theories as decidable axiom recognizers with code-ordered enumerators.

A TheorySpec bundles a name, a signature, a recognizer (decidable predicate on
sentences), and an enumerator returning axioms with codes up to a bound in
ascending code order.  Finite theories get both for free.  The base arithmetic
theory below carries the defining equations of 0, S, + and * plus two decidable
scheme families over dyadic numerals (order facts and bounded case splits);
those schemes are what the evaluation-trace prover cites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import syntax as S
from .coding import code_formula, numeral
from .syntax import (
    ARITH,
    And,
    Atom,
    BOT,
    Bot,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Signature,
    Var,
    eq,
    le,
    lt,
    free_vars,
)


@dataclass
class TheorySpec:
    name: str
    signature: Signature
    recognizer: Callable[[Formula], bool]
    enumerator: Optional[Callable[[int], list[tuple[int, Formula]]]] = None
    axioms: Optional[tuple[Formula, ...]] = None

    def axioms_below(self, bound: int) -> list[tuple[int, Formula]]:
        """Axioms with code <= bound, ascending by code."""
        if self.enumerator is None:
            raise ValueError(f"theory {self.name} has no enumerator")
        out = self.enumerator(bound)
        assert all(a <= b for (a, _), (b, _) in zip(out, out[1:])), "enumerator out of order"
        return out

    def finite_axioms(self) -> tuple[Formula, ...]:
        if self.axioms is None:
            raise ValueError(f"theory {self.name} has no finite axiom list")
        return self.axioms


def finite_theory(name: str, sig: Signature, axioms: Sequence[Formula]) -> TheorySpec:
    axioms = tuple(axioms)
    for a in axioms:
        S.check_formula(sig, a)
        if free_vars(a):
            raise S.SyntaxError_(f"axiom {a!r} of {name} is not a sentence")
    table = {a: code_formula(a) for a in axioms}
    ordered = sorted(((c, a) for a, c in table.items()), key=lambda x: x[0])

    def recognize(phi: Formula) -> bool:
        return phi in table

    def enumerate_below(bound: int) -> list[tuple[int, Formula]]:
        return [(c, a) for c, a in ordered if c <= bound]

    return TheorySpec(name, sig, recognize, enumerate_below, axioms)


def pure_logic(sig: Signature, name: Optional[str] = None) -> TheorySpec:
    return finite_theory(name or f"pred[{sig.name}]", sig, ())


def extend_theory(base: TheorySpec, extra: Sequence[Formula], name: str) -> TheorySpec:
    extra = tuple(extra)
    for a in extra:
        S.check_formula(base.signature, a)
    table = {a: code_formula(a) for a in extra}
    ordered = sorted((c, a) for a, c in table.items())

    def recognize(phi: Formula) -> bool:
        return phi in table or base.recognizer(phi)

    def enumerate_below(bound: int) -> list[tuple[int, Formula]]:
        if base.enumerator is None:
            raise ValueError(f"base theory {base.name} has no enumerator")
        merged = base.enumerator(bound) + [(c, a) for c, a in ordered if c <= bound]
        return sorted(merged, key=lambda x: x[0])

    axioms = None
    if base.axioms is not None:
        axioms = base.axioms + extra
    return TheorySpec(name, base.signature, recognize, enumerate_below, axioms)


# ---------------------------------------------------------------------------
# Dyadic numeral recognition


def numeral_value(t: S.Term) -> Optional[int]:
    """Value of a term of exact dyadic-numeral shape, else None."""
    if isinstance(t, S.App) and t.symbol == "0" and not t.args:
        return 0
    if isinstance(t, S.App) and t.symbol == "*" and len(t.args) == 2:
        if t.args[0] != _SS0:
            return None
        v = numeral_value(t.args[1])
        return None if v is None or v == 0 else 2 * v
    if isinstance(t, S.App) and t.symbol == "S" and len(t.args) == 1:
        inner = t.args[0]
        if isinstance(inner, S.App) and inner.symbol == "*" and len(inner.args) == 2 and inner.args[0] == _SS0:
            v = numeral_value(inner.args[1])
            return None if v is None else 2 * v + 1
        return None
    return None


_SS0 = S.succ(S.succ(S.zero()))


# ---------------------------------------------------------------------------
# The base arithmetic theory


def _closed(vars_: list[int], body: Formula) -> Formula:
    for v in reversed(vars_):
        body = Forall(v, body)
    return body


x0, x1, x2 = Var(0), Var(1), Var(2)

DEFINING_EQUATIONS: tuple[Formula, ...] = (
    _closed([0], eq(S.plus(x0, S.zero()), x0)),                                  # x+0 = x
    _closed([0], eq(S.plus(S.zero(), x0), x0)),                                  # 0+x = x
    _closed([0, 1], eq(S.plus(x0, S.succ(x1)), S.succ(S.plus(x0, x1)))),          # x+S(y) = S(x+y)
    _closed([0, 1], eq(S.plus(S.succ(x0), x1), S.succ(S.plus(x0, x1)))),          # S(x)+y = S(x+y)
    _closed([0], eq(S.times(x0, S.zero()), S.zero())),                            # x*0 = 0
    _closed([0], eq(S.times(S.zero(), x0), S.zero())),                            # 0*x = 0
    _closed([0, 1], eq(S.times(x0, S.succ(x1)), S.plus(S.times(x0, x1), x0))),    # x*S(y) = x*y+x
    _closed([0, 1], eq(S.times(S.succ(x0), x1), S.plus(S.times(x0, x1), x1))),    # S(x)*y = x*y+y
    _closed([0, 1], eq(S.plus(x0, x1), S.plus(x1, x0))),                          # +-commutativity
    _closed([0, 1, 2], eq(S.plus(S.plus(x0, x1), x2), S.plus(x0, S.plus(x1, x2)))),
    _closed([0, 1], eq(S.times(x0, x1), S.times(x1, x0))),                        # *-commutativity
    _closed([0, 1, 2], eq(S.times(S.times(x0, x1), x2), S.times(x0, S.times(x1, x2)))),
    _closed([0, 1, 2], eq(S.times(x0, S.plus(x1, x2)), S.plus(S.times(x0, x1), S.times(x0, x2)))),
    _closed([0, 1, 2], eq(S.times(S.plus(x0, x1), x2), S.plus(S.times(x0, x2), S.times(x1, x2)))),
)


def order_fact(m: int, n: int) -> Formula:
    """The true comparison sentence about numerals m and n: le or its negation."""
    a = le(numeral(m), numeral(n))
    return a if m <= n else Not(a)


def distinctness_fact(m: int, n: int) -> Formula:
    if m == n:
        raise ValueError("distinctness facts need m != n")
    return Not(eq(numeral(m), numeral(n)))


def descent_axiom(n: int) -> Formula:
    """One step of bounded descent: below-or-equal n means below n-1 or equal n.

    n = 0: forall x (x <= 0 -> x = 0).  Each instance has size O(log n), so
    case analyses cite only axioms about as big as the numerals in the goal.
    """
    if n == 0:
        return Forall(0, Imp(le(x0, numeral(0)), eq(x0, numeral(0))))
    return Forall(
        0,
        Imp(le(x0, numeral(n)), Or(le(x0, numeral(n - 1)), eq(x0, numeral(n)))),
    )


def _match_order_fact(phi: Formula) -> bool:
    neg = False
    if isinstance(phi, Not):
        neg = True
        phi = phi.body
    if not (isinstance(phi, Atom) and phi.rel == "le" and len(phi.args) == 2):
        return False
    m = numeral_value(phi.args[0])
    n = numeral_value(phi.args[1])
    if m is None or n is None:
        return False
    return (m > n) if neg else (m <= n)


def _match_distinctness(phi: Formula) -> bool:
    if not isinstance(phi, Not):
        return False
    body = phi.body
    if not (isinstance(body, Atom) and body.rel == "=" and len(body.args) == 2):
        return False
    m = numeral_value(body.args[0])
    n = numeral_value(body.args[1])
    return m is not None and n is not None and m != n


def _match_descent_axiom(phi: Formula) -> bool:
    if not (isinstance(phi, Forall) and isinstance(phi.body, Imp)):
        return False
    guard = phi.body.left
    if not (isinstance(guard, Atom) and guard.rel == "le" and guard.args[0] == Var(phi.var)):
        return False
    bound = numeral_value(guard.args[1])
    if bound is None:
        return False
    return phi == descent_axiom(bound)


_DEFINING_SET = set(DEFINING_EQUATIONS)


def _base_arith_recognizer(phi: Formula) -> bool:
    return (
        phi in _DEFINING_SET
        or _match_order_fact(phi)
        or _match_distinctness(phi)
        or _match_descent_axiom(phi)
    )


def _base_arith_enumerator(bound: int, scheme_cap: int = 64) -> list[tuple[int, Formula]]:
    """Desk-scale enumeration: defining equations plus scheme instances with
    parameters below scheme_cap.  The recognizer itself is exact."""
    out = []
    for a in DEFINING_EQUATIONS:
        c = code_formula(a)
        if c <= bound:
            out.append((c, a))
    for m in range(scheme_cap):
        for n in range(scheme_cap):
            fams = [order_fact(m, n)]
            if m != n:
                fams.append(distinctness_fact(m, n))
            for f in fams:
                c = code_formula(f)
                if c <= bound:
                    out.append((c, f))
    for n in range(scheme_cap):
        f = descent_axiom(n)
        c = code_formula(f)
        if c <= bound:
            out.append((c, f))
    return sorted(out, key=lambda x: x[0])


BASE_ARITH = TheorySpec("base-arith", ARITH, _base_arith_recognizer, _base_arith_enumerator)
