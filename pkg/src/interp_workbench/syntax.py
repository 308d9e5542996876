"""First-order relational syntax with equality, plus the bounded-arithmetic extras.

Terms and formulas are immutable trees.  Variables are canonical de-Bruijn-free
indices (``Var(3)`` prints as ``x3``); pretty names exist only in the
s-expression layer.  Bounded quantifiers are primitive constructors, not sugar,
because the classifier and the alternation measure need to see them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


class SyntaxError_(Exception):
    """Ill-formed term, formula or signature."""


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Signature:
    """A finite relational signature with identity and optional function symbols.

    ``relations`` maps relation symbols to arities; the identity symbol is
    always present with arity 2.  Object theories are purely relational;
    only the arithmetic signatures carry function symbols.
    """

    name: str
    relations: tuple[tuple[str, int], ...]
    functions: tuple[tuple[str, int], ...] = ()
    identity: str = "="
    order: Optional[str] = None  # relation symbol read as <= by bounded quantifiers

    def __post_init__(self):
        rel = dict(self.relations)
        if len(rel) != len(self.relations):
            raise SyntaxError_(f"duplicate relation symbol in signature {self.name}")
        fun = dict(self.functions)
        if len(fun) != len(self.functions):
            raise SyntaxError_(f"duplicate function symbol in signature {self.name}")
        if set(rel) & set(fun):
            raise SyntaxError_(f"symbol used as both relation and function in {self.name}")
        if rel.get(self.identity) != 2:
            raise SyntaxError_(f"signature {self.name} lacks binary identity {self.identity!r}")
        if self.order is not None and rel.get(self.order) != 2:
            raise SyntaxError_(f"order symbol {self.order!r} must be a binary relation")
        if any(a < 0 for a in rel.values()) or any(a < 0 for a in fun.values()):
            raise SyntaxError_("negative arity")

    def rel_arity(self, sym: str) -> int:
        for s, a in self.relations:
            if s == sym:
                return a
        raise SyntaxError_(f"unknown relation symbol {sym!r} in {self.name}")

    def fun_arity(self, sym: str) -> int:
        for s, a in self.functions:
            if s == sym:
                return a
        raise SyntaxError_(f"unknown function symbol {sym!r} in {self.name}")

    def has_relation(self, sym: str) -> bool:
        return any(s == sym for s, _ in self.relations)

    def has_function(self, sym: str) -> bool:
        return any(s == sym for s, _ in self.functions)

    def with_relations(self, extra: Sequence[tuple[str, int]], name: Optional[str] = None) -> "Signature":
        return Signature(
            name or self.name,
            self.relations + tuple(extra),
            self.functions,
            self.identity,
            self.order,
        )


def make_signature(name, relations, functions=(), identity="=", order=None) -> Signature:
    return Signature(name, tuple(relations), tuple(functions), identity, order)


# The functional language of bounded arithmetic: 0, S, +, *, smash, |.|, floor-half,
# plus the pluggable sequence kit symbols lh / at used by the Pudlak formulas.
ARITH = make_signature(
    "arith",
    relations=[("=", 2), ("le", 2)],
    functions=[("0", 0), ("S", 1), ("+", 2), ("*", 2), ("#", 2), ("len", 1), ("half", 1), ("lh", 1), ("at", 2)],
    order="le",
)

# The purely relational rendering of arithmetic used as the *source* of
# translations (object theories are relational).
REL_ARITH = make_signature(
    "rel-arith",
    relations=[("=", 2), ("zero", 1), ("succ", 2), ("add", 3), ("mul", 3), ("le", 2)],
    order="le",
)


# ---------------------------------------------------------------------------
# Terms


class _Node:
    """Base for hash-consed immutable syntax nodes."""

    __slots__ = ()

    def __hash__(self):  # pragma: no cover - overridden
        raise NotImplementedError


def _cache_hash(obj, value):
    object.__setattr__(obj, "_hash", value)


@dataclass(frozen=True, eq=False)
class Var:
    index: int
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.index < 0:
            raise SyntaxError_("variable indices are naturals")
        _cache_hash(self, hash(("v", self.index)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Var) and other.index == self.index

    def __repr__(self):
        return f"x{self.index}"


@dataclass(frozen=True, eq=False)
class App:
    symbol: str
    args: tuple["Term", ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        _cache_hash(self, hash(("f", self.symbol, self.args)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (
            self is other
            or (
                isinstance(other, App)
                and other._hash == self._hash
                and other.symbol == self.symbol
                and other.args == self.args
            )
        )

    def __repr__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(map(repr, self.args))})"


Term = Union[Var, App]


def zero() -> App:
    return App("0", ())


def succ(t: Term) -> App:
    return App("S", (t,))


def plus(a: Term, b: Term) -> App:
    return App("+", (a, b))


def times(a: Term, b: Term) -> App:
    return App("*", (a, b))


def smash_t(a: Term, b: Term) -> App:
    return App("#", (a, b))


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True, eq=False)
class _Formula:
    _hash: int = field(init=False, repr=False, compare=False)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return all(
            getattr(other, f) == getattr(self, f)
            for f in self.__dataclass_fields__
            if f != "_hash"
        )


@dataclass(frozen=True, eq=False)
class Atom(_Formula):
    rel: str
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        _cache_hash(self, hash(("at", self.rel, self.args)))

    def __repr__(self):
        return f"{self.rel}({', '.join(map(repr, self.args))})"


@dataclass(frozen=True, eq=False)
class Bot(_Formula):
    def __post_init__(self):
        _cache_hash(self, hash("bot"))

    def __repr__(self):
        return "false"


@dataclass(frozen=True, eq=False)
class And(_Formula):
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        _cache_hash(self, hash(("and", self.left, self.right)))

    def __repr__(self):
        return f"({self.left!r} & {self.right!r})"


@dataclass(frozen=True, eq=False)
class Or(_Formula):
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        _cache_hash(self, hash(("or", self.left, self.right)))

    def __repr__(self):
        return f"({self.left!r} | {self.right!r})"


@dataclass(frozen=True, eq=False)
class Imp(_Formula):
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        _cache_hash(self, hash(("imp", self.left, self.right)))

    def __repr__(self):
        return f"({self.left!r} -> {self.right!r})"


@dataclass(frozen=True, eq=False)
class Not(_Formula):
    body: "Formula"

    def __post_init__(self):
        _cache_hash(self, hash(("not", self.body)))

    def __repr__(self):
        return f"~{self.body!r}"


def _canonicalize_binder(node, avoid: frozenset[int]) -> None:
    """Rename the binder to the least index not free in the scope.

    Alpha-equivalent formulas thereby become structurally identical, which is
    what lets substitution commute with translation on the nose.
    """
    taken = (free_vars(node.body) - {node.var}) | avoid
    m = 0
    while m in taken:
        m += 1
    if m != node.var:
        object.__setattr__(node, "body", substitute(node.body, node.var, Var(m)))
        object.__setattr__(node, "var", m)


@dataclass(frozen=True, eq=False)
class Forall(_Formula):
    var: int
    body: "Formula"

    def __post_init__(self):
        _canonicalize_binder(self, frozenset())
        _cache_hash(self, hash(("all", self.var, self.body)))

    def __repr__(self):
        return f"(all x{self.var}. {self.body!r})"


@dataclass(frozen=True, eq=False)
class Exists(_Formula):
    var: int
    body: "Formula"

    def __post_init__(self):
        _canonicalize_binder(self, frozenset())
        _cache_hash(self, hash(("ex", self.var, self.body)))

    def __repr__(self):
        return f"(ex x{self.var}. {self.body!r})"


@dataclass(frozen=True, eq=False)
class BForall(_Formula):
    """Bounded universal quantifier: all x < t (strict) or all x <= t."""

    var: int
    bound: Term
    strict: bool
    body: "Formula"

    def __post_init__(self):
        if self.var in free_vars_term(self.bound):
            raise SyntaxError_("bound term may not contain the bound variable")
        _canonicalize_binder(self, free_vars_term(self.bound))
        _cache_hash(self, hash(("ball", self.var, self.bound, self.strict, self.body)))

    def __repr__(self):
        op = "<" if self.strict else "<="
        return f"(all x{self.var}{op}{self.bound!r}. {self.body!r})"


@dataclass(frozen=True, eq=False)
class BExists(_Formula):
    var: int
    bound: Term
    strict: bool
    body: "Formula"

    def __post_init__(self):
        if self.var in free_vars_term(self.bound):
            raise SyntaxError_("bound term may not contain the bound variable")
        _canonicalize_binder(self, free_vars_term(self.bound))
        _cache_hash(self, hash(("bex", self.var, self.bound, self.strict, self.body)))

    def __repr__(self):
        op = "<" if self.strict else "<="
        return f"(ex x{self.var}{op}{self.bound!r}. {self.body!r})"


Formula = Union[Atom, Bot, And, Or, Imp, Not, Forall, Exists, BForall, BExists]

BOT = Bot()


def eq(a: Term, b: Term) -> Atom:
    return Atom("=", (a, b))


def le(a: Term, b: Term) -> Atom:
    return Atom("le", (a, b))


def lt(a: Term, b: Term) -> Formula:
    """Strict order, rendered over the primitive <=: a <= b and not a = b."""
    return And(le(a, b), Not(eq(a, b)))


def conj(parts: Sequence[Formula]) -> Formula:
    """Right-nested conjunction of a nonempty list."""
    if not parts:
        raise SyntaxError_("empty conjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    if not parts:
        raise SyntaxError_("empty disjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


# ---------------------------------------------------------------------------
# Well-formedness


def check_term(sig: Signature, t: Term) -> None:
    if isinstance(t, Var):
        return
    if not isinstance(t, App):
        raise SyntaxError_(f"not a term: {t!r}")
    want = sig.fun_arity(t.symbol)
    if len(t.args) != want:
        raise SyntaxError_(f"{t.symbol!r} expects {want} arguments, got {len(t.args)}")
    for a in t.args:
        check_term(sig, a)


def check_formula(sig: Signature, phi: Formula) -> None:
    """Raise when phi is not well-formed over sig."""
    if isinstance(phi, Atom):
        want = sig.rel_arity(phi.rel)
        if len(phi.args) != want:
            raise SyntaxError_(f"{phi.rel!r} expects {want} arguments, got {len(phi.args)}")
        for a in phi.args:
            check_term(sig, a)
    elif isinstance(phi, Bot):
        return
    elif isinstance(phi, (And, Or, Imp)):
        check_formula(sig, phi.left)
        check_formula(sig, phi.right)
    elif isinstance(phi, Not):
        check_formula(sig, phi.body)
    elif isinstance(phi, (Forall, Exists)):
        check_formula(sig, phi.body)
    elif isinstance(phi, (BForall, BExists)):
        if sig.order is None:
            raise SyntaxError_(f"bounded quantifier needs an ordered signature, {sig.name} has none")
        check_term(sig, phi.bound)
        check_formula(sig, phi.body)
    else:
        raise SyntaxError_(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Free variables, substitution


def free_vars_term(t: Term) -> frozenset[int]:
    if isinstance(t, Var):
        return frozenset((t.index,))
    out: frozenset[int] = frozenset()
    for a in t.args:
        out |= free_vars_term(a)
    return out


def free_vars(phi: Formula) -> frozenset[int]:
    """The set of variables with a free occurrence in phi."""
    if isinstance(phi, Atom):
        out: frozenset[int] = frozenset()
        for a in phi.args:
            out |= free_vars_term(a)
        return out
    if isinstance(phi, Bot):
        return frozenset()
    if isinstance(phi, (And, Or, Imp)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, (BForall, BExists)):
        return free_vars_term(phi.bound) | (free_vars(phi.body) - {phi.var})
    raise SyntaxError_(f"not a formula: {phi!r}")


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def subst_term(t: Term, mapping: Mapping[int, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.index, t)
    if not any(v in mapping for v in free_vars_term(t)):
        return t
    return App(t.symbol, tuple(subst_term(a, mapping) for a in t.args))


def fresh_index(used: Iterable[int]) -> int:
    used = set(used)
    return max(used, default=-1) + 1


def subst_many(phi: Formula, mapping: Mapping[int, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for variables."""
    mapping = {v: t for v, t in mapping.items() if not (isinstance(t, Var) and t.index == v)}
    if not mapping:
        return phi
    return _subst(phi, mapping)


def _subst(phi: Formula, mapping: Mapping[int, Term]) -> Formula:
    if isinstance(phi, Atom):
        return Atom(phi.rel, tuple(subst_term(a, mapping) for a in phi.args))
    if isinstance(phi, Bot):
        return phi
    if isinstance(phi, And):
        return And(_subst(phi.left, mapping), _subst(phi.right, mapping))
    if isinstance(phi, Or):
        return Or(_subst(phi.left, mapping), _subst(phi.right, mapping))
    if isinstance(phi, Imp):
        return Imp(_subst(phi.left, mapping), _subst(phi.right, mapping))
    if isinstance(phi, Not):
        return Not(_subst(phi.body, mapping))
    if isinstance(phi, (Forall, Exists, BForall, BExists)):
        v = phi.var
        live = {k: t for k, t in mapping.items() if k != v and k in free_vars(phi.body)}
        bound_part = {}
        if isinstance(phi, (BForall, BExists)):
            bound_part = {k: t for k, t in mapping.items() if k in free_vars_term(phi.bound)}
        if not live and not bound_part:
            return phi
        new_bound = subst_term(phi.bound, mapping) if isinstance(phi, (BForall, BExists)) else None
        captured = any(v in free_vars_term(t) for t in live.values())
        if new_bound is not None and v in free_vars_term(new_bound):
            captured = True
        body = phi.body
        if captured:
            used = set(free_vars(body))
            for t in live.values():
                used |= set(free_vars_term(t))
            if new_bound is not None:
                used |= set(free_vars_term(new_bound))
            w = fresh_index(used)
            body = _subst(body, {v: Var(w)})
            v = w
        body = _subst(body, live)
        if isinstance(phi, Forall):
            return Forall(v, body)
        if isinstance(phi, Exists):
            return Exists(v, body)
        if isinstance(phi, BForall):
            return BForall(v, new_bound, phi.strict, body)
        return BExists(v, new_bound, phi.strict, body)
    raise SyntaxError_(f"not a formula: {phi!r}")


def substitute(phi: Formula, var: int, t: Term) -> Formula:
    """Replace free occurrences of ``var`` by ``t``, renaming binders on capture."""
    return subst_many(phi, {var: t})


def rename_bound(phi: Formula, shift: int) -> Formula:
    """Alpha-rename every binder to a far-away fresh index and rebuild.

    The constructors canonicalize binders, so the result is structurally equal
    to the input; the round trip exercises capture avoidance.
    """
    if isinstance(phi, (Atom, Bot)):
        return phi
    if isinstance(phi, And):
        return And(rename_bound(phi.left, shift), rename_bound(phi.right, shift))
    if isinstance(phi, Or):
        return Or(rename_bound(phi.left, shift), rename_bound(phi.right, shift))
    if isinstance(phi, Imp):
        return Imp(rename_bound(phi.left, shift), rename_bound(phi.right, shift))
    if isinstance(phi, Not):
        return Not(rename_bound(phi.body, shift))
    if isinstance(phi, (Forall, Exists, BForall, BExists)):
        w = max(free_vars(phi.body) | {phi.var}, default=0) + shift + 1
        body = rename_bound(substitute(phi.body, phi.var, Var(w)), shift)
        if isinstance(phi, Forall):
            return Forall(w, body)
        if isinstance(phi, Exists):
            return Exists(w, body)
        cls = BForall if isinstance(phi, BForall) else BExists
        return cls(w, phi.bound, phi.strict, body)
    raise SyntaxError_(f"not a formula: {phi!r}")


def formula_length(phi: Formula) -> int:
    """Symbol length: number of syntax-tree nodes, counting terms."""
    if isinstance(phi, Atom):
        return 1 + sum(term_length(a) for a in phi.args)
    if isinstance(phi, Bot):
        return 1
    if isinstance(phi, (And, Or, Imp)):
        return 1 + formula_length(phi.left) + formula_length(phi.right)
    if isinstance(phi, Not):
        return 1 + formula_length(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return 2 + formula_length(phi.body)
    if isinstance(phi, (BForall, BExists)):
        return 2 + term_length(phi.bound) + formula_length(phi.body)
    raise SyntaxError_(f"not a formula: {phi!r}")


def term_length(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_length(a) for a in t.args)


def subformulas(phi: Formula) -> Iterator[Formula]:
    """All subformulas of phi, phi first, each occurrence once."""
    yield phi
    if isinstance(phi, (And, Or, Imp)):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, Not):
        yield from subformulas(phi.body)
    elif isinstance(phi, (Forall, Exists, BForall, BExists)):
        yield from subformulas(phi.body)


# ---------------------------------------------------------------------------
# Classification


class FormulaClass(Enum):
    DELTA0 = "Delta0"
    SIGMA1B = "Sigma1b"
    PI1B = "Pi1b"
    ALL_PI1B = "AllPi1b"
    SIGMA1 = "Sigma1"
    PI1 = "Pi1"
    UNCLASSIFIED = "Unclassified"


def _is_sharply_bounded(phi) -> bool:
    return isinstance(phi.bound, App) and phi.bound.symbol == "len"


def _all_quantifiers_sharply_bounded(phi: Formula) -> bool:
    if isinstance(phi, (Atom, Bot)):
        return True
    if isinstance(phi, (And, Or, Imp)):
        return _all_quantifiers_sharply_bounded(phi.left) and _all_quantifiers_sharply_bounded(phi.right)
    if isinstance(phi, Not):
        return _all_quantifiers_sharply_bounded(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return False
    if isinstance(phi, (BForall, BExists)):
        return _is_sharply_bounded(phi) and _all_quantifiers_sharply_bounded(phi.body)
    raise SyntaxError_(f"not a formula: {phi!r}")


def _all_quantifiers_bounded(phi: Formula) -> bool:
    if isinstance(phi, (Atom, Bot)):
        return True
    if isinstance(phi, (And, Or, Imp)):
        return _all_quantifiers_bounded(phi.left) and _all_quantifiers_bounded(phi.right)
    if isinstance(phi, Not):
        return _all_quantifiers_bounded(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return False
    if isinstance(phi, (BForall, BExists)):
        return _all_quantifiers_bounded(phi.body)
    raise SyntaxError_(f"not a formula: {phi!r}")


def _sigma1b(phi: Formula, positive: bool) -> bool:
    """Sigma1b under the given polarity; Pi1b is the negative reading."""
    if isinstance(phi, (Atom, Bot)):
        return True
    if isinstance(phi, (And, Or)):
        return _sigma1b(phi.left, positive) and _sigma1b(phi.right, positive)
    if isinstance(phi, Imp):
        return _sigma1b(phi.left, not positive) and _sigma1b(phi.right, positive)
    if isinstance(phi, Not):
        return _sigma1b(phi.body, not positive)
    if isinstance(phi, (Forall, Exists)):
        return False
    if isinstance(phi, (BForall, BExists)):
        if _is_sharply_bounded(phi):
            return _sigma1b(phi.body, positive)
        if isinstance(phi, BExists):
            return positive and _sigma1b(phi.body, positive)
        return (not positive) and _sigma1b(phi.body, positive)
    raise SyntaxError_(f"not a formula: {phi!r}")


def _strip_prefix(phi: Formula, cls) -> Formula:
    while isinstance(phi, cls):
        phi = phi.body
    return phi


def classify(phi: Formula) -> FormulaClass:
    """Least class in the order Delta0 < Sigma1b/Pi1b < AllPi1b < Sigma1/Pi1.

    Delta0 here is the level-zero bounded class: every quantifier sharply
    bounded.  Sigma1/Pi1 require a single unbounded block over a bounded
    matrix.  Anything else is Unclassified.
    """
    if _all_quantifiers_sharply_bounded(phi):
        return FormulaClass.DELTA0
    if _sigma1b(phi, True):
        return FormulaClass.SIGMA1B
    if _sigma1b(phi, False):
        return FormulaClass.PI1B
    matrix = _strip_prefix(phi, Forall)
    if matrix is not phi and _sigma1b(matrix, False):
        return FormulaClass.ALL_PI1B
    ex_matrix = _strip_prefix(phi, Exists)
    if ex_matrix is not phi and _all_quantifiers_bounded(ex_matrix):
        return FormulaClass.SIGMA1
    if matrix is not phi and _all_quantifiers_bounded(matrix):
        return FormulaClass.PI1
    return FormulaClass.UNCLASSIFIED


def class_contains(cls: FormulaClass, phi: Formula) -> bool:
    """Membership check consistent with classify's least-class order."""
    order = [
        FormulaClass.DELTA0,
        FormulaClass.SIGMA1B,
        FormulaClass.PI1B,
        FormulaClass.ALL_PI1B,
        FormulaClass.SIGMA1,
        FormulaClass.PI1,
        FormulaClass.UNCLASSIFIED,
    ]
    got = classify(phi)
    if cls is got:
        return True
    if got is FormulaClass.DELTA0:
        return True  # Delta0 embeds everywhere above it
    if got is FormulaClass.SIGMA1B and cls in (FormulaClass.SIGMA1, FormulaClass.UNCLASSIFIED):
        return True
    if got is FormulaClass.PI1B and cls in (FormulaClass.ALL_PI1B, FormulaClass.PI1, FormulaClass.UNCLASSIFIED):
        return True
    if got is FormulaClass.ALL_PI1B and cls in (FormulaClass.PI1, FormulaClass.UNCLASSIFIED):
        return True
    return cls is FormulaClass.UNCLASSIFIED


# ---------------------------------------------------------------------------
# Quantifier-alternation measure


def _rho(phi: Formula) -> tuple[int, Optional[str]]:
    """Return (block count, effective outermost quantifier or None).

    Fixed recursion: atoms count 0; And/Or take the max and keep a lead only
    when both sides agree; Not flips the lead; an implication flips its
    antecedent's lead; a maximal run of like unbounded quantifiers adds one
    block; bounded quantifiers are transparent for the count but break blocks.
    """
    if isinstance(phi, (Atom, Bot)):
        return 0, None
    if isinstance(phi, (And, Or)):
        c1, l1 = _rho(phi.left)
        c2, l2 = _rho(phi.right)
        return max(c1, c2), _merge_lead(l1, l2)
    if isinstance(phi, Imp):
        c1, l1 = _rho(phi.left)
        c2, l2 = _rho(phi.right)
        return max(c1, c2), _merge_lead(_flip(l1), l2)
    if isinstance(phi, Not):
        c, l = _rho(phi.body)
        return c, _flip(l)
    if isinstance(phi, Forall):
        c, l = _rho(phi.body)
        return (c if l == "A" else c + 1), "A"
    if isinstance(phi, Exists):
        c, l = _rho(phi.body)
        return (c if l == "E" else c + 1), "E"
    if isinstance(phi, (BForall, BExists)):
        c, _ = _rho(phi.body)
        return c, None
    raise SyntaxError_(f"not a formula: {phi!r}")


def _flip(lead: Optional[str]) -> Optional[str]:
    if lead == "A":
        return "E"
    if lead == "E":
        return "A"
    return None


def _merge_lead(a: Optional[str], b: Optional[str]) -> Optional[str]:
    if a == b:
        return a
    if a is None:
        return b
    if b is None:
        return a
    return None


def rho(phi: Formula) -> int:
    """Count of unbounded-quantifier alternation blocks, 0 on quantifier-free input."""
    return _rho(phi)[0]
