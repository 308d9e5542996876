"""Finite first-order structures: Tarskian evaluation, internal models, model search.

Structures interpret relation symbols by tuple tables and (for the arithmetic
language) function symbols by partial tables; an application falling outside
the prefix leaves the term undefined and falsifies the enclosing atom, which is
the desk-scale stand-in for the infinite standard model.  Evaluation
short-circuits, so formulas like the Pudlak H stay tractable on prefixes of a
few hundred elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from . import syntax as S
from .coding import binlen, smash
from .syntax import (
    And,
    App,
    Atom,
    BExists,
    BForall,
    Bot,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Signature,
    Term,
    Var,
)


class ModelError(Exception):
    pass


@dataclass
class Structure:
    name: str
    signature: Signature
    domain: tuple[int, ...]
    relations: dict[str, frozenset[tuple[int, ...]]]
    functions: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)

    def __post_init__(self):
        dom = set(self.domain)
        for sym, table in self.relations.items():
            arity = self.signature.rel_arity(sym)
            for tup in table:
                if len(tup) != arity or not set(tup) <= dom:
                    raise ModelError(f"bad tuple {tup} in table of {sym!r}")
        for sym, table in self.functions.items():
            self.signature.fun_arity(sym)
            for args, val in table.items():
                if not set(args) <= dom or val not in dom:
                    raise ModelError(f"bad entry {args}->{val} in function {sym!r}")

    def rel(self, sym: str) -> frozenset[tuple[int, ...]]:
        return self.relations.get(sym, frozenset())


def identity_diagonal(domain: Sequence[int]) -> frozenset[tuple[int, int]]:
    return frozenset((d, d) for d in domain)


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(M: Structure, t: Term, asg: dict[int, int]) -> Optional[int]:
    """Element denoted by t, or None when a partial operation falls off the prefix."""
    if isinstance(t, Var):
        if t.index not in asg:
            raise ModelError(f"unassigned variable x{t.index}")
        return asg[t.index]
    table = M.functions.get(t.symbol)
    if table is None:
        raise ModelError(f"structure {M.name} does not interpret function {t.symbol!r}")
    args = []
    for a in t.args:
        v = eval_term(M, a, asg)
        if v is None:
            return None
        args.append(v)
    return table.get(tuple(args))


def _le_pairs(M: Structure) -> frozenset[tuple[int, int]]:
    if M.signature.order is None:
        raise ModelError(f"signature {M.signature.name} has no order for bounded quantifiers")
    return M.rel(M.signature.order)


def evaluate(M: Structure, phi: Formula, asg: Optional[dict[int, int]] = None) -> bool:
    """Tarskian truth by exhaustive quantification over the finite domain."""
    asg = asg or {}

    def go(f: Formula, env: dict[int, int]) -> bool:
        if isinstance(f, Bot):
            return False
        if isinstance(f, Atom):
            vals = []
            for a in f.args:
                v = eval_term(M, a, env)
                if v is None:
                    return False
                vals.append(v)
            return tuple(vals) in M.rel(f.rel)
        if isinstance(f, And):
            return go(f.left, env) and go(f.right, env)
        if isinstance(f, Or):
            return go(f.left, env) or go(f.right, env)
        if isinstance(f, Imp):
            return (not go(f.left, env)) or go(f.right, env)
        if isinstance(f, Not):
            return not go(f.body, env)
        if isinstance(f, (Forall, Exists)):
            want = isinstance(f, Exists)
            for e in M.domain:
                env2 = dict(env)
                env2[f.var] = e
                if go(f.body, env2) == want:
                    return want
            return not want
        if isinstance(f, (BForall, BExists)):
            want = isinstance(f, BExists)
            bound = eval_term(M, f.bound, env)
            if bound is None:
                return not want  # empty range: vacuous forall, failed exists
            lep = _le_pairs(M)
            for e in M.domain:
                if (e, bound) not in lep or (f.strict and e == bound):
                    continue
                env2 = dict(env)
                env2[f.var] = e
                if go(f.body, env2) == want:
                    return want
            return not want
        raise ModelError(f"not a formula: {f!r}")

    missing = S.free_vars(phi) - set(asg)
    if missing:
        raise ModelError(f"assignment misses free variables {sorted(missing)}")
    return go(phi, asg)


# ---------------------------------------------------------------------------
# Standard prefix models


@dataclass(frozen=True)
class SeqKit:
    """Positional desk-scale sequence coding with a fixed entry base.

    The empty sequence is coded by 0; a nonempty sequence (a_0..a_{L-1}) with
    every a_i < base is coded by sum (a_i+1)*(base+1)^i.  lh and at are read
    off the digits; codes with a zero digit in range or entries >= base decode
    to nothing and leave lh/at undefined there.
    """

    base: int = 8

    def encode(self, seq: Sequence[int]) -> int:
        if any(a < 0 or a >= self.base for a in seq):
            raise ModelError(f"sequence entry out of base-{self.base} range")
        out = 0
        for a in reversed(seq):
            out = out * (self.base + 1) + (a + 1)
        return out

    def decode(self, code: int) -> Optional[tuple[int, ...]]:
        if code < 0:
            return None
        out = []
        while code:
            code, d = divmod(code, self.base + 1)
            if d == 0:
                return None
            out.append(d - 1)
        return tuple(out)


DEFAULT_KIT = SeqKit(8)


def arith_prefix_model(n: int, kit: SeqKit = DEFAULT_KIT, name: Optional[str] = None) -> Structure:
    """The standard model restricted to {0..n-1}, operations partial."""
    if n < 1:
        raise ModelError("prefix models need at least one element")
    dom = tuple(range(n))
    funcs: dict[str, dict[tuple[int, ...], int]] = {
        "0": {(): 0},
        "S": {(a,): a + 1 for a in dom if a + 1 < n},
        "+": {(a, b): a + b for a in dom for b in dom if a + b < n},
        "*": {(a, b): a * b for a in dom for b in dom if a * b < n},
        "len": {(a,): binlen(a) for a in dom if binlen(a) < n},
        "half": {(a,): a // 2 for a in dom},
    }
    sm = {}
    for a in dom:
        for b in dom:
            v = 1 << (binlen(a) * binlen(b))
            if v < n:
                sm[(a, b)] = v
    funcs["#"] = sm
    lh_table = {}
    at_table = {}
    for s in dom:
        seq = kit.decode(s)
        if seq is None:
            continue
        if len(seq) < n:
            lh_table[(s,)] = len(seq)
        for i, a in enumerate(seq):
            if i < n and a < n:
                at_table[(s, i)] = a
    funcs["lh"] = lh_table
    funcs["at"] = at_table
    rels = {
        "=": identity_diagonal(dom),
        "le": frozenset((a, b) for a in dom for b in dom if a <= b),
    }
    return Structure(name or f"N<{n}", S.ARITH, dom, rels, funcs)


def rel_prefix_model(n: int, name: Optional[str] = None) -> Structure:
    """The prefix {0..n-1} in the purely relational arithmetic language."""
    dom = tuple(range(n))
    rels = {
        "=": identity_diagonal(dom),
        "zero": frozenset({(0,)}),
        "succ": frozenset((a, a + 1) for a in dom if a + 1 < n),
        "add": frozenset((a, b, a + b) for a in dom for b in dom if a + b < n),
        "mul": frozenset((a, b, a * b) for a in dom for b in dom if a * b < n),
        "le": frozenset((a, b) for a in dom for b in dom if a <= b),
    }
    return Structure(name or f"relN<{n}", S.REL_ARITH, dom, rels)


# ---------------------------------------------------------------------------
# Internal models M^j


class InternalModelDiagnosis(ModelError):
    """Raised when =^j fails to be an equivalence on the delta-satisfiers."""


def internal_model(M: Structure, j, name: Optional[str] = None) -> Structure:
    """The model a translation defines inside M: delta-satisfiers modulo =^j.

    Relations hold on classes iff the translated relation holds on some
    representatives.  Raises InternalModelDiagnosis when the interpreted
    identity is not an equivalence relation (j then fails to interpret the
    equality axioms; we diagnose rather than repair).
    """
    delta_sat = [e for e in M.domain if evaluate(M, j.delta, {j.delta_var: e})]
    eq_formula = j.relation("=")

    def jeq(a: int, b: int) -> bool:
        return evaluate(M, eq_formula, dict(zip(j.relation_vars("="), (a, b))))

    for a in delta_sat:
        if not jeq(a, a):
            raise InternalModelDiagnosis(f"=^j not reflexive at {a}")
        for b in delta_sat:
            if jeq(a, b) != jeq(b, a):
                raise InternalModelDiagnosis(f"=^j not symmetric at ({a},{b})")
            for c in delta_sat:
                if jeq(a, b) and jeq(b, c) and not jeq(a, c):
                    raise InternalModelDiagnosis(f"=^j not transitive at ({a},{b},{c})")

    classes: list[list[int]] = []
    for e in delta_sat:
        for cls in classes:
            if jeq(cls[0], e):
                cls.append(e)
                break
        else:
            classes.append([e])
    rep_of = {}
    for idx, cls in enumerate(classes):
        for e in cls:
            rep_of[e] = idx

    src = j.source
    rels: dict[str, frozenset[tuple[int, ...]]] = {}
    for sym, arity in src.relations:
        if sym == src.identity:
            rels[sym] = identity_diagonal(range(len(classes)))
            continue
        body = j.relation(sym)
        vars_ = j.relation_vars(sym)
        table = set()
        import itertools as _it

        for tup in _it.product(range(len(classes)), repeat=arity):
            found = False
            for reps in _it.product(*(classes[i] for i in tup)):
                if evaluate(M, body, dict(zip(vars_, reps))):
                    found = True
                    break
            if found:
                table.add(tup)
        rels[sym] = frozenset(table)
    return Structure(name or f"{M.name}^{getattr(j, 'name', 'j')}", src, tuple(range(len(classes))), rels)


# ---------------------------------------------------------------------------
# Finite model search


@dataclass(frozen=True)
class NoneFound:
    max_domain: int

    def __bool__(self):
        return False


def find_model(theory, max_domain: int) -> Union[Structure, NoneFound]:
    """Backtracking search for a finite normal model of a finite relational theory.

    Returns the first model in the deterministic search order, or NoneFound.
    NoneFound is explicitly not an inconsistency verdict.
    """
    axioms = theory.finite_axioms()
    sig = theory.signature
    if any(True for _ in sig.functions):
        raise ModelError("find_model searches purely relational signatures")
    for size in range(1, max_domain + 1):
        got = _search_size(axioms, sig, size)
        if got is not None:
            return Structure(f"model[{theory.name}]", sig, tuple(range(size)), got)
    return NoneFound(max_domain)


def _search_size(axioms, sig: Signature, size: int):
    dom = tuple(range(size))
    atoms: list[tuple[str, tuple[int, ...]]] = []
    import itertools as _it

    for sym, arity in sorted(sig.relations):
        if sym == sig.identity:
            continue
        for tup in _it.product(dom, repeat=arity):
            atoms.append((sym, tup))
    state: dict[tuple[str, tuple[int, ...]], bool] = {}

    def eval3(f: Formula, env: dict[int, int]):
        """Three-valued evaluation: True / False / None (undecided)."""
        if isinstance(f, Bot):
            return False
        if isinstance(f, Atom):
            vals = tuple(env[a.index] if isinstance(a, Var) else None for a in f.args)
            if any(v is None for v in vals):
                raise ModelError("relational axioms must be function-free")
            if f.rel == sig.identity:
                return vals[0] == vals[1]
            return state.get((f.rel, vals))
        if isinstance(f, And):
            l = eval3(f.left, env)
            if l is False:
                return False
            r = eval3(f.right, env)
            if r is False:
                return False
            return True if (l is True and r is True) else None
        if isinstance(f, Or):
            l = eval3(f.left, env)
            if l is True:
                return True
            r = eval3(f.right, env)
            if r is True:
                return True
            return False if (l is False and r is False) else None
        if isinstance(f, Imp):
            l = eval3(f.left, env)
            if l is False:
                return True
            r = eval3(f.right, env)
            if r is True:
                return True
            return False if (l is True and r is False) else None
        if isinstance(f, Not):
            v = eval3(f.body, env)
            return None if v is None else (not v)
        if isinstance(f, (Forall, Exists)):
            want = isinstance(f, Exists)
            undecided = False
            for e in dom:
                env2 = dict(env)
                env2[f.var] = e
                v = eval3(f.body, env2)
                if v is None:
                    undecided = True
                elif v == want:
                    return want
            return None if undecided else (not want)
        raise ModelError(f"find_model cannot handle {f!r}")

    def first_unknown(f: Formula, env: dict[int, int]):
        if isinstance(f, Atom):
            if f.rel == sig.identity:
                return None
            vals = tuple(env[a.index] for a in f.args)
            return None if (f.rel, vals) in state else (f.rel, vals)
        if isinstance(f, (And, Or, Imp)):
            return first_unknown(f.left, env) or first_unknown(f.right, env)
        if isinstance(f, Not):
            return first_unknown(f.body, env)
        if isinstance(f, (Forall, Exists)):
            for e in dom:
                env2 = dict(env)
                env2[f.var] = e
                if eval3(f.body, env2) is None:
                    got = first_unknown(f.body, env2)
                    if got:
                        return got
            return None
        return None

    def solve() -> bool:
        branch_atom = None
        for ax in axioms:
            v = eval3(ax, {})
            if v is False:
                return False
            if v is None and branch_atom is None:
                branch_atom = first_unknown(ax, {})
        if branch_atom is None:
            return all(eval3(ax, {}) is True for ax in axioms)
        for choice in (True, False):
            state[branch_atom] = choice
            if solve():
                return True
            del state[branch_atom]
        return False

    if not solve():
        return None
    tables: dict[str, frozenset] = {sig.identity: identity_diagonal(dom)}
    for sym, arity in sig.relations:
        if sym == sig.identity:
            continue
        tables[sym] = frozenset(t for (s, t), v in state.items() if s == sym and v)
    return tables


# ---------------------------------------------------------------------------
# Isomorphism canonicalization (test helper, domains <= 5)


def canonical_form(M: Structure) -> tuple:
    import itertools as _it

    best = None
    syms = sorted(sym for sym, _ in M.signature.relations)
    for perm in _it.permutations(range(len(M.domain))):
        relabel = dict(zip(M.domain, perm))
        form = tuple(
            (sym, tuple(sorted(tuple(relabel[e] for e in tup) for tup in M.rel(sym))))
            for sym in syms
        )
        if best is None or form < best:
            best = form
    return best


# ---------------------------------------------------------------------------
# Pudlak desk-scale checks: Delta0 agreement, H functionality, the term law


@dataclass
class AgreementReport:
    jprime_extension: tuple[int, ...]
    checked: int
    disagreements: tuple[tuple[Formula, tuple[tuple[int, int], ...], bool, bool], ...]

    @property
    def agreement(self) -> bool:
        return not self.disagreements

    def __str__(self):
        head = "agreement" if self.agreement else f"disagreement({len(self.disagreements)})"
        return f"[{head}] J'={list(self.jprime_extension)} formulas={self.checked}"


def relational_view(M: Structure) -> Structure:
    """Read the arithmetic prefix as a purely relational structure."""
    dom = M.domain
    f = M.functions
    rels = {
        "=": identity_diagonal(dom),
        "zero": frozenset({(f["0"][()],)}),
        "succ": frozenset((a, v) for (a,), v in f["S"].items()),
        "add": frozenset((a, b, v) for (a, b), v in f["+"].items()),
        "mul": frozenset((a, b, v) for (a, b), v in f["*"].items()),
        "le": M.rel("le"),
    }
    return Structure(f"rel[{M.name}]", S.REL_ARITH, dom, rels)


def jprime_extension(M: Structure, artifacts) -> tuple[int, ...]:
    return tuple(e for e in M.domain if evaluate(M, artifacts.jprime, {0: e}))


def h_images(M: Structure, artifacts, xs) -> dict[int, tuple[int, ...]]:
    return {
        x: tuple(y for y in M.domain if evaluate(M, artifacts.h, {0: x, 1: y}))
        for x in xs
    }


def _jeq(M: Structure, artifacts, a: int, b: int) -> bool:
    j = artifacts.translation
    return evaluate(M, j.relation("="), {0: a, 1: b})


def enumerate_delta0(n_free: int, depth: int, cap: int = 40000) -> list[Formula]:
    """Bounded-quantifier source formulas over x0..x(n_free-1), shallow layers.

    depth 0: atoms; depth 1 adds literals, binary and/or of atoms, and bounded
    quantifiers over literals; depth 2 nests bounded quantifiers once more and
    negates the quantified forms.  The enumeration is deterministic.
    """
    import itertools as _it

    def atoms(vars_: tuple[int, ...]) -> list[Formula]:
        out: list[Formula] = []
        for sym, arity in S.REL_ARITH.relations:
            for tup in _it.product(vars_, repeat=arity):
                out.append(Atom(sym, tuple(Var(v) for v in tup)))
        return out

    def bq_forms(vars_: tuple[int, ...], bodies) -> list[Formula]:
        new = max(vars_) + 1
        out = []
        for body in bodies:
            if new not in S.free_vars(body):
                continue
            for bound in vars_:
                for strict in (True, False):
                    out.append(BForall(new, Var(bound), strict, body))
                    out.append(BExists(new, Var(bound), strict, body))
        return out

    base_vars = tuple(range(n_free))
    a0 = atoms(base_vars)
    if depth == 0:
        return a0[:cap]
    lits = a0 + [Not(a) for a in a0]
    pairs: list[Formula] = []
    for x, y in _it.product(a0, repeat=2):
        pairs.append(And(x, y))
        pairs.append(Or(x, y))
    inner_vars = base_vars + (n_free,)
    inner_atoms = atoms(inner_vars)
    inner_lits = inner_atoms + [Not(a) for a in inner_atoms]
    bq1 = bq_forms(base_vars, inner_lits)
    level1 = lits + pairs + bq1
    if depth == 1:
        return level1[:cap]
    # depth 2: one more bounded layer over literals and the depth-1 bq shapes
    deep_vars = inner_vars
    deep_atoms = atoms(deep_vars + (n_free + 1,))
    deep_lits = deep_atoms + [Not(a) for a in deep_atoms]
    bq_inner = bq_forms(deep_vars, deep_lits)
    inner_level = inner_lits + bq_inner
    bq2 = bq_forms(base_vars, inner_level)
    level2 = level1 + [Not(f) for f in bq1] + bq2
    return level2[:cap]


def check_delta0_agreement(M: Structure, artifacts, depth: int, n_free: int = 2, cap: int = 40000) -> AgreementReport:
    """Exhaustively compare phi^j at the H-images with phi at the arguments.

    phi ranges over the bounded enumeration to the given depth; arguments
    range over the J'-extension.  phi^j(h(x)) is read as: for every tuple of
    H-images, the translated formula holds.  The relational reading of M
    supplies the right-hand side.
    """
    from .interpret import translate_formula

    j = artifacts.translation
    ext = jprime_extension(M, artifacts)
    rel = relational_view(M)
    imgs = h_images(M, artifacts, ext)
    formulas = enumerate_delta0(n_free, depth, cap)
    bad = []
    import itertools as _it

    for phi in formulas:
        fv = sorted(S.free_vars(phi))
        phik = translate_formula(j, phi)
        for tup in _it.product(ext, repeat=len(fv)):
            asg = dict(zip(fv, tup))
            rhs = evaluate(rel, phi, asg)
            lhs = True
            for image in _it.product(*(imgs[x] for x in tup)):
                if not evaluate(M, phik, dict(zip(fv, image))):
                    lhs = False
                    break
            if lhs != rhs:
                bad.append((phi, tuple(sorted(asg.items())), lhs, rhs))
    return AgreementReport(ext, len(formulas), tuple(bad))


@dataclass
class FunctionalityReport:
    functional: bool
    injective_mod_eq: bool
    offenders: tuple[str, ...]


def check_h_functionality(M: Structure, artifacts) -> FunctionalityReport:
    """H is a function modulo =^j on J', and h(x) =^j h(y) iff x = y."""
    ext = jprime_extension(M, artifacts)
    imgs = h_images(M, artifacts, ext)
    offenders = []
    functional = True
    for x in ext:
        ys = imgs[x]
        if not ys:
            functional = False
            offenders.append(f"H({x}, -) has no image")
            continue
        for y1 in ys:
            for y2 in ys:
                if not _jeq(M, artifacts, y1, y2):
                    functional = False
                    offenders.append(f"H({x}) images {y1} and {y2} differ mod =^j")
    injective = True
    for x1 in ext:
        for x2 in ext:
            same = any(
                _jeq(M, artifacts, a, b) for a in imgs[x1] for b in imgs[x2]
            )
            if same != (x1 == x2):
                injective = False
                offenders.append(f"h({x1}) =^j h({x2}) is {same}, arguments equal: {x1 == x2}")
    return FunctionalityReport(functional, injective, tuple(offenders))


def term_image(M: Structure, j, t, asg: dict[int, int]) -> frozenset[int]:
    """Elements the translated term can denote at the given target elements."""
    if isinstance(t, Var):
        return frozenset({asg[t.index]})
    sym = t.symbol
    if sym == "0":
        body = j.relation("zero")
        return frozenset(e for e in M.domain if evaluate(M, body, {0: e}))
    if sym == "S":
        inner = term_image(M, j, t.args[0], asg)
        body = j.relation("succ")
        return frozenset(
            e for e in M.domain if any(evaluate(M, body, {0: w, 1: e}) for w in inner)
        )
    if sym in ("+", "*"):
        a = term_image(M, j, t.args[0], asg)
        b = term_image(M, j, t.args[1], asg)
        body = j.relation("add" if sym == "+" else "mul")
        return frozenset(
            e
            for e in M.domain
            if any(evaluate(M, body, {0: u, 1: v, 2: e}) for u in a for v in b)
        )
    raise ModelError(f"term law supports 0,S,+,*; got {sym!r}")


def check_term_law(M: Structure, artifacts, terms) -> tuple[bool, list[str]]:
    """Claim-level term agreement: t^j(h(x)) =^j h(y) iff t(x) = y, exhaustively
    over J'-assignments."""
    from .coding import eval_nat

    ext = jprime_extension(M, artifacts)
    imgs = h_images(M, artifacts, ext)
    j = artifacts.translation
    bad = []
    import itertools as _it

    for t in terms:
        fv = sorted(S.free_vars_term(t))
        for tup in _it.product(ext, repeat=len(fv)):
            env = dict(zip(fv, tup))
            value = eval_nat(t, env)
            for y in ext:
                rhs = value == y
                lhs = True
                for image in _it.product(*(imgs[x] for x in tup)):
                    timg = term_image(M, j, t, dict(zip(fv, image)))
                    for hy in imgs[y]:
                        if not any(_jeq(M, artifacts, w, hy) for w in timg):
                            lhs = False
                            break
                    if not lhs:
                        break
                if lhs != rhs:
                    bad.append(f"{t!r} at {env} vs y={y}: lhs={lhs} rhs={rhs}")
    return (not bad, bad)
