"""Natural-deduction proof trees with a trusted checker.

This is the single proof format of the workbench.  Rules: assumption, axiom
citation (with the axiom's Goedel code stored at the leaf), the intuitionistic
introduction/elimination pairs, classical reductio, primitive equality rules
(reflexivity and replacement), and introduction/elimination for the bounded
quantifiers of the arithmetic language.  Discharge is by integer labels; a
label names one assumption formula per proof.

Proof nodes are immutable and may share subtrees; the checker memoizes on
identity, so shared subproofs are checked once and ``node_count`` reports
distinct nodes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from . import syntax as S
from .syntax import (
    And,
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
    Term,
    Var,
    free_vars,
    free_vars_term,
    le,
    lt,
    substitute,
)


class ProofError(Exception):
    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(f"at {'/'.join(map(str, path)) or 'root'}: {message}")
        self.path = path


_LABELS = itertools.count(1)


def next_label() -> int:
    return next(_LABELS)


@dataclass(frozen=True, eq=False)
class Proof:
    rule: str
    formula: Formula
    premises: tuple["Proof", ...] = ()
    params: tuple = ()

    def __repr__(self):
        return f"<{self.rule}: {self.formula!r}>"


# ---------------------------------------------------------------------------
# Smart constructors.  They compute conclusions and check local shape; the
# checker re-derives everything, including discharge and eigenconditions.


def assume(phi: Formula, label: Optional[int] = None) -> Proof:
    if label is None:
        label = next_label()
    return Proof("assume", phi, (), (label,))


def axiom(phi: Formula, code: Optional[int] = None) -> Proof:
    from .coding import code_formula

    if code is None:
        code = code_formula(phi)
    return Proof("axiom", phi, (), (code,))


def and_i(p: Proof, q: Proof) -> Proof:
    return Proof("and_i", And(p.formula, q.formula), (p, q))


def and_e1(p: Proof) -> Proof:
    if not isinstance(p.formula, And):
        raise ProofError("and_e1 premise is not a conjunction")
    return Proof("and_e1", p.formula.left, (p,))


def and_e2(p: Proof) -> Proof:
    if not isinstance(p.formula, And):
        raise ProofError("and_e2 premise is not a conjunction")
    return Proof("and_e2", p.formula.right, (p,))


def or_i1(p: Proof, right: Formula) -> Proof:
    return Proof("or_i1", Or(p.formula, right), (p,), (right,))


def or_i2(left: Formula, p: Proof) -> Proof:
    return Proof("or_i2", Or(left, p.formula), (p,), (left,))


def or_e(p: Proof, l1: int, q: Proof, l2: int, r: Proof) -> Proof:
    if not isinstance(p.formula, Or):
        raise ProofError("or_e major premise is not a disjunction")
    if q.formula != r.formula:
        raise ProofError("or_e branches conclude different formulas")
    return Proof("or_e", q.formula, (p, q, r), (l1, l2))


def imp_i(label: int, antecedent: Formula, p: Proof) -> Proof:
    return Proof("imp_i", Imp(antecedent, p.formula), (p,), (label, antecedent))


def imp_e(p: Proof, q: Proof) -> Proof:
    if not isinstance(p.formula, Imp):
        raise ProofError("imp_e major premise is not an implication")
    if p.formula.left != q.formula:
        raise ProofError("imp_e minor premise does not match the antecedent")
    return Proof("imp_e", p.formula.right, (p, q))


def not_i(label: int, phi: Formula, p: Proof) -> Proof:
    if not isinstance(p.formula, Bot):
        raise ProofError("not_i premise must conclude falsity")
    return Proof("not_i", Not(phi), (p,), (label, phi))


def not_e(p: Proof, q: Proof) -> Proof:
    if not isinstance(q.formula, Not) or q.formula.body != p.formula:
        raise ProofError("not_e premises do not clash")
    return Proof("not_e", BOT, (p, q))


def bot_e(phi: Formula, p: Proof) -> Proof:
    if not isinstance(p.formula, Bot):
        raise ProofError("bot_e premise must conclude falsity")
    return Proof("bot_e", phi, (p,), (phi,))


def raa(label: int, phi: Formula, p: Proof) -> Proof:
    if not isinstance(p.formula, Bot):
        raise ProofError("raa premise must conclude falsity")
    return Proof("raa", phi, (p,), (label, phi))


def forall_i(var: int, p: Proof) -> Proof:
    return Proof("forall_i", Forall(var, p.formula), (p,), (var,))


def forall_e(t: Term, p: Proof) -> Proof:
    if not isinstance(p.formula, Forall):
        raise ProofError("forall_e premise is not universal")
    body = substitute(p.formula.body, p.formula.var, t)
    return Proof("forall_e", body, (p,), (t,))


def exists_i(target: Exists, t: Term, p: Proof) -> Proof:
    if not isinstance(target, Exists):
        raise ProofError("exists_i target must be existential")
    if substitute(target.body, target.var, t) != p.formula:
        raise ProofError("exists_i premise is not the instantiated body")
    return Proof("exists_i", target, (p,), (t,))


def exists_e(eigen: int, label: int, p: Proof, q: Proof) -> Proof:
    if not isinstance(p.formula, Exists):
        raise ProofError("exists_e major premise is not existential")
    return Proof("exists_e", q.formula, (p, q), (eigen, label))


def refl(t: Term) -> Proof:
    return Proof("refl", S.eq(t, t), (), (t,))


def eq_subst(template: Formula, var: int, p: Proof, q: Proof) -> Proof:
    """From p : s = t and q : template[var:=s], conclude template[var:=t]."""
    if not (isinstance(p.formula, Atom) and p.formula.rel == "=" and len(p.formula.args) == 2):
        raise ProofError("eq_subst first premise is not an identity")
    s, t = p.formula.args
    if substitute(template, var, s) != q.formula:
        raise ProofError("eq_subst second premise does not match the template at s")
    return Proof("eq_subst", substitute(template, var, t), (p, q), (template, var))


def guard_formula(t: Term, bound: Term, strict: bool) -> Formula:
    """The side condition of a bounded quantifier, rendered over <=."""
    return lt(t, bound) if strict else le(t, bound)


def ball_i(var: int, bound: Term, strict: bool, label: int, p: Proof) -> Proof:
    return Proof("ball_i", BForall(var, bound, strict, p.formula), (p,), (var, bound, strict, label))


def ball_e(t: Term, p: Proof, q: Proof) -> Proof:
    if not isinstance(p.formula, BForall):
        raise ProofError("ball_e major premise is not bounded-universal")
    f = p.formula
    if q.formula != guard_formula(t, f.bound, f.strict):
        raise ProofError("ball_e side premise is not the bound guard")
    return Proof("ball_e", substitute(f.body, f.var, t), (p, q), (t,))


def bex_i(target: BExists, t: Term, p: Proof, q: Proof) -> Proof:
    if not isinstance(target, BExists):
        raise ProofError("bex_i target must be bounded-existential")
    if p.formula != guard_formula(t, target.bound, target.strict):
        raise ProofError("bex_i first premise is not the bound guard")
    if substitute(target.body, target.var, t) != q.formula:
        raise ProofError("bex_i second premise is not the instantiated body")
    return Proof("bex_i", target, (p, q), (t,))


def bex_e(eigen: int, label: int, p: Proof, q: Proof) -> Proof:
    if not isinstance(p.formula, BExists):
        raise ProofError("bex_e major premise is not bounded-existential")
    return Proof("bex_e", q.formula, (p, q), (eigen, label))


# ---------------------------------------------------------------------------
# Structure utilities


def iter_nodes(p: Proof) -> Iterator[Proof]:
    """Distinct nodes, each once (proofs may share subtrees)."""
    seen: set[int] = set()
    stack = [p]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(node.premises)


def node_count(p: Proof) -> int:
    return sum(1 for _ in iter_nodes(p))


def labels_of(p: Proof) -> set[int]:
    out = set()
    for node in iter_nodes(p):
        if node.rule == "assume":
            out.add(node.params[0])
        elif node.rule in ("imp_i", "not_i", "raa"):
            out.add(node.params[0])
        elif node.rule == "or_e":
            out.update(node.params)
        elif node.rule in ("exists_e", "bex_e"):
            out.add(node.params[1])
        elif node.rule == "ball_i":
            out.add(node.params[3])
    return out


def relabel_fresh(p: Proof) -> Proof:
    """Copy p with globally fresh discharge labels (for safe grafting)."""
    mapping: dict[int, int] = {}

    def fresh(l: int) -> int:
        if l not in mapping:
            mapping[l] = next_label()
        return mapping[l]

    memo: dict[int, Proof] = {}

    def go(node: Proof) -> Proof:
        got = memo.get(id(node))
        if got is not None:
            return got
        prem = tuple(go(q) for q in node.premises)
        params = node.params
        if node.rule == "assume":
            params = (fresh(params[0]),)
        elif node.rule in ("imp_i", "not_i", "raa"):
            params = (fresh(params[0]),) + params[1:]
        elif node.rule == "or_e":
            params = (fresh(params[0]), fresh(params[1]))
        elif node.rule in ("exists_e", "bex_e"):
            params = (params[0], fresh(params[1]))
        elif node.rule == "ball_i":
            params = params[:3] + (fresh(params[3]),)
        out = Proof(node.rule, node.formula, prem, params)
        memo[id(node)] = out
        return out

    return go(p)


def graft(p: Proof, replacements: dict[tuple[int, Formula], Proof], fresh_labels: bool = True) -> Proof:
    """Replace assumption leaves (label, formula) by whole proofs of the formula.

    With fresh_labels (the default) each insertion relabels the replacement, so
    repeated grafts cannot collide on discharge labels.  Pass False when the
    replacement deliberately leaves an assumption open under a shared label.
    """
    for (label, phi), rep in replacements.items():
        if rep.formula != phi:
            raise ProofError(f"graft replacement concludes {rep.formula!r}, wanted {phi!r}")

    memo: dict[int, Proof] = {}

    def go(node: Proof) -> Proof:
        got = memo.get(id(node))
        if got is not None:
            return got
        if node.rule == "assume":
            key = (node.params[0], node.formula)
            if key in replacements:
                out = relabel_fresh(replacements[key]) if fresh_labels else replacements[key]
            else:
                out = node
        else:
            prem = tuple(go(q) for q in node.premises)
            out = node if all(a is b for a, b in zip(prem, node.premises)) else Proof(
                node.rule, node.formula, prem, node.params
            )
        memo[id(node)] = out
        return out

    return go(p)


def open_assumptions(p: Proof) -> dict[int, Formula]:
    """Open assumption labels and formulas, computed structurally (no validity check)."""
    memo: dict[int, dict[int, Formula]] = {}

    def go(node: Proof) -> dict[int, Formula]:
        got = memo.get(id(node))
        if got is not None:
            return got
        if node.rule == "assume":
            out = {node.params[0]: node.formula}
        elif node.rule == "axiom":
            out = {}
        else:
            out = {}
            for q in node.premises:
                out.update(go(q))
            for label in _discharged_labels(node):
                out.pop(label, None)
        memo[id(node)] = out
        return out

    return go(p)


def _discharged_labels(node: Proof) -> tuple[int, ...]:
    if node.rule in ("imp_i", "not_i", "raa"):
        return (node.params[0],)
    if node.rule == "or_e":
        return tuple(node.params)
    if node.rule in ("exists_e", "bex_e"):
        return (node.params[1],)
    if node.rule == "ball_i":
        return (node.params[3],)
    return ()


# ---------------------------------------------------------------------------
# The checker


def check_proof(p: Proof, theory) -> Formula:
    """Validate every rule application; return the conclusion.

    ``theory`` is a TheorySpec whose recognizer admits the citable axioms.
    Raises ProofError with the offending node path.
    """
    memo: dict[int, dict[int, Formula]] = {}

    def merge(acc: dict[int, Formula], new: dict[int, Formula], path) -> None:
        for label, phi in new.items():
            if label in acc and acc[label] != phi:
                raise ProofError(f"label {label} names two assumptions", path)
            acc[label] = phi

    def discharge(opens: dict[int, Formula], label: int, phi: Formula, path) -> dict[int, Formula]:
        if label in opens:
            if opens[label] != phi:
                raise ProofError(f"label {label} discharges {opens[label]!r}, rule expects {phi!r}", path)
            opens = dict(opens)
            del opens[label]
        return opens

    def opens_fv(opens: dict[int, Formula]) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for phi in opens.values():
            out |= free_vars(phi)
        return out

    def go(node: Proof, path: tuple[int, ...]) -> dict[int, Formula]:
        got = memo.get(id(node))
        if got is not None:
            return got
        rule = node.rule
        prem = node.premises
        subs = []
        for i, q in enumerate(prem):
            subs.append(go(q, path + (i,)))
        opens: dict[int, Formula] = {}
        for sub in subs:
            merge(opens, sub, path)

        if rule == "assume":
            opens = {node.params[0]: node.formula}
        elif rule == "axiom":
            code = node.params[0]
            from .coding import code_formula

            if not theory.recognizer(node.formula):
                raise ProofError(f"unrecognized axiom of {theory.name}: {node.formula!r}", path)
            if code != code_formula(node.formula):
                raise ProofError("stored axiom code does not match the formula", path)
        elif rule == "and_i":
            if node.formula != And(prem[0].formula, prem[1].formula):
                raise ProofError("bad and_i conclusion", path)
        elif rule == "and_e1":
            f = prem[0].formula
            if not isinstance(f, And) or node.formula != f.left:
                raise ProofError("bad and_e1", path)
        elif rule == "and_e2":
            f = prem[0].formula
            if not isinstance(f, And) or node.formula != f.right:
                raise ProofError("bad and_e2", path)
        elif rule == "or_i1":
            if node.formula != Or(prem[0].formula, node.params[0]):
                raise ProofError("bad or_i1", path)
        elif rule == "or_i2":
            if node.formula != Or(node.params[0], prem[0].formula):
                raise ProofError("bad or_i2", path)
        elif rule == "or_e":
            f = prem[0].formula
            l1, l2 = node.params
            if not isinstance(f, Or):
                raise ProofError("or_e major premise is not a disjunction", path)
            if prem[1].formula != node.formula or prem[2].formula != node.formula:
                raise ProofError("or_e branch conclusions differ from the verdict", path)
            opens = {}
            merge(opens, subs[0], path)
            merge(opens, discharge(subs[1], l1, f.left, path), path)
            merge(opens, discharge(subs[2], l2, f.right, path), path)
        elif rule == "imp_i":
            label, ante = node.params
            if node.formula != Imp(ante, prem[0].formula):
                raise ProofError("bad imp_i conclusion", path)
            opens = discharge(opens, label, ante, path)
        elif rule == "imp_e":
            f = prem[0].formula
            if not isinstance(f, Imp) or f.left != prem[1].formula or node.formula != f.right:
                raise ProofError("bad imp_e", path)
        elif rule == "not_i":
            label, phi = node.params
            if not isinstance(prem[0].formula, Bot) or node.formula != Not(phi):
                raise ProofError("bad not_i", path)
            opens = discharge(opens, label, phi, path)
        elif rule == "not_e":
            f = prem[1].formula
            if not isinstance(f, Not) or f.body != prem[0].formula or not isinstance(node.formula, Bot):
                raise ProofError("bad not_e", path)
        elif rule == "bot_e":
            if not isinstance(prem[0].formula, Bot) or node.formula != node.params[0]:
                raise ProofError("bad bot_e", path)
        elif rule == "raa":
            label, phi = node.params
            if not isinstance(prem[0].formula, Bot) or node.formula != phi:
                raise ProofError("bad raa", path)
            opens = discharge(opens, label, Not(phi), path)
        elif rule == "forall_i":
            (var,) = node.params
            if node.formula != Forall(var, prem[0].formula):
                raise ProofError("bad forall_i conclusion", path)
            if var in opens_fv(opens):
                raise ProofError(f"eigenvariable x{var} occurs free in an open assumption", path)
        elif rule == "forall_e":
            f = prem[0].formula
            (t,) = node.params
            if not isinstance(f, Forall) or node.formula != substitute(f.body, f.var, t):
                raise ProofError("bad forall_e", path)
        elif rule == "exists_i":
            (t,) = node.params
            f = node.formula
            if not isinstance(f, Exists) or substitute(f.body, f.var, t) != prem[0].formula:
                raise ProofError("bad exists_i", path)
        elif rule == "exists_e":
            eigen, label = node.params
            f = prem[0].formula
            if not isinstance(f, Exists):
                raise ProofError("exists_e major premise is not existential", path)
            inst = substitute(f.body, f.var, Var(eigen))
            minor = discharge(subs[1], label, inst, path)
            opens = {}
            merge(opens, subs[0], path)
            merge(opens, minor, path)
            if node.formula != prem[1].formula:
                raise ProofError("bad exists_e conclusion", path)
            if eigen in free_vars(node.formula) or eigen in free_vars(f) or eigen in opens_fv(minor):
                raise ProofError(f"eigenvariable x{eigen} is not fresh", path)
        elif rule == "refl":
            (t,) = node.params
            if node.formula != S.eq(t, t):
                raise ProofError("bad refl", path)
        elif rule == "eq_subst":
            template, var = node.params
            f = prem[0].formula
            if not (isinstance(f, Atom) and f.rel == "=" and len(f.args) == 2):
                raise ProofError("eq_subst first premise is not an identity", path)
            s, t = f.args
            if substitute(template, var, s) != prem[1].formula:
                raise ProofError("eq_subst premise mismatch at s", path)
            if node.formula != substitute(template, var, t):
                raise ProofError("eq_subst conclusion mismatch at t", path)
        elif rule == "ball_i":
            var, bound, strict, label = node.params
            if node.formula != BForall(var, bound, strict, prem[0].formula):
                raise ProofError("bad ball_i conclusion", path)
            opens = discharge(opens, label, guard_formula(Var(var), bound, strict), path)
            if var in opens_fv(opens) or var in free_vars_term(bound):
                raise ProofError(f"eigenvariable x{var} is not fresh", path)
        elif rule == "ball_e":
            f = prem[0].formula
            (t,) = node.params
            if not isinstance(f, BForall):
                raise ProofError("ball_e major premise is not bounded-universal", path)
            if prem[1].formula != guard_formula(t, f.bound, f.strict):
                raise ProofError("ball_e side premise is not the guard", path)
            if node.formula != substitute(f.body, f.var, t):
                raise ProofError("bad ball_e conclusion", path)
        elif rule == "bex_i":
            (t,) = node.params
            f = node.formula
            if not isinstance(f, BExists):
                raise ProofError("bex_i conclusion is not bounded-existential", path)
            if prem[0].formula != guard_formula(t, f.bound, f.strict):
                raise ProofError("bex_i guard premise mismatch", path)
            if substitute(f.body, f.var, t) != prem[1].formula:
                raise ProofError("bex_i body premise mismatch", path)
        elif rule == "bex_e":
            eigen, label = node.params
            f = prem[0].formula
            if not isinstance(f, BExists):
                raise ProofError("bex_e major premise is not bounded-existential", path)
            inst = And(
                guard_formula(Var(eigen), f.bound, f.strict),
                substitute(f.body, f.var, Var(eigen)),
            )
            minor = discharge(subs[1], label, inst, path)
            opens = {}
            merge(opens, subs[0], path)
            merge(opens, minor, path)
            if node.formula != prem[1].formula:
                raise ProofError("bad bex_e conclusion", path)
            if eigen in free_vars(node.formula) or eigen in free_vars(f) or eigen in opens_fv(minor):
                raise ProofError(f"eigenvariable x{eigen} is not fresh", path)
        else:
            raise ProofError(f"unknown rule {rule!r}", path)

        memo[id(node)] = opens
        return opens

    go(p, ())
    return p.formula


def check_closed(p: Proof, theory) -> Formula:
    check_proof(p, theory)
    opens = open_assumptions(p)
    if opens:
        raise ProofError(f"proof has open assumptions: {sorted(opens)} ")
    return p.formula


# ---------------------------------------------------------------------------
# Restricted provability: axiom codes and rho both bounded by n


def restricted_violations(p: Proof, theory, n: int) -> list[tuple[tuple[int, ...], str]]:
    """Offending nodes for the bound n, empty when the proof is n-restricted."""
    from .coding import code_formula

    out = []
    index: dict[int, tuple[int, ...]] = {}

    def walk(node: Proof, path: tuple[int, ...]):
        if id(node) in index:
            return
        index[id(node)] = path
        if node.rule == "axiom" and node.params[0] > n:
            out.append((path, f"axiom code {node.params[0]} > {n}"))
        r = S.rho(node.formula)
        if r > n:
            out.append((path, f"rho {r} > {n} for {node.formula!r}"))
        for i, q in enumerate(node.premises):
            walk(q, path + (i,))

    walk(p, ())
    return out


def check_restricted(p: Proof, theory, n: int) -> bool:
    """True iff p checks and every axiom code and every formula's rho is <= n."""
    check_proof(p, theory)
    return not restricted_violations(p, theory, n)


# ---------------------------------------------------------------------------
# Serialization to tokens (for Goedel codes) and s-expressions (for files)


def proof_tokens(p: Proof) -> list[str]:
    from .coding import _VAR_MARK, _dyadic, _ident_tokens, formula_tokens, term_tokens

    def param_tokens(x) -> list[str]:
        if isinstance(x, bool):
            return _ident_tokens("t" if x else "f")
        if isinstance(x, int):
            return [_VAR_MARK] + _dyadic(x)
        if isinstance(x, (S.Var, S.App)):
            return term_tokens(x)
        return formula_tokens(x)

    toks = ["("] + _ident_tokens(p.rule)
    for x in p.params:
        toks += param_tokens(x)
    toks += formula_tokens(p.formula)
    for q in p.premises:
        toks += proof_tokens(q)
    toks.append(")")
    return toks
