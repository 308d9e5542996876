"""Atomic diagrams of finite structures and evaluation-trace proof generation.

A finite structure N becomes a finite theory over the element predicates
El0..El(n-1): existence and uniqueness per element, pairwise disjointness, and
exhaustiveness.  Relation symbols of N's own language translate to explicit
disjunctions over the relation's tuples, so every true sentence of N acquires
a closed diagram proof by structural recursion: quantifiers case-split over
the elements, atoms pick their tuple out of the defining disjunction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import nd
from . import syntax as S
from .interpret import Translation, translate_formula
from .models import Structure, evaluate
from .nd import Proof, next_label
from .syntax import (
    And,
    Atom,
    Bot,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Var,
    eq,
    free_vars,
    fresh_index,
    substitute,
)
from .theory import TheorySpec, finite_theory


class DiagramError(Exception):
    pass


def element_symbol(d: int) -> str:
    return f"El{d}"


def diagram_signature(N: Structure) -> S.Signature:
    rels = [("=", 2)] + [(element_symbol(d), 1) for d in N.domain]
    return S.make_signature(f"diag[{N.name}]", rels)


def _el(d: int, t) -> Atom:
    return Atom(element_symbol(d), (t,))


def diagram_theory(N: Structure) -> TheorySpec:
    sig = diagram_signature(N)
    x, y = Var(0), Var(1)
    axioms: list[Formula] = []
    for d in N.domain:
        axioms.append(Exists(0, _el(d, x)))
        axioms.append(Forall(0, Forall(1, Imp(And(_el(d, x), _el(d, y)), eq(x, y)))))
    for d in N.domain:
        for e in N.domain:
            if d < e:
                axioms.append(Forall(0, Not(And(_el(d, x), _el(e, x)))))
    axioms.append(Forall(0, S.disj([_el(d, x) for d in N.domain])))
    return finite_theory(f"diagram[{N.name}]", sig, axioms)


def diagram_translation(N: Structure, name: Optional[str] = None) -> Translation:
    """Source symbols become explicit element-predicate disjunctions."""
    sig = diagram_signature(N)
    rels = []
    for sym, arity in N.signature.relations:
        vars_ = tuple(Var(i) for i in range(arity))
        if sym == N.signature.identity:
            rels.append((sym, eq(Var(0), Var(1))))
            continue
        tuples = sorted(N.rel(sym))
        if tuples:
            body = S.disj([S.conj([_el(t[i], vars_[i]) for i in range(arity)]) for t in tuples])
        else:
            body = And(S.conj([eq(v, v) for v in vars_]), S.BOT)
        rels.append((sym, body))
    return Translation(name or f"into-diag[{N.name}]", N.signature, sig, eq(Var(0), Var(0)), tuple(rels))


# ---------------------------------------------------------------------------
# The evaluation-trace prover


@dataclass
class _Ctx:
    N: Structure
    theory: TheorySpec
    k: Translation
    axioms: dict  # formula -> axiom Proof factory


def _case_split(disj_proof: Proof, cases: list[Formula], builder) -> Proof:
    if len(cases) == 1:
        return builder(0, disj_proof)

    def go(p: Proof, idx: int, rest: list[Formula]) -> Proof:
        if len(rest) == 1:
            return builder(idx, p)
        l1, l2 = next_label(), next_label()
        left = builder(idx, nd.assume(rest[0], l1))
        right = go(nd.assume(S.disj(rest[1:]), l2), idx + 1, rest[1:])
        return nd.or_e(p, l1, left, l2, right)

    return go(disj_proof, 0, cases)


def prove_in_diagram(N: Structure, phi: Formula) -> Proof:
    """A closed diagram-theory proof of the translation of a sentence true in N."""
    if free_vars(phi):
        raise DiagramError("the diagram prover takes sentences")
    if not evaluate(N, phi, {}):
        raise DiagramError(f"sentence is false in {N.name}: {phi!r}")
    ctx = _Ctx(N, diagram_theory(N), diagram_translation(N), {})
    return _prove(ctx, phi, {}, {})


def _unify_args(args) -> tuple[int, ...]:
    out = []
    for a in args:
        if not isinstance(a, Var):
            raise DiagramError("diagram proofs need purely relational sentences (variable terms)")
        out.append(a.index)
    return tuple(out)


def _exhaustive_split(ctx: _Ctx, var: int, elp: dict[int, Proof], builder) -> Proof:
    """Case-split a variable over the domain via the exhaustiveness axiom."""
    ex_ax = Forall(0, S.disj([_el(d, Var(0)) for d in ctx.N.domain]))
    disj = nd.forall_e(Var(var), nd.axiom(ex_ax))
    cases = [_el(d, Var(var)) for d in ctx.N.domain]

    def branch(i: int, asm: Proof) -> Proof:
        d = ctx.N.domain[i]
        elp2 = dict(elp)
        elp2[var] = asm
        return builder(d, elp2)

    return _case_split(disj, cases, branch)


def _with_witness(ctx: _Ctx, d: int, elp: dict[int, Proof], conclusion: Formula, builder) -> Proof:
    """Introduce a fresh variable denoting element d via its existence axiom."""
    used = set(free_vars(conclusion))
    for v in elp:
        used.add(v)
    w = fresh_index(used)
    lab = next_label()
    asm = nd.assume(_el(d, Var(w)), lab)
    elp2 = dict(elp)
    elp2[w] = asm
    inner = builder(w, elp2)
    major = nd.axiom(Exists(0, _el(d, Var(0))))
    return nd.exists_e(w, lab, major, inner)


def _prove(ctx: _Ctx, phi: Formula, env: dict[int, int], elp: dict[int, Proof]) -> Proof:
    """Proof of translate_formula(k, phi) from the El-assumptions in elp."""
    N, k = ctx.N, ctx.k
    if isinstance(phi, Atom):
        args = _unify_args(phi.args)
        tup = tuple(env[v] for v in args)
        if phi.rel == N.signature.identity:
            d = tup[0]
            if tup[0] != tup[1]:
                raise DiagramError("untrue identity reached the prover")
            uniq = Forall(0, Forall(1, Imp(And(_el(d, Var(0)), _el(d, Var(1))), eq(Var(0), Var(1)))))
            inst = nd.forall_e(Var(args[1]), nd.forall_e(Var(args[0]), nd.axiom(uniq)))
            return nd.imp_e(inst, nd.and_i(elp[args[0]], elp[args[1]]))
        tuples = sorted(N.rel(phi.rel))
        if tup not in tuples:
            raise DiagramError("untrue atom reached the prover")
        cases = [S.conj([_el(t[i], Var(args[i])) for i in range(len(args))]) for t in tuples]
        mine = tuples.index(tup)
        witness = S.conj if False else None
        pf = _conj_proof([elp[v] for v in args])
        # wrap into the disjunction at the right position
        out = pf
        for i in range(len(cases) - 1, -1, -1):
            if i == mine:
                if i < len(cases) - 1:
                    out = nd.or_i1(out, S.disj(cases[i + 1 :]))
                for jx in range(i - 1, -1, -1):
                    out = nd.or_i2(cases[jx], out)
                break
        return out
    if isinstance(phi, And):
        return nd.and_i(_prove(ctx, phi.left, env, elp), _prove(ctx, phi.right, env, elp))
    if isinstance(phi, Or):
        if evaluate(N, phi.left, env):
            return nd.or_i1(_prove(ctx, phi.left, env, elp), translate_formula(k, phi.right))
        return nd.or_i2(translate_formula(k, phi.left), _prove(ctx, phi.right, env, elp))
    if isinstance(phi, Imp):
        lab = next_label()
        tl = translate_formula(k, phi.left)
        if evaluate(N, phi.right, env):
            return nd.imp_i(lab, tl, _prove(ctx, phi.right, env, elp))
        neg = _refute(ctx, phi.left, env, elp)
        boom = nd.not_e(nd.assume(tl, lab), neg)
        return nd.imp_i(lab, tl, nd.bot_e(translate_formula(k, phi.right), boom))
    if isinstance(phi, Not):
        return _refute(ctx, phi.body, env, elp)
    if isinstance(phi, Forall):
        target = translate_formula(k, phi)
        used = set(env) | set(free_vars(phi))
        w = fresh_index(used | set(elp))
        inst = substitute(phi.body, phi.var, Var(w))
        lab = next_label()

        def builder(d: int, elp2: dict[int, Proof]) -> Proof:
            return _prove(ctx, inst, {**env, w: d}, elp2)

        body = _exhaustive_split(ctx, w, elp, builder)
        guarded = nd.imp_i(lab, k.delta_at(w), body)
        out = nd.forall_i(w, guarded)
        if out.formula != target:
            raise DiagramError(f"internal: built {out.formula!r}, wanted {target!r}")
        return out
    if isinstance(phi, Exists):
        target = translate_formula(k, phi)
        # pick the first witnessing element deterministically
        d_hit = None
        w_probe = fresh_index(set(env) | set(free_vars(phi)))
        inst0 = substitute(phi.body, phi.var, Var(w_probe))
        for d in N.domain:
            if evaluate(N, inst0, {**env, w_probe: d}):
                d_hit = d
                break
        if d_hit is None:
            raise DiagramError("untrue existential reached the prover")

        def builder(w: int, elp2: dict[int, Proof]) -> Proof:
            inst = substitute(phi.body, phi.var, Var(w))
            body_pf = _prove(ctx, inst, {**env, w: d_hit}, elp2)
            pair = nd.and_i(nd.refl(Var(w)), body_pf)
            return nd.exists_i(target, Var(w), pair)

        return _with_witness(ctx, d_hit, elp, target, builder)
    if isinstance(phi, Bot):
        raise DiagramError("falsity is not provable")
    raise DiagramError(f"unsupported formula shape {phi!r}")


def _conj_proof(parts: list[Proof]) -> Proof:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = nd.and_i(p, out)
    return out


def _refute(ctx: _Ctx, phi: Formula, env: dict[int, int], elp: dict[int, Proof]) -> Proof:
    """Proof of Not(translate_formula(k, phi)) when phi is false in N at env."""
    N, k = ctx.N, ctx.k
    tphi = translate_formula(k, phi)
    lab = next_label()
    if isinstance(phi, Atom):
        args = _unify_args(phi.args)
        tup = tuple(env[v] for v in args)
        asm = nd.assume(tphi, lab)
        if phi.rel == N.signature.identity:
            d, e = tup
            if d == e:
                raise DiagramError("true identity reached the refuter")
            z = fresh_index(set(args) | set(elp))
            moved = nd.eq_subst(_el(d, Var(z)), z, asm, elp[args[0]])  # El_d at y
            a, b = sorted((d, e))
            pa = moved if d == a else elp[args[1]]
            pb = elp[args[1]] if d == a else moved
            disj_ax = Forall(0, Not(And(_el(a, Var(0)), _el(b, Var(0)))))
            inst = nd.forall_e(Var(args[1]), nd.axiom(disj_ax))
            boom = nd.not_e(nd.and_i(pa, pb), inst)
            return nd.not_i(lab, tphi, boom)
        tuples = sorted(N.rel(phi.rel))
        if tup in tuples:
            raise DiagramError("true atom reached the refuter")
        if not tuples:
            boom = nd.and_e2(asm)
            return nd.not_i(lab, tphi, boom)
        cases = [S.conj([_el(t[i], Var(args[i])) for i in range(len(args))]) for t in tuples]

        def branch(i: int, case_asm: Proof) -> Proof:
            t = tuples[i]
            pos = next(p for p in range(len(args)) if t[p] != tup[p])
            got = case_asm
            for p in range(pos):
                got = nd.and_e2(got)
            if pos < len(args) - 1:
                got = nd.and_e1(got)
            # got : El_{t[pos]}(x_args[pos]); clash with elp: El_{tup[pos]}
            a, b = sorted((t[pos], tup[pos]))
            pa = got if t[pos] == a else elp[args[pos]]
            pb = elp[args[pos]] if t[pos] == a else got
            disj_ax = Forall(0, Not(And(_el(a, Var(0)), _el(b, Var(0)))))
            inst = nd.forall_e(Var(args[pos]), nd.axiom(disj_ax))
            return nd.not_e(nd.and_i(pa, pb), inst)

        boom = _case_split(asm, cases, branch)
        return nd.not_i(lab, tphi, boom)
    if isinstance(phi, Bot):
        return nd.not_i(lab, tphi, nd.assume(tphi, lab))
    if isinstance(phi, Not):
        inner = _prove(ctx, phi.body, env, elp)
        return nd.not_i(lab, tphi, nd.not_e(inner, nd.assume(tphi, lab)))
    if isinstance(phi, And):
        asm = nd.assume(tphi, lab)
        if not evaluate(N, phi.left, env):
            boom = nd.not_e(nd.and_e1(asm), _refute(ctx, phi.left, env, elp))
        else:
            boom = nd.not_e(nd.and_e2(asm), _refute(ctx, phi.right, env, elp))
        return nd.not_i(lab, tphi, boom)
    if isinstance(phi, Or):
        asm = nd.assume(tphi, lab)
        l1, l2 = next_label(), next_label()
        tl, tr = translate_formula(k, phi.left), translate_formula(k, phi.right)
        b1 = nd.not_e(nd.assume(tl, l1), _refute(ctx, phi.left, env, elp))
        b2 = nd.not_e(nd.assume(tr, l2), _refute(ctx, phi.right, env, elp))
        return nd.not_i(lab, tphi, nd.or_e(asm, l1, b1, l2, b2))
    if isinstance(phi, Imp):
        asm = nd.assume(tphi, lab)
        got = nd.imp_e(asm, _prove(ctx, phi.left, env, elp))
        boom = nd.not_e(got, _refute(ctx, phi.right, env, elp))
        return nd.not_i(lab, tphi, boom)
    if isinstance(phi, Forall):
        asm = nd.assume(tphi, lab)
        w_probe = fresh_index(set(env) | set(free_vars(phi)))
        inst0 = substitute(phi.body, phi.var, Var(w_probe))
        d_bad = None
        for d in N.domain:
            if not evaluate(N, inst0, {**env, w_probe: d}):
                d_bad = d
                break
        if d_bad is None:
            raise DiagramError("true universal reached the refuter")

        def builder(w: int, elp2: dict[int, Proof]) -> Proof:
            inst = substitute(phi.body, phi.var, Var(w))
            got = nd.forall_e(Var(w), asm)
            body = nd.imp_e(got, nd.refl(Var(w)))
            return nd.not_e(body, _refute(ctx, inst, {**env, w: d_bad}, elp2))

        boom = _with_witness(ctx, d_bad, elp, S.BOT, builder)
        return nd.not_i(lab, tphi, boom)
    if isinstance(phi, Exists):
        asm = nd.assume(tphi, lab)
        used = set(env) | set(free_vars(phi)) | set(elp)
        w = fresh_index(used)
        l2 = next_label()
        inst_k = substitute(tphi.body, tphi.var, Var(w))
        A = nd.assume(inst_k, l2)
        body = nd.and_e2(A)
        inst = substitute(phi.body, phi.var, Var(w))

        def builder(d: int, elp2: dict[int, Proof]) -> Proof:
            return nd.not_e(body, _refute(ctx, inst, {**env, w: d}, elp2))

        boom = _exhaustive_split(ctx, w, elp, builder)
        closed = nd.exists_e(w, l2, asm, boom)
        return nd.not_i(lab, tphi, closed)
    raise DiagramError(f"unsupported formula shape {phi!r}")


def interpretation_witnesses(N: Structure, theory_axioms) -> dict[int, Proof]:
    """Diagram witnesses for a list of (code, axiom) pairs true in N."""
    out = {}
    for code, ax in theory_axioms:
        out[code] = prove_in_diagram(N, ax)
    return out
