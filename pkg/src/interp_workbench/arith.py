"""Evaluation-trace proof generation over the base arithmetic theory.

Equational proofs about dyadic numerals follow the numeral recursion, so a
sum or product proof has polynomially many nodes in the numeral codes.  The
bounded-truth prover turns a true closed formula of the bounded fragment into
a base-theory proof: numeral equations for atoms, case expansion for bounded
quantifiers, witness instantiation for existentials.
"""

from __future__ import annotations

from typing import Optional

from . import nd
from . import syntax as S
from .coding import eval_nat, numeral
from .nd import Proof, next_label
from .syntax import (
    And,
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
    Term,
    Var,
    eq,
    le,
    free_vars,
    free_vars_term,
    fresh_index,
    substitute,
)
from .theory import (
    BASE_ARITH,
    DEFINING_EQUATIONS,
    descent_axiom,
    distinctness_fact,
    order_fact,
)


class ArithProofError(Exception):
    pass


class FormulaFalse(ArithProofError):
    """The formula is false; carries the failing atom."""

    def __init__(self, atom: Formula):
        super().__init__(f"formula is false at {atom!r}")
        self.atom = atom


class UnsupportedFragment(ArithProofError):
    pass


_SS0 = S.succ(S.succ(S.zero()))
ONE = S.succ(S.zero())

# indices into DEFINING_EQUATIONS, by role
_AX = {
    "add0": DEFINING_EQUATIONS[0],
    "add0l": DEFINING_EQUATIONS[1],
    "addS": DEFINING_EQUATIONS[2],
    "addSl": DEFINING_EQUATIONS[3],
    "mul0": DEFINING_EQUATIONS[4],
    "mul0l": DEFINING_EQUATIONS[5],
    "mulS": DEFINING_EQUATIONS[6],
    "mulSl": DEFINING_EQUATIONS[7],
    "addcomm": DEFINING_EQUATIONS[8],
    "addassoc": DEFINING_EQUATIONS[9],
    "mulcomm": DEFINING_EQUATIONS[10],
    "mulassoc": DEFINING_EQUATIONS[11],
    "distl": DEFINING_EQUATIONS[12],
    "distr": DEFINING_EQUATIONS[13],
}


def ax_instance(name: str, *terms: Term) -> Proof:
    """Cite a defining equation and instantiate its universal prefix."""
    p = nd.axiom(_AX[name])
    for t in terms:
        p = nd.forall_e(t, p)
    return p


def _fresh_for(*objs) -> int:
    used: set[int] = set()
    for o in objs:
        if isinstance(o, (S.Var, S.App)):
            used |= set(free_vars_term(o))
        else:
            used |= set(free_vars(o))
    return fresh_index(used)


def eq_sides(p: Proof) -> tuple[Term, Term]:
    f = p.formula
    if not (isinstance(f, Atom) and f.rel == "=" and len(f.args) == 2):
        raise ArithProofError(f"not an identity proof: {f!r}")
    return f.args


def eq_symm(p: Proof) -> Proof:
    s, t = eq_sides(p)
    z = _fresh_for(s, t)
    return nd.eq_subst(eq(Var(z), s), z, p, nd.refl(s))


def eq_trans(p: Proof, q: Proof) -> Proof:
    s, t = eq_sides(p)
    t2, u = eq_sides(q)
    if t != t2:
        raise ArithProofError(f"trans mismatch: {t!r} vs {t2!r}")
    z = _fresh_for(s, t, u)
    return nd.eq_subst(eq(s, Var(z)), z, q, p)


def eq_chain(*proofs: Proof) -> Proof:
    out = proofs[0]
    for p in proofs[1:]:
        out = eq_trans(out, p)
    return out


def eq_cong(f_sym: str, args: tuple[Term, ...], index: int, p: Proof) -> Proof:
    """From u = v conclude f(..u..) = f(..v..) with u at the given position."""
    u, v = eq_sides(p)
    if args[index] != u:
        raise ArithProofError("congruence argument mismatch")
    z = _fresh_for(u, v, *args)
    lhs = S.App(f_sym, args)
    hole = S.App(f_sym, tuple(Var(z) if i == index else a for i, a in enumerate(args)))
    return nd.eq_subst(eq(lhs, hole), z, p, nd.refl(lhs))


def transport(template: Formula, var: int, eq_proof: Proof, body: Proof) -> Proof:
    """Rewrite body (which proves template[var:=s]) along s = t."""
    return nd.eq_subst(template, var, eq_proof, body)


# ---------------------------------------------------------------------------
# Numeral equations


def pf_succ(n: int) -> Proof:
    """Proof of S(numeral(n)) = numeral(n+1)."""
    a = numeral(n)
    if n == 0:
        # S(0) = S(SS0*0) by congruence from 0 = SS0*0
        inner = eq_symm(ax_instance("mul0", _SS0))
        return eq_cong("S", (S.zero(),), 0, inner)
    if n % 2 == 0:
        # S(even numeral) is literally the odd numeral
        return nd.refl(S.succ(a))
    k = n // 2
    kn = numeral(k)
    even = S.times(_SS0, kn)  # a == S(even)
    # SS0*S(k) = SS0*k + SS0 = S(SS0*k + S0) = S(S(SS0*k + 0)) = S(S(SS0*k))
    c1 = ax_instance("mulS", _SS0, kn)
    c2 = ax_instance("addS", even, S.succ(S.zero()))
    c2b = eq_cong("S", (S.plus(even, S.succ(S.zero())),), 0, ax_instance("addS", even, S.zero()))
    c3 = eq_cong("S", (S.plus(even, S.zero()),), 0, ax_instance("add0", even))
    c4 = eq_cong("S", (S.succ(S.plus(even, S.zero())),), 0, c3)
    down = eq_chain(c1, c2, c2b, c4)  # SS0*S(k) = S(S(SS0*k)) = S(S(even)) = S(a)
    lift = eq_cong("*", (_SS0, S.succ(kn)), 1, pf_succ(k))  # SS0*S(k) = SS0*num(k+1)
    return eq_trans(eq_symm(down), lift)


def pf_plus(a: int, b: int) -> Proof:
    """Proof of numeral(a) + numeral(b) = numeral(a+b)."""
    na, nb = numeral(a), numeral(b)
    if a == 0:
        return ax_instance("add0l", nb)
    if b == 0:
        return ax_instance("add0", na)
    i, ra = divmod(a, 2)
    j, rb = divmod(b, 2)
    ni, nj = numeral(i), numeral(j)
    ei, ej = S.times(_SS0, ni), S.times(_SS0, nj)
    # core: SS0*i + SS0*j = SS0*(i+j) = SS0*num(i+j)
    core = eq_chain(
        eq_symm(ax_instance("distl", _SS0, ni, nj)),
        eq_cong("*", (_SS0, S.plus(ni, nj)), 1, pf_plus(i, j)),
    )
    if ra == 0 and rb == 0:
        return core  # both even: na+nb is literally SS0*i + SS0*j
    if ra == 0 and rb == 1:
        # even + S(even) = S(even + even) = S(SS0*num(i+j))
        step = ax_instance("addS", ei, ej)
        lifted = eq_cong("S", (S.plus(ei, ej),), 0, core)
        return eq_trans(step, lifted)
    if ra == 1 and rb == 0:
        step = ax_instance("addSl", ei, ej)
        lifted = eq_cong("S", (S.plus(ei, ej),), 0, core)
        return eq_trans(step, lifted)
    # odd + odd: S(ei)+S(ej) = S(S(ei)+ej) = S(S(ei+ej)) = S(S(SS0*num(i+j)))
    # and S(SS0*num(i+j)) is the literal numeral of 2(i+j)+1
    m = i + j
    step1 = ax_instance("addS", S.succ(ei), ej)
    step2 = eq_cong("S", (S.plus(S.succ(ei), ej),), 0, ax_instance("addSl", ei, ej))
    step3 = eq_cong("S", (S.succ(S.plus(ei, ej)),), 0, eq_cong("S", (S.plus(ei, ej),), 0, core))
    inner = eq_chain(step1, step2, step3)  # = S(S(SS0*num(m))) == S(num(2m+1))
    return eq_trans(inner, pf_succ(2 * m + 1))


def pf_times(a: int, b: int) -> Proof:
    """Proof of numeral(a) * numeral(b) = numeral(a*b)."""
    na, nb = numeral(a), numeral(b)
    if a == 0:
        return ax_instance("mul0l", nb)
    if b == 0:
        return ax_instance("mul0", na)
    j, rb = divmod(b, 2)
    nj = numeral(j)
    ej = S.times(_SS0, nj)

    def even_core() -> Proof:
        # a*(SS0*j) = (a*SS0)*j = (SS0*a)*j = SS0*(a*j) = SS0*num(aj)
        c1 = eq_symm(ax_instance("mulassoc", na, _SS0, nj))
        c2 = eq_cong("*", (S.times(na, _SS0), nj), 0, ax_instance("mulcomm", na, _SS0))
        c3 = ax_instance("mulassoc", _SS0, na, nj)
        c4 = eq_cong("*", (_SS0, S.times(na, nj)), 1, pf_times(a, j))
        return eq_chain(c1, c2, c3, c4)

    if rb == 0:
        return even_core()  # b even, j >= 1: num(b) is literally SS0*num(j)
    # b odd: a*S(ej) = a*ej + a = num(2aj) + num(a) = num(ab)
    step1 = ax_instance("mulS", na, ej)
    if j == 0:
        # a*(SS0*0) = a*0 = 0
        inner = eq_chain(
            eq_cong("*", (na, ej), 1, ax_instance("mul0", _SS0)),
            ax_instance("mul0", na),
        )
    else:
        inner = even_core()
    lifted = eq_cong("+", (S.times(na, ej), na), 0, inner)
    return eq_chain(step1, lifted, pf_plus(2 * a * j, a))


def pf_eval(t: Term) -> tuple[int, Proof]:
    """Value of a closed term over {0,S,+,*} and a proof t = numeral(value)."""
    if isinstance(t, Var):
        raise ArithProofError("pf_eval needs a closed term")
    from .theory import numeral_value

    v = numeral_value(t)
    if v is not None:
        return v, nd.refl(t)
    sym = t.symbol
    if sym == "0":
        return 0, nd.refl(t)
    if sym == "S":
        v1, p1 = pf_eval(t.args[0])
        lifted = eq_cong("S", (t.args[0],), 0, p1)
        return v1 + 1, eq_trans(lifted, pf_succ(v1))
    if sym in ("+", "*"):
        v1, p1 = pf_eval(t.args[0])
        v2, p2 = pf_eval(t.args[1])
        c1 = eq_cong(sym, (t.args[0], t.args[1]), 0, p1)
        c2 = eq_cong(sym, (numeral(v1), t.args[1]), 1, p2)
        tail = pf_plus(v1, v2) if sym == "+" else pf_times(v1, v2)
        val = v1 + v2 if sym == "+" else v1 * v2
        return val, eq_chain(c1, c2, tail)
    raise UnsupportedFragment(f"function symbol {sym!r} outside the supported fragment")


# ---------------------------------------------------------------------------
# Standard-model truth of closed formulas (the semantic pre-check)


def eval_closed(phi: Formula, exists_budget: int = 256) -> bool:
    def go(f: Formula, env: dict[int, int]) -> bool:
        if isinstance(f, Bot):
            return False
        if isinstance(f, Atom):
            vals = [eval_nat(a, env) for a in f.args]
            if f.rel == "=":
                return vals[0] == vals[1]
            if f.rel == "le":
                return vals[0] <= vals[1]
            raise UnsupportedFragment(f"relation {f.rel!r} outside the supported fragment")
        if isinstance(f, And):
            return go(f.left, env) and go(f.right, env)
        if isinstance(f, Or):
            return go(f.left, env) or go(f.right, env)
        if isinstance(f, Imp):
            return not go(f.left, env) or go(f.right, env)
        if isinstance(f, Not):
            return not go(f.body, env)
        if isinstance(f, (BForall, BExists)):
            bound = eval_nat(f.bound, env)
            hi = bound if f.strict else bound + 1
            vals = range(hi)
            if isinstance(f, BForall):
                return all(go(f.body, {**env, f.var: v}) for v in vals)
            return any(go(f.body, {**env, f.var: v}) for v in vals)
        if isinstance(f, Exists):
            return any(go(f.body, {**env, f.var: v}) for v in range(exists_budget))
        if isinstance(f, Forall):
            raise UnsupportedFragment("unbounded universal quantifier in the positive fragment")
        raise UnsupportedFragment(f"cannot evaluate {f!r}")

    return go(phi, {})


# ---------------------------------------------------------------------------
# The bounded-truth prover


def prove_true_bounded(phi: Formula, base=BASE_ARITH, exists_budget: int = 256) -> Proof:
    """Base-theory proof of a true closed formula of the bounded fragment.

    Raises FormulaFalse (with the failing atom) on false input and
    UnsupportedFragment outside the supported shape.  The base theory must
    recognize the defining equations and the numeral order/case schemes.
    """
    if free_vars(phi):
        raise ArithProofError("prove_true_bounded needs a closed formula")
    return _prove(phi, exists_budget)


def _atom_values(f: Atom) -> tuple[int, Proof, int, Proof]:
    v1, p1 = pf_eval(f.args[0])
    v2, p2 = pf_eval(f.args[1])
    return v1, p1, v2, p2


def _prove(f: Formula, budget: int) -> Proof:
    if isinstance(f, Atom) and f.rel == "=":
        if f.args[0] == f.args[1]:
            return nd.refl(f.args[0])
        v1, p1, v2, p2 = _atom_values(f)
        if v1 != v2:
            raise FormulaFalse(f)
        return eq_trans(p1, eq_symm(p2))
    if isinstance(f, Atom) and f.rel == "le":
        v1, p1, v2, p2 = _atom_values(f)
        if v1 > v2:
            raise FormulaFalse(f)
        fact = nd.axiom(order_fact(v1, v2))
        z = _fresh_for(f.args[0], f.args[1])
        step1 = transport(le(Var(z), numeral(v2)), z, eq_symm(p1), fact)
        return transport(le(f.args[0], Var(z)), z, eq_symm(p2), step1)
    if isinstance(f, Atom):
        raise UnsupportedFragment(f"relation {f.rel!r} outside the supported fragment")
    if isinstance(f, Bot):
        raise FormulaFalse(f)
    if isinstance(f, And):
        return nd.and_i(_prove(f.left, budget), _prove(f.right, budget))
    if isinstance(f, Or):
        try:
            return nd.or_i1(_prove(f.left, budget), f.right)
        except FormulaFalse:
            return nd.or_i2(f.left, _prove(f.right, budget))
    if isinstance(f, Imp):
        lab = next_label()
        try:
            return nd.imp_i(lab, f.left, _prove(f.right, budget))
        except (FormulaFalse, UnsupportedFragment) as first:
            try:
                neg = _refute(f.left, budget)
            except FormulaFalse:
                raise first
            boom = nd.not_e(nd.assume(f.left, lab), neg)
            return nd.imp_i(lab, f.left, nd.bot_e(f.right, boom))
    if isinstance(f, Not):
        return _refute(f.body, budget)
    if isinstance(f, Exists):
        for w in range(budget):
            inst = substitute(f.body, f.var, numeral(w))
            if eval_closed(inst, budget):
                return nd.exists_i(f, numeral(w), _prove(inst, budget))
        raise FormulaFalse(f)
    if isinstance(f, BExists):
        bound, pb = pf_eval(f.bound)
        hi = bound if f.strict else bound + 1
        for w in range(hi):
            inst = substitute(f.body, f.var, numeral(w))
            if eval_closed(inst, budget):
                g = _guard_proof(numeral(w), w, f.bound, bound, pb, f.strict)
                return nd.bex_i(f, numeral(w), g, _prove(inst, budget))
        raise FormulaFalse(f)
    if isinstance(f, BForall):
        bound, pb = pf_eval(f.bound)
        hi = bound if f.strict else bound + 1
        branches = [_prove(substitute(f.body, f.var, numeral(k)), budget) for k in range(hi)]
        return _assemble_bforall(f, bound, pb, branches)
    if isinstance(f, Forall):
        raise UnsupportedFragment("unbounded universal quantifier in the positive fragment")
    raise UnsupportedFragment(f"cannot prove {f!r}")


def _guard_proof(w_term: Term, w: int, bound_term: Term, bound: int, pb: Proof, strict: bool) -> Proof:
    """Proof of the bound guard w < t or w <= t for the original bound term t."""
    z = _fresh_for(w_term, bound_term)
    if strict:
        fact_le = nd.axiom(order_fact(w, bound))
        fact_ne = nd.axiom(distinctness_fact(w, bound))
        at_val = nd.and_i(fact_le, fact_ne)
        template = And(le(w_term, Var(z)), Not(eq(w_term, Var(z))))
        return transport(template, z, eq_symm(pb), at_val)
    fact = nd.axiom(order_fact(w, bound))
    return transport(le(w_term, Var(z)), z, eq_symm(pb), fact)


def _split_below(var: int, bound: int, strict: bool, guard_norm: Proof, conclusion: Formula, branch) -> Proof:
    """Descent-style case analysis over the values below a numeral bound.

    guard_norm proves the guard at the numeral bound; branch(k, eq_proof) must
    close the case x = numeral(k) with a proof of the conclusion.  The cited
    descent axioms are each only as big as the numerals involved.
    """
    x = Var(var)
    if strict:
        le_pf0 = nd.and_e1(guard_norm)
        ne = nd.and_e2(guard_norm)
    else:
        le_pf0 = guard_norm
        ne = None

    def eq_branch(k: int, eqpf: Proof) -> Proof:
        if strict and k == bound:
            return nd.bot_e(conclusion, nd.not_e(eqpf, ne))
        return branch(k, eqpf)

    def go(k: int, le_pf: Proof) -> Proof:
        inst = nd.imp_e(nd.forall_e(x, nd.axiom(descent_axiom(k))), le_pf)
        if k == 0:
            return eq_branch(0, inst)
        l1, l2 = next_label(), next_label()
        left = go(k - 1, nd.assume(le(x, numeral(k - 1)), l1))
        right = eq_branch(k, nd.assume(eq(x, numeral(k)), l2))
        return nd.or_e(inst, l1, left, l2, right)

    return go(bound, le_pf0)


def _assemble_bforall(f: BForall, bound: int, pb: Proof, branches: list[Proof]) -> Proof:
    """Case expansion: from proofs of body[k] for all k below the bound."""
    var = f.var
    lab = next_label()
    guard = nd.guard_formula(Var(var), f.bound, f.strict)
    g_orig = nd.assume(guard, lab)
    # move the guard to the evaluated numeral bound
    z = _fresh_for(Var(var), f.bound)
    if f.strict:
        template = And(le(Var(var), Var(z)), Not(eq(Var(var), Var(z))))
    else:
        template = le(Var(var), Var(z))
    g_norm = transport(template, z, pb, g_orig)

    def branch(k: int, eqpf: Proof) -> Proof:
        flipped = eq_symm(eqpf)  # numeral(k) = var
        return transport(f.body, var, flipped, branches[k])

    body_proof = _split_below(var, bound, f.strict, g_norm, f.body, branch)
    return nd.ball_i(var, f.bound, f.strict, lab, body_proof)


def _refute(f: Formula, budget: int) -> Proof:
    """Proof of Not(f) for a false closed formula of the fragment."""
    if isinstance(f, Atom) and f.rel == "=":
        v1, p1, v2, p2 = _atom_values(f)
        if v1 == v2:
            raise FormulaFalse(Not(f))
        lab = next_label()
        asm = nd.assume(f, lab)
        chain = eq_chain(eq_symm(p1), asm, p2)  # num(v1) = num(v2)
        boom = nd.not_e(chain, nd.axiom(distinctness_fact(v1, v2)))
        return nd.not_i(lab, f, boom)
    if isinstance(f, Atom) and f.rel == "le":
        v1, p1, v2, p2 = _atom_values(f)
        if v1 <= v2:
            raise FormulaFalse(Not(f))
        lab = next_label()
        asm = nd.assume(f, lab)
        z = _fresh_for(f.args[0], f.args[1])
        s1 = transport(le(Var(z), f.args[1]), z, p1, asm)
        s2 = transport(le(numeral(v1), Var(z)), z, p2, s1)
        boom = nd.not_e(s2, nd.axiom(order_fact(v1, v2)))
        return nd.not_i(lab, f, boom)
    if isinstance(f, Atom):
        raise UnsupportedFragment(f"relation {f.rel!r} outside the supported fragment")
    if isinstance(f, Bot):
        lab = next_label()
        return nd.not_i(lab, f, nd.assume(f, lab))
    if isinstance(f, Not):
        inner = _prove(f.body, budget)
        lab = next_label()
        return nd.not_i(lab, f, nd.not_e(inner, nd.assume(f, lab)))
    if isinstance(f, And):
        lab = next_label()
        asm = nd.assume(f, lab)
        try:
            neg = _refute(f.left, budget)
            boom = nd.not_e(nd.and_e1(asm), neg)
        except FormulaFalse:
            neg = _refute(f.right, budget)
            boom = nd.not_e(nd.and_e2(asm), neg)
        return nd.not_i(lab, f, boom)
    if isinstance(f, Or):
        lab, l1, l2 = next_label(), next_label(), next_label()
        asm = nd.assume(f, lab)
        b1 = nd.not_e(nd.assume(f.left, l1), _refute(f.left, budget))
        b2 = nd.not_e(nd.assume(f.right, l2), _refute(f.right, budget))
        return nd.not_i(lab, f, nd.or_e(asm, l1, b1, l2, b2))
    if isinstance(f, Imp):
        lab = next_label()
        asm = nd.assume(f, lab)
        got = nd.imp_e(asm, _prove(f.left, budget))
        boom = nd.not_e(got, _refute(f.right, budget))
        return nd.not_i(lab, f, boom)
    if isinstance(f, Forall):
        for w in range(budget):
            inst = substitute(f.body, f.var, numeral(w))
            if not eval_closed(inst, budget):
                lab = next_label()
                asm = nd.assume(f, lab)
                got = nd.forall_e(numeral(w), asm)
                boom = nd.not_e(got, _refute(inst, budget))
                return nd.not_i(lab, f, boom)
        raise FormulaFalse(Not(f))
    if isinstance(f, BForall):
        bound, pb = pf_eval(f.bound)
        hi = bound if f.strict else bound + 1
        for w in range(hi):
            inst = substitute(f.body, f.var, numeral(w))
            if not eval_closed(inst, budget):
                lab = next_label()
                asm = nd.assume(f, lab)
                g = _guard_proof(numeral(w), w, f.bound, bound, pb, f.strict)
                got = nd.ball_e(numeral(w), asm, g)
                boom = nd.not_e(got, _refute(inst, budget))
                return nd.not_i(lab, f, boom)
        raise FormulaFalse(Not(f))
    if isinstance(f, BExists):
        bound, pb = pf_eval(f.bound)
        lab = next_label()
        asm = nd.assume(f, lab)
        eigen = _fresh_for(f, f.bound)
        l2 = next_label()
        inst_asm = And(
            nd.guard_formula(Var(eigen), f.bound, f.strict),
            substitute(f.body, f.var, Var(eigen)),
        )
        A = nd.assume(inst_asm, l2)
        g = nd.and_e1(A)
        body = nd.and_e2(A)
        z = _fresh_for(Var(eigen), f.bound)
        if f.strict:
            template = And(le(Var(eigen), Var(z)), Not(eq(Var(eigen), Var(z))))
        else:
            template = le(Var(eigen), Var(z))
        g_norm = transport(template, z, pb, g)

        def branch(k: int, case_asm: Proof) -> Proof:
            inst_k = substitute(f.body, f.var, numeral(k))
            moved = transport(f.body, f.var, case_asm, body)
            return nd.not_e(moved, _refute(inst_k, budget))

        inner = _split_below(eigen, bound, f.strict, g_norm, S.BOT, branch)
        closed = nd.bex_e(eigen, l2, asm, inner)
        return nd.not_i(lab, f, closed)
    if isinstance(f, Exists):
        raise UnsupportedFragment("cannot finitely refute an unbounded existential")
    raise UnsupportedFragment(f"cannot refute {f!r}")
