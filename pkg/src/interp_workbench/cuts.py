"""Definable cuts: obligations, Solovay shortening, membership and term-closure
proofs, the Pudlak Goodsequence/H/J construction, and the Feferman transform.

Variable conventions for the Pudlak artifacts: Goodsequence has the sequence
in x2, the length argument in x0 and the endpoint in x1; H has (x, y) = (x0,
x1); J' and J have x0 free.  Sequence access goes through the host's lh/at
symbols, whose interpretation is the pluggable desk-scale coding of
models.SeqKit; the construction itself only assumes that lh and projections
exist (which sequence facts are assumed is documented in the README).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import nd
from . import syntax as S
from .arith import ONE, ax_instance, eq_cong, eq_chain, eq_symm, transport
from .coding import code_formula, numeral
from .interpret import Translation, translate_formula
from .nd import Proof, next_label
from .refute import Budget, Exhausted, search_refutation
from .syntax import (
    And,
    App,
    Atom,
    BExists,
    BForall,
    Exists,
    Forall,
    Formula,
    Imp,
    Term,
    Var,
    eq,
    le,
    free_vars,
    substitute,
)
from .theory import TheorySpec


class CutError(Exception):
    pass


_SS0 = S.succ(S.succ(S.zero()))


def _only_free_var(J: Formula) -> int:
    fv = free_vars(J)
    if len(fv) != 1:
        raise CutError(f"cut formula must have exactly one free variable, got {sorted(fv)}")
    return next(iter(fv))


def _at(J: Formula, t: Term) -> Formula:
    return substitute(J, _only_free_var(J), t)


# ---------------------------------------------------------------------------
# Obligations (the four defining clauses of a definable cut)


def cut_obligations(J: Formula, U: TheorySpec) -> list[Formula]:
    """The four proof obligations: progressiveness, downward closure,
    closure under + and *, closure under omega_1 (rendered as x#x)."""
    v = _only_free_var(J)
    S.check_formula(U.signature, J)
    x, y = Var(v), Var(v + 1 if v == 0 else 0)
    w = y.index
    progress = And(_at(J, S.zero()), Forall(v, Imp(J, _at(J, S.plus(x, ONE)))))
    downward = Forall(v, Forall(w, Imp(And(J, le(y, x)), _at(J, y))))
    closure = Forall(
        v,
        Forall(
            w,
            Imp(And(J, _at(J, y)), And(_at(J, S.plus(x, y)), _at(J, S.times(x, y)))),
        ),
    )
    omega = Forall(v, Imp(J, _at(J, S.smash_t(x, x))))
    return [progress, downward, closure, omega]


@dataclass
class CutSpec:
    """A cut formula over a host theory, with optional obligation proofs.

    obligation_proofs maps clause numbers 1..4 to host proofs of the
    corresponding formula from cut_obligations.
    """

    formula: Formula
    host: TheorySpec
    obligation_proofs: dict[int, Proof] = field(default_factory=dict)

    def validate(self) -> None:
        wanted = cut_obligations(self.formula, self.host)
        for idx, p in self.obligation_proofs.items():
            nd.check_closed(p, self.host)
            if p.formula != wanted[idx - 1]:
                raise CutError(f"obligation {idx} proof concludes {p.formula!r}")

    def require(self, *clauses: int) -> None:
        missing = [c for c in clauses if c not in self.obligation_proofs]
        if missing:
            raise CutError(f"missing obligation proofs for clauses {missing}")


# ---------------------------------------------------------------------------
# Solovay shortening: the closure of an initial segment under +, * and omega_1


def close_cut(J0: Formula) -> Formula:
    """The standard shortening template: downward-close, then force closure
    under +, then *, then the smash-with-self stage that yields omega_1."""
    v = _only_free_var(J0)
    if v != 0:
        J0 = substitute(J0, v, Var(0))
    x, y = Var(0), Var(1)
    J1 = BForall(1, x, False, substitute(J0, 0, y))
    J2 = And(J1, Forall(1, Imp(substitute(J1, 0, y), substitute(J1, 0, S.plus(y, x)))))
    J3 = And(J2, Forall(1, Imp(substitute(J2, 0, y), substitute(J2, 0, S.times(y, x)))))
    J4 = And(J3, Forall(1, Imp(substitute(J3, 0, y), substitute(J3, 0, S.smash_t(y, x)))))
    return J4


# ---------------------------------------------------------------------------
# Outside big, inside small: short membership proofs along the dyadic path


def _progress_parts(c: CutSpec) -> tuple[Proof, Proof]:
    c.require(1)
    p1 = c.obligation_proofs[1]
    return nd.and_e1(p1), nd.and_e2(p1)


def _succ_step(c: CutSpec, t: Term, pf: Proof) -> Proof:
    """From J(t) to J(S(t)) via the progressiveness clause."""
    _, prog = _progress_parts(c)
    raw = nd.imp_e(nd.forall_e(t, prog), pf)  # J(t + S(0))
    move = eq_chain(
        ax_instance("addS", t, S.zero()),
        eq_cong("S", (S.plus(t, S.zero()),), 0, ax_instance("add0", t)),
    )  # t + S(0) = S(t)
    z = S.fresh_index(free_vars(c.formula) | S.free_vars_term(t))
    return transport(_at(c.formula, Var(z)), z, move, raw)


def _two_proof(c: CutSpec) -> Proof:
    """J(S(S(0))), for the doubling steps."""
    base, _ = _progress_parts(c)
    one = _succ_step(c, S.zero(), base)
    return _succ_step(c, S.succ(S.zero()), one)


def prove_cut_membership(c: CutSpec, n: int) -> Proof:
    """A host proof of J(numeral(n)) with node count O(log n).

    Follows the dyadic recursion of the numeral: each binary digit costs one
    multiplication-closure instance (by the shared J(2) subproof) and possibly
    one progressiveness step.
    """
    c.require(1, 2, 3)
    base, _ = _progress_parts(c)
    if n == 0:
        return base  # J(0) is the numeral-0 case on the nose
    two = _two_proof(c)
    closure = c.obligation_proofs[3]
    J = c.formula

    def double(m: int, pf: Proof) -> Proof:
        inst = nd.forall_e(numeral(m), nd.forall_e(_SS0, closure))
        both = nd.imp_e(inst, nd.and_i(two, pf))
        return nd.and_e2(both)  # J(SS0 * numeral(m)) == J(numeral(2m))

    def plus_one(m: int, pf: Proof) -> Proof:
        # m is even (or zero), so S(numeral(m)) is the literal odd numeral
        stepped = _succ_step(c, numeral(m), pf)
        if m == 0:
            # move J(S(0)) to J(numeral(1)) = J(S(SS0*0))
            move = eq_cong("S", (S.zero(),), 0, eq_symm(ax_instance("mul0", _SS0)))
            z = S.fresh_index(free_vars(J))
            return transport(_at(J, Var(z)), z, move, stepped)
        return stepped

    bits = bin(n)[2:]
    m, pf = 1, plus_one(0, base)
    for b in bits[1:]:
        m, pf = 2 * m, double(m, pf)
        if b == "1":
            m, pf = m + 1, plus_one(m, pf)
    assert m == n
    return pf


# ---------------------------------------------------------------------------
# Cuts are closed under terms


SUPPORTED_TERM_SYMBOLS = ("0", "S", "+", "*", "#")


def prove_term_closure(c: CutSpec, t: Term) -> Proof:
    """Host proof that the cut contains t whenever it contains t's variables.

    Conclusion: forall over the variables of (J(x1) & ... -> J(t)); plain J(t)
    for closed t.  Structural recursion, one closure-clause instance per
    function symbol; # is supported only as x#x (the omega_1 shape).
    """
    c.require(1, 2, 3)
    J = c.formula
    fv = sorted(S.free_vars_term(t))
    assumptions: dict[int, Proof] = {}
    label = next_label()
    if fv:
        hyp = S.conj([_at(J, Var(v)) for v in fv])
        cur = nd.assume(hyp, label)
        for i, v in enumerate(fv):
            if i == len(fv) - 1:
                assumptions[v] = cur
            else:
                assumptions[v] = nd.and_e1(cur)
                cur = nd.and_e2(cur)

    def go(u: Term) -> Proof:
        if isinstance(u, Var):
            if u.index not in assumptions:
                raise CutError(f"variable x{u.index} missing from the hypothesis")
            return assumptions[u.index]
        sym = u.symbol
        if sym == "0":
            return _progress_parts(c)[0]
        if sym == "S":
            return _succ_step(c, u.args[0], go(u.args[0]))
        if sym in ("+", "*"):
            a, b = u.args
            inst = nd.forall_e(b, nd.forall_e(a, c.obligation_proofs[3]))
            both = nd.imp_e(inst, nd.and_i(go(a), go(b)))
            return nd.and_e1(both) if sym == "+" else nd.and_e2(both)
        if sym == "#":
            a, b = u.args
            if a != b:
                raise CutError("smash closure is available only in the omega_1 shape x#x")
            c.require(4)
            inst = nd.forall_e(a, c.obligation_proofs[4])
            return nd.imp_e(inst, go(a))
        raise CutError(f"unsupported function symbol {sym!r}")

    body = go(t)
    if not fv:
        return body
    out = nd.imp_i(label, S.conj([_at(J, Var(v)) for v in fv]), body)
    for v in reversed(fv):
        out = nd.forall_i(v, out)
    return out


# ---------------------------------------------------------------------------
# Pudlak's construction


@dataclass
class PudlakArtifacts:
    """Goodsequence(sigma@x2, x@x0, y@x1), H(x0,x1), J'(x0), J(x0)."""

    goodsequence: Formula
    h: Formula
    jprime: Formula
    j: Formula
    translation: Translation
    relative_to: Optional[Formula] = None


def _tr_atom(j: Translation, sym: str, args: list[Term]) -> Formula:
    body = j.relation(sym)
    return S.subst_many(body, dict(enumerate(args)))


def _delta_on(j: Translation, t: Term) -> Formula:
    return substitute(j.delta, 0, t)


def _arithmetical_target(j: Translation) -> None:
    need = ("lh", "at", "+", "*", "S", "0")
    for sym in need:
        if not j.target.has_function(sym):
            raise CutError(f"target {j.target.name} lacks the arithmetic symbol {sym!r}")


def build_pudlak(j: Translation) -> PudlakArtifacts:
    """The Goodsequence/H/J' construction, uniformly from the translation."""
    return _build_pudlak(j, relative_to=None)


def build_pudlak_relative(j: Translation, I: Formula) -> PudlakArtifacts:
    """The relativized variant: the sequence entries are confined to I^j."""
    if len(free_vars(I)) != 1:
        raise CutError("the confining cut needs exactly one free variable")
    return _build_pudlak(j, relative_to=I)


def _build_pudlak(j: Translation, relative_to: Optional[Formula]) -> PudlakArtifacts:
    _arithmetical_target(j)
    x, y, sig = Var(0), Var(1), Var(2)
    i, k, l, a = Var(3), Var(4), Var(5), Var(6)

    def at(s: Term, idx: Term) -> Term:
        return App("at", (s, idx))

    clauses = [
        # lh(sigma) = x+1
        eq(App("lh", (sig,)), S.plus(x, ONE)),
        # sigma_0 =^j 0^j, rendered relationally: zero^j(sigma_0)
        _tr_atom(j, "zero", [at(sig, S.zero())]),
        # sigma_x =^j y
        _tr_atom(j, "=", [at(sig, x), y]),
        # forall i<=x delta(sigma_i)
        BForall(i.index, x, False, _delta_on(j, at(sig, i))),
        # forall i<x sigma_{i+1} =^j sigma_i +^j 1^j, rendered via succ^j
        BForall(i.index, x, True, _tr_atom(j, "succ", [at(sig, i), at(sig, S.succ(i))])),
        # forall k+l<=x: sigma_k +^j sigma_l =^j sigma_{k+l}
        Forall(
            k.index,
            Forall(
                l.index,
                Imp(
                    le(S.plus(k, l), x),
                    _tr_atom(j, "add", [at(sig, k), at(sig, l), at(sig, S.plus(k, l))]),
                ),
            ),
        ),
        # forall k*l<=x: sigma_k *^j sigma_l =^j sigma_{k*l}; the index
        # quantifier presumes in-range indices, so k<=x and l<=x are explicit
        Forall(
            k.index,
            Forall(
                l.index,
                Imp(
                    And(le(k, x), And(le(l, x), le(S.times(k, l), x))),
                    _tr_atom(j, "mul", [at(sig, k), at(sig, l), at(sig, S.times(k, l))]),
                ),
            ),
        ),
        # forall a (delta(a) and a <=^j y -> exists i<=x sigma_i =^j a)
        Forall(
            a.index,
            Imp(
                And(_delta_on(j, a), _tr_atom(j, "le", [a, y])),
                BExists(i.index, x, False, _tr_atom(j, "=", [at(sig, i), a])),
            ),
        ),
    ]
    if relative_to is not None:
        confined = translate_formula(j, relative_to)
        v = _only_free_var(confined)
        clauses.append(BForall(i.index, x, True, substitute(confined, v, at(sig, i))))
    goodseq = S.conj(clauses)

    # H(x,y): some sequence witnesses, and all witnesses agree modulo =^j
    gs_primed = S.subst_many(goodseq, {2: Var(3), 1: Var(4)})
    uniqueness = Forall(
        3, Forall(4, Imp(gs_primed, _tr_atom(j, "=", [y, Var(4)])))
    )
    h = And(Exists(2, goodseq), uniqueness)

    jprime = BForall(1, x, False, Exists(2, S.subst_many(h, {0: Var(1), 1: Var(2)})))
    return PudlakArtifacts(
        goodsequence=goodseq,
        h=h,
        jprime=jprime,
        j=close_cut(jprime),
        translation=j,
        relative_to=relative_to,
    )


# ---------------------------------------------------------------------------
# The Feferman theory transform


def feferman_restrict(V: TheorySpec, budget: Budget = Budget()) -> TheorySpec:
    """V', accepting an axiom only when the refutation search at the axiom's
    own code bound comes back Exhausted.

    The budget is part of the returned theory's name: the consistency side is
    necessarily approximate and the approximation must stay visible.  On
    consistent desk-scale theories V' equals V up to the probed bound; that is
    a tested property, not a theorem.
    """
    cache: dict[int, bool] = {}

    def consistent_up_to(code: int) -> bool:
        if code not in cache:
            cache[code] = isinstance(search_refutation(V, code, budget), Exhausted)
        return cache[code]

    def recognize(phi: Formula) -> bool:
        return V.recognizer(phi) and consistent_up_to(code_formula(phi))

    def enumerate_below(bound: int):
        return [(c, ax) for c, ax in V.axioms_below(bound) if consistent_up_to(c)]

    axioms = None
    if V.axioms is not None:
        axioms = tuple(ax for ax in V.axioms if recognize(ax))
    name = f"{V.name}'[con@nodes={budget.max_nodes},rounds={budget.max_rounds}]"
    return TheorySpec(name, V.signature, recognize, enumerate_below, axioms)
