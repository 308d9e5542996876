"""Deterministic fixture corpus: proofs with sentence endpoints, translations,
mutation fixtures, toy theories, finite models, and the arithmetic embeddings.

Everything here is rebuilt deterministically at import time by the tests; the
corpus is the shipped ground truth the acceptance suite runs against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import models as mdl
from . import nd
from . import syntax as S
from .interpret import Translation, identity_translation
from .nd import Proof
from .syntax import (
    And,
    App,
    Atom,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Var,
    eq,
    le,
)
from .theory import TheorySpec, finite_theory

SIG_TOY = S.make_signature("toy", [("=", 2), ("P", 1), ("Q", 1), ("R", 2), ("D", 1)])
SIG_PRIMED = S.make_signature(
    "toy2", [("=", 2), ("P", 1), ("Q", 1), ("R", 2), ("D", 1), ("E", 2)]
)

TOY_LOGIC = finite_theory("toy-logic", SIG_TOY, ())

x0, x1, x2 = Var(0), Var(1), Var(2)


def P(t):
    return Atom("P", (t,))


def Q(t):
    return Atom("Q", (t,))


def R(a, b):
    return Atom("R", (a, b))


def D(t):
    return Atom("D", (t,))


# sentence building blocks used to instantiate the proof schemas
SENTENCES = {
    "allP": Forall(0, P(x0)),
    "allQ": Forall(0, Q(x0)),
    "exP": Exists(0, P(x0)),
    "exQ": Exists(0, Q(x0)),
    "PtoQ": Forall(0, Imp(P(x0), Q(x0))),
    "QtoP": Forall(0, Imp(Q(x0), P(x0))),
    "allPQ": Forall(0, And(P(x0), Q(x0))),
    "allR": Forall(0, Forall(1, R(x0, x1))),
    "exR": Exists(0, Exists(1, R(x0, x1))),
    "noP": Forall(0, Not(P(x0))),
    "exNotP": Exists(0, Not(P(x0))),
    "PorQ": Forall(0, Or(P(x0), Q(x0))),
}


# ---------------------------------------------------------------------------
# Proof schemas (all endpoints are sentences)


def _k_comb(a: Formula, b: Formula) -> Proof:
    l1, l2 = nd.next_label(), nd.next_label()
    return nd.imp_i(l1, a, nd.imp_i(l2, b, nd.assume(a, l1)))


def _identity_imp(a: Formula) -> Proof:
    l = nd.next_label()
    return nd.imp_i(l, a, nd.assume(a, l))


def _and_pair(a: Formula, b: Formula) -> Proof:
    return nd.and_i(nd.assume(a), nd.assume(b))


def _and_left(a: Formula, b: Formula) -> Proof:
    return nd.and_e1(nd.assume(And(a, b)))


def _modus(a: Formula, b: Formula) -> Proof:
    return nd.imp_e(nd.assume(Imp(a, b)), nd.assume(a))


def _chain(a: Formula, b: Formula, c: Formula) -> Proof:
    return nd.imp_e(nd.assume(Imp(b, c)), nd.imp_e(nd.assume(Imp(a, b)), nd.assume(a)))


def _all_to_ex(pred) -> Proof:
    allp = nd.assume(Forall(0, pred(x0)))
    inst = nd.forall_e(Var(7), allp)
    return nd.exists_i(Exists(0, pred(x0)), Var(7), inst)


def _all_mono() -> Proof:
    imp = nd.assume(SENTENCES["PtoQ"])
    allp = nd.assume(SENTENCES["allP"])
    v = 3
    body = nd.imp_e(nd.forall_e(Var(v), imp), nd.forall_e(Var(v), allp))
    return nd.forall_i(v, body)


def _ex_mono() -> Proof:
    exp = nd.assume(SENTENCES["exP"])
    imp = nd.assume(SENTENCES["PtoQ"])
    e, lab = 4, nd.next_label()
    body = nd.imp_e(nd.forall_e(Var(e), imp), nd.assume(P(Var(e)), lab))
    inner = nd.exists_i(SENTENCES["exQ"], Var(e), body)
    return nd.exists_e(e, lab, exp, inner)


def _all_and_split() -> Proof:
    both = nd.assume(SENTENCES["allPQ"])
    v = 2
    left = nd.forall_i(v, nd.and_e1(nd.forall_e(Var(v), both)))
    right = nd.forall_i(v, nd.and_e2(nd.forall_e(Var(v), both)))
    return nd.and_i(left, right)


def _double_neg_intro(a: Formula) -> Proof:
    l = nd.next_label()
    return nd.not_i(l, Not(a), nd.not_e(nd.assume(a), nd.assume(Not(a), l)))


def _double_neg_elim(a: Formula) -> Proof:
    l = nd.next_label()
    clash = nd.not_e(nd.assume(Not(a), l), nd.assume(Not(Not(a))))
    return nd.raa(l, a, clash)


def _disj_syllogism(a: Formula, b: Formula) -> Proof:
    l1, l2 = nd.next_label(), nd.next_label()
    left = nd.bot_e(b, nd.not_e(nd.assume(a, l1), nd.assume(Not(a))))
    return nd.or_e(nd.assume(Or(a, b)), l1, left, l2, nd.assume(b, l2))


def _exists_selfeq() -> Proof:
    r = nd.refl(Var(5))
    return nd.exists_i(Exists(0, eq(x0, x0)), Var(5), r)


def _swap_all() -> Proof:
    allr = nd.assume(SENTENCES["allR"])
    a, b = 3, 4
    inner = nd.forall_e(Var(b), nd.forall_e(Var(a), allr))
    return nd.forall_i(b, nd.forall_i(a, inner))


def _swap_ex() -> Proof:
    exr = nd.assume(SENTENCES["exR"])
    a, la = 5, nd.next_label()
    b, lb = 6, nd.next_label()
    target = Exists(0, Exists(1, R(x1, x0)))
    # from R(a,b): exists_i over the target's inner variable, then the outer
    inner_target = S.substitute(target.body, target.var, Var(b))
    step1 = nd.exists_i(inner_target, Var(a), nd.assume(R(Var(a), Var(b)), lb))
    step2 = nd.exists_i(target, Var(b), step1)
    use_b = nd.exists_e(b, lb, nd.assume(S.substitute(exr.formula.body, 0, Var(a)), la), step2)
    return nd.exists_e(a, la, exr, use_b)


def _neg_exists_to_all() -> Proof:
    noex = nd.assume(Not(SENTENCES["exP"]))
    v, l = 3, nd.next_label()
    witness = nd.exists_i(SENTENCES["exP"], Var(v), nd.assume(P(Var(v)), l))
    inner = nd.not_i(l, P(Var(v)), nd.not_e(witness, noex))
    return nd.forall_i(v, inner)


def _clash_to_bot() -> Proof:
    exp = nd.assume(SENTENCES["exP"])
    nop = nd.assume(SENTENCES["noP"])
    e, l = 4, nd.next_label()
    inner = nd.not_e(nd.assume(P(Var(e)), l), nd.forall_e(Var(e), nop))
    return nd.exists_e(e, l, exp, inner)


def _or_weaken(a: Formula, b: Formula) -> Proof:
    return nd.or_i1(nd.assume(a), b)


def _case_same(a: Formula, b: Formula) -> Proof:
    l1, l2 = nd.next_label(), nd.next_label()
    ab = nd.assume(Or(a, a))
    return nd.or_e(ab, l1, nd.assume(a, l1), l2, nd.assume(a, l2))


def _imp_trans_closed(a: Formula, b: Formula, c: Formula) -> Proof:
    l = nd.next_label()
    inner = nd.imp_e(nd.assume(Imp(b, c)), nd.imp_e(nd.assume(Imp(a, b)), nd.assume(a, l)))
    return nd.imp_i(l, a, inner)


def build_proof_corpus() -> list[Proof]:
    """At least fifty checked proofs with sentence endpoints over SIG_TOY."""
    s = SENTENCES
    proofs: list[Proof] = []
    pairs = [
        (s["allP"], s["exQ"]),
        (s["exP"], s["allQ"]),
        (s["PtoQ"], s["allR"]),
        (s["noP"], s["exR"]),
        (s["PorQ"], s["allPQ"]),
    ]
    for a, b in pairs:
        proofs.append(_and_pair(a, b))
        proofs.append(_and_left(a, b))
        proofs.append(_k_comb(a, b))
        proofs.append(_modus(a, b))
        proofs.append(_or_weaken(a, b))
        proofs.append(_case_same(a, b))
        proofs.append(_double_neg_intro(a))
        proofs.append(_double_neg_elim(a))
        proofs.append(_disj_syllogism(a, b))
    for a in (s["allP"], s["exQ"], s["PorQ"]):
        proofs.append(_identity_imp(a))
    for a, b, c in [
        (s["allP"], s["exQ"], s["exP"]),
        (s["PtoQ"], s["allR"], s["noP"]),
    ]:
        proofs.append(_chain(a, b, c))
        proofs.append(_imp_trans_closed(a, b, c))
    proofs.append(_all_to_ex(P))
    proofs.append(_all_to_ex(Q))
    proofs.append(_all_to_ex(D))
    proofs.append(_all_mono())
    proofs.append(_ex_mono())
    proofs.append(_all_and_split())
    proofs.append(_exists_selfeq())
    proofs.append(_swap_all())
    proofs.append(_swap_ex())
    proofs.append(_neg_exists_to_all())
    proofs.append(_clash_to_bot())
    proofs.append(nd.assume(s["allP"]))
    for p in proofs:
        nd.check_proof(p, TOY_LOGIC)
    return proofs


# ---------------------------------------------------------------------------
# Mutation fixtures: structurally well-formed nodes the checker must reject


def build_mutations(proofs: list[Proof]) -> list[Proof]:
    """Corrupted variants of corpus proofs; every one fails check_proof."""
    bad: list[Proof] = []

    def nodes_of(p: Proof) -> list[Proof]:
        return list(nd.iter_nodes(p))

    wrong = Atom("P", (Var(9),))
    for p in proofs:
        for node in nodes_of(p):
            # swap the conclusion for something unrelated
            bad.append(_rebuild_with(p, node, Proof(node.rule, wrong, node.premises, node.params)))
            if len(node.premises) == 2:
                bad.append(
                    _rebuild_with(
                        p,
                        node,
                        Proof(node.rule, node.formula, node.premises[::-1], node.params),
                    )
                )
            if node.rule in ("imp_i", "not_i", "raa"):
                l, phi = node.params
                bad.append(
                    _rebuild_with(p, node, Proof(node.rule, node.formula, node.premises, (l, wrong)))
                )
            if node.rule == "axiom":
                bad.append(
                    _rebuild_with(p, node, Proof(node.rule, node.formula, node.premises, (node.params[0] + 1,)))
                )
    out = []
    for cand in bad:
        try:
            nd.check_proof(cand, TOY_LOGIC)
        except nd.ProofError:
            out.append(cand)
    return out


def _rebuild_with(root: Proof, target: Proof, replacement: Proof) -> Proof:
    def go(node: Proof) -> Proof:
        if node is target:
            return replacement
        if not node.premises:
            return node
        prem = tuple(go(q) for q in node.premises)
        if all(a is b for a, b in zip(prem, node.premises)):
            return node
        return Proof(node.rule, node.formula, prem, node.params)

    return go(root)


# ---------------------------------------------------------------------------
# Translations


def build_translations() -> list[Translation]:
    ident = Atom("=", (x0, x1))
    base_rels = {
        "=": ident,
        "P": P(x0),
        "Q": Q(x0),
        "R": R(x0, x1),
        "D": D(x0),
    }

    def mk(name, delta, source=SIG_TOY, target=SIG_TOY, **overrides):
        rels = dict(base_rels)
        rels.update(overrides)
        return Translation(name, source, target, delta, tuple(rels.items()))

    ts = [
        identity_translation(SIG_TOY),
        mk("relativize-D", D(x0)),
        mk("relativize-P", P(x0)),
        mk("swap-PQ", eq(x0, x0), P=Q(x0), Q=P(x0)),
        mk("flip-R", eq(x0, x0), R=R(x1, x0)),
        mk("negate-P", eq(x0, x0), P=Not(Q(x0))),
        mk("conj-D", D(x0), P=And(P(x0), D(x0))),
        mk("into-primed", eq(x0, x0), source=SIG_TOY, target=SIG_PRIMED, P=Exists(1, Atom("E", (x0, x1)))),
        mk("relativize-Q-flip", Q(x0), R=R(x1, x0)),
        mk("guarded-E", Exists(1, Atom("E", (x0, x1))), source=SIG_TOY, target=SIG_PRIMED),
    ]
    from .interpret import compose

    ts.append(compose(ts[3], ts[1], name="swap-after-relativize"))
    return ts


# ---------------------------------------------------------------------------
# Arithmetic embeddings (the Pudlak fixtures)


def std_embedding() -> Translation:
    return Translation(
        "std-embed",
        S.REL_ARITH,
        S.ARITH,
        delta=eq(x0, x0),
        rels=(
            ("=", eq(x0, x1)),
            ("zero", eq(x0, App("0", ()))),
            ("succ", eq(x1, App("S", (x0,)))),
            ("add", eq(x2, S.plus(x0, x1))),
            ("mul", eq(x2, S.times(x0, x1))),
            ("le", le(x0, x1)),
        ),
    )


def doubling_embedding() -> Translation:
    """Numbers represented by the even elements: r(n) = 2n."""
    ss0 = S.succ(S.succ(S.zero()))
    return Translation(
        "double-embed",
        S.REL_ARITH,
        S.ARITH,
        delta=S.BExists(1, x0, False, eq(S.plus(x1, x1), x0)),
        rels=(
            ("=", eq(x0, x1)),
            ("zero", eq(x0, App("0", ()))),
            ("succ", eq(x1, S.plus(x0, ss0))),
            ("add", eq(x2, S.plus(x0, x1))),
            ("mul", eq(S.times(x0, x1), S.plus(x2, x2))),
            ("le", le(x0, x1)),
        ),
    )


# ---------------------------------------------------------------------------
# Finite models and theories for the semantic fixtures


def toy_models() -> list[mdl.Structure]:
    def build(name, n, p, q, r, d):
        dom = tuple(range(n))
        return mdl.Structure(
            name,
            SIG_TOY,
            dom,
            {
                "=": mdl.identity_diagonal(dom),
                "P": frozenset((e,) for e in p),
                "Q": frozenset((e,) for e in q),
                "R": frozenset(r),
                "D": frozenset((e,) for e in d),
            },
        )

    m1 = build("chain3", 3, [0, 1], [1, 2], [(0, 1), (1, 2), (0, 2)], [0, 1, 2])
    m2 = build("loop4", 4, [0, 2], [1, 3], [(0, 1), (1, 2), (2, 3), (3, 0)], [0, 1])
    m3 = build("point1", 1, [0], [], [], [0])
    m4 = build("split5", 5, [0, 1, 2], [3, 4], [(0, 3), (1, 4), (2, 3)], [0, 2, 4])
    dom = tuple(range(3))
    m5 = mdl.Structure(
        "primed3",
        SIG_PRIMED,
        dom,
        {
            "=": mdl.identity_diagonal(dom),
            "P": frozenset({(0,)}),
            "Q": frozenset({(1,)}),
            "R": frozenset({(0, 1), (1, 2)}),
            "D": frozenset({(0,), (1,)}),
            "E": frozenset({(0, 0), (1, 2)}),
        },
    )
    return [m1, m2, m3, m4, m5]


def duality_sentences(max_depth: int = 3) -> list[Formula]:
    """Quantified sentences over SIG_TOY up to the given quantifier depth."""
    out = [
        Forall(0, P(x0)),
        Exists(0, And(P(x0), Q(x0))),
        Forall(0, Imp(D(x0), P(x0))),
        Exists(0, Not(P(x0))),
        Forall(0, Or(P(x0), Not(P(x0)))),
        Forall(0, Forall(1, Imp(R(x0, x1), Not(R(x1, x0))))),
        Exists(0, Exists(1, And(R(x0, x1), Not(eq(x0, x1))))),
        Forall(0, Exists(1, Or(R(x0, x1), R(x1, x0)))),
        Exists(0, Forall(1, Imp(R(x0, x1), Q(x1)))),
        Forall(0, Forall(1, Forall(2, Imp(And(R(x0, x1), R(x1, x2)), R(x0, x2))))),
        Exists(0, Exists(1, Exists(2, And(R(x0, x1), R(x1, x2))))),
        Forall(0, Exists(1, Forall(2, Imp(R(x0, x2), Or(R(x1, x2), eq(x1, x2)))))),
        Not(Exists(0, And(P(x0), Not(P(x0))))),
        Imp(Forall(0, P(x0)), Exists(0, P(x0))),
        Forall(0, Imp(P(x0), Exists(1, R(x0, x1)))),
    ]
    return [f for f in out if _qdepth(f) <= max_depth]


def _qdepth(f: Formula) -> int:
    if isinstance(f, (Atom, S.Bot)):
        return 0
    if isinstance(f, (And, Or, Imp)):
        return max(_qdepth(f.left), _qdepth(f.right))
    if isinstance(f, Not):
        return _qdepth(f.body)
    return 1 + _qdepth(f.body)


def henkin_fixtures() -> tuple[list[TheorySpec], list[TheorySpec]]:
    """Five consistent theories with tiny models, two inconsistent ones."""
    sigP = S.make_signature("hP", [("=", 2), ("P", 1)])
    sigPQ = S.make_signature("hPQ", [("=", 2), ("P", 1), ("Q", 1)])
    sigR = S.make_signature("hR", [("=", 2), ("R", 2)])
    consistent = [
        finite_theory("f-exP", sigP, [Exists(0, P(x0))]),
        finite_theory("f-exP-allPQ", sigPQ, [Exists(0, P(x0)), Forall(0, Or(P(x0), Q(x0)))]),
        finite_theory("f-allP-exQ", sigPQ, [Forall(0, P(x0)), Exists(0, Q(x0))]),
        finite_theory("f-exNotP", sigP, [Exists(0, Not(P(x0)))]),
        finite_theory("f-exR", sigR, [Exists(0, Exists(1, Atom("R", (x0, x1))))]),
    ]
    inconsistent = [
        finite_theory("f-clash", sigP, [Forall(0, P(x0)), Exists(0, Not(P(x0)))]),
        finite_theory("f-irrefl", sigP, [Forall(0, Not(eq(x0, x0)))]),
    ]
    return consistent, inconsistent


def refutation_fixture() -> TheorySpec:
    """The {P, not P} theory, rendered with closed sentences."""
    sigP = S.make_signature("hP", [("=", 2), ("P", 1)])
    a = Forall(0, P(x0))
    return finite_theory("p-and-not-p", sigP, [a, Not(a)])


def consistent_fixture() -> TheorySpec:
    sigP = S.make_signature("hP", [("=", 2), ("P", 1)])
    return finite_theory("just-p", sigP, [Forall(0, P(x0))])
