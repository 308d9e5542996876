import pytest

from interp_workbench import corpus, interpret, models, nd
from interp_workbench import syntax as S
from interp_workbench.corpus import SIG_TOY, TOY_LOGIC
from interp_workbench.interpret import (
    InterpretError,
    Translation,
    compose,
    identity_translation,
    normalize_identity,
    size_bound,
    translate_closure,
    translate_formula,
    translate_proof,
    translate_proof_record,
    verify_certificate,
)
from interp_workbench.syntax import And, Atom, BForall, Exists, Forall, Imp, Not, Var, eq, rho
from interp_workbench.theory import finite_theory, pure_logic

x, y = Var(0), Var(1)


def P(t):
    return Atom("P", (t,))


def D(t):
    return Atom("D", (t,))


@pytest.fixture(scope="module")
def rel_d(translations):
    return next(t for t in translations if t.name == "relativize-D")


# --- formula translation -------------------------------------------------------


def test_quantifier_clause(rel_d):
    phi = Forall(0, P(x))
    assert translate_formula(rel_d, phi) == Forall(0, Imp(D(x), P(x)))


def test_bot_fixed_point(translations):
    for k in translations:
        assert translate_formula(k, S.BOT) == S.BOT
        assert translate_closure(k, S.BOT) == S.BOT


def test_atoms_via_map(translations):
    swap = next(t for t in translations if t.name == "swap-PQ")
    assert translate_formula(swap, P(x)) == Atom("Q", (x,))


def test_closure_sentences_unchanged(rel_d, proofs):
    for p in proofs[:10]:
        f = p.formula
        if not S.free_vars(f):
            assert translate_closure(rel_d, f) == translate_formula(rel_d, f)


def test_closure_one_free_variable(rel_d):
    out = translate_closure(rel_d, P(x))
    assert out == Imp(D(x), P(x))


def test_closure_order_smaller_first(rel_d):
    out = translate_closure(rel_d, Atom("R", (x, y)))
    assert out == Imp(And(D(x), D(y)), Atom("R", (x, y)))


def test_free_variables_preserved(translations):
    phi = Exists(1, Atom("R", (x, y)))
    for k in translations:
        if k.source == SIG_TOY:
            assert S.free_vars(translate_formula(k, phi)) == S.free_vars(phi)


def test_translation_commutes_with_variable_substitution(translations):
    phi = Exists(1, Atom("R", (x, Var(1))))
    for k in translations:
        if k.source != SIG_TOY:
            continue
        lhs = translate_formula(k, S.substitute(phi, 0, Var(5)))
        rhs = S.substitute(translate_formula(k, phi), 0, Var(5))
        assert lhs == rhs


def test_identity_translation_semantics(toy_models):
    kid = identity_translation(SIG_TOY)
    for M in toy_models:
        if M.signature != SIG_TOY:
            continue
        for phi in corpus.duality_sentences():
            tr = translate_formula(kid, phi)
            assert models.evaluate(M, tr, {}) == models.evaluate(M, phi, {})


def test_unmapped_symbol_errors():
    sig_small = S.make_signature("s", [("=", 2), ("P", 1)])
    k = identity_translation(sig_small)
    with pytest.raises(InterpretError):
        translate_formula(k, Atom("R", (x, y)))


# --- proof translation -----------------------------------------------------------


def test_lemma_suite(proofs, translations):
    """Every corpus proof, under every toy translation: the output re-checks,
    concludes the translated closure, and keeps exactly the translated
    assumptions (plus the nonemptiness support where orphans were killed)."""
    count = 0
    for k in translations:
        if k.source != SIG_TOY:
            continue
        T = pure_logic(k.target)
        for p in proofs:
            rec = translate_proof_record(k, p)
            assert nd.check_proof(rec.proof, T) == translate_closure(k, p.formula)
            got = set(nd.open_assumptions(rec.proof).values())
            want = {translate_closure(k, g) for g in nd.open_assumptions(p).values()}
            if rec.support_label is not None:
                want.add(rec.support_sentence)
            assert got == want
            count += 1
    assert count >= 500


def test_one_node_assumption_translates_to_one_node(rel_d):
    phi = corpus.SENTENCES["allP"]
    rec = translate_proof_record(rel_d, nd.assume(phi))
    assert rec.proof.rule == "assume"
    assert rec.proof.formula == translate_formula(rel_d, phi)


def test_open_endpoints_rejected(rel_d):
    open_proof = nd.assume(P(x))
    with pytest.raises(InterpretError):
        translate_proof_record(rel_d, open_proof)


def test_support_grafting(rel_d):
    # |- exists y (y = y) needs domain nonemptiness under relativization
    pr = nd.exists_i(Exists(0, eq(x, x)), Var(3), nd.refl(Var(3)))
    rec = translate_proof_record(rel_d, pr)
    assert rec.support_label is not None
    host_sig = rel_d.target
    T = finite_theory("host", host_sig, [rec.support_sentence])
    support = nd.axiom(rec.support_sentence)
    full = translate_proof(rel_d, pr, support)
    assert not nd.open_assumptions(full)
    nd.check_proof(full, T)


def test_equality_rules_require_identity_preservation():
    bad = Translation(
        "collapse",
        S.make_signature("s", [("=", 2), ("P", 1)]),
        SIG_TOY,
        delta=eq(x, x),
        rels=(("=", Atom("R", (x, y))), ("P", P(x))),
    )
    pr = nd.exists_i(Exists(0, eq(x, x)), Var(3), nd.refl(Var(3)))
    with pytest.raises(InterpretError):
        translate_proof_record(bad, pr)


def test_axiom_leaves_become_assumptions(rel_d):
    T = finite_theory("ax", SIG_TOY, [corpus.SENTENCES["allP"]])
    p = nd.axiom(corpus.SENTENCES["allP"])
    rec = translate_proof_record(rel_d, p)
    assert len(rec.axiom_assumptions) == 1
    label, code, src, translated = rec.axiom_assumptions[0]
    assert src == corpus.SENTENCES["allP"]
    assert translated == translate_formula(rel_d, src)


# --- size bound ------------------------------------------------------------------


def test_size_bound_dominates_translated_measures(proofs, translations):
    from interp_workbench.coding import code_formula

    for k in translations:
        if k.source != SIG_TOY:
            continue
        for p in proofs:
            n = max(
                [rho(nde.formula) for nde in nd.iter_nodes(p)]
                + [nde.params[0] for nde in nd.iter_nodes(p) if nde.rule == "axiom"]
            )
            rec = translate_proof_record(k, p)
            bound = size_bound(n, k)
            assert bound >= n
            for nde in nd.iter_nodes(rec.proof):
                assert rho(nde.formula) <= bound
                if nde.rule == "axiom":
                    assert nde.params[0] <= bound


def test_size_bound_monotone(translations):
    for k in translations[:4]:
        values = [size_bound(n, k) for n in range(6)]
        assert values == sorted(values)
        assert size_bound(3, k, c0=4) <= size_bound(3, k, c0=8)


# --- composition -------------------------------------------------------------------


def test_compose_atom_unfolds(translations):
    ka = next(t for t in translations if t.name == "swap-PQ")
    kb = next(t for t in translations if t.name == "relativize-D")
    kc = compose(kb, ka)
    assert kc.relation("P") == translate_formula(kb, ka.relation("P"))


def test_compose_identity_behaves_like_k(toy_models, translations):
    kid = identity_translation(SIG_TOY)
    for k in translations:
        if k.source != SIG_TOY or k.target != SIG_TOY:
            continue
        kc = compose(kid, k)
        for M in toy_models:
            if M.signature != SIG_TOY:
                continue
            for phi in corpus.duality_sentences()[:8]:
                assert models.evaluate(M, translate_formula(kc, phi), {}) == models.evaluate(
                    M, translate_formula(k, phi), {}
                )


def test_compose_associative_on_models(toy_models, translations):
    k1 = next(t for t in translations if t.name == "swap-PQ")
    k2 = next(t for t in translations if t.name == "flip-R")
    k3 = next(t for t in translations if t.name == "relativize-D")
    left = compose(compose(k3, k2), k1)
    right = compose(k3, compose(k2, k1))
    for M in toy_models:
        if M.signature != SIG_TOY:
            continue
        for phi in corpus.duality_sentences()[:8]:
            assert models.evaluate(M, translate_formula(left, phi), {}) == models.evaluate(
                M, translate_formula(right, phi), {}
            )


def test_compose_signature_mismatch():
    kid_small = identity_translation(S.make_signature("s", [("=", 2), ("P", 1)]))
    kid_toy = identity_translation(SIG_TOY)
    with pytest.raises(InterpretError):
        compose(kid_small, kid_toy)


def test_compose_then_translate_matches_two_step(toy_models, translations):
    k1 = next(t for t in translations if t.name == "negate-P")
    k2 = next(t for t in translations if t.name == "relativize-D")
    kc = compose(k2, k1)
    for M in toy_models:
        if M.signature != SIG_TOY:
            continue
        for phi in corpus.duality_sentences()[:8]:
            two_step = translate_formula(k2, translate_formula(k1, phi))
            assert models.evaluate(M, translate_formula(kc, phi), {}) == models.evaluate(
                M, two_step, {}
            )


# --- identity normalization ---------------------------------------------------------


def _collapsing_translation():
    """=^j identifies elements with equal P-status on a 4-element model."""
    src = S.make_signature("src", [("=", 2), ("P", 1)])
    tgt = S.ARITH
    jeq = S.Or(
        And(S.BExists(2, x, False, eq(S.plus(Var(2), Var(2)), x)),
            S.BExists(2, y, False, eq(S.plus(Var(2), Var(2)), y))),
        And(Not(S.BExists(2, x, False, eq(S.plus(Var(2), Var(2)), x))),
            Not(S.BExists(2, y, False, eq(S.plus(Var(2), Var(2)), y)))),
    )  # same parity
    return Translation(
        "parity",
        src,
        tgt,
        delta=eq(x, x),
        rels=(("=", jeq), ("P", S.BExists(1, x, False, eq(S.plus(Var(1), Var(1)), x)))),
    )


def test_normalize_identity_least_representatives():
    j = _collapsing_translation()
    j2 = normalize_identity(j)
    assert j2.maps_identity_to_identity()
    M = models.arith_prefix_model(4)
    sat = [e for e in M.domain if models.evaluate(M, j2.delta, {0: e})]
    # one representative per parity class, the least of each
    assert sat == [0, 1]
    N1 = models.internal_model(M, j)
    N2 = models.internal_model(M, j2)
    assert models.canonical_form(N1) == models.canonical_form(N2)


def test_normalize_identity_on_identity_preserving(toy_models):
    # narrows to least representatives but keeps the model the same
    src = S.REL_ARITH
    from interp_workbench.corpus import std_embedding

    j = std_embedding()
    j2 = normalize_identity(j)
    M = models.arith_prefix_model(5)
    assert models.canonical_form(models.internal_model(M, j)) == models.canonical_form(
        models.internal_model(M, j2)
    )


def test_normalize_identity_empty_domain():
    src = S.make_signature("src", [("=", 2), ("P", 1)])
    j = Translation(
        "empty",
        src,
        S.ARITH,
        delta=Not(eq(x, x)),
        rels=(("=", eq(x, y)), ("P", eq(x, x))),
    )
    j2 = normalize_identity(j)
    M = models.arith_prefix_model(4)
    assert not [e for e in M.domain if models.evaluate(M, j2.delta, {0: e})]


def test_normalize_identity_needs_order():
    kid = identity_translation(SIG_TOY)
    with pytest.raises(InterpretError):
        normalize_identity(kid)


# --- certificates ---------------------------------------------------------------------


def test_certificate_fixture_and_mismatch(translations):
    from interp_workbench.coding import code_formula
    from interp_workbench.interpret import InterpretationCertificate, transport_theorem

    axs = [
        corpus.SENTENCES["allP"],
        corpus.SENTENCES["PorQ"],
        corpus.SENTENCES["PtoQ"],
    ]
    V = finite_theory("three", SIG_TOY, axs)
    kid = identity_translation(SIG_TOY)
    U = finite_theory("host", SIG_TOY, axs)

    def relativized_witness(a):
        # prove forall x (x=x -> body) from the axiom forall x body
        assert isinstance(a, Forall)
        lab = nd.next_label()
        inst = nd.forall_e(Var(9), nd.axiom(a))
        return nd.forall_i(9, nd.imp_i(lab, eq(Var(9), Var(9)), inst))

    witnesses = {code_formula(a): relativized_witness(a) for a in axs}
    cert = InterpretationCertificate(
        "fix", kid, V, U, max(code_formula(a) for a in axs), witnesses
    )
    rep = verify_certificate(cert, "sa")
    assert rep.certified and len(rep.covered_codes) == 3
    assert rep.witness_bound is not None

    # a-notion: no witness bound reported
    rep_a = verify_certificate(cert, "a")
    assert rep_a.certified and rep_a.witness_bound is None

    # wrong-conclusion witness rejected, with the axiom's code named
    bad = dict(witnesses)
    wrong_code = code_formula(axs[0])
    bad[wrong_code] = nd.axiom(axs[1])
    cert_bad = InterpretationCertificate(
        "bad", kid, V, U, cert.coverage_bound, bad
    )
    rep2 = verify_certificate(cert_bad, "sa")
    assert not rep2.certified
    assert any(str(wrong_code) in f for f in rep2.failures)

    # uncovered axiom below the bound rejected
    cert_gap = InterpretationCertificate(
        "gap", kid, V, U, cert.coverage_bound, {k: v for k, v in witnesses.items() if k != wrong_code}
    )
    rep3 = verify_certificate(cert_gap, "sa")
    assert not rep3.certified

    # st: transported theorem proof carries the expected bound
    vp = nd.axiom(axs[0])
    w = transport_theorem(cert, vp)
    nd.check_closed(w, U)
    st_cert = InterpretationCertificate(
        "st", kid, V, U, cert.coverage_bound, witnesses, theorem_pairs=((vp, w),)
    )
    rep4 = verify_certificate(st_cert, "st")
    assert rep4.certified and rep4.witness_bound is not None
