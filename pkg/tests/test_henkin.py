import pytest

from interp_workbench import artifacts, corpus, diagram, henkin, models, nd
from interp_workbench import syntax as S
from interp_workbench.henkin import (
    HenkinError,
    InconsistentBase,
    add_witnesses,
    bound_for_tokens,
    enumerate_sentences,
    henkin_complete,
    run_pipeline,
    term_model,
)
from interp_workbench.interpret import translate_formula, verify_certificate
from interp_workbench.syntax import And, Atom, Exists, Forall, Not, Var, eq
from interp_workbench.theory import finite_theory

x = Var(0)
B8 = bound_for_tokens(8)
SIG_P = S.make_signature("hP", [("=", 2), ("P", 1)])


def P(t):
    return Atom("P", (t,))


# --- enumeration ----------------------------------------------------------------


def test_enumeration_sorted_and_bounded():
    sents = enumerate_sentences(SIG_P, B8)
    codes = [c for c, _ in sents]
    assert codes == sorted(codes)
    assert all(c <= B8 for c in codes)
    formulas = [f for _, f in sents]
    assert Exists(0, P(x)) in formulas
    assert Forall(0, P(x)) in formulas


def test_enumeration_only_sentences():
    for _, f in enumerate_sentences(SIG_P, B8):
        assert not S.free_vars(f)


# --- witnesses --------------------------------------------------------------------


def test_add_witnesses_one_constant():
    V = corpus.henkin_fixtures()[0][0]  # {exists x P(x)}
    ext = add_witnesses(V, B8)
    assert len(ext.witnesses) == 1
    (code, (sym, ha)) = next(iter(ext.witnesses.items()))
    assert sym == "C0"
    assert isinstance(ha, S.Imp)
    assert ext.theory.signature.has_relation("C0")


def test_add_witnesses_below_any_existential():
    V = corpus.henkin_fixtures()[0][0]
    tiny = 100
    ext = add_witnesses(V, tiny)
    assert not ext.witnesses
    assert ext.theory.signature == V.signature.with_relations([], name=f"{V.signature.name}+henkin")


def test_witnesses_fresh_per_sentence():
    sig = S.make_signature("hPQ", [("=", 2), ("P", 1), ("Q", 1)])
    V = finite_theory("two-ex", sig, [Exists(0, P(x)), Exists(0, Atom("Q", (x,)))])
    ext = add_witnesses(V, B8)
    syms = [sym for sym, _ in ext.witnesses.values()]
    assert len(set(syms)) == len(syms) >= 2


# --- completion --------------------------------------------------------------------


def test_completion_decides_universe():
    V = corpus.henkin_fixtures()[0][0]
    state = henkin_complete(V, B8, oracle_domain=2)
    assert not state.truncated
    wset = state.decided_set
    for code, phi in enumerate_sentences(state.signature, B8):
        assert phi in wset or Not(phi) in wset or (isinstance(phi, Not) and phi.body in wset)


def test_completion_prefers_positive():
    V = corpus.henkin_fixtures()[0][0]
    state = henkin_complete(V, B8, oracle_domain=2)
    assert Exists(0, P(x)) in state.decided_set


def test_henkin_axiom_discharge():
    """Whenever exists-x-phi is accepted, the witness instance is accepted."""
    cons, _ = corpus.henkin_fixtures()
    for V in cons[:3]:
        state = henkin_complete(V, B8, oracle_domain=2)
        wset = state.decided_set
        for code, sym in state.witness_map.items():
            ex = next(f for c, f in enumerate_sentences(V.signature, state.bound) if c == code)
            if ex in wset:
                assert henkin.henkin_axiom(ex, sym) in wset


def test_inconsistent_base_refused():
    _, incons = corpus.henkin_fixtures()
    for V in incons:
        with pytest.raises(InconsistentBase):
            henkin_complete(V, B8, oracle_domain=3)


def test_determinism_byte_identical():
    V = corpus.henkin_fixtures()[1][0] if False else corpus.henkin_fixtures()[0][1]
    a = artifacts.henkin_state_to_text(henkin_complete(V, B8, oracle_domain=2))
    b = artifacts.henkin_state_to_text(henkin_complete(V, B8, oracle_domain=2))
    assert a == b


# --- term model --------------------------------------------------------------------


def test_term_model_exP():
    V = corpus.henkin_fixtures()[0][0]
    state = henkin_complete(V, B8, oracle_domain=2)
    M, rep = term_model(state)
    assert not rep.partial, rep.failures
    assert len(M.domain) == 1
    assert (0,) in M.rel("P")


def test_term_model_identified_constants():
    # W containing the identification sentence collapses the constants
    V = corpus.henkin_fixtures()[0][0]
    state = henkin_complete(V, B8, oracle_domain=2)
    state2 = henkin.HenkinState(
        base_name=state.base_name,
        signature=state.signature.with_relations([("C9", 1)]),
        bound=state.bound,
        oracle_domain=state.oracle_domain,
        witness_map={**state.witness_map, 10**30: "C9"},
        accepted=state.accepted + (henkin._render_constant_eq("C0", "C9"),),
        transcript=state.transcript,
        truncated=False,
        extension=state.extension,
    )
    M, _ = term_model(state2)
    assert len(M.domain) == 1


def test_term_model_verifies_w(toy_models):
    cons, _ = corpus.henkin_fixtures()
    for V in cons[:4]:
        state = henkin_complete(V, B8, oracle_domain=2)
        M, rep = term_model(state)
        assert not rep.partial, (V.name, rep.failures)
        for psi in state.accepted:
            from interp_workbench.coding import code_formula

            if code_formula(psi) <= state.bound:
                assert models.evaluate(M, psi, {})


# --- the full pipeline ---------------------------------------------------------------


def test_pipeline_all_fixtures():
    cons, incons = corpus.henkin_fixtures()
    for V in cons:
        res = run_pipeline(V, B8, oracle_domain=2)
        rep = verify_certificate(res.certificate, "sa")
        assert rep.certified, (V.name, rep.failures)
        assert len(res.model.domain) <= 4
    for V in incons:
        with pytest.raises(InconsistentBase):
            run_pipeline(V, B8, oracle_domain=3)


def test_pipeline_deterministic():
    V = corpus.henkin_fixtures()[0][0]
    r1 = run_pipeline(V, B8, oracle_domain=2)
    r2 = run_pipeline(V, B8, oracle_domain=2)
    assert artifacts.henkin_state_to_text(r1.state) == artifacts.henkin_state_to_text(r2.state)
    assert artifacts.structure_to_text(r1.model) == artifacts.structure_to_text(r2.model)


def test_no_state_for_refuted_base():
    _, incons = corpus.henkin_fixtures()
    for V in incons:
        with pytest.raises(InconsistentBase):
            henkin_complete(V, B8, oracle_domain=4)


# --- diagram prover -------------------------------------------------------------------


def test_diagram_empty_theory_vacuous_certificate():
    sig = S.make_signature("e", [("=", 2), ("P", 1)])
    V = finite_theory("nothing", sig, [])
    N = models.find_model(V, 1)
    cert, host = henkin.interpretation_from_model(N, V)
    rep = verify_certificate(cert, "sa")
    assert rep.certified and not rep.covered_codes


def test_diagram_rejects_false_axiom():
    sig = S.make_signature("e", [("=", 2), ("P", 1)])
    V = finite_theory("allP", sig, [Forall(0, P(x))])
    dom = (0,)
    N = models.Structure("noP", sig, dom, {"=": models.identity_diagonal(dom), "P": frozenset()})
    with pytest.raises(HenkinError):
        henkin.interpretation_from_model(N, V)


def test_diagram_three_element_order_certificate():
    sig = S.make_signature("ord", [("=", 2), ("R", 2)])
    axs = [
        Exists(0, Exists(1, And(Atom("R", (x, Var(1))), Not(eq(x, Var(1)))))),
        Forall(0, Not(Atom("R", (x, x)))),
    ]
    V = finite_theory("toy-order", sig, axs)
    N = models.find_model(V, 3)
    assert isinstance(N, models.Structure)
    cert, host = henkin.interpretation_from_model(N, V)
    rep = verify_certificate(cert, "sa")
    assert rep.certified and len(rep.covered_codes) == 2


def test_diagram_proofs_conclude_translations():
    N = corpus.toy_models()[0]
    k = diagram.diagram_translation(N)
    U = diagram.diagram_theory(N)
    for phi in corpus.duality_sentences():
        if models.evaluate(N, phi, {}):
            p = diagram.prove_in_diagram(N, phi)
            assert nd.check_closed(p, U) == translate_formula(k, phi)
