import pytest

from interp_workbench import arith, corpus, cuts, models, nd
from interp_workbench import syntax as S
from interp_workbench.coding import code_formula, numeral
from interp_workbench.cuts import (
    CutSpec,
    PudlakArtifacts,
    build_pudlak,
    build_pudlak_relative,
    close_cut,
    cut_obligations,
    feferman_restrict,
    prove_cut_membership,
    prove_term_closure,
)
from interp_workbench.refute import Budget
from interp_workbench.syntax import And, BForall, Forall, Imp, Not, Var, eq, le
from interp_workbench.theory import BASE_ARITH, extend_theory

x, y = Var(0), Var(1)
TOP = eq(x, x)


@pytest.fixture(scope="module")
def top_cut():
    obls = cut_obligations(TOP, BASE_ARITH)
    host = extend_theory(BASE_ARITH, obls, "base+top-cut")
    spec = CutSpec(TOP, host, {i: nd.axiom(o) for i, o in enumerate(obls, 1)})
    spec.validate()
    return spec


def test_obligation_count_and_shapes():
    obls = cut_obligations(TOP, BASE_ARITH)
    assert len(obls) == 4
    assert isinstance(obls[0], And)  # J(0) and progressiveness
    assert isinstance(obls[1], Forall)
    # omega_1 clause mentions the smash-with-self term
    assert "#" in repr(obls[3])


def test_obligations_hold_on_defined_fragment(top_cut):
    """Obligation instances hold wherever the operations stay on the prefix;
    at the boundary the partial semantics falsifies the conclusion atom."""
    M = models.arith_prefix_model(8)
    n = len(M.domain)
    J = TOP

    def holds(e):
        return models.evaluate(M, J, {0: e})

    assert holds(0)
    for a in M.domain:
        if a + 1 < n and holds(a):
            assert holds(a + 1)
        for b in M.domain:
            if b <= a and holds(a):
                assert holds(b)
            if holds(a) and holds(b):
                if a + b < n:
                    assert holds(a + b)
                if a * b < n:
                    assert holds(a * b)
        om = 1 << (a.bit_length() ** 2)
        if om < n and holds(a):
            assert holds(om)


def test_wrong_arity_rejected():
    with pytest.raises(cuts.CutError):
        cut_obligations(eq(x, y), BASE_ARITH)


# --- membership proofs -------------------------------------------------------------


def test_membership_zero_is_base_clause(top_cut):
    p = prove_cut_membership(top_cut, 0)
    assert p.formula == S.substitute(TOP, 0, numeral(0))
    nd.check_closed(p, top_cut.host)


def test_membership_eighteen_path(top_cut):
    p = prove_cut_membership(top_cut, 18)
    nd.check_closed(p, top_cut.host)
    assert p.formula == S.substitute(TOP, 0, numeral(18))


# fitted constant of the logarithmic membership-size law, recorded here
MEMBERSHIP_C = 35


@pytest.mark.parametrize("n", [1, 2, 3, 5, 9, 100, 4097, 99999])
def test_membership_rechecks_and_log_bound(top_cut, n):
    p = prove_cut_membership(top_cut, n)
    nd.check_closed(p, top_cut.host)
    assert nd.node_count(p) <= MEMBERSHIP_C * (n.bit_length() + 1)


def test_membership_restricted_bound(top_cut):
    # Remark-style: a single n works for the whole family (checked on samples)
    from interp_workbench.nd import check_restricted, iter_nodes
    from interp_workbench.syntax import rho

    bound = 0
    for n in (1, 7, 18, 100):
        p = prove_cut_membership(top_cut, n)
        bound = max(
            bound,
            max(nd0.params[0] for nd0 in iter_nodes(p) if nd0.rule == "axiom"),
            max(rho(nd0.formula) for nd0 in iter_nodes(p)),
        )
    for n in (2, 5, 31, 64):
        assert check_restricted(prove_cut_membership(top_cut, n), top_cut.host, bound)


def test_membership_missing_obligations():
    spec = CutSpec(TOP, BASE_ARITH, {})
    with pytest.raises(cuts.CutError):
        prove_cut_membership(spec, 3)


# --- term closure ---------------------------------------------------------------


def test_term_closure_variable(top_cut):
    p = prove_term_closure(top_cut, x)
    nd.check_closed(p, top_cut.host)


def test_term_closure_sum(top_cut):
    p = prove_term_closure(top_cut, S.plus(x, y))
    nd.check_closed(p, top_cut.host)


def test_term_closure_composite(top_cut):
    t = S.plus(S.times(x, y), S.smash_t(x, x))
    p = prove_term_closure(top_cut, t)
    nd.check_closed(p, top_cut.host)


def test_term_closure_closed_term(top_cut):
    p = prove_term_closure(top_cut, S.succ(S.zero()))
    nd.check_closed(p, top_cut.host)
    assert p.formula == S.substitute(TOP, 0, S.succ(S.zero()))


def test_term_closure_unsupported(top_cut):
    with pytest.raises(cuts.CutError):
        prove_term_closure(top_cut, S.smash_t(x, y))
    with pytest.raises(cuts.CutError):
        prove_term_closure(top_cut, S.App("len", (x,)))


# --- close_cut -------------------------------------------------------------------


def _extension(M, phi):
    return [e for e in M.domain if models.evaluate(M, phi, {0: e})]


def test_close_cut_top_unchanged_on_prefix():
    M = models.arith_prefix_model(10)
    closed = close_cut(TOP)
    assert _extension(M, closed) == list(M.domain)


def test_close_cut_shrinks_small_segment():
    M = models.arith_prefix_model(12)
    seg = le(x, numeral(4))  # {0..4} is not closed under omega_1 on this prefix
    closed = close_cut(seg)
    ext = _extension(M, closed)
    assert set(ext) < set(range(5))


def test_close_cut_idempotent_on_models():
    M = models.arith_prefix_model(10)
    for j0 in (TOP, le(x, numeral(3))):
        once = close_cut(j0)
        twice = close_cut(once)
        assert _extension(M, once) == _extension(M, twice)


def test_closed_extension_is_initial_segment_closed_under_available_ops():
    M = models.arith_prefix_model(10)
    closed = close_cut(TOP)
    ext = set(_extension(M, closed))
    n = len(M.domain)
    for a in ext:
        for b in ext:
            for val in (a + b, a * b):
                if val < n:
                    assert val in ext
        om = 1 << (a.bit_length() ** 2)
        if om < n:
            assert om in ext
        assert set(range(a)) <= ext


# --- Pudlak ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def std_arts():
    return build_pudlak(corpus.std_embedding())


@pytest.fixture(scope="module")
def dbl_arts():
    return build_pudlak(corpus.doubling_embedding())


def test_pudlak_shapes(std_arts):
    assert sorted(S.free_vars(std_arts.goodsequence)) == [0, 1, 2]
    assert sorted(S.free_vars(std_arts.h)) == [0, 1]
    assert sorted(S.free_vars(std_arts.jprime)) == [0]
    assert sorted(S.free_vars(std_arts.j)) == [0]


def test_h_identity_on_prefix(std_arts):
    M = models.arith_prefix_model(40)
    ext = models.jprime_extension(M, std_arts)
    assert 0 in ext and 1 in ext
    imgs = models.h_images(M, std_arts, ext)
    for e in ext:
        assert imgs[e] == (e,)


def test_h_zero_anchor(std_arts):
    # H(0, 0^j) holds whenever the one-entry sequence exists
    M = models.arith_prefix_model(12)
    assert models.evaluate(M, std_arts.h, {0: 0, 1: 0})


def test_h_functional_and_injective(std_arts, dbl_arts):
    for arts, size in ((std_arts, 40), (dbl_arts, 64)):
        M = models.arith_prefix_model(size)
        rep = models.check_h_functionality(M, arts)
        assert rep.functional and rep.injective_mod_eq, rep.offenders


def test_doubling_images(dbl_arts):
    M = models.arith_prefix_model(64)
    ext = models.jprime_extension(M, dbl_arts)
    imgs = models.h_images(M, dbl_arts, ext)
    for e in ext:
        assert imgs[e] == (2 * e,)


def test_delta0_agreement_identity(std_arts):
    M = models.arith_prefix_model(12)
    rep = models.check_delta0_agreement(M, std_arts, depth=2)
    assert rep.agreement, rep.disagreements[:3]
    assert rep.checked > 1000


def test_delta0_agreement_doubling(dbl_arts):
    M = models.arith_prefix_model(12)
    rep = models.check_delta0_agreement(M, dbl_arts, depth=1)
    assert rep.agreement, rep.disagreements[:3]


def test_corrupted_h_detected(std_arts):
    # off-by-one anchor: the sequence must start at 1 instead of 0^j
    j = std_arts.translation
    bad_gs = _anchor_corrupted(std_arts.goodsequence)
    bad = PudlakArtifacts(
        goodsequence=bad_gs,
        h=_rebuild_h(j, bad_gs),
        jprime=std_arts.jprime,
        j=std_arts.j,
        translation=j,
    )
    M = models.arith_prefix_model(12)
    rep = models.check_delta0_agreement(M, bad, depth=1)
    assert not rep.agreement


def _anchor_corrupted(gs):
    # replace the zero^j anchor clause by "sigma_0 = S(0)"
    parts = []
    f = gs
    while isinstance(f, And):
        parts.append(f.left)
        f = f.right
    parts.append(f)
    sig_term = S.App("at", (Var(2), S.zero()))
    parts[1] = eq(sig_term, S.succ(S.zero()))
    return S.conj(parts)


def _rebuild_h(j, gs):
    y = Var(1)
    gs_primed = S.subst_many(gs, {2: Var(3), 1: Var(4)})
    uniq = Forall(3, Forall(4, Imp(gs_primed, S.subst_many(j.relation("="), {0: y, 1: Var(4)}))))
    return And(S.Exists(2, gs), uniq)


def test_term_law(std_arts, dbl_arts):
    terms = [x, S.plus(x, y), S.times(x, y), S.succ(x), S.plus(x, S.succ(y))]
    for arts, size in ((std_arts, 40), (dbl_arts, 64)):
        M = models.arith_prefix_model(size)
        ok, bad = models.check_term_law(M, arts, terms)
        assert ok, bad[:3]


def test_relative_pudlak_trivial_matches(std_arts):
    I_triv = eq(x, x)
    rel = build_pudlak_relative(corpus.std_embedding(), I_triv)
    # clause-identical modulo the appended confinement clause
    parts_plain = _conj_parts(std_arts.goodsequence)
    parts_rel = _conj_parts(rel.goodsequence)
    assert parts_rel[:-1] == parts_plain
    assert isinstance(parts_rel[-1], BForall) and parts_rel[-1].strict


def _conj_parts(f):
    out = []
    while isinstance(f, And):
        out.append(f.left)
        f = f.right
    out.append(f)
    return out


def test_relative_pudlak_confines_image():
    # I cuts at 4 on the source side: images must satisfy I^j
    I = le(x, numeral(3))
    j = corpus.std_embedding()
    arts = build_pudlak_relative(j, I)
    M = models.arith_prefix_model(40)
    ext = models.jprime_extension(M, arts)
    imgs = models.h_images(M, arts, ext)
    from interp_workbench.interpret import translate_formula

    I_j = translate_formula(j, I)
    for e in ext:
        for im in imgs[e]:
            assert models.evaluate(M, I_j, {0: im})
    # successor closure survives on the model: the extension is an initial run
    assert ext == tuple(range(len(ext)))


# --- Feferman transform -----------------------------------------------------------


def test_feferman_consistent_keeps_axioms():
    V = corpus.consistent_fixture()
    V2 = feferman_restrict(V)
    for a in V.finite_axioms():
        assert V2.recognizer(a)
    probe = max(code_formula(a) for a in V.finite_axioms())
    assert V2.axioms_below(probe) == V.axioms_below(probe)


def test_feferman_inconsistent_drops_late_axioms():
    V = corpus.refutation_fixture()
    V2 = feferman_restrict(V)
    codes = sorted(code_formula(a) for a in V.finite_axioms())
    kept = [c for c, _ in V2.axioms_below(codes[-1])]
    # precisely the axioms at/above the code where the refutation fits are gone
    from interp_workbench.refute import Exhausted, search_refutation

    for c, a in V.axioms_below(codes[-1]):
        expected = isinstance(search_refutation(V, c), Exhausted)
        assert (c in kept) == expected
    assert kept and len(kept) < len(codes)


def test_feferman_empty():
    V = corpus.henkin_fixtures()[0][0]
    empty = corpus.finite_theory("empty", V.signature, []) if False else None
    from interp_workbench.theory import finite_theory

    E = finite_theory("empty", V.signature, [])
    E2 = feferman_restrict(E)
    assert E2.axioms_below(10**9) == []


def test_feferman_subset_always():
    for V in (corpus.consistent_fixture(), corpus.refutation_fixture()):
        V2 = feferman_restrict(V)
        for a in V.finite_axioms():
            if V2.recognizer(a):
                assert V.recognizer(a)
        bound = max(code_formula(a) for a in V.finite_axioms())
        kept = {c for c, _ in V2.axioms_below(bound)}
        assert kept <= {c for c, _ in V.axioms_below(bound)}


def test_feferman_budget_in_name():
    V2 = feferman_restrict(corpus.consistent_fixture(), Budget(max_nodes=32))
    assert "32" in V2.name
