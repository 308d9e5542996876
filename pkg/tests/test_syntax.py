import pytest
from hypothesis import given, strategies as st

from interp_workbench import syntax as S
from interp_workbench.syntax import (
    And,
    Atom,
    BExists,
    BForall,
    Exists,
    Forall,
    FormulaClass,
    Imp,
    Not,
    Or,
    Var,
    classify,
    eq,
    formula_length,
    free_vars,
    le,
    rho,
    substitute,
)

SIG = S.make_signature("t", [("=", 2), ("P", 1), ("Q", 1), ("R", 2)])
x, y, z = Var(0), Var(1), Var(2)


def P(t):
    return Atom("P", (t,))


def Q(t):
    return Atom("Q", (t,))


def R(a, b):
    return Atom("R", (a, b))


# --- free_vars ---------------------------------------------------------------


def fv_oracle(phi):
    """Independent structural recursion used as the free-variable oracle."""
    if isinstance(phi, Atom):
        out = set()
        for t in phi.args:
            stack = [t]
            while stack:
                u = stack.pop()
                if isinstance(u, Var):
                    out.add(u.index)
                else:
                    stack.extend(u.args)
        return out
    if isinstance(phi, S.Bot):
        return set()
    if isinstance(phi, (And, Or, Imp)):
        return fv_oracle(phi.left) | fv_oracle(phi.right)
    if isinstance(phi, Not):
        return fv_oracle(phi.body)
    if isinstance(phi, (Forall, Exists)):
        return fv_oracle(phi.body) - {phi.var}
    if isinstance(phi, (BForall, BExists)):
        return fv_oracle(phi.body) - {phi.var} | set(S.free_vars_term(phi.bound))
    raise AssertionError


def test_free_vars_bound_excluded():
    phi = And(P(x), Forall(1, Q(y)))
    assert free_vars(phi) == {0}


def test_free_vars_sentence_empty():
    assert free_vars(Forall(0, P(x))) == frozenset()


def test_free_vars_bound_term():
    # all x < t(y): the bound-term variable stays free
    phi = BForall(0, y, True, P(Var(0)))
    assert free_vars(phi) == {1}
    assert fv_oracle(phi) == {1}


FORMULAS = [
    P(x),
    And(P(x), Q(y)),
    Forall(0, Imp(P(x), Q(x))),
    Exists(1, R(x, y)),
    Forall(0, Exists(1, R(x, y))),
    Not(Forall(0, P(x))),
    Imp(Forall(0, P(x)), Exists(0, Q(x))),
    Or(Exists(2, R(z, x)), Q(y)),
]


@pytest.mark.parametrize("phi", FORMULAS)
def test_free_vars_against_oracle(phi):
    assert set(free_vars(phi)) == fv_oracle(phi)


def test_free_vars_cardinality_bounded_by_length(proofs):
    for p in proofs:
        for node in _nodes(p):
            f = node.formula
            assert len(free_vars(f)) <= formula_length(f)


def _nodes(p):
    from interp_workbench.nd import iter_nodes

    return iter_nodes(p)


# --- substitute --------------------------------------------------------------


def test_substitute_simple():
    phi = And(P(x), Q(y))
    assert substitute(phi, 0, S.App("0", ())) == And(P(S.App("0", ())), Q(y))


def test_substitute_no_free_occurrence():
    phi = Forall(0, P(x))
    assert substitute(phi, 0, y) == phi


def test_substitute_capture_renames():
    # (forall y R(x,y))[x := S(y)] renames the binder away from y
    phi = Forall(1, R(x, y))
    out = substitute(phi, 0, S.App("S", (y,)))
    assert isinstance(out, Forall)
    w = out.var
    assert w != 1
    assert out.body == R(S.App("S", (y,)), Var(w))


@given(st.integers(min_value=0, max_value=4))
def test_substitute_identity_when_not_free(v):
    phi = Forall(0, Exists(1, R(x, y)))
    if v not in free_vars(phi):
        assert substitute(phi, v, z) == phi


def test_alpha_canonicalization_makes_variants_equal():
    a = Forall(3, P(Var(3)))
    b = Forall(7, P(Var(7)))
    assert a == b
    assert hash(a) == hash(b)


def test_rename_bound_is_stable():
    phi = Forall(0, Exists(1, R(x, y)))
    assert S.rename_bound(phi, 5) == phi


# --- classify ----------------------------------------------------------------


ARITH_X = Var(0)


def sb(t):
    # sharply bounded quantifier: bound of shape len(t)
    return S.App("len", (t,))


def test_classify_atomic_delta0():
    assert classify(eq(x, y)) == FormulaClass.DELTA0


def test_classify_bounded_exists_sigma1b():
    phi = BExists(1, ARITH_X, True, eq(y, y))
    assert classify(phi) == FormulaClass.SIGMA1B


def test_classify_sharply_bounded_stays_delta0():
    phi = BExists(1, sb(ARITH_X), True, eq(y, y))
    assert classify(phi) == FormulaClass.DELTA0


def test_classify_pi1_with_bounded_matrix():
    phi = Forall(0, BExists(1, x, True, R(x, y)))
    assert classify(phi) == FormulaClass.PI1


def test_classify_all_pi1b():
    phi = Forall(0, BForall(1, x, True, le(y, x)))
    assert classify(phi) == FormulaClass.ALL_PI1B


def test_classify_negated_bounded_exists_pi1b():
    phi = Not(BExists(1, ARITH_X, True, eq(y, y)))
    assert classify(phi) == FormulaClass.PI1B


def test_classify_sigma1():
    phi = Exists(0, BForall(1, x, True, le(y, x)))
    assert classify(phi) == FormulaClass.SIGMA1


def test_classify_stable_under_bound_renaming():
    phi = Forall(0, BExists(1, x, True, R(x, y)))
    assert classify(S.rename_bound(phi, 9)) == classify(phi)


def test_classify_memberships_consistent():
    phi = eq(x, y)
    for cls in FormulaClass:
        assert S.class_contains(cls, phi)


# --- rho ---------------------------------------------------------------------


def test_rho_atomic_zero():
    assert rho(eq(x, y)) == 0
    assert rho(S.BOT) == 0


def test_rho_alternation_counts():
    assert rho(Forall(0, Exists(1, R(x, y)))) == 2
    assert rho(Forall(0, Forall(1, R(x, y)))) == 1
    assert rho(Exists(0, Exists(1, Forall(2, R(x, z))))) == 2


def test_rho_negation_transparent():
    phi = Forall(0, P(x))
    assert rho(Not(phi)) == rho(phi)


def test_rho_implication_flips_antecedent():
    # all-lead antecedent flips to exists-lead, so a surrounding forall merges
    phi = Imp(Exists(0, P(x)), Forall(0, Q(x)))
    assert rho(Forall(1, phi)) == rho(phi)


def test_rho_monotone_under_subformulas():
    phi = Forall(0, Exists(1, And(R(x, y), Forall(2, Q(z)))))
    r = rho(phi)
    for sub in S.subformulas(phi):
        assert rho(sub) <= r


def test_rho_bounded_quantifiers_free():
    phi = BForall(0, y, True, BExists(2, y, False, R(x, z)))
    assert rho(phi) == 0


# --- signatures ---------------------------------------------------------------


def test_signature_requires_identity():
    with pytest.raises(S.SyntaxError_):
        S.make_signature("bad", [("P", 1)])


def test_signature_duplicate_symbols_rejected():
    with pytest.raises(S.SyntaxError_):
        S.make_signature("bad", [("=", 2), ("P", 1), ("P", 2)])


def test_check_formula_arity():
    with pytest.raises(S.SyntaxError_):
        S.check_formula(SIG, Atom("P", (x, y)))
