import pytest
from hypothesis import given, settings, strategies as st

from interp_workbench import arith, nd
from interp_workbench import syntax as S
from interp_workbench.coding import code_formula, code_syntax, eval_nat, numeral
from interp_workbench.nd import iter_nodes
from interp_workbench.syntax import And, BExists, BForall, Not, Or, Var, eq, le
from interp_workbench.theory import BASE_ARITH


@given(st.integers(0, 400), st.integers(0, 400))
@settings(max_examples=60, deadline=None)
def test_pf_plus(a, b):
    p = arith.pf_plus(a, b)
    nd.check_closed(p, BASE_ARITH)
    assert p.formula == eq(S.plus(numeral(a), numeral(b)), numeral(a + b))


@given(st.integers(0, 60), st.integers(0, 60))
@settings(max_examples=40, deadline=None)
def test_pf_times(a, b):
    p = arith.pf_times(a, b)
    nd.check_closed(p, BASE_ARITH)
    assert p.formula == eq(S.times(numeral(a), numeral(b)), numeral(a * b))


@given(st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_pf_succ(n):
    p = arith.pf_succ(n)
    nd.check_closed(p, BASE_ARITH)
    assert p.formula == eq(S.succ(numeral(n)), numeral(n + 1))


def test_two_plus_two_is_four():
    goal = eq(S.plus(numeral(2), numeral(2)), numeral(4))
    p = arith.prove_true_bounded(goal)
    assert nd.check_closed(p, BASE_ARITH) == goal


def test_reflexive_atom_gets_refl():
    p = arith.prove_true_bounded(eq(numeral(0), numeral(0)))
    assert p.rule == "refl"


def test_bounded_exists_witness():
    goal = BExists(0, numeral(3), True, eq(Var(0), numeral(2)))
    p = arith.prove_true_bounded(goal)
    assert nd.check_closed(p, BASE_ARITH) == goal


def test_false_reports_failing_atom():
    with pytest.raises(arith.FormulaFalse) as e:
        arith.prove_true_bounded(eq(numeral(2), numeral(3)))
    assert e.value.atom == eq(numeral(2), numeral(3))


def test_outside_fragment():
    with pytest.raises(arith.UnsupportedFragment):
        arith.prove_true_bounded(S.Forall(0, eq(Var(0), Var(0))))


CASES = [
    le(numeral(3), numeral(7)),
    Not(le(numeral(7), numeral(3))),
    Not(eq(numeral(5), numeral(9))),
    BForall(0, numeral(4), True, le(Var(0), numeral(3))),
    BForall(0, numeral(3), False, le(Var(0), numeral(3))),
    Not(BExists(0, numeral(3), True, eq(Var(0), numeral(7)))),
    BExists(0, numeral(5), False, And(le(numeral(2), Var(0)), le(Var(0), numeral(2)))),
    Or(eq(numeral(1), numeral(2)), le(numeral(0), numeral(0))),
    S.Imp(eq(numeral(1), numeral(2)), eq(numeral(5), numeral(6))),
    BForall(0, numeral(3), True, BExists(1, S.succ(Var(0)), True, eq(Var(1), Var(0)))),
    Not(BForall(0, numeral(4), True, eq(Var(0), numeral(0)))),
    S.Exists(0, eq(S.plus(Var(0), numeral(2)), numeral(5))),
    BForall(0, numeral(0), True, eq(Var(0), Var(0))),  # empty range
]


@pytest.mark.parametrize("phi", CASES)
def test_fragment_cases(phi):
    p = arith.prove_true_bounded(phi)
    assert nd.check_closed(p, BASE_ARITH) == phi


def test_eval_closed_matches_prover():
    for phi in CASES:
        assert arith.eval_closed(phi)


def test_axiom_sizes_stay_near_the_goal():
    """Remark-style bound: cited axioms are about as big as the goal, read on
    binary lengths of the codes with one fitted constant."""
    from interp_workbench.coding import binlen

    fitted = 6
    for phi in CASES:
        p = arith.prove_true_bounded(phi)
        goal_bits = binlen(code_formula(phi))
        for node in iter_nodes(p):
            if node.rule == "axiom":
                assert binlen(node.params[0]) <= fitted * max(goal_bits, 8)


def test_proof_size_polynomial_in_codes():
    # node count stays polynomial in the numeral codes involved
    for n in (3, 9, 17):
        goal = BForall(0, numeral(n), True, le(Var(0), numeral(n)))
        p = arith.prove_true_bounded(goal)
        assert nd.node_count(p) <= 200 * (n + 1) ** 2
