import pytest
from hypothesis import given, strategies as st

from interp_workbench import sexpr as sx
from interp_workbench import syntax as S
from interp_workbench.syntax import And, Atom, BExists, BForall, Exists, Forall, Imp, Not, Or, Var

SIG = S.make_signature("t", [("=", 2), ("P", 1), ("R", 2)], [("0", 0), ("S", 1), ("+", 2)], order=None)
ASIG = S.ARITH


def test_parse_print_roundtrip_basic():
    text = "(forall x0 (-> (P x0) (R x0 x0)))"
    phi = sx.parse_formula(text, SIG)
    assert sx.parse_formula(sx.print_formula(phi), SIG) == phi


def test_parse_terms():
    t = sx.parse_term("(+ (S 0) x3)", SIG)
    assert t == S.plus(S.succ(S.zero()), Var(3))


def test_parse_bounded():
    phi = sx.parse_formula("(ball x0 x1 (le x0 x1))", ASIG)
    assert isinstance(phi, BForall) and phi.strict
    phi2 = sx.parse_formula("(bexle x0 x1 (= x0 x1))", ASIG)
    assert isinstance(phi2, BExists) and not phi2.strict


def test_arity_error_carries_position():
    with pytest.raises(sx.ParseError) as e:
        sx.parse_formula("(and (P x0 x1) false)", SIG)
    assert "expects 1" in str(e.value)
    assert e.value.line == 1


def test_unknown_symbol_rejected():
    with pytest.raises(sx.ParseError):
        sx.parse_formula("(Zorp x0)", SIG)


def test_unbalanced_rejected():
    with pytest.raises(sx.ParseError):
        sx.read_one("(and (P x0)")


def test_comments_skipped():
    phi = sx.parse_formula("; a comment\n(P x0) ; trailing\n", SIG)
    assert phi == Atom("P", (Var(0),))


# random formula generator for the roundtrip property


def formulas(depth):
    leaf = st.sampled_from(
        [Atom("P", (Var(i),)) for i in range(3)]
        + [Atom("R", (Var(i), Var(j))) for i in range(2) for j in range(2)]
        + [S.BOT]
    )
    if depth == 0:
        return leaf
    sub = formulas(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(sub, sub).map(lambda ab: And(*ab)),
        st.tuples(sub, sub).map(lambda ab: Or(*ab)),
        st.tuples(sub, sub).map(lambda ab: Imp(*ab)),
        sub.map(Not),
        st.tuples(st.integers(0, 2), sub).map(lambda vb: Forall(vb[0], vb[1])),
        st.tuples(st.integers(0, 2), sub).map(lambda vb: Exists(vb[0], vb[1])),
    )


@given(formulas(3))
def test_roundtrip_property(phi):
    assert sx.parse_formula(sx.print_formula(phi), SIG) == phi


def test_corpus_roundtrip(proofs):
    from interp_workbench import nd

    for p in proofs:
        for node in nd.iter_nodes(p):
            f = node.formula
            sig = __import__("interp_workbench.corpus", fromlist=["SIG_TOY"]).SIG_TOY
            assert sx.parse_formula(sx.print_formula(f), sig) == f
