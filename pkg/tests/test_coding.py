import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from interp_workbench import coding as C
from interp_workbench import syntax as S
from interp_workbench.coding import (
    Alphabet,
    binlen,
    code_formula,
    decode,
    encode,
    eval_nat,
    numeral,
    numeral_length,
    omega1,
    smash,
)
from interp_workbench.syntax import Var

AB = Alphabet(("a", "b"))
ABC = Alphabet(("a", "b", "c"))


def enumerate_pseudo_lex(alphabet, max_len):
    """Brute-force enumeration oracle: all strings by length, then alphabetic."""
    for length in range(max_len + 1):
        for tup in itertools.product(alphabet.symbols, repeat=length):
            yield tup


def test_empty_string_is_zero():
    assert encode([], AB) == 0
    assert decode(0, ABC) == ()


def test_counting_law_small():
    # (a^{n+1}-1)/(a-1) strings of length <= n: for a=2, n=3 that is 15
    strings = list(enumerate_pseudo_lex(AB, 3))
    assert len(strings) == 15
    codes = [encode(s, AB) for s in strings]
    assert codes == list(range(15))


def test_encode_cab_against_enumeration_oracle():
    oracle = {s: i for i, s in enumerate(enumerate_pseudo_lex(ABC, 3))}
    assert encode(("c", "a", "b"), ABC) == oracle[("c", "a", "b")] == 32


def test_decode_first_length_one():
    assert decode(1, AB) == ("a",)


def test_symbol_outside_alphabet():
    with pytest.raises(C.CodingError):
        encode(["z"], AB)


@given(st.integers(min_value=0, max_value=10**9))
def test_roundtrip_codes(n):
    assert encode(decode(n, ABC), ABC) == n


@given(st.lists(st.sampled_from("ab"), max_size=12))
def test_roundtrip_strings(symbols):
    assert list(decode(encode(symbols, AB), AB)) == symbols


def test_monotone_in_length():
    shorter = encode(["b", "b", "b"], AB)
    longer = encode(["a", "a", "a", "a"], AB)
    assert shorter < longer


def test_counting_exact_per_length():
    for a, alphabet in ((2, AB), (3, ABC)):
        for n in range(5):
            count = sum(1 for s in enumerate_pseudo_lex(alphabet, n) if len(s) == n)
            assert count == a**n


# --- syntax codes ------------------------------------------------------------


def test_subformula_codes_strictly_smaller(proofs):
    from interp_workbench import nd

    seen = 0
    for p in proofs[:20]:
        for node in nd.iter_nodes(p):
            f = node.formula
            whole = code_formula(f)
            for sub in S.subformulas(f):
                if sub is f:
                    continue
                assert code_formula(sub) < whole
                seen += 1
    assert seen > 50


def test_code_growth_bound():
    # code of phi is at most C * a^length for the token count
    a = C.SYNTAX_ALPHABET.size
    from interp_workbench import corpus

    for f in corpus.SENTENCES.values():
        tokens = C.formula_tokens(f)
        assert code_formula(f) <= (a ** (len(tokens) + 1)) // (a - 1)


def test_concatenation_law():
    # code(s ++ t) <= K * code(s) * code(t) for nonempty strings, fitted K
    K = 4 * ABC.size**2
    rng = random.Random(7)
    for _ in range(300):
        s = [rng.choice(ABC.symbols) for _ in range(rng.randint(1, 8))]
        t = [rng.choice(ABC.symbols) for _ in range(rng.randint(1, 8))]
        assert encode(s + t, ABC) <= K * max(1, encode(s, ABC)) * max(1, encode(t, ABC))


def test_substitution_size_law(proofs):
    # code(phi[x:=t]) <= 2^(c * |code phi| * |code t|) with fitted c = 2
    c = 2
    t = S.succ(S.succ(S.zero()))
    ct = C.encode(C.term_tokens(t), C.SYNTAX_ALPHABET)
    from interp_workbench import corpus

    for f in list(corpus.SENTENCES.values()):
        body = f.body if isinstance(f, (S.Forall, S.Exists)) else f
        sub = S.subst_many(body, {v: t for v in S.free_vars(body)})
        lhs = code_formula(sub)
        bound_bits = c * binlen(code_formula(body)) * binlen(ct)
        assert binlen(lhs) <= bound_bits


# --- growth functions ----------------------------------------------------------


def test_binlen_values():
    assert binlen(0) == 0
    assert binlen(1) == 1
    assert binlen(7) == 3


def test_smash_at_one():
    for x in range(1, 101):
        assert smash(x, 1) == 2 ** binlen(x)


def test_omega1_equals_self_smash():
    for x in range(0, 1001):
        assert omega1(x) == smash(x, x)


def test_bit_budget_enforced():
    with pytest.raises(C.BitBudgetExceeded):
        smash(2**4096, 2**4096, bit_budget=1 << 10)


# --- numerals ------------------------------------------------------------------


def test_numeral_zero():
    assert numeral(0) == S.zero()


def test_numeral_two_unfolds():
    ss0 = S.succ(S.succ(S.zero()))
    assert numeral(2) == S.times(ss0, S.succ(S.times(ss0, S.zero())))


def test_numeral_eval_and_length_sample():
    for n in [0, 1, 2, 3, 17, 100, 12345, 999999]:
        assert eval_nat(numeral(n)) == n
        assert numeral_length(n) == S.term_length(numeral(n))
        if n > 0:
            assert numeral_length(n) <= 6 * (n.bit_length() + 1)
