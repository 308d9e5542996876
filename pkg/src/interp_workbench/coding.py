"""Pseudo-lexicographic Goedel coding, efficient numerals and the growth functions.

Strings over a finite ordered alphabet are enumerated by length, then
alphabetically; the code of a string is its position in that enumeration.
Syntax objects are serialized to a fixed token alphabet (the printer's token
set, with variable indices spelled in dyadic digits) and then encoded, so the
arithmetical size laws hold exactly: substrings get strictly smaller codes,
concatenation multiplies, substitution stays under a smash-style bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from . import syntax as S


class CodingError(Exception):
    pass


class BitBudgetExceeded(CodingError):
    """A growth-function result would exceed the configured bit budget."""


DEFAULT_BIT_BUDGET = 1 << 20


# ---------------------------------------------------------------------------
# Alphabets and string codes


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise CodingError("alphabet needs cardinality >= 2")
        if len(set(self.symbols)) != len(self.symbols):
            raise CodingError("alphabet symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, sym: str) -> int:
        try:
            return self.symbols.index(sym)
        except ValueError:
            raise CodingError(f"symbol {sym!r} outside alphabet") from None


def shorter_count(a: int, length: int) -> int:
    """Number of strings of length < length over an a-letter alphabet."""
    return (a**length - 1) // (a - 1)


def encode(symbols: Sequence[str], alphabet: Alphabet) -> int:
    """Position of the string in the length-then-alphabetic enumeration."""
    a = alphabet.size
    digits = 0
    for sym in symbols:
        digits = digits * a + alphabet.index(sym)
    return shorter_count(a, len(symbols)) + digits


def decode(code: int, alphabet: Alphabet) -> tuple[str, ...]:
    if code < 0:
        raise CodingError("codes are nonnegative")
    a = alphabet.size
    length = 0
    while shorter_count(a, length + 1) <= code:
        length += 1
    rest = code - shorter_count(a, length)
    out = []
    for _ in range(length):
        rest, d = divmod(rest, a)
        out.append(alphabet.symbols[d])
    out.reverse()
    return tuple(out)


# ---------------------------------------------------------------------------
# Serialization of syntax

_VAR_MARK = "xv"
_STRUCTURAL = ["(", ")", "and", "or", "->", "not", "forall", "exists", "ball", "bex", "balle", "bexle", "false", _VAR_MARK]
_IDENT_CHARS = list("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789=+*#_-.!?")

SYNTAX_ALPHABET = Alphabet(tuple(_STRUCTURAL + ["d1", "d2"] + [c for c in _IDENT_CHARS]))


def _dyadic(n: int) -> list[str]:
    """Dyadic digit tokens for a natural number, most significant first."""
    if n == 0:
        return []
    digits = []
    while n > 0:
        n, r = divmod(n - 1, 2)
        digits.append("d2" if r else "d1")
    digits.reverse()
    return digits


def _ident_tokens(name: str) -> list[str]:
    toks = []
    for c in name:
        if c not in _IDENT_CHARS:
            raise CodingError(f"identifier character {c!r} outside the serialization alphabet")
        toks.append(c)
    return toks


def term_tokens(t: S.Term) -> list[str]:
    if isinstance(t, S.Var):
        return [_VAR_MARK] + _dyadic(t.index)
    toks = ["("] + _ident_tokens(t.symbol)
    for a in t.args:
        toks += term_tokens(a)
    toks.append(")")
    return toks


def formula_tokens(phi: S.Formula) -> list[str]:
    if isinstance(phi, S.Bot):
        return ["false"]
    if isinstance(phi, S.Atom):
        toks = ["("] + _ident_tokens(phi.rel)
        for a in phi.args:
            toks += term_tokens(a)
        return toks + [")"]
    if isinstance(phi, S.And):
        return ["(", "and"] + formula_tokens(phi.left) + formula_tokens(phi.right) + [")"]
    if isinstance(phi, S.Or):
        return ["(", "or"] + formula_tokens(phi.left) + formula_tokens(phi.right) + [")"]
    if isinstance(phi, S.Imp):
        return ["(", "->"] + formula_tokens(phi.left) + formula_tokens(phi.right) + [")"]
    if isinstance(phi, S.Not):
        return ["(", "not"] + formula_tokens(phi.body) + [")"]
    if isinstance(phi, S.Forall):
        return ["(", "forall", _VAR_MARK] + _dyadic(phi.var) + formula_tokens(phi.body) + [")"]
    if isinstance(phi, S.Exists):
        return ["(", "exists", _VAR_MARK] + _dyadic(phi.var) + formula_tokens(phi.body) + [")"]
    if isinstance(phi, S.BForall):
        head = "ball" if phi.strict else "balle"
        return ["(", head, _VAR_MARK] + _dyadic(phi.var) + term_tokens(phi.bound) + formula_tokens(phi.body) + [")"]
    if isinstance(phi, S.BExists):
        head = "bex" if phi.strict else "bexle"
        return ["(", head, _VAR_MARK] + _dyadic(phi.var) + term_tokens(phi.bound) + formula_tokens(phi.body) + [")"]
    raise CodingError(f"cannot serialize {phi!r}")


def code_syntax(obj) -> int:
    """Goedel code of a term, formula or proof via the fixed token alphabet."""
    if isinstance(obj, (S.Var, S.App)):
        return encode(term_tokens(obj), SYNTAX_ALPHABET)
    if isinstance(obj, S._Formula):
        return encode(formula_tokens(obj), SYNTAX_ALPHABET)
    from . import nd  # proofs live one layer up; lazy to avoid a cycle

    if isinstance(obj, nd.Proof):
        return encode(nd.proof_tokens(obj), SYNTAX_ALPHABET)
    raise CodingError(f"cannot code {type(obj).__name__}")


def code_formula(phi: S.Formula) -> int:
    return encode(formula_tokens(phi), SYNTAX_ALPHABET)


# ---------------------------------------------------------------------------
# Growth functions


def binlen(x: int) -> int:
    """|x|: binary length, ceil(log2(x+1))."""
    if x < 0:
        raise CodingError("binlen of a negative")
    return x.bit_length()


def smash(x: int, y: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """x # y = 2^(|x|*|y|)."""
    if x < 0 or y < 0:
        raise CodingError("smash of a negative")
    bits = binlen(x) * binlen(y)
    if bits > bit_budget:
        raise BitBudgetExceeded(f"smash needs {bits} bits, budget is {bit_budget}")
    return 1 << bits


def omega1(x: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """omega_1(x) = 2^(|x|^2) = x # x."""
    return smash(x, x, bit_budget)


# ---------------------------------------------------------------------------
# Efficient numerals


_NUMERAL_CACHE: dict[int, S.Term] = {}
_SS0 = S.succ(S.succ(S.zero()))


def numeral(n: int) -> S.Term:
    """Dyadic numeral term: 0 for 0, (SS0)*num(k) for 2k, S((SS0)*num(k)) for 2k+1."""
    if n < 0:
        raise CodingError("numerals are for naturals")
    t = _NUMERAL_CACHE.get(n)
    if t is not None:
        return t
    if n == 0:
        t = S.zero()
    else:
        half = numeral(n // 2)
        even = S.times(_SS0, half)
        t = even if n % 2 == 0 else S.succ(even)
    _NUMERAL_CACHE[n] = t
    return t


_NUMERAL_LEN_CACHE: dict[int, int] = {}


def numeral_length(n: int) -> int:
    """Symbol length of numeral(n) without rebuilding the tree."""
    got = _NUMERAL_LEN_CACHE.get(n)
    if got is not None:
        return got
    if n == 0:
        out = 1
    else:
        # times node + SS0 (3 nodes) + child, plus a successor when odd
        out = 4 + numeral_length(n // 2) + (1 if n % 2 else 0)
    _NUMERAL_LEN_CACHE[n] = out
    return out


# ---------------------------------------------------------------------------
# Standard-model term evaluation (used as the numeral oracle and by model-sim)


def eval_nat(t: S.Term, env: dict[int, int] | None = None, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """Evaluate an arithmetic term in the standard model."""
    memo: dict[int, int] = {}

    def go(u: S.Term) -> int:
        key = id(u)
        if key in memo:
            return memo[key]
        if isinstance(u, S.Var):
            if env is None or u.index not in env:
                raise CodingError(f"unassigned variable x{u.index}")
            val = env[u.index]
        else:
            sym = u.symbol
            if sym == "0":
                val = 0
            elif sym == "S":
                val = go(u.args[0]) + 1
            elif sym == "+":
                val = go(u.args[0]) + go(u.args[1])
            elif sym == "*":
                val = go(u.args[0]) * go(u.args[1])
            elif sym == "#":
                val = smash(go(u.args[0]), go(u.args[1]), bit_budget)
            elif sym == "len":
                val = binlen(go(u.args[0]))
            elif sym == "half":
                val = go(u.args[0]) // 2
            else:
                raise CodingError(f"no standard interpretation for function {sym!r}")
        memo[key] = val
        return val

    return go(t)
