"""Desk-scale Henkin machinery: witness extension, completion against a finite
model oracle, term-model extraction, and certificate assembly.

The consistency oracle is finite model search, not proof search: completeness
at desk scale is achievable only for theories with small models, so an oracle
refusal means "no model within the domain budget", which is sound but
incomplete evidence.  The completion enumerates sentences strictly by Goedel
code; the decided set W is therefore order-dependent and runs are
deterministic and byte-reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from . import diagram
from . import models as mdl
from . import syntax as S
from .coding import SYNTAX_ALPHABET, code_formula, shorter_count
from .config import DEFAULT_CONFIG
from .interpret import InterpretationCertificate, Translation
from .models import NoneFound, Structure, find_model
from .syntax import (
    And,
    Atom,
    Bot,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Signature,
    Var,
    eq,
    free_vars,
)
from .theory import TheorySpec, finite_theory


class HenkinError(Exception):
    pass


class InconsistentBase(HenkinError):
    """The oracle found no model for the base theory: we refuse to complete."""


# ---------------------------------------------------------------------------
# Sentence enumeration by code


def bound_for_tokens(length: int) -> int:
    """The largest code of any token string of the given length or shorter."""
    return shorter_count(SYNTAX_ALPHABET.size, length + 1) - 1


def _var_token_len(idx: int) -> int:
    n, out = idx, 1
    while n > 0:
        n = (n - 1) // 2
        out += 1
    return out


def enumerate_sentences(sig: Signature, max_code: int, max_count: int = 50000) -> list[tuple[int, Formula]]:
    """All sentences over the signature with code <= max_code, ascending by code.

    Purely relational signatures only; generation is grammar-driven over the
    serialization token length, then filtered and sorted by exact code.
    """
    if any(True for _ in sig.functions):
        raise HenkinError("sentence enumeration supports relational signatures")
    max_len = 0
    while shorter_count(SYNTAX_ALPHABET.size, max_len + 1) - 1 <= max_code:
        max_len += 1
    # max_len is now one past; strings of length max_len may still fit partially
    rel_costs = {sym: 2 + len(sym) for sym, _ in sig.relations}

    atoms_memo: dict[tuple[int, int], list[Formula]] = {}

    def atoms(budget: int, scope: int) -> list[Formula]:
        got = atoms_memo.get((budget, scope))
        if got is not None:
            return got
        out = []
        vars_ = list(range(scope))
        for sym, arity in sig.relations:
            base = rel_costs[sym]
            for tup in itertools.product(vars_, repeat=arity):
                cost = base + sum(_var_token_len(v) for v in tup)
                if cost <= budget:
                    out.append(Atom(sym, tuple(Var(v) for v in tup)))
        atoms_memo[(budget, scope)] = out
        return out

    memo: dict[tuple[int, int], list[Formula]] = {}

    def gen(budget: int, scope: int) -> list[Formula]:
        """Formulas with token length <= budget over variables x0..x(scope-1)."""
        if budget < 1:
            return []
        key = (budget, scope)
        got = memo.get(key)
        if got is not None:
            return got
        out: list[Formula] = [S.BOT] if budget >= 1 else []
        out += atoms(budget, scope)
        if budget >= 4:
            for f in gen(budget - 3, scope):
                out.append(Not(f))
            new_cost = 3 + _var_token_len(scope)
            for f in gen(budget - new_cost, scope + 1):
                if scope in free_vars(f):
                    out.append(Forall(scope, f))
                    out.append(Exists(scope, f))
        if budget >= 5:
            halves = gen(budget - 3, scope)
            for a in halves:
                la = _token_len(a)
                for b in gen(budget - 3 - la, scope):
                    out.append(And(a, b))
                    out.append(Or(a, b))
                    out.append(Imp(a, b))
        # constructors canonicalize, so alpha-variants collapse here
        seen = {}
        for f in out:
            seen[f] = True
        result = list(seen)
        if len(result) > max_count:
            raise HenkinError(
                f"sentence universe too large ({len(result)} formulas); lower the bound"
            )
        memo[key] = result
        return result

    sentences = [f for f in gen(max_len, 0) if not free_vars(f)]
    coded = []
    for f in sentences:
        c = code_formula(f)
        if c <= max_code:
            coded.append((c, f))
    coded.sort(key=lambda p: p[0])
    return coded


_token_len_memo: dict[Formula, int] = {}


def _token_len(f: Formula) -> int:
    got = _token_len_memo.get(f)
    if got is None:
        from .coding import formula_tokens

        got = len(formula_tokens(f))
        _token_len_memo[f] = got
    return got


# ---------------------------------------------------------------------------
# Witness extension


@dataclass
class WitnessExtension:
    theory: TheorySpec
    base: TheorySpec
    bound: int
    # code of the existential sentence -> (constant predicate symbol, henkin axiom)
    witnesses: dict[int, tuple[str, Formula]]


def witness_symbol(i: int) -> str:
    return f"C{i}"


def henkin_axiom(ex_sentence: Formula, sym: str) -> Formula:
    """exists x phi(x) -> phi(c), with the constant realized as a predicate."""
    if not isinstance(ex_sentence, Exists):
        raise HenkinError("henkin axioms attach to existential sentences")
    body = ex_sentence.body
    w = S.fresh_index(free_vars(body) | {ex_sentence.var})
    witness_side = Exists(w, And(Atom(sym, (Var(w),)), S.substitute(body, ex_sentence.var, Var(w))))
    return Imp(ex_sentence, witness_side)


def add_witnesses(V: TheorySpec, bound: int) -> WitnessExtension:
    """Extend by one fresh constant (as a unary predicate plus uniqueness
    axioms) per existential sentence of code <= bound, with Henkin axioms."""
    existentials = [
        (c, f) for c, f in enumerate_sentences(V.signature, bound) if isinstance(f, Exists)
    ]
    extra_rels = [(witness_symbol(i), 1) for i in range(len(existentials))]
    sig = V.signature.with_relations(extra_rels, name=f"{V.signature.name}+henkin")
    axioms = list(V.finite_axioms())
    witnesses: dict[int, tuple[str, Formula]] = {}
    x, y = Var(0), Var(1)
    for i, (c, f) in enumerate(existentials):
        sym = witness_symbol(i)
        caf = Atom(sym, (x,))
        axioms.append(Exists(0, caf))
        axioms.append(Forall(0, Forall(1, Imp(And(caf, Atom(sym, (y,))), eq(x, y)))))
        ha = henkin_axiom(f, sym)
        axioms.append(ha)
        witnesses[c] = (sym, ha)
    ext = finite_theory(f"{V.name}+w<={bound}", sig, axioms)
    return WitnessExtension(ext, V, bound, witnesses)


# ---------------------------------------------------------------------------
# Completion


@dataclass
class OracleEntry:
    code: int
    sentence: str
    verdict: str  # accepted / negated / inconclusive
    domain: int


@dataclass
class HenkinState:
    base_name: str
    signature: Signature
    bound: int
    oracle_domain: int
    witness_map: dict[int, str]
    accepted: tuple[Formula, ...]  # W, in decision order
    transcript: tuple[OracleEntry, ...]
    truncated: bool
    extension: WitnessExtension

    @property
    def decided_set(self) -> frozenset[Formula]:
        return frozenset(self.accepted)


Oracle = Callable[[Sequence[Formula], Signature], Union[Structure, NoneFound]]


def model_search_oracle(max_domain: int) -> Oracle:
    def oracle(axioms: Sequence[Formula], sig: Signature):
        tmp = finite_theory("query", sig, tuple(axioms))
        return find_model(tmp, max_domain)

    return oracle


def henkin_complete(
    V: TheorySpec,
    bound: int,
    oracle: Optional[Oracle] = None,
    oracle_domain: Optional[int] = None,
) -> HenkinState:
    """Decide every sentence of code <= bound over the witness-extended
    language, preferring the positive sentence whenever the oracle accepts it.

    Refuses outright when the oracle cannot model the base; returns a state
    flagged truncated when some query is inconclusive both ways.
    """
    oracle_domain = oracle_domain or DEFAULT_CONFIG.oracle_domain
    oracle = oracle or model_search_oracle(oracle_domain)

    base_axioms = V.finite_axioms()
    got = oracle(base_axioms, V.signature)
    if isinstance(got, NoneFound):
        raise InconsistentBase(
            f"oracle found no model of {V.name} within domain {oracle_domain}; refusing to complete"
        )
    ext = add_witnesses(V, bound)
    background = list(ext.theory.finite_axioms())
    got = oracle(background, ext.theory.signature)
    if isinstance(got, NoneFound):
        raise InconsistentBase(
            f"oracle found no model of the witness extension of {V.name}; refusing to complete"
        )

    universe = enumerate_sentences(ext.theory.signature, bound)
    accepted: list[Formula] = []
    wset: set[Formula] = set()
    transcript: list[OracleEntry] = []
    truncated = False
    from .sexpr import print_formula

    for code, phi in universe:
        if phi in wset or Not(phi) in wset:
            continue
        got = oracle(background + accepted + [phi], ext.theory.signature)
        if not isinstance(got, NoneFound):
            accepted.append(phi)
            wset.add(phi)
            transcript.append(OracleEntry(code, print_formula(phi), "accepted", oracle_domain))
            continue
        neg = Not(phi)
        got = oracle(background + accepted + [neg], ext.theory.signature)
        if not isinstance(got, NoneFound):
            accepted.append(neg)
            wset.add(neg)
            transcript.append(OracleEntry(code, print_formula(phi), "negated", oracle_domain))
            continue
        transcript.append(OracleEntry(code, print_formula(phi), "inconclusive", oracle_domain))
        truncated = True
        break

    # Atomic closure: decide the finitely many sentences the term model reads
    # (relation atoms over witness constants and constant identifications),
    # whatever their codes.  W stays decided below the bound; these extras
    # make the quotient construction well defined.
    if not truncated:
        syms = [sym for _, (sym, _) in sorted(ext.witnesses.items())]
        closure_queries: list[Formula] = []
        for i in range(len(syms)):
            for jdx in range(i + 1, len(syms)):
                closure_queries.append(_render_constant_eq(syms[i], syms[jdx]))
        for rel, arity in sorted(ext.theory.signature.relations):
            if rel == ext.theory.signature.identity:
                continue
            for tup in itertools.product(syms, repeat=arity):
                closure_queries.append(_render_atom_over_constants(rel, tup))
        for phi in closure_queries:
            if phi in wset or Not(phi) in wset:
                continue
            got = oracle(background + accepted + [phi], ext.theory.signature)
            if not isinstance(got, NoneFound):
                accepted.append(phi)
                wset.add(phi)
                transcript.append(
                    OracleEntry(code_formula(phi), print_formula(phi), "accepted", oracle_domain)
                )
                continue
            got = oracle(background + accepted + [Not(phi)], ext.theory.signature)
            if not isinstance(got, NoneFound):
                accepted.append(Not(phi))
                wset.add(Not(phi))
                transcript.append(
                    OracleEntry(code_formula(phi), print_formula(phi), "negated", oracle_domain)
                )
                continue
            transcript.append(
                OracleEntry(code_formula(phi), print_formula(phi), "inconclusive", oracle_domain)
            )
            truncated = True
            break

    # the Henkin axioms belong to the decided set
    henkin_axioms = [ha for _, ha in ext.witnesses.values()]
    final = tuple(henkin_axioms + accepted)
    return HenkinState(
        base_name=V.name,
        signature=ext.theory.signature,
        bound=bound,
        oracle_domain=oracle_domain,
        witness_map={c: sym for c, (sym, _) in ext.witnesses.items()},
        accepted=final,
        transcript=tuple(transcript),
        truncated=truncated,
        extension=ext,
    )


# ---------------------------------------------------------------------------
# Term model


@dataclass
class TermModelReport:
    partial: bool
    failures: tuple[str, ...]


def _render_constant_eq(sym_i: str, sym_j: str) -> Formula:
    x, y = Var(0), Var(1)
    return Exists(0, Exists(1, And(Atom(sym_i, (x,)), And(Atom(sym_j, (y,)), eq(x, y)))))


def _render_atom_over_constants(rel: str, syms: Sequence[str]) -> Formula:
    n = len(syms)
    body: Formula = Atom(rel, tuple(Var(i) for i in range(n)))
    for i in reversed(range(n)):
        body = And(Atom(syms[i], (Var(i),)), body)
        body = Exists(i, body)
    return body


def term_model(state: HenkinState) -> tuple[Structure, TermModelReport]:
    """Witness constants modulo W-provable identity, relations read off W.

    Every decided sentence within the bound is re-evaluated in the result;
    failures are reported, not assumed away.  A truncated state yields a
    model flagged partial.
    """
    wset = set(state.accepted)
    syms = [state.witness_map[c] for c in sorted(state.witness_map)]
    # quotient by the identification sentences present in W
    classes: list[list[str]] = []
    for sym in syms:
        for cls in classes:
            a = cls[0]
            if _render_constant_eq(a, sym) in wset or _render_constant_eq(sym, a) in wset:
                cls.append(sym)
                break
        else:
            classes.append([sym])
    if not classes:
        classes = [["point"]]
        point_only = True
    else:
        point_only = False
    dom = tuple(range(len(classes)))
    sym_class = {s: i for i, cls in enumerate(classes) for s in cls}

    rels: dict[str, frozenset] = {"=": mdl.identity_diagonal(dom)}
    for rel, arity in state.signature.relations:
        if rel == "=":
            continue
        table = set()
        if rel.startswith("C") and rel in sym_class:
            table.add((sym_class[rel],))
        elif not point_only:
            for tup in itertools.product(range(len(classes)), repeat=arity):
                reps = [classes[i][0] for i in tup]
                if _render_atom_over_constants(rel, reps) in wset:
                    table.add(tup)
        else:
            # no witnesses at all: read the one-point table off closures in W
            ex_closure: Formula = Atom(rel, tuple(Var(i) for i in range(arity)))
            fa_closure = ex_closure
            for i in reversed(range(arity)):
                ex_closure = Exists(i, ex_closure)
                fa_closure = Forall(i, fa_closure)
            if ex_closure in wset or fa_closure in wset:
                table.add(tuple(0 for _ in range(arity)))
        rels[rel] = frozenset(table)
    M = Structure(f"term[{state.base_name}]", state.signature, dom, rels)

    failures = []
    for psi in state.accepted:
        if code_formula(psi) > state.bound:
            continue
        try:
            if not mdl.evaluate(M, psi, {}):
                failures.append(f"W-sentence false in the term model: {psi!r}")
        except mdl.ModelError as e:
            failures.append(f"W-sentence not evaluable: {psi!r}: {e}")
    return M, TermModelReport(partial=state.truncated or bool(failures), failures=tuple(failures))


# ---------------------------------------------------------------------------
# From a model to a certificate


def interpretation_from_model(N: Structure, V: TheorySpec, coverage: Optional[int] = None) -> tuple[InterpretationCertificate, TheorySpec]:
    """Atomic-diagram host, translation into it, and diagram witnesses for
    every covered axiom; the result passes verify_certificate at notion sa."""
    axioms = V.finite_axioms()
    codes = [(code_formula(a), a) for a in axioms]
    if coverage is None:
        coverage = max((c for c, _ in codes), default=0)
    host = diagram.diagram_theory(N)
    k = diagram.diagram_translation(N)
    witnesses = {}
    for c, ax in sorted(codes):
        if c > coverage:
            continue
        if not mdl.evaluate(N, ax, {}):
            raise HenkinError(f"axiom false in {N.name}: {ax!r}")
        witnesses[c] = diagram.prove_in_diagram(N, ax)
    cert = InterpretationCertificate(
        name=f"{V.name}-via-{N.name}",
        translation=k,
        source_theory=V,
        target_theory=host,
        coverage_bound=coverage,
        witnesses=witnesses,
    )
    return cert, host


@dataclass
class PipelineResult:
    state: HenkinState
    model: Structure
    model_report: TermModelReport
    certificate: InterpretationCertificate
    host: TheorySpec


def run_pipeline(V: TheorySpec, bound: int, oracle_domain: Optional[int] = None) -> PipelineResult:
    """henkin_complete -> term_model -> interpretation_from_model, end to end."""
    state = henkin_complete(V, bound, oracle_domain=oracle_domain)
    M, report = term_model(state)
    if report.partial:
        raise HenkinError(f"term model failed verification: {report.failures[:3]}")
    cert, host = interpretation_from_model(M, V)
    return PipelineResult(state, M, report, cert, host)
