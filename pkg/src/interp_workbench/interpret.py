"""Translations between relational languages, formula and proof translation,
composition, identity normalization, and bounded interpretability certificates.

A translation is a pair of a domain specifier (one free variable, x0) and a
finite map from source relation symbols, identity included, to target formulas
whose free variables are exactly x0..x(arity-1).  Quantifiers relativize to the
domain specifier; falsity is a fixed point.

Proof translation works on proofs over purely relational sources with sentence
endpoints.  Internally every node is translated to its guarded closure (the
conjunction of domain guards over the free variables, smaller indices first,
implying the translated formula); variables that die at a rule are discharged
through the domain-nonemptiness sentence, which surfaces as one extra open
assumption unless a support proof is supplied.  Equality rules translate
homomorphically and therefore require an identity-preserving translation;
normalize_identity produces one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import nd
from . import syntax as S
from .config import DEFAULT_CONFIG
from .nd import Proof, ProofError, next_label
from .syntax import (
    And,
    Atom,
    BExists,
    BForall,
    Bot,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Signature,
    Term,
    Var,
    free_vars,
    rho,
    subst_many,
    substitute,
)


class InterpretError(Exception):
    pass


# ---------------------------------------------------------------------------
# Translations


@dataclass(frozen=True)
class Translation:
    """Domain specifier plus relation-symbol map.

    delta is a target formula with exactly x0 free; the formula for a k-ary
    source symbol has exactly x0..x(k-1) free.
    """

    name: str
    source: Signature
    target: Signature
    delta: Formula
    rels: tuple[tuple[str, Formula], ...]

    def __post_init__(self):
        S.check_formula(self.target, self.delta)
        if free_vars(self.delta) != frozenset({0}):
            raise InterpretError(f"domain specifier of {self.name} must have exactly x0 free")
        table = dict(self.rels)
        for sym, arity in self.source.relations:
            if sym not in table:
                raise InterpretError(f"translation {self.name} misses source symbol {sym!r}")
            body = table[sym]
            S.check_formula(self.target, body)
            if free_vars(body) != frozenset(range(arity)):
                raise InterpretError(
                    f"translation of {sym!r} must have exactly x0..x{arity - 1} free"
                )
        for sym in table:
            if not self.source.has_relation(sym):
                raise InterpretError(f"translation {self.name} maps unknown symbol {sym!r}")

    def relation(self, sym: str) -> Formula:
        for s, f in self.rels:
            if s == sym:
                return f
        raise InterpretError(f"translation {self.name} does not map {sym!r}")

    def relation_vars(self, sym: str) -> tuple[int, ...]:
        return tuple(range(self.source.rel_arity(sym)))

    @property
    def delta_var(self) -> int:
        return 0

    def delta_at(self, v: int) -> Formula:
        return substitute(self.delta, 0, Var(v))

    def maps_identity_to_identity(self) -> bool:
        return self.relation(self.source.identity) == Atom(
            self.target.identity, (Var(0), Var(1))
        )


def identity_translation(sig: Signature, name: str = "id") -> Translation:
    delta = S.eq(Var(0), Var(0))
    rels = tuple(
        (sym, Atom(sym, tuple(Var(i) for i in range(arity)))) for sym, arity in sig.relations
    )
    return Translation(name, sig, sig, delta, rels)


def support_sentence(k: Translation) -> Formula:
    """Domain nonemptiness: exists x delta(x)."""
    return Exists(0, k.delta)


# ---------------------------------------------------------------------------
# Formula translation


def translate_formula(k: Translation, phi: Formula) -> Formula:
    """Atoms via the symbol map, booleans homomorphic, quantifiers relativized."""
    if isinstance(phi, Atom):
        body = k.relation(phi.rel)
        return subst_many(body, dict(enumerate(phi.args)))
    if isinstance(phi, Bot):
        return phi
    if isinstance(phi, And):
        return And(translate_formula(k, phi.left), translate_formula(k, phi.right))
    if isinstance(phi, Or):
        return Or(translate_formula(k, phi.left), translate_formula(k, phi.right))
    if isinstance(phi, Imp):
        return Imp(translate_formula(k, phi.left), translate_formula(k, phi.right))
    if isinstance(phi, Not):
        return Not(translate_formula(k, phi.body))
    if isinstance(phi, Forall):
        return Forall(phi.var, Imp(k.delta_at(phi.var), translate_formula(k, phi.body)))
    if isinstance(phi, Exists):
        return Exists(phi.var, And(k.delta_at(phi.var), translate_formula(k, phi.body)))
    if isinstance(phi, (BForall, BExists)):
        # bounded quantifiers over a relational source are sugar for guarded
        # quantifiers; the order guard goes through the symbol map like any atom
        if k.source.order is None:
            raise InterpretError("bounded quantifier over an orderless source")
        if not isinstance(phi.bound, Var):
            raise InterpretError("relational sources bound quantifiers by variables only")
        # the guard is le(x,t) or And(le(x,t), Not(eq(x,t))); it goes through
        # the symbol map atom by atom
        guard = nd.guard_formula(Var(phi.var), phi.bound, phi.strict)
        g = _translate_guard(k, guard)
        if isinstance(phi, BForall):
            return Forall(
                phi.var, Imp(k.delta_at(phi.var), Imp(g, translate_formula(k, phi.body)))
            )
        return Exists(phi.var, And(k.delta_at(phi.var), And(g, translate_formula(k, phi.body))))
    raise InterpretError(f"not a formula: {phi!r}")


def _translate_guard(k: Translation, guard: Formula) -> Formula:
    if isinstance(guard, Atom):
        return translate_formula(k, guard)
    if isinstance(guard, And) and isinstance(guard.right, Not):
        return And(translate_formula(k, guard.left), Not(translate_formula(k, guard.right.body)))
    raise InterpretError("unexpected bound-guard shape")


def guard_conjunction(k: Translation, vars_: Sequence[int]) -> Formula:
    """delta guards over the given variables, smaller indices first."""
    return S.conj([k.delta_at(v) for v in sorted(vars_)])


def translate_closure(k: Translation, phi: Formula) -> Formula:
    """The guarded closure: delta-guards over the free variables imply phi^k.

    Coincides with the plain translation on sentences.
    """
    fv = sorted(free_vars(phi))
    body = translate_formula(k, phi)
    if not fv:
        return body
    return Imp(guard_conjunction(k, fv), body)


# ---------------------------------------------------------------------------
# Size bound f(n, k) of the structure-preserving proof translation


def translation_rho(k: Translation) -> int:
    return max([rho(k.delta)] + [rho(f) for _, f in k.rels])


def size_bound(n: int, k: Translation, c0: Optional[int] = None) -> int:
    """Monotone bound on axiom codes and rho values of translated n-proofs.

    The concrete polynomial is c0*(n + rho(delta) + max rho(F(R)) + 1)^2 with
    the fitted constant from the workbench config.
    """
    if c0 is None:
        c0 = DEFAULT_CONFIG.size_bound_c0
    return c0 * (n + rho(k.delta) + translation_rho(k) + 1) ** 2


# ---------------------------------------------------------------------------
# Composition and identity normalization


def compose(j: Translation, k: Translation, name: Optional[str] = None) -> Translation:
    """The translation doing k first, then j; defined when j's source is k's target."""
    if j.source != k.target:
        raise InterpretError(
            f"cannot compose: {j.name} translates from {j.source.name}, {k.name} lands in {k.target.name}"
        )
    delta = And(j.delta, translate_formula(j, k.delta))
    rels = tuple((sym, translate_formula(j, f)) for sym, f in k.rels)
    return Translation(name or f"{j.name}o{k.name}", k.source, j.target, delta, rels)


def normalize_identity(j: Translation, name: Optional[str] = None) -> Translation:
    """Narrow the domain to order-least representatives and map identity to identity.

    delta'(x) = delta(x) and forall y<x (delta(y) -> not y =^j x).  Soundness
    needs a least-number principle in the target; that side condition is
    recorded, not checked.
    """
    if j.target.order is None:
        raise InterpretError(f"target {j.target.name} has no order symbol")
    jeq = j.relation(j.source.identity)
    y = 1
    clause = BForall(
        y,
        Var(0),
        True,
        Imp(j.delta_at(y), Not(subst_many(jeq, {0: Var(y), 1: Var(0)}))),
    )
    delta2 = And(j.delta, clause)
    rels = tuple(
        (sym, Atom(j.target.identity, (Var(0), Var(1))) if sym == j.source.identity else f)
        for sym, f in j.rels
    )
    return Translation(name or f"{j.name}'", j.source, j.target, delta2, rels)


# ---------------------------------------------------------------------------
# Proof translation


@dataclass
class TranslatedProof:
    proof: Proof
    # assumption leaves standing for cited source axioms: label, code, source
    # axiom, and its translation
    axiom_assumptions: tuple[tuple[int, int, Formula, Formula], ...]
    # label and sentence of the domain-nonemptiness assumption, when used
    support_label: Optional[int]
    support_sentence: Formula


def translate_proof(k: Translation, p: Proof, support: Optional[Proof] = None) -> Proof:
    """Translate a checked proof with sentence endpoints; see TranslatedProof.

    When the domain-nonemptiness premise is needed and a support proof of
    (exists x delta(x)) is given, it is grafted in; otherwise the premise stays
    as one open assumption.
    """
    rec = translate_proof_record(k, p)
    out = rec.proof
    if support is not None and rec.support_label is not None:
        if support.formula != rec.support_sentence:
            raise InterpretError(
                f"support proof concludes {support.formula!r}, wanted {rec.support_sentence!r}"
            )
        out = nd.graft(out, {(rec.support_label, rec.support_sentence): support})
    return out


def translate_proof_record(k: Translation, p: Proof) -> TranslatedProof:
    opens_src = nd.open_assumptions(p)
    if free_vars(p.formula):
        raise InterpretError("proof translation needs a sentence conclusion")
    for phi in opens_src.values():
        if free_vars(phi):
            raise InterpretError("proof translation needs sentence assumptions")

    ident_ok = k.maps_identity_to_identity()
    support_label: list[Optional[int]] = [None]
    support_sent = support_sentence(k)
    axiom_leaves: list[tuple[int, int, Formula, Formula]] = []

    def support_assumption() -> Proof:
        if support_label[0] is None:
            support_label[0] = next_label()
        return nd.assume(support_sent, support_label[0])

    def closure(gamma: Formula) -> Formula:
        return translate_closure(k, gamma)

    def adapter(gamma: Formula, proof_of_body: Proof) -> Proof:
        """Build the guarded closure of gamma from a proof of gamma^k (weakening)."""
        fv = sorted(free_vars(gamma))
        if not fv:
            return proof_of_body
        return nd.imp_i(next_label(), guard_conjunction(k, fv), proof_of_body)

    def split_guard(g: Proof, ws: tuple[int, ...]) -> dict[int, Proof]:
        out: dict[int, Proof] = {}
        cur = g
        for i, w in enumerate(ws):
            if i == len(ws) - 1:
                out[w] = cur
            else:
                out[w] = nd.and_e1(cur)
                cur = nd.and_e2(cur)
        return out

    def build_conj(D: dict[int, Proof], ws: tuple[int, ...]) -> Proof:
        cur = D[ws[-1]]
        for w in reversed(ws[:-1]):
            cur = nd.and_i(D[w], cur)
        return cur

    def use(sub: tuple[Proof, tuple[int, ...]], D: dict[int, Proof]) -> Proof:
        t, ws = sub
        if not ws:
            return t
        return nd.imp_e(t, build_conj(D, ws))

    def go(node: Proof) -> tuple[Proof, tuple[int, ...], dict[int, Formula]]:
        """Returns (translated proof, its guard variables, source opens)."""
        rule = node.rule

        if rule == "assume":
            label = node.params[0]
            opens = {label: node.formula}
            ws = tuple(sorted(free_vars(node.formula)))
            return nd.assume(closure(node.formula), label), ws, opens
        if rule == "axiom":
            if free_vars(node.formula):
                raise InterpretError("cited axiom is not a sentence")
            label = next_label()
            translated = translate_formula(k, node.formula)
            axiom_leaves.append((label, node.params[0], node.formula, translated))
            return nd.assume(translated, label), (), {}

        subs = [go(q) for q in node.premises]
        opens: dict[int, Formula] = {}
        for _, _, o in subs:
            opens.update(o)
        for label in nd._discharged_labels(node):
            opens.pop(label, None)

        fvs = set(free_vars(node.formula))
        for gamma in opens.values():
            fvs |= free_vars(gamma)
        W = tuple(sorted(fvs))

        special = _special_vars(node)
        guard_label = next_label()
        D: dict[int, Proof] = {}
        if W:
            g = nd.assume(guard_conjunction(k, W), guard_label)
            D = split_guard(g, W)
        orphans: list[tuple[int, int]] = []
        for _, ws, _ in subs:
            for v in ws:
                if v not in D and v not in special:
                    lab = next_label()
                    D[v] = nd.assume(k.delta_at(v), lab)
                    orphans.append((v, lab))

        core = _translate_rule(k, node, subs, D, use, adapter, ident_ok)

        for v, lab in reversed(orphans):
            core = nd.exists_e(v, lab, support_assumption(), core)
        if W:
            core = nd.imp_i(guard_label, guard_conjunction(k, W), core)
        return core, W, opens

    out, ws, _ = go(p)
    assert not ws
    return TranslatedProof(out, tuple(axiom_leaves), support_label[0], support_sent)


def _special_vars(node: Proof) -> frozenset[int]:
    if node.rule == "forall_i":
        return frozenset({node.params[0]})
    if node.rule == "exists_e":
        return frozenset({node.params[0]})
    return frozenset()


def _translate_rule(k, node, subs, D, use, adapter, ident_ok) -> Proof:
    rule = node.rule
    tf = lambda phi: translate_formula(k, phi)

    if rule == "and_i":
        return nd.and_i(use(subs[0][:2], D), use(subs[1][:2], D))
    if rule == "and_e1":
        return nd.and_e1(use(subs[0][:2], D))
    if rule == "and_e2":
        return nd.and_e2(use(subs[0][:2], D))
    if rule == "or_i1":
        return nd.or_i1(use(subs[0][:2], D), tf(node.params[0]))
    if rule == "or_i2":
        return nd.or_i2(tf(node.params[0]), use(subs[0][:2], D))
    if rule == "or_e":
        l1, l2 = node.params
        major = node.premises[0].formula
        left, right = major.left, major.right
        b0 = use(subs[0][:2], D)
        g1 = nd.graft(
            subs[1][0],
            {(l1, translate_closure(k, left)): adapter(left, nd.assume(tf(left), l1))},
            fresh_labels=False,
        )
        g2 = nd.graft(
            subs[2][0],
            {(l2, translate_closure(k, right)): adapter(right, nd.assume(tf(right), l2))},
            fresh_labels=False,
        )
        return nd.or_e(b0, l1, use((g1, subs[1][1]), D), l2, use((g2, subs[2][1]), D))
    if rule == "imp_i":
        label, ante = node.params
        g = nd.graft(
            subs[0][0],
            {(label, translate_closure(k, ante)): adapter(ante, nd.assume(tf(ante), label))},
            fresh_labels=False,
        )
        return nd.imp_i(label, tf(ante), use((g, subs[0][1]), D))
    if rule == "imp_e":
        return nd.imp_e(use(subs[0][:2], D), use(subs[1][:2], D))
    if rule == "not_i":
        label, phi = node.params
        g = nd.graft(
            subs[0][0],
            {(label, translate_closure(k, phi)): adapter(phi, nd.assume(tf(phi), label))},
            fresh_labels=False,
        )
        return nd.not_i(label, tf(phi), use((g, subs[0][1]), D))
    if rule == "not_e":
        return nd.not_e(use(subs[0][:2], D), use(subs[1][:2], D))
    if rule == "bot_e":
        return nd.bot_e(tf(node.params[0]), use(subs[0][:2], D))
    if rule == "raa":
        label, phi = node.params
        negk = Not(tf(phi))
        g = nd.graft(
            subs[0][0],
            {(label, translate_closure(k, Not(phi))): adapter(Not(phi), nd.assume(negk, label))},
            fresh_labels=False,
        )
        return nd.raa(label, tf(phi), use((g, subs[0][1]), D))
    if rule == "forall_i":
        (var,) = node.params
        lab = next_label()
        D2 = dict(D)
        D2[var] = nd.assume(k.delta_at(var), lab)
        body = use(subs[0][:2], D2)
        return nd.forall_i(var, nd.imp_i(lab, k.delta_at(var), body))
    if rule == "forall_e":
        (t,) = node.params
        if not isinstance(t, Var):
            raise InterpretError("proof translation needs a purely relational source (variable terms)")
        s1 = nd.forall_e(t, use(subs[0][:2], D))
        if t.index not in D:
            raise InterpretError(f"instantiation variable x{t.index} has no guard in scope")
        return nd.imp_e(s1, D[t.index])
    if rule == "exists_i":
        (t,) = node.params
        if not isinstance(t, Var):
            raise InterpretError("proof translation needs a purely relational source (variable terms)")
        if t.index not in D:
            raise InterpretError(f"witness variable x{t.index} has no guard in scope")
        pair = nd.and_i(D[t.index], use(subs[0][:2], D))
        return nd.exists_i(tf(node.formula), t, pair)
    if rule == "exists_e":
        eigen, label = node.params
        major = node.premises[0].formula
        if any(eigen in free_vars(g) for g in _opens_of(node)):
            raise InterpretError(
                f"eigenvariable x{eigen} also occurs free in an assumption open at the node; "
                "rename it apart before translating"
            )
        b0 = use(subs[0][:2], D)
        tgt = b0.formula  # Exists(v, And(delta, body^k))
        lab2 = next_label()
        inst = substitute(tgt.body, tgt.var, Var(eigen))
        A = nd.assume(inst, lab2)
        d_e = nd.and_e1(A)
        body_pf = nd.and_e2(A)
        gamma = substitute(major.body, major.var, Var(eigen))
        g = nd.graft(
            subs[1][0],
            {(label, translate_closure(k, gamma)): adapter(gamma, body_pf)},
            fresh_labels=False,
        )
        D2 = dict(D)
        D2[eigen] = d_e
        minor = use((g, subs[1][1]), D2)
        return nd.exists_e(eigen, lab2, b0, minor)
    if rule == "refl":
        (t,) = node.params
        if not ident_ok:
            raise InterpretError(
                "equality rules translate only under identity-preserving translations; "
                "apply normalize_identity first"
            )
        if not isinstance(t, Var):
            raise InterpretError("proof translation needs a purely relational source (variable terms)")
        return nd.refl(t)
    if rule == "eq_subst":
        template, var = node.params
        if not ident_ok:
            raise InterpretError(
                "equality rules translate only under identity-preserving translations; "
                "apply normalize_identity first"
            )
        return nd.eq_subst(tf(template), var, use(subs[0][:2], D), use(subs[1][:2], D))
    if rule in ("ball_i", "ball_e", "bex_i", "bex_e"):
        raise InterpretError("bounded-quantifier rules are not part of the relational fragment")
    raise InterpretError(f"untranslatable rule {rule!r}")


def _opens_of(node: Proof) -> list[Formula]:
    return list(nd.open_assumptions(node).values())


# ---------------------------------------------------------------------------
# Certificates for the bounded interpretability notions


@dataclass
class InterpretationCertificate:
    """Witness bundle for the bounded reading of the interpretability notions.

    witnesses maps covered source-axiom codes to closed target proofs of the
    axiom's translated closure; theorem_pairs carries (source proof, target
    witness) pairs for the theorems notions.
    """

    name: str
    translation: Translation
    source_theory: object  # TheorySpec
    target_theory: object  # TheorySpec
    coverage_bound: int
    witnesses: dict[int, Proof] = field(default_factory=dict)
    theorem_pairs: tuple[tuple[Proof, Proof], ...] = ()


@dataclass
class CertificateReport:
    notion: str
    certified: bool
    coverage_bound: int
    witness_bound: Optional[int]
    covered_codes: tuple[int, ...]
    failures: tuple[str, ...]

    def __str__(self):
        verdict = "certified" if self.certified else "rejected"
        y = f", y={self.witness_bound}" if self.witness_bound is not None else ""
        return (
            f"[{verdict}] notion={self.notion} x={self.coverage_bound}{y} "
            f"covered={len(self.covered_codes)} failures={len(self.failures)}"
        )


def support_for_reflexive_delta(k: Translation) -> Optional[Proof]:
    """A closed pure-logic proof of (exists x delta(x)) when delta is x = x."""
    if k.delta != S.eq(Var(0), Var(0)):
        return None
    return nd.exists_i(support_sentence(k), Var(0), nd.refl(Var(0)))


def transport_theorem(
    cert: InterpretationCertificate, v_proof: Proof, support: Optional[Proof] = None
) -> Proof:
    """Target witness for a source theorem: translate the proof and substitute
    the certificate's axiom witnesses for the translated axiom leaves.

    This is the smooth-axioms-to-smooth-theorems construction: the result is a
    closed target proof of the translated conclusion whose size is governed by
    the witness bound.
    """
    k = cert.translation
    rec = translate_proof_record(k, v_proof)
    grafts: dict[tuple[int, Formula], Proof] = {}
    for label, code, _src, translated in rec.axiom_assumptions:
        if code not in cert.witnesses:
            raise InterpretError(f"certificate covers no axiom of code {code}")
        grafts[(label, translated)] = cert.witnesses[code]
    if rec.support_label is not None:
        sp = support or support_for_reflexive_delta(k)
        if sp is None:
            raise InterpretError("translated proof needs a domain-nonemptiness support proof")
        if sp.formula != rec.support_sentence:
            raise InterpretError(f"support proof concludes {sp.formula!r}")
        grafts[(rec.support_label, rec.support_sentence)] = sp
    return nd.graft(rec.proof, grafts)


NOTIONS = ("a", "t", "sa", "st")


def verify_certificate(cert: InterpretationCertificate, notion: str) -> CertificateReport:
    """Check the certificate at its stated bounds.

    Axiom notions (a, sa): every source axiom of code <= x must have a checking
    witness concluding its translated closure; sa additionally reports the
    maximal witness code y.  Theorems notions (t, st): every supplied source
    proof must pair with a target witness of the translated conclusion.  The
    report speaks only about the probed bounds, never the unbounded statement.
    """
    from .coding import code_syntax

    if notion not in NOTIONS:
        raise InterpretError(f"unknown notion {notion!r}; pick one of {NOTIONS}")
    k = cert.translation
    failures: list[str] = []
    covered: list[int] = []
    witness_codes: list[int] = []

    def check_witness(w: Proof, expect: Formula, what: str) -> None:
        try:
            nd.check_closed(w, cert.target_theory)
        except ProofError as e:
            failures.append(f"{what}: witness fails to check: {e}")
            return
        if w.formula != expect:
            failures.append(f"{what}: witness concludes {w.formula!r}, wanted {expect!r}")
            return
        witness_codes.append(code_syntax(w))

    if notion in ("a", "sa"):
        for code, ax in cert.source_theory.axioms_below(cert.coverage_bound):
            if code not in cert.witnesses:
                failures.append(f"axiom code {code} below the bound has no witness")
                continue
            check_witness(cert.witnesses[code], translate_closure(k, ax), f"axiom {code}")
            covered.append(code)
    else:
        for i, (pv, pu) in enumerate(cert.theorem_pairs):
            try:
                nd.check_closed(pv, cert.source_theory)
            except ProofError as e:
                failures.append(f"pair {i}: source proof fails to check: {e}")
                continue
            check_witness(pu, translate_closure(k, pv.formula), f"pair {i}")
            covered.append(code_syntax(pv))

    smooth = notion in ("sa", "st")
    return CertificateReport(
        notion=notion,
        certified=not failures,
        coverage_bound=cert.coverage_bound,
        witness_bound=(max(witness_codes) if smooth and witness_codes else None),
        covered_codes=tuple(sorted(covered)),
        failures=tuple(failures),
    )
