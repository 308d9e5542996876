"""Bounded refutation search: a desk-scale witness finder for restricted inconsistency.

The search saturates forward from the axioms of code <= n whose complexity
fits the bound, applying elimination rules under an increasing node-count cap
(iterative deepening over the saturation frontier, derived formulas memoized).
A returned proof concludes falsity and passes the restricted check; Exhausted
means no refutation within the budget and is explicitly not a consistency
verdict.  Completeness is not claimed: the fragment searched is the
propositional core (conjunction, disjunction, implication, negation) plus
clash detection, which is what the restricted-consistency fixtures need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import nd
from . import syntax as S
from .coding import code_formula
from .config import DEFAULT_CONFIG
from .nd import Proof
from .syntax import And, Atom, Bot, Formula, Imp, Not, Or, rho


@dataclass(frozen=True)
class Exhausted:
    """Search ended without a refutation at the stated budget."""

    max_nodes: int
    bound: int
    rounds: int

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Budget:
    max_nodes: int = DEFAULT_CONFIG.refute_max_nodes
    max_rounds: int = 32
    max_formulas: int = 4096


def search_refutation(theory, n: int, budget: Budget = Budget()) -> Union[Proof, Exhausted]:
    """Find a proof of falsity citing only axioms of code <= n with all
    formulas of complexity rho <= n, or report Exhausted.

    Deterministic for fixed inputs: candidates are processed in ascending code
    order and the smallest refutation found at the shallowest saturation round
    is returned.
    """
    axioms = theory.axioms_below(n)
    derived: dict[Formula, Proof] = {}
    order: list[Formula] = []

    def admit(phi: Formula, proof: Proof) -> Optional[Proof]:
        """Record phi; return a falsity proof when a clash or bottom appears."""
        if rho(phi) > n or nd.node_count(proof) > budget.max_nodes:
            return None
        if phi in derived:
            return None
        derived[phi] = proof
        order.append(phi)
        if isinstance(phi, Bot):
            return proof
        if isinstance(phi, Not) and phi.body in derived:
            return nd.not_e(derived[phi.body], proof)
        if Not(phi) in derived:
            return nd.not_e(proof, derived[Not(phi)])
        return None

    for code, ax in axioms:
        if rho(ax) > n:
            continue
        got = admit(ax, nd.axiom(ax, code))
        if got is not None:
            return _verified(got, theory, n)

    for round_ in range(budget.max_rounds):
        if len(derived) > budget.max_formulas:
            break
        frontier = list(order)
        new: list[tuple[Formula, Proof]] = []
        for phi in frontier:
            p = derived[phi]
            if isinstance(phi, And):
                new.append((phi.left, nd.and_e1(p)))
                new.append((phi.right, nd.and_e2(p)))
            elif isinstance(phi, Imp) and phi.left in derived:
                new.append((phi.right, nd.imp_e(p, derived[phi.left])))
            elif isinstance(phi, Or):
                refuted_left = Not(phi.left) in derived
                refuted_right = Not(phi.right) in derived
                if refuted_left and refuted_right:
                    l1, l2 = nd.next_label(), nd.next_label()
                    b1 = nd.not_e(nd.assume(phi.left, l1), derived[Not(phi.left)])
                    b2 = nd.not_e(nd.assume(phi.right, l2), derived[Not(phi.right)])
                    new.append((S.BOT, nd.or_e(p, l1, b1, l2, b2)))
                elif refuted_left:
                    l1, l2 = nd.next_label(), nd.next_label()
                    b1 = nd.bot_e(phi.right, nd.not_e(nd.assume(phi.left, l1), derived[Not(phi.left)]))
                    new.append((phi.right, nd.or_e(p, l1, b1, l2, nd.assume(phi.right, l2))))
                elif refuted_right:
                    l1, l2 = nd.next_label(), nd.next_label()
                    b2 = nd.bot_e(phi.left, nd.not_e(nd.assume(phi.right, l2), derived[Not(phi.right)]))
                    new.append((phi.left, nd.or_e(p, l1, nd.assume(phi.left, l1), l2, b2)))
        # antecedents that became available this round
        for phi in frontier:
            p = derived[phi]
            if isinstance(phi, Imp) and phi.left in derived and phi.right not in derived:
                new.append((phi.right, nd.imp_e(p, derived[phi.left])))
        new.sort(key=lambda pair: code_formula(pair[0]))
        progressed = False
        for phi, proof in new:
            before = len(order)
            got = admit(phi, proof)
            if got is not None:
                return _verified(got, theory, n)
            progressed = progressed or len(order) > before
        if not progressed:
            return Exhausted(budget.max_nodes, n, round_ + 1)
    return Exhausted(budget.max_nodes, n, budget.max_rounds)


def _verified(p: Proof, theory, n: int) -> Proof:
    # every returned refutation re-checks before leaving the module
    nd.check_proof(p, theory)
    if not nd.check_restricted(p, theory, n):
        raise nd.ProofError("internal: refutation violates its own restriction bound")
    return p
