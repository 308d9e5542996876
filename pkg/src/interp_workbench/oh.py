"""The three-facet desk-scale comparison: interpretability certificate,
restricted-consistency probes, and theorem transport for the Pi1-shaped corpus.

The report juxtaposes what was certified at which bounds; none of the facets
claims the unbounded equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import henkin as hk
from . import nd
from .coding import code_formula
from .interpret import (
    CertificateReport,
    InterpretationCertificate,
    transport_theorem,
    translate_closure,
    verify_certificate,
)
from .nd import Proof
from .refute import Budget, Exhausted, search_refutation
from .syntax import Formula, FormulaClass, classify
from .theory import TheorySpec


class PipelineHalt(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def is_pi1_like(phi: Formula) -> bool:
    return classify(phi) in (
        FormulaClass.DELTA0,
        FormulaClass.PI1B,
        FormulaClass.ALL_PI1B,
        FormulaClass.PI1,
    )


@dataclass
class ConsistencyProbe:
    bound: int
    verdict: str  # exhausted | refuted
    rounds: int


@dataclass
class TransportEntry:
    sentence: str
    code: int
    ok: bool
    detail: str = ""


@dataclass
class OHReport:
    theory: str
    coverage_bound: int
    interpretability: Optional[CertificateReport]
    consistency: list[ConsistencyProbe]
    transport: list[TransportEntry]
    st_report: Optional[CertificateReport]

    @property
    def positive(self) -> bool:
        return (
            self.interpretability is not None
            and self.interpretability.certified
            and all(p.verdict == "exhausted" for p in self.consistency)
            and all(t.ok for t in self.transport)
        )


def pipeline_oh(
    V: TheorySpec,
    bound: int,
    oracle_domain: Optional[int] = None,
    budget: Budget = Budget(),
    v_proofs: Optional[Sequence[Proof]] = None,
    probe_margin: int = 1,
) -> OHReport:
    """Run the Henkin pipeline, probe restricted consistency, and transport the
    Pi1-shaped corpus conclusions along the certificate.

    Halts with PipelineHalt when a refutation is found or the model oracle
    refuses the base.
    """
    from .sexpr import print_formula

    codes = [code_formula(a) for a in V.finite_axioms()]
    probes: list[ConsistencyProbe] = []
    probe_bounds = sorted(set(codes))[: 4] if codes else [64]
    for n in probe_bounds:
        got = search_refutation(V, n, budget)
        if isinstance(got, Exhausted):
            probes.append(ConsistencyProbe(n, "exhausted", got.rounds))
        else:
            probes.append(ConsistencyProbe(n, "refuted", 0))
            return OHReport(V.name, bound, None, probes, [], None)

    try:
        result = hk.run_pipeline(V, bound, oracle_domain=oracle_domain)
    except hk.InconsistentBase as e:
        raise PipelineHalt("henkin", str(e))
    cert = result.certificate
    sa_report = verify_certificate(cert, "sa")

    if v_proofs is None:
        v_proofs = [nd.axiom(a) for a in V.finite_axioms()]
    transport: list[TransportEntry] = []
    pairs = []
    for p in v_proofs:
        concl = p.formula
        code = code_formula(concl)
        if not is_pi1_like(concl) or code > cert.coverage_bound:
            continue
        try:
            w = transport_theorem(cert, p)
            nd.check_closed(w, cert.target_theory)
            ok = w.formula == translate_closure(cert.translation, concl)
            pairs.append((p, w))
            transport.append(TransportEntry(print_formula(concl), code, ok))
        except Exception as e:  # noqa: BLE001 - report, do not crash the pipeline
            transport.append(TransportEntry(print_formula(concl), code, False, str(e)[:200]))

    st_report = None
    if pairs:
        st_cert = InterpretationCertificate(
            name=f"{cert.name}-st",
            translation=cert.translation,
            source_theory=V,
            target_theory=cert.target_theory,
            coverage_bound=cert.coverage_bound,
            witnesses=cert.witnesses,
            theorem_pairs=tuple(pairs),
        )
        st_report = verify_certificate(st_cert, "st")

    return OHReport(V.name, bound, sa_report, probes, transport, st_report)
