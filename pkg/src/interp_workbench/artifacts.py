"""File formats: s-expressions for logic syntax, JSON for structures and states.

Logic objects (formulas, proofs, theories, translations) persist as
s-expressions; structures, reports and Henkin states persist as canonical JSON
(sorted keys, no timestamps) so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from . import models as mdl
from . import nd
from . import sexpr as sx
from . import syntax as S
from .henkin import HenkinState, OracleEntry, WitnessExtension, add_witnesses
from .interpret import InterpretationCertificate, Translation
from .nd import Proof
from .sexpr import ParseError, Sym
from .syntax import Formula, Signature, Term, Var
from .theory import TheorySpec, finite_theory


class ArtifactError(Exception):
    pass


# ---------------------------------------------------------------------------
# Signatures


def signature_to_sexpr(sig: Signature) -> list:
    out: list = ["signature", sig.name]
    for sym, ar in sig.relations:
        out.append(["rel", sym, str(ar)])
    for sym, ar in sig.functions:
        out.append(["fun", sym, str(ar)])
    if sig.identity != "=":
        out.append(["identity", sig.identity])
    if sig.order is not None:
        out.append(["order", sig.order])
    return out


def signature_of_sexpr(sexp) -> Signature:
    if not isinstance(sexp, list) or not sexp or _text(sexp[0]) != "signature":
        raise ArtifactError("expected a (signature ...) form")
    name = _text(sexp[1])
    rels, funs, ident, order = [], [], "=", None
    for item in sexp[2:]:
        head = _text(item[0])
        if head == "rel":
            rels.append((_text(item[1]), int(_text(item[2]))))
        elif head == "fun":
            funs.append((_text(item[1]), int(_text(item[2]))))
        elif head == "identity":
            ident = _text(item[1])
        elif head == "order":
            order = _text(item[1])
        else:
            raise ArtifactError(f"unknown signature clause {head!r}")
    return S.make_signature(name, rels, funs, ident, order)


def _text(tok) -> str:
    if isinstance(tok, Sym):
        return tok.text
    if isinstance(tok, str):
        return tok
    raise ArtifactError(f"expected a symbol, got {tok!r}")


# ---------------------------------------------------------------------------
# Theories (finite axiom lists only; schematic theories are built-in by name)


def theory_to_text(T: TheorySpec) -> str:
    axioms = T.finite_axioms()
    lines = [f"(theory {T.name}"]
    lines.append("  " + sx.print_sexpr(signature_to_sexpr(T.signature)))
    lines.append("  (axioms")
    for a in axioms:
        lines.append("    " + sx.print_formula(a))
    lines.append("  ))")
    return "\n".join(lines) + "\n"


def theory_of_text(text: str) -> TheorySpec:
    sexp = sx.read_one(text)
    if _text(sexp[0]) != "theory":
        raise ArtifactError("expected a (theory ...) form")
    name = _text(sexp[1])
    sig = signature_of_sexpr(sexp[2])
    axioms = []
    for item in sexp[3:]:
        if _text(item[0]) != "axioms":
            raise ArtifactError(f"unknown theory clause {_text(item[0])!r}")
        for f in item[1:]:
            axioms.append(sx.formula_of_sexpr(f, sig))
    return finite_theory(name, sig, axioms)


# ---------------------------------------------------------------------------
# Translations


def translation_to_text(k: Translation) -> str:
    lines = [f"(translation {k.name}"]
    lines.append("  (source " + sx.print_sexpr(signature_to_sexpr(k.source)) + ")")
    lines.append("  (target " + sx.print_sexpr(signature_to_sexpr(k.target)) + ")")
    lines.append("  (delta " + sx.print_formula(k.delta) + ")")
    for sym, f in k.rels:
        lines.append(f"  (rel {sym} " + sx.print_formula(f) + ")")
    lines.append(")")
    return "\n".join(lines) + "\n"


def translation_of_text(text: str) -> Translation:
    sexp = sx.read_one(text)
    if _text(sexp[0]) != "translation":
        raise ArtifactError("expected a (translation ...) form")
    name = _text(sexp[1])
    source = target = delta = None
    rels = []
    for item in sexp[2:]:
        head = _text(item[0])
        if head == "source":
            source = signature_of_sexpr(item[1])
        elif head == "target":
            target = signature_of_sexpr(item[1])
        elif head == "delta":
            if target is None:
                raise ArtifactError("(delta ...) must follow (target ...)")
            delta = sx.formula_of_sexpr(item[1], target)
        elif head == "rel":
            if target is None:
                raise ArtifactError("(rel ...) must follow (target ...)")
            rels.append((_text(item[1]), sx.formula_of_sexpr(item[2], target)))
        else:
            raise ArtifactError(f"unknown translation clause {head!r}")
    if source is None or target is None or delta is None:
        raise ArtifactError("translation needs source, target and delta")
    return Translation(name, source, target, delta, tuple(rels))


# ---------------------------------------------------------------------------
# Proofs


def proof_to_sexpr(p: Proof) -> list:
    f = lambda phi: sx.read_one(sx.print_formula(phi))
    t = lambda term: sx.read_one(sx.print_term(term))
    r = p.rule
    prem = [proof_to_sexpr(q) for q in p.premises]
    if r == "assume":
        return ["assume", str(p.params[0]), f(p.formula)]
    if r == "axiom":
        return ["axiom", str(p.params[0]), f(p.formula)]
    if r in ("and_i", "imp_e", "not_e"):
        return [r.replace("_", "-")] + prem
    if r in ("and_e1", "and_e2"):
        return [r.replace("_", "-")] + prem
    if r == "or_i1":
        return ["or-i1", f(p.params[0])] + prem
    if r == "or_i2":
        return ["or-i2", f(p.params[0])] + prem
    if r == "or_e":
        return ["or-e", str(p.params[0]), str(p.params[1])] + prem
    if r in ("imp_i", "not_i", "raa"):
        return [r.replace("_", "-"), str(p.params[0]), f(p.params[1])] + prem
    if r == "bot_e":
        return ["bot-e", f(p.params[0])] + prem
    if r == "forall_i":
        return ["forall-i", f"x{p.params[0]}"] + prem
    if r == "forall_e":
        return ["forall-e", t(p.params[0])] + prem
    if r == "exists_i":
        return ["exists-i", f(p.formula), t(p.params[0])] + prem
    if r in ("exists_e", "bex_e"):
        return [r.replace("_", "-"), f"x{p.params[0]}", str(p.params[1])] + prem
    if r == "refl":
        return ["refl", t(p.params[0])]
    if r == "eq_subst":
        return ["eq-subst", f(p.params[0]), f"x{p.params[1]}"] + prem
    if r == "ball_i":
        var, bound, strict, label = p.params
        return ["ball-i", f"x{var}", t(bound), "strict" if strict else "nonstrict", str(label)] + prem
    if r == "ball_e":
        return ["ball-e", t(p.params[0])] + prem
    if r == "bex_i":
        return ["bex-i", f(p.formula), t(p.params[0])] + prem
    raise ArtifactError(f"cannot serialize rule {r!r}")


def proof_to_text(p: Proof) -> str:
    return sx.print_sexpr(proof_to_sexpr(p)) + "\n"


def _var_idx(tok) -> int:
    text = _text(tok)
    if not text.startswith("x"):
        raise ArtifactError(f"expected a variable, got {text!r}")
    return int(text[1:])


def proof_of_sexpr(sexp, sig: Signature) -> Proof:
    head = _text(sexp[0])
    args = sexp[1:]
    f = lambda e: sx.formula_of_sexpr(e, sig)
    t = lambda e: sx.term_of_sexpr(e, sig)
    p = lambda e: proof_of_sexpr(e, sig)
    if head == "assume":
        return nd.assume(f(args[1]), int(_text(args[0])))
    if head == "axiom":
        return nd.axiom(f(args[1]), int(_text(args[0])))
    if head == "and-i":
        return nd.and_i(p(args[0]), p(args[1]))
    if head == "and-e1":
        return nd.and_e1(p(args[0]))
    if head == "and-e2":
        return nd.and_e2(p(args[0]))
    if head == "or-i1":
        return nd.or_i1(p(args[1]), f(args[0]))
    if head == "or-i2":
        return nd.or_i2(f(args[0]), p(args[1]))
    if head == "or-e":
        return nd.or_e(p(args[2]), int(_text(args[0])), p(args[3]), int(_text(args[1])), p(args[4]))
    if head == "imp-i":
        return nd.imp_i(int(_text(args[0])), f(args[1]), p(args[2]))
    if head == "imp-e":
        return nd.imp_e(p(args[0]), p(args[1]))
    if head == "not-i":
        return nd.not_i(int(_text(args[0])), f(args[1]), p(args[2]))
    if head == "not-e":
        return nd.not_e(p(args[0]), p(args[1]))
    if head == "bot-e":
        return nd.bot_e(f(args[0]), p(args[1]))
    if head == "raa":
        return nd.raa(int(_text(args[0])), f(args[1]), p(args[2]))
    if head == "forall-i":
        return nd.forall_i(_var_idx(args[0]), p(args[1]))
    if head == "forall-e":
        return nd.forall_e(t(args[0]), p(args[1]))
    if head == "exists-i":
        target = f(args[0])
        return nd.exists_i(target, t(args[1]), p(args[2]))
    if head == "exists-e":
        return nd.exists_e(_var_idx(args[0]), int(_text(args[1])), p(args[2]), p(args[3]))
    if head == "refl":
        return nd.refl(t(args[0]))
    if head == "eq-subst":
        return nd.eq_subst(f(args[0]), _var_idx(args[1]), p(args[2]), p(args[3]))
    if head == "ball-i":
        return nd.ball_i(
            _var_idx(args[0]), t(args[1]), _text(args[2]) == "strict", int(_text(args[3])), p(args[4])
        )
    if head == "ball-e":
        return nd.ball_e(t(args[0]), p(args[1]), p(args[2]))
    if head == "bex-i":
        target = f(args[0])
        return nd.bex_i(target, t(args[1]), p(args[2]), p(args[3]))
    if head == "bex-e":
        return nd.bex_e(_var_idx(args[0]), int(_text(args[1])), p(args[2]), p(args[3]))
    raise ArtifactError(f"unknown proof rule {head!r}")


def proof_of_text(text: str, sig: Signature) -> Proof:
    return proof_of_sexpr(sx.read_one(text), sig)


# ---------------------------------------------------------------------------
# Structures (JSON)


def structure_to_json(M: mdl.Structure) -> dict:
    return {
        "name": M.name,
        "signature": {
            "name": M.signature.name,
            "relations": [[s, a] for s, a in M.signature.relations],
            "functions": [[s, a] for s, a in M.signature.functions],
            "identity": M.signature.identity,
            "order": M.signature.order,
        },
        "domain": list(M.domain),
        "relations": {sym: sorted(map(list, tab)) for sym, tab in M.relations.items()},
        "functions": {
            sym: sorted([list(args) + [val] for args, val in tab.items()])
            for sym, tab in M.functions.items()
        },
    }


def structure_of_json(d: dict) -> mdl.Structure:
    sd = d["signature"]
    sig = S.make_signature(
        sd["name"],
        [tuple(x) for x in sd["relations"]],
        [tuple(x) for x in sd.get("functions", [])],
        sd.get("identity", "="),
        sd.get("order"),
    )
    rels = {sym: frozenset(tuple(t) for t in tab) for sym, tab in d["relations"].items()}
    funcs = {
        sym: {tuple(row[:-1]): row[-1] for row in tab}
        for sym, tab in d.get("functions", {}).items()
    }
    return mdl.Structure(d["name"], sig, tuple(d["domain"]), rels, funcs)


def dump_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def structure_to_text(M: mdl.Structure) -> str:
    return dump_json(structure_to_json(M))


def structure_of_text(text: str) -> mdl.Structure:
    return structure_of_json(json.loads(text))


# ---------------------------------------------------------------------------
# Henkin states (JSON; W as code list with sexprs, oracle transcript included)


def henkin_state_to_text(state: HenkinState) -> str:
    from .coding import code_formula

    return dump_json(
        {
            "base": state.base_name,
            "base_theory": theory_to_text(state.extension.base),
            "bound": str(state.bound),
            "oracle_domain": state.oracle_domain,
            "truncated": state.truncated,
            "signature": {
                "name": state.signature.name,
                "relations": [[s, a] for s, a in state.signature.relations],
            },
            "witnesses": {str(c): sym for c, sym in sorted(state.witness_map.items())},
            "W": [[str(code_formula(f)), sx.print_formula(f)] for f in state.accepted],
            "transcript": [
                {"code": str(e.code), "sentence": e.sentence, "verdict": e.verdict, "domain": e.domain}
                for e in state.transcript
            ],
        }
    )


def henkin_state_of_text(text: str) -> HenkinState:
    d = json.loads(text)
    base = theory_of_text(d["base_theory"])
    bound = int(d["bound"])
    ext = add_witnesses(base, bound)
    sig = ext.theory.signature
    accepted = tuple(sx.parse_formula(s, sig) for _, s in d["W"])
    transcript = tuple(
        OracleEntry(int(e["code"]), e["sentence"], e["verdict"], e["domain"])
        for e in d["transcript"]
    )
    return HenkinState(
        base_name=d["base"],
        signature=sig,
        bound=bound,
        oracle_domain=d["oracle_domain"],
        witness_map={int(c): sym for c, sym in d["witnesses"].items()},
        accepted=accepted,
        transcript=transcript,
        truncated=d["truncated"],
        extension=ext,
    )


# ---------------------------------------------------------------------------
# Certificate bundles (directory with manifest plus proof files)


def save_certificate(cert: InterpretationCertificate, directory: Union[str, Path]) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "translation.sexp").write_text(translation_to_text(cert.translation))
    (d / "source.sexp").write_text(theory_to_text(cert.source_theory))
    (d / "target.sexp").write_text(theory_to_text(cert.target_theory))
    manifest = {
        "name": cert.name,
        "coverage_bound": str(cert.coverage_bound),
        "witnesses": {},
    }
    for code, proof in sorted(cert.witnesses.items()):
        fname = f"witness-{code}.sexp"
        (d / fname).write_text(proof_to_text(proof))
        manifest["witnesses"][str(code)] = fname
    (d / "manifest.json").write_text(dump_json(manifest))


def load_certificate(directory: Union[str, Path]) -> InterpretationCertificate:
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text())
    translation = translation_of_text((d / "translation.sexp").read_text())
    source = theory_of_text((d / "source.sexp").read_text())
    target = theory_of_text((d / "target.sexp").read_text())
    witnesses = {}
    for code, fname in manifest["witnesses"].items():
        witnesses[int(code)] = proof_of_text((d / fname).read_text(), target.signature)
    return InterpretationCertificate(
        name=manifest["name"],
        translation=translation,
        source_theory=source,
        target_theory=target,
        coverage_bound=int(manifest["coverage_bound"]),
        witnesses=witnesses,
    )
