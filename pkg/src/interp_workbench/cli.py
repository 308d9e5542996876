"""The interp-workbench command line: one process per command, JSON reports.

Exit codes: 0 on positive verdicts, 1 on negative verdicts, 2 on usage or
parse errors.  Reports carry the command, input names with hashes, a verdict
from the closed set, diagnostics and timing; with --json the report is the
only stdout output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import artifacts as art
from . import cuts as cuts_mod
from . import henkin as henkin_mod
from . import models as models_mod
from . import nd
from . import oh as oh_mod
from . import sexpr as sx
from . import syntax as S
from .coding import Alphabet, binlen, code_formula, decode, encode, numeral, numeral_length, smash
from .config import DEFAULT_CONFIG, WorkbenchConfig
from .interpret import translate_closure, translate_formula, translate_proof, verify_certificate
from .refute import Budget, Exhausted, search_refutation
from .theory import BASE_ARITH, TheorySpec, extend_theory

POSITIVE = {"certified", "found", "agreement"}
NEGATIVE = {"rejected", "none-found", "exhausted", "disagreement"}


@dataclass
class Report:
    command: str
    inputs: list = field(default_factory=list)
    verdict: str = "found"
    diagnostics: dict = field(default_factory=dict)
    timing_s: float = 0.0

    def exit_code(self) -> int:
        base = self.verdict.split("(")[0]
        if base in POSITIVE:
            return 0
        if base in NEGATIVE:
            return 1
        raise ValueError(f"verdict {self.verdict!r} outside the closed set")

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "inputs": self.inputs,
                "verdict": self.verdict,
                "diagnostics": self.diagnostics,
                "timing_s": round(self.timing_s, 3),
            },
            sort_keys=True,
            indent=1,
        )


class UsageError(Exception):
    pass


@dataclass
class Workspace:
    root: Path
    config: WorkbenchConfig

    @classmethod
    def open(cls, path: Optional[str]) -> "Workspace":
        root = Path(path or os.environ.get("WORKBENCH_HOME", "./wbhome"))
        root.mkdir(parents=True, exist_ok=True)
        cfg = DEFAULT_CONFIG
        cfg_file = root / "config.json"
        if cfg_file.exists():
            cfg = WorkbenchConfig.from_dict(json.loads(cfg_file.read_text()))
        return cls(root, cfg)

    def resolve(self, name: str) -> Path:
        p = Path(name)
        if p.exists():
            return p
        q = self.root / name
        if q.exists():
            return q
        raise UsageError(f"no such artifact: {name}")

    def out_path(self, name: str) -> Path:
        p = Path(name)
        if p.is_absolute() or p.parent != Path("."):
            p.parent.mkdir(parents=True, exist_ok=True)
            return p
        return self.root / name

    def lock(self):
        return _Lock(self.root / ".lock")


class _Lock:
    def __init__(self, path: Path):
        self.path = path

    def __enter__(self):
        try:
            self.fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise UsageError(f"workspace is locked by another run ({self.path})")
        return self

    def __exit__(self, *exc):
        os.close(self.fd)
        self.path.unlink(missing_ok=True)


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def _note_input(report: Report, name: str, content: str) -> None:
    report.inputs.append({"name": str(name), "sha256": _sha(content.encode())})


BUILTIN_THEORIES = {}


def _builtin_theories() -> dict:
    if not BUILTIN_THEORIES:
        from . import corpus

        BUILTIN_THEORIES["base-arith"] = BASE_ARITH
        BUILTIN_THEORIES["toy-logic"] = corpus.TOY_LOGIC
        cons, incons = corpus.henkin_fixtures()
        for T in cons + incons:
            BUILTIN_THEORIES[T.name] = T
        BUILTIN_THEORIES["p-and-not-p"] = corpus.refutation_fixture()
        BUILTIN_THEORIES["just-p"] = corpus.consistent_fixture()
    return BUILTIN_THEORIES


def load_theory(ws: Workspace, name: str, report: Report) -> TheorySpec:
    builtins = _builtin_theories()
    if name in builtins:
        _note_input(report, f"builtin:{name}", name)
        return builtins[name]
    path = ws.resolve(name)
    text = path.read_text()
    _note_input(report, path, text)
    return art.theory_of_text(text)


def load_translation(ws: Workspace, name: str, report: Report):
    from . import corpus

    if name == "std-embed":
        _note_input(report, "builtin:std-embed", name)
        return corpus.std_embedding()
    if name == "double-embed":
        _note_input(report, "builtin:double-embed", name)
        return corpus.doubling_embedding()
    path = ws.resolve(name)
    text = path.read_text()
    _note_input(report, path, text)
    return art.translation_of_text(text)


def load_proof(ws: Workspace, name: str, sig: S.Signature, report: Report):
    path = ws.resolve(name)
    text = path.read_text()
    _note_input(report, path, text)
    return art.proof_of_text(text, sig)


def load_structure(ws: Workspace, name: str, report: Report):
    path = ws.resolve(name)
    text = path.read_text()
    _note_input(report, path, text)
    return art.structure_of_text(text)


def load_alphabet(ws: Workspace, name: Optional[str], report: Report) -> Alphabet:
    if name is None:
        return Alphabet(tuple("ab"))
    path = ws.resolve(name)
    text = path.read_text()
    _note_input(report, path, text)
    symbols = [line.strip() for line in text.splitlines() if line.strip()]
    return Alphabet(tuple(symbols))


# ---------------------------------------------------------------------------
# Command handlers; each returns (verdict, diagnostics)


def cmd_code(ws: Workspace, args, report: Report):
    if args.sub == "encode":
        alphabet = load_alphabet(ws, args.alphabet, report)
        symbols = args.text.split() if args.split else list(args.text)
        return "found", {"code": str(encode(symbols, alphabet))}
    if args.sub == "decode":
        alphabet = load_alphabet(ws, args.alphabet, report)
        out = decode(int(args.code), alphabet)
        return "found", {"string": (" ".join(out) if args.split else "".join(out))}
    if args.sub == "numeral":
        n = int(args.n)
        t = numeral(n)
        return "found", {"term": sx.print_term(t), "length": numeral_length(n)}
    if args.sub == "smash":
        return "found", {
            "smash": str(smash(int(args.x), int(args.y), ws.config.bit_budget)),
            "len_x": binlen(int(args.x)),
        }
    raise UsageError(f"unknown code command {args.sub!r}")


def cmd_prove(ws: Workspace, args, report: Report):
    theory = load_theory(ws, args.theory, report)
    if args.sub == "check":
        proof = load_proof(ws, args.proof, theory.signature, report)
        try:
            concl = nd.check_proof(proof, theory)
        except nd.ProofError as e:
            return "rejected", {"error": str(e)}
        opens = {str(l): sx.print_formula(f) for l, f in nd.open_assumptions(proof).items()}
        return "certified", {"conclusion": sx.print_formula(concl), "open": opens}
    if args.sub == "check-restricted":
        proof = load_proof(ws, args.proof, theory.signature, report)
        try:
            nd.check_proof(proof, theory)
        except nd.ProofError as e:
            return "rejected", {"error": str(e)}
        viol = nd.restricted_violations(proof, theory, args.n)
        if viol:
            return "rejected", {
                "violations": [{"path": "/".join(map(str, p)), "why": w} for p, w in viol[:20]]
            }
        return "certified", {"n": args.n}
    if args.sub == "refute":
        budget = Budget(
            max_nodes=args.max_nodes or ws.config.refute_max_nodes,
            max_rounds=args.max_rounds or 32,
        )
        got = search_refutation(theory, args.n, budget)
        if isinstance(got, Exhausted):
            return "exhausted", {"n": args.n, "rounds": got.rounds, "max_nodes": got.max_nodes}
        out = {"nodes": nd.node_count(got)}
        if args.out:
            ws.out_path(args.out).write_text(art.proof_to_text(got))
            out["proof"] = str(ws.out_path(args.out))
        return "found", out
    raise UsageError(f"unknown prove command {args.sub!r}")


def cmd_interp(ws: Workspace, args, report: Report):
    if args.sub == "translate":
        k = load_translation(ws, args.translation, report)
        phi = sx.parse_formula(args.formula, k.source)
        out = translate_formula(k, phi) if args.plain else translate_closure(k, phi)
        return "found", {"formula": sx.print_formula(out)}
    if args.sub == "translate-proof":
        k = load_translation(ws, args.translation, report)
        proof = load_proof(ws, args.proof, k.source, report)
        support = None
        if args.support:
            support = load_proof(ws, args.support, k.target, report)
        translated = translate_proof(k, proof, support)
        diag = {"conclusion": sx.print_formula(translated.formula), "nodes": nd.node_count(translated)}
        if args.out:
            ws.out_path(args.out).write_text(art.proof_to_text(translated))
            diag["proof"] = str(ws.out_path(args.out))
        return "found", diag
    if args.sub == "verify":
        cert = art.load_certificate(ws.resolve(args.cert))
        _note_input(report, args.cert, cert.name)
        if args.x is not None:
            cert.coverage_bound = args.x
        rep = verify_certificate(cert, args.notion)
        diag = {
            "notion": rep.notion,
            "x": str(rep.coverage_bound),
            "y": (str(rep.witness_bound) if rep.witness_bound is not None else None),
            "covered": len(rep.covered_codes),
            "failures": list(rep.failures[:10]),
        }
        return ("certified" if rep.certified else "rejected"), diag
    raise UsageError(f"unknown interp command {args.sub!r}")


def _top_cut_spec():
    from .syntax import Var, eq

    J = eq(Var(0), Var(0))
    obls = cuts_mod.cut_obligations(J, BASE_ARITH)
    host = extend_theory(BASE_ARITH, obls, "base-arith+top-cut")
    return cuts_mod.CutSpec(J, host, {i: nd.axiom(o) for i, o in enumerate(obls, 1)})


def cmd_cut(ws: Workspace, args, report: Report):
    if args.sub == "obligations":
        J = sx.parse_formula(args.formula, S.ARITH)
        obls = cuts_mod.cut_obligations(J, BASE_ARITH)
        return "found", {f"clause{i}": sx.print_formula(o) for i, o in enumerate(obls, 1)}
    if args.sub == "membership":
        spec = _top_cut_spec()
        proof = cuts_mod.prove_cut_membership(spec, args.n)
        nd.check_closed(proof, spec.host)
        diag = {"n": args.n, "nodes": nd.node_count(proof)}
        if args.out:
            ws.out_path(args.out).write_text(art.proof_to_text(proof))
            diag["proof"] = str(ws.out_path(args.out))
        return "found", diag
    if args.sub == "pudlak":
        k = load_translation(ws, args.translation, report)
        if args.relative:
            I = sx.parse_formula(ws.resolve(args.relative).read_text(), k.source)
            arts = cuts_mod.build_pudlak_relative(k, I)
        else:
            arts = cuts_mod.build_pudlak(k)
        diag = {
            "goodsequence": sx.print_formula(arts.goodsequence),
            "h": sx.print_formula(arts.h),
            "jprime": sx.print_formula(arts.jprime),
        }
        if args.out_dir:
            d = ws.out_path(args.out_dir)
            d.mkdir(parents=True, exist_ok=True)
            for nm in ("goodsequence", "h", "jprime", "j"):
                (d / f"{nm}.sexp").write_text(sx.print_formula(getattr(arts, nm)) + "\n")
            diag = {"out": str(d)}
        return "found", diag
    if args.sub == "feferman":
        V = load_theory(ws, args.theory, report)
        budget = Budget(max_nodes=args.max_nodes or ws.config.refute_max_nodes)
        V2 = cuts_mod.feferman_restrict(V, budget)
        probe = args.probe_bound or max(
            (code_formula(a) for a in V.finite_axioms()), default=0
        )
        kept = [sx.print_formula(a) for _, a in V2.axioms_below(probe)]
        dropped = [
            sx.print_formula(a)
            for c, a in V.axioms_below(probe)
            if not V2.recognizer(a)
        ]
        return "found", {"name": V2.name, "kept": kept, "dropped": dropped}
    raise UsageError(f"unknown cut command {args.sub!r}")


def _parse_assignment(text: Optional[str]) -> dict[int, int]:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        k, v = part.split("=")
        out[int(k.strip().lstrip("x"))] = int(v)
    return out


def cmd_model(ws: Workspace, args, report: Report):
    if args.sub == "eval":
        M = load_structure(ws, args.structure, report)
        phi = sx.parse_formula(args.formula, M.signature)
        value = models_mod.evaluate(M, phi, _parse_assignment(args.assign))
        return ("agreement" if value else "disagreement"), {"value": value}
    if args.sub == "internal":
        M = load_structure(ws, args.structure, report)
        k = load_translation(ws, args.translation, report)
        try:
            N = models_mod.internal_model(M, k)
        except models_mod.InternalModelDiagnosis as e:
            return "rejected", {"diagnosis": str(e)}
        diag = {"domain": len(N.domain)}
        if args.out:
            ws.out_path(args.out).write_text(art.structure_to_text(N))
            diag["out"] = str(ws.out_path(args.out))
        return "found", diag
    if args.sub == "find":
        V = load_theory(ws, args.theory, report)
        got = models_mod.find_model(V, args.max_domain)
        if isinstance(got, models_mod.NoneFound):
            return "none-found", {"max_domain": args.max_domain}
        diag = {"domain": len(got.domain)}
        if args.out:
            ws.out_path(args.out).write_text(art.structure_to_text(got))
            diag["out"] = str(ws.out_path(args.out))
        return "found", diag
    raise UsageError(f"unknown model command {args.sub!r}")


def _resolve_bound(args) -> int:
    if getattr(args, "bound", None):
        return int(args.bound)
    return henkin_mod.bound_for_tokens(args.tokens or 8)


def cmd_henkin(ws: Workspace, args, report: Report):
    if args.sub == "run":
        V = load_theory(ws, args.theory, report)
        bound = _resolve_bound(args)
        state = henkin_mod.henkin_complete(
            V, bound, oracle_domain=args.oracle_domain or ws.config.oracle_domain
        )
        out = ws.out_path(args.out or f"{V.name}.henkin.json")
        out.write_text(art.henkin_state_to_text(state))
        verdict = "found" if not state.truncated else "exhausted"
        return verdict, {
            "state": str(out),
            "decided": len(state.accepted),
            "truncated": state.truncated,
        }
    if args.sub == "model":
        state = art.henkin_state_of_text(ws.resolve(args.state).read_text())
        _note_input(report, args.state, ws.resolve(args.state).read_text())
        M, rep = henkin_mod.term_model(state)
        diag = {"domain": len(M.domain), "partial": rep.partial, "failures": list(rep.failures[:5])}
        if args.out:
            ws.out_path(args.out).write_text(art.structure_to_text(M))
            diag["out"] = str(ws.out_path(args.out))
        return ("found" if not rep.partial else "rejected"), diag
    if args.sub == "certify":
        state = art.henkin_state_of_text(ws.resolve(args.state).read_text())
        _note_input(report, args.state, ws.resolve(args.state).read_text())
        M, rep = henkin_mod.term_model(state)
        if rep.partial:
            return "rejected", {"failures": list(rep.failures[:5])}
        cert, host = henkin_mod.interpretation_from_model(M, state.extension.base)
        result = verify_certificate(cert, "sa")
        diag = {"x": str(result.coverage_bound), "covered": len(result.covered_codes)}
        if args.out:
            art.save_certificate(cert, ws.out_path(args.out))
            diag["out"] = str(ws.out_path(args.out))
        return ("certified" if result.certified else "rejected"), diag
    raise UsageError(f"unknown henkin command {args.sub!r}")


def cmd_oh(ws: Workspace, args, report: Report):
    V = load_theory(ws, args.theory, report)
    bound = _resolve_bound(args)
    try:
        rep = oh_mod.pipeline_oh(
            V, bound, oracle_domain=args.oracle_domain or ws.config.oracle_domain
        )
    except oh_mod.PipelineHalt as e:
        return "rejected", {"halt": str(e)}
    diag = {
        "interpretability": (str(rep.interpretability) if rep.interpretability else None),
        "consistency": [
            {"bound": str(p.bound), "verdict": p.verdict} for p in rep.consistency
        ],
        "transport": [
            {"sentence": t.sentence, "ok": t.ok} for t in rep.transport
        ],
        "st": (str(rep.st_report) if rep.st_report else None),
    }
    return ("certified" if rep.positive else "rejected"), diag


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="interp-workbench")
    top.add_argument("--json", action="store_true", help="emit the report as JSON")
    top.add_argument("--workspace", help="workspace directory (default $WORKBENCH_HOME or ./wbhome)")
    top.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    areas = top.add_subparsers(dest="area", required=True)

    code = areas.add_parser("code").add_subparsers(dest="sub", required=True)
    p = code.add_parser("encode")
    p.add_argument("text")
    p.add_argument("--alphabet")
    p.add_argument("--split", action="store_true")
    p = code.add_parser("decode")
    p.add_argument("code")
    p.add_argument("--alphabet")
    p.add_argument("--split", action="store_true")
    p = code.add_parser("numeral")
    p.add_argument("n")
    p = code.add_parser("smash")
    p.add_argument("x")
    p.add_argument("y")

    prove = areas.add_parser("prove").add_subparsers(dest="sub", required=True)
    p = prove.add_parser("check")
    p.add_argument("proof")
    p.add_argument("--theory", required=True)
    p = prove.add_parser("check-restricted")
    p.add_argument("proof")
    p.add_argument("--theory", required=True)
    p.add_argument("--n", type=int, required=True)
    p = prove.add_parser("refute")
    p.add_argument("--theory", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-nodes", type=int)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--out")

    interp = areas.add_parser("interp").add_subparsers(dest="sub", required=True)
    p = interp.add_parser("translate")
    p.add_argument("--translation", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--plain", action="store_true", help="no free-variable closure")
    p = interp.add_parser("translate-proof")
    p.add_argument("--translation", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--support")
    p.add_argument("--out")
    p = interp.add_parser("verify")
    p.add_argument("--cert", required=True)
    p.add_argument("--notion", choices=("a", "t", "sa", "st"), default="sa")
    p.add_argument("--x", type=int)

    cut = areas.add_parser("cut").add_subparsers(dest="sub", required=True)
    p = cut.add_parser("obligations")
    p.add_argument("--formula", required=True)
    p = cut.add_parser("membership")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p = cut.add_parser("pudlak")
    p.add_argument("--translation", required=True)
    p.add_argument("--relative")
    p.add_argument("--out-dir")
    p = cut.add_parser("feferman")
    p.add_argument("--theory", required=True)
    p.add_argument("--max-nodes", type=int)
    p.add_argument("--probe-bound", type=int)

    model = areas.add_parser("model").add_subparsers(dest="sub", required=True)
    p = model.add_parser("eval")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--assign")
    p = model.add_parser("internal")
    p.add_argument("--structure", required=True)
    p.add_argument("--translation", required=True)
    p.add_argument("--out")
    p = model.add_parser("find")
    p.add_argument("--theory", required=True)
    p.add_argument("--max-domain", type=int, required=True)
    p.add_argument("--out")

    hen = areas.add_parser("henkin").add_subparsers(dest="sub", required=True)
    p = hen.add_parser("run")
    p.add_argument("--theory", required=True)
    p.add_argument("--bound")
    p.add_argument("--tokens", type=int)
    p.add_argument("--oracle-domain", type=int)
    p.add_argument("--out")
    p = hen.add_parser("model")
    p.add_argument("--state", required=True)
    p.add_argument("--out")
    p = hen.add_parser("certify")
    p.add_argument("--state", required=True)
    p.add_argument("--out")

    ohp = areas.add_parser("oh").add_subparsers(dest="sub", required=True)
    p = ohp.add_parser("pipeline")
    p.add_argument("--theory", required=True)
    p.add_argument("--bound")
    p.add_argument("--tokens", type=int)
    p.add_argument("--oracle-domain", type=int)

    return top


HANDLERS = {
    "code": cmd_code,
    "prove": cmd_prove,
    "interp": cmd_interp,
    "cut": cmd_cut,
    "model": cmd_model,
    "henkin": cmd_henkin,
    "oh": cmd_oh,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0,) else 0
    ws = Workspace.open(args.workspace)
    report = Report(command=" ".join([args.area, getattr(args, "sub", "")]).strip())
    t0 = time.time()
    try:
        with ws.lock():
            verdict, diagnostics = HANDLERS[args.area](ws, args, report)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (sx.ParseError, art.ArtifactError, S.SyntaxError_) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - surface the failure, keep the contract
        report.verdict = "rejected"
        report.diagnostics = {"error": f"{type(e).__name__}: {e}"}
        report.timing_s = time.time() - t0
        _emit(report, args)
        return 1
    report.verdict = verdict
    report.diagnostics = diagnostics
    report.timing_s = time.time() - t0
    _emit(report, args)
    return report.exit_code()


def _emit(report: Report, args) -> None:
    if getattr(args, "json", False):
        print(report.to_json())
        return
    print(f"[{report.verdict}] {report.command}")
    for key, value in report.diagnostics.items():
        text = json.dumps(value) if not isinstance(value, str) else value
        if len(text) > 400:
            text = text[:400] + "..."
        print(f"  {key}: {text}")


if __name__ == "__main__":
    sys.exit(main())
