"""
Command-line front end of the recollement toolkit
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import structlog
from pydantic import ValidationError

# Add current directory to path for imports
sys.path.append(str(Path(__file__).parent))

from algebra import Algebra
from config import Settings, load_settings
from errors import (
    EmptyVertexSet,
    Inconclusive,
    NonAdmissible,
    RecollementToolkitError,
    RelationEndpointMismatch,
    SpecFileError,
    UnknownVertex,
)
from golden import run_golden_suite
from itcert import ITCertificate, corollary41_pipeline, default_panel, select_oracle
from modcat import ExceedsCap, Module, decompose, is_iso, is_projective, pd, projective, regular, simple, syzygy_n
from models import Caps, Report, StrategyChoice
from recollement import axiom_suite, build, exactness_report, four_term
from specio import SpecValidator, load_algebra, load_module, parse_panel

logger = logging.getLogger(__name__)
log = structlog.get_logger("cli")

INPUT_ERRORS = (SpecFileError, RelationEndpointMismatch, NonAdmissible, UnknownVertex, EmptyVertexSet)


def setup_logging(settings: Settings) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def parse_caps(text: Optional[str], base: Caps) -> Caps:
    if not text:
        return base
    try:
        overrides = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFileError("--caps", f"not JSON: {e.msg}")
    if not isinstance(overrides, dict):
        raise SpecFileError("--caps", "expected a JSON object")
    try:
        return Caps(**{**base.model_dump(), **overrides})
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecFileError("--caps." + ".".join(str(x) for x in first["loc"]), first["msg"])


def parse_verts(a: Algebra, text: Optional[str]) -> List[str]:
    verts = SpecValidator.parse_vertex_list(text or "")
    issues = SpecValidator.validate_vertex_set(a, verts)
    if issues:
        raise SpecFileError("--idem", issues[0])
    return verts


def _name(s: Module, seed: int) -> str:
    """S(v) or P(v) when the summand is a simple or an indecomposable projective"""
    a = s.algebra
    for v in a.vertices:
        if s.dim == 1 and is_iso(s, simple(a, v), seed):
            return f"S({v})"
        if is_projective(s) and is_iso(s, projective(a, v), seed):
            return f"P({v})"
    return f"M[{s.dim}]"


# Commands

def cmd_algebra_info(spec: str, report: Report) -> Report:
    a = load_algebra(spec, report.prime)
    report.results.update({
        "dim": a.dim,
        "vertices": list(a.vertices),
        "basis_labels": list(a.basis_labels),
        "radical_dim": int(a.radical_basis.shape[0]),
        "generators": [{"name": g.name, "source": g.source, "target": g.target} for g in a.generators],
        "provenance": a.provenance.value,
    })
    for name, ok in sorted(a.check_invariants().items()):
        report.add_check(f"invariant {name}", ok)
    return report


def cmd_resolve(spec: str, module: str, steps: int, report: Report) -> Report:
    a = load_algebra(spec, report.prime)
    m = load_module(module, a)
    seed, caps = report.seed, report.caps
    tower = [syzygy_n(m, k) for k in range(steps + 1)]
    decompositions = []
    for step in tower:
        parts = decompose(step, seed, caps.decompose_trials) if step.dim else []
        decompositions.append(sorted(
            ({"summand": _name(s, seed), "dim": s.dim, "multiplicity": k} for s, k in parts),
            key=lambda d: (d["summand"], d["dim"]),
        ))
    value = pd(m, caps.pd_cap)
    report.results.update({
        "module_dim": m.dim,
        "tower_dims": [x.dim for x in tower],
        "decompositions": decompositions,
        "pd": str(value),
    })
    if isinstance(value, ExceedsCap):
        report.add_check("projective dimension", None, str(value))
        report.warn(f"Inconclusive: {value}")
    else:
        report.add_check("projective dimension", True, f"pd {value}")
    return report


def cmd_recollement(spec: str, idem: Optional[str], report: Report) -> Report:
    a = load_algebra(spec, report.prime)
    verts = parse_verts(a, idem)
    seed, caps = report.seed, report.caps
    r = build(a, verts)
    exactness = exactness_report(r, seed, caps.probe_count)
    panel = {"regular": regular(a), **{f"S({v})": simple(a, v) for v in a.vertices}}
    report.results.update({
        "verts": verts,
        "dims": {
            "algebra": a.dim,
            "corner": r.corner_algebra.dim,
            "quotient": r.quotient_algebra.dim,
            "ideal": int(r.ideal.shape[0]),
            "eA": int(r.e_lambda_rows.shape[0]),
        },
        "degenerate": r.degenerate,
        "exactness": exactness.as_dict(),
        "four_term": {name: four_term(r, b).dims for name, b in panel.items()},
    })
    for name, ok in sorted(axiom_suite(r, seed, caps.probe_count).items()):
        report.add_check(f"axiom {name}", ok)
    for w in exactness.warnings:
        report.warn(w)
    return report


def cmd_itcert(spec: str, idem: Optional[str], strategy: str, panel_text: Optional[str], report: Report) -> Report:
    a = load_algebra(spec, report.prime)
    seed, caps = report.seed, report.caps
    choice = StrategyChoice(strategy)
    panel = parse_panel(panel_text, a, caps, seed)
    if idem:
        outcome = corollary41_pipeline(a, parse_verts(a, idem), panel, caps, seed, choice)
        outcome.fill_report(report)
        return report

    panel = panel if panel is not None else default_panel(a, caps, seed)
    try:
        oracle = select_oracle(a, choice, caps, seed, panel)
    except Inconclusive as exc:
        report.add_check("oracle", None, str(exc))
        report.warn(f"Inconclusive: {exc}")
        return report
    chains = [oracle.resolve(x) for x in panel]
    cert = ITCertificate.assemble(a, oracle.pieces, oracle.n, panel, chains, oracle.strategy.value, seed, oracle.m)
    report.results.update({
        "oracle": oracle.describe(),
        "certificate": cert.summary().model_dump(mode="json"),
        "kind": cert.kind,
        "it_interval": [0, cert.m],
    })
    report.add_check(f"{cert.kind} certificate ({cert.m}, {cert.n})", cert.verify())
    return report


def cmd_verify_paper_example(data_dir: Optional[str], report: Report) -> Report:
    return run_golden_suite(report, Path(data_dir) if data_dir else None, report.seed, report.caps)


# Entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recoll", description="Recollements and Igusa-Todorov certificates")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed of every randomised step")
    common.add_argument("--caps", default=None, help="JSON object overriding caps")
    common.add_argument("--json", dest="json_out", default=None, help="Write the report to this path")
    common.add_argument("--log-level", default=None, help="Logging level")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("algebra-info", parents=[common], help="Dimensions, basis and invariants of an algebra")
    p.add_argument("spec")

    p = sub.add_parser("resolve", parents=[common], help="Syzygy tower of a module")
    p.add_argument("spec")
    p.add_argument("module")
    p.add_argument("--steps", type=int, default=3)

    p = sub.add_parser("recollement", parents=[common], help="Recollement at an idempotent")
    p.add_argument("spec")
    p.add_argument("--idem", required=True, help="Comma-separated vertices of e")

    p = sub.add_parser("itcert", parents=[common], help="Igusa-Todorov certificates")
    p.add_argument("spec")
    p.add_argument("--idem", default=None, help="Comma-separated vertices of e")
    p.add_argument("--strategy", choices=[c.value for c in StrategyChoice], default=StrategyChoice.AUTO.value)
    p.add_argument("--panel", default=None, help="simples, projectives, random:<k> or module spec paths")

    p = sub.add_parser("verify-paper-example", parents=[common], help="Golden suite on the bundled example")
    p.add_argument("--data-dir", default=None)
    return parser


def dump_report(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True)


def run(args: argparse.Namespace, report: Report) -> Report:
    if args.verb == "algebra-info":
        return cmd_algebra_info(args.spec, report)
    if args.verb == "resolve":
        return cmd_resolve(args.spec, args.module, args.steps, report)
    if args.verb == "recollement":
        return cmd_recollement(args.spec, args.idem, report)
    if args.verb == "itcert":
        return cmd_itcert(args.spec, args.idem, args.strategy, args.panel, report)
    return cmd_verify_paper_example(args.data_dir, report)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(seed=args.seed, log_level=args.log_level)
    except ValidationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    setup_logging(settings)
    log.info("command_started", command=args.verb, seed=settings.seed)

    try:
        caps = parse_caps(args.caps, settings.caps())
        report = Report(command=[args.verb] + argv[1:], prime=settings.prime, seed=settings.seed, caps=caps)
        report = run(args, report)
        code = report.exit_code()
    except INPUT_ERRORS as e:
        logger.error(f"Input error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        log.info("command_finished", command=args.verb, exit_code=2)
        return 2
    except Inconclusive as e:
        logger.error(f"Inconclusive: {e}")
        print(f"Inconclusive: {e}", file=sys.stderr)
        log.info("command_finished", command=args.verb, exit_code=3)
        return 3
    except RecollementToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        log.info("command_finished", command=args.verb, exit_code=1)
        return 1

    text = dump_report(report)
    if args.json_out:
        Path(args.json_out).write_text(text)
        logger.info(f"report written to {args.json_out}")
    print(text)
    log.info("command_finished", command=args.verb, exit_code=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
