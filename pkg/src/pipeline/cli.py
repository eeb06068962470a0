"""
Command-line front end for the surgery pipeline.

Subcommands:
    validate    structural checks on any set of input files
    potential   W(b) of a candidate
    mc-check    full Maurer-Cartan residual; fails unless b is projectively flat
    gauge-away  remove the sphere coefficient of b with a gauge on the neck
    hf          HF dimension with its rank certificate
    surger      full pipeline (phases 0-5), optionally with the seeded batches
    cone        Cone(b) against the surgered atlas of an embedded pair
    example     write a bundled input set

Exit codes: 0 clean, 1 check failed, 2 input/config/parse error,
3 NotAdmissible, 4 any other library error, 130 interrupted.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from Pyfloer.ainfty import WHITE, AlgebraError, NotAdmissible, validate_atlas
from Pyfloer.cellular import CellularError, validate_complex
from Pyfloer.cone import ConeError, NotClosed, compare_cone_surgery, cone
from Pyfloer.floer import FloerError, hf_dimension
from Pyfloer.mc import MCCandidate, NoProgress, admissibility_report, gauge_away, mc_residual, potential
from Pyfloer.novikov import NegativeValuation, NotAUnit, parse_truncation
from Pyfloer.surgery import SurgeryError

from pipeline.config import (ConfigError, ConfigManager, apply_novikov_settings, get_surgery_params,
                             get_truncation, get_verification_params)
from pipeline.data_preparation import (EXAMPLE_NAMES, InputError, InputLoader, UnknownExample,
                                       candidate_to_json, write_example)
from pipeline.formatting import (ReportWriter, cone_table, format_element, hf_table, potentials_table,
                                 render_tables, violations_table)
from pipeline.orchestration import SurgeryOrchestrator
from utils.logging import configure_logging, print_error, print_info, print_success, print_warning
from utils.validation import ValidationError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_NOT_ADMISSIBLE = 3
EXIT_LIBRARY = 4
EXIT_INTERRUPTED = 130

LIBRARY_ERRORS = (AlgebraError, CellularError, FloerError, SurgeryError, ConeError, NoProgress,
                  NotAUnit, NegativeValuation)
INPUT_ERRORS = (InputError, ConfigError, ValidationError, UnknownExample)


# ---------------------------------------------------------------------------
# flag parsing


def parse_trunc(text: str) -> Any:
    try:
        return parse_truncation(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"truncation must be p/q or inf, got '{text}'")


def parse_caps(text: str) -> List[int]:
    try:
        caps = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"caps must be 'R,S' integers, got '{text}'")
    if len(caps) != 2:
        raise argparse.ArgumentTypeError(f"caps must be 'R,S', got '{text}'")
    return caps


def parse_sign_flags(text: str) -> Dict[str, int]:
    """'L,M' or 'longitude=L,meridian=M' with signs +1/-1."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    flags: Dict[str, int] = {}
    try:
        if all("=" in p for p in parts):
            for p in parts:
                key, value = p.split("=", 1)
                flags[key.strip()] = int(value)
        elif len(parts) == 2:
            flags = {"longitude": int(parts[0]), "meridian": int(parts[1])}
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"sign flags must be 'L,M' or 'longitude=L,meridian=M', got '{text}'")
    return flags


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """CONFIG sections set by command-line flags."""
    overrides: Dict[str, Dict[str, Any]] = {}

    def put(section: str, key: str, value: Any) -> None:
        overrides.setdefault(section, {})[key] = value

    if args.tol is not None:
        put("VERIFICATION", "tolerance", args.tol)
    if args.caps is not None:
        put("SURGERY", "caps", args.caps)
    if args.branch is not None:
        put("NOVIKOV", "log_branch", args.branch)
    if args.sign_flags is not None:
        put("SURGERY", "sign_flags", args.sign_flags)
    if args.example_mode:
        put("SURGERY", "example_mode", True)
    if getattr(args, "out", None) is not None:
        put("OUTPUT", "out_dir", str(args.out))
    return overrides


class Context:
    """Configuration and loader shared by the single-step subcommands."""

    def __init__(self, args: argparse.Namespace):
        manager = ConfigManager.from_file(args.config) if args.config else ConfigManager()
        manager.update(config_overrides(args))
        self.config = manager.config
        apply_novikov_settings(self.config)
        self.trunc = args.trunc
        self.loader = InputLoader(default_truncation=get_truncation(self.config),
                                  truncation_override=self.trunc,
                                  unit_convention=self.config['ALGEBRA']['unit_convention'])
        self.tol = get_verification_params(self.config)['tolerance']
        self.out = getattr(args, "out", None)

    def writer(self) -> Optional[ReportWriter]:
        if self.out is None:
            return None
        return ReportWriter(Path(self.out), self.config['OUTPUT']['formats'])


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args: argparse.Namespace) -> int:
    ctx = Context(args)
    tables = []
    candidate = surgery = None
    candidate_path = None
    for path in args.paths:
        kind, obj, data = ctx.loader.load(path)
        if kind == "complex":
            tables.append(violations_table(str(path), validate_complex(obj)))
        elif kind == "algebra":
            tables.append(violations_table(str(path), validate_complex(obj.complex), validate_atlas(obj)))
        elif kind == "bimodule":
            for block in (obj.minus, obj.plus):
                tables.append(violations_table(str(path), validate_complex(block.complex),
                                               validate_atlas(block)))
        elif kind == "candidate":
            candidate, candidate_path = obj, path
        elif kind == "surgery":
            surgery = (obj, bool(data.get("example_mode", False)))
        print_info(f"{path}: {kind}")
    if candidate is not None and surgery is not None:
        S, doc_mode = surgery
        example_mode = doc_mode or get_surgery_params(ctx.config)['example_mode']
        reasons = admissibility_report(candidate.b, S.x, S.xbar, candidate.delta, S.dim, example_mode)
        tables.append(violations_table(str(candidate_path), admissibility=reasons))

    violations = pd.concat(tables, ignore_index=True) if tables else violations_table("")
    writer = ctx.writer()
    if writer is not None:
        writer.add("violations", violations, "violations")
        writer.write()
    if violations.empty:
        print_success(f"{len(args.paths)} files validated, no violations")
        return EXIT_OK
    print(render_tables({"violations": violations}))
    print_error(f"{len(violations)} violations")
    return EXIT_CHECK_FAILED


def cmd_potential(args: argparse.Namespace) -> int:
    ctx = Context(args)
    A = ctx.loader.load_algebra(args.algebra)
    cand = ctx.loader.load_candidate(args.candidate)
    W, flat = potential(A, cand, ctx.tol)
    table = potentials_table([{"stage": "input", "W": W, "flat": flat}])
    print(table.to_string(index=False))
    writer = ctx.writer()
    if writer is not None:
        writer.add("potentials", table, "potentials")
        writer.write()
    return EXIT_OK


def cmd_mc_check(args: argparse.Namespace) -> int:
    ctx = Context(args)
    A = ctx.loader.load_algebra(args.algebra)
    cand = ctx.loader.load_candidate(args.candidate)
    residual = mc_residual(A, cand)
    W, flat = potential(A, cand, ctx.tol)
    print(f"W = {format_element(W)}")
    if flat:
        print_success("b is projectively flat")
        return EXIT_OK
    rows = [{"generator": name, "coefficient": format_element(value)}
            for name, value in sorted(residual.items()) if name != WHITE]
    print(pd.DataFrame(rows, columns=["generator", "coefficient"]).to_string(index=False))
    print_error("m_0^b is not a multiple of the unit")
    return EXIT_CHECK_FAILED


def cmd_gauge_away(args: argparse.Namespace) -> int:
    ctx = Context(args)
    A = ctx.loader.load_algebra(args.algebra)
    cand = ctx.loader.load_candidate(args.candidate)
    b1 = gauge_away(A, cand.b, args.neck, args.sphere, cand.delta, args.max_steps)
    document = candidate_to_json(MCCandidate(b1, cand.delta))
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        with open(args.output, "w") as f:
            json.dump(document, f, indent=2)
        print_success(f"Gauged candidate written to {args.output}")
    else:
        print(json.dumps(document, indent=2))
    return EXIT_OK


def cmd_hf(args: argparse.Namespace) -> int:
    ctx = Context(args)
    A = ctx.loader.load_algebra(args.algebra)
    cand = ctx.loader.load_candidate(args.candidate)
    safety_gap = get_verification_params(ctx.config)['safety_gap']
    dim, cert = hf_dimension(A, cand.b, cand.delta, safety_gap, ctx.tol)
    table = hf_table([{"stage": "input", "dimension": dim, "certificate": cert,
                       "generators": len(A.generators)}])
    print(table.to_string(index=False))
    writer = ctx.writer()
    if writer is not None:
        writer.add("hf", table, "hf")
        writer.write_json("hf_certificate.json", cert.to_json())
        writer.write()
    return EXIT_OK


def cmd_surger(args: argparse.Namespace) -> int:
    orchestrator = SurgeryOrchestrator(
        config_path=args.config,
        config_dict=config_overrides(args),
        truncation_override=args.trunc,
        verbose=not args.quiet,
    )
    result = orchestrator.run_full_pipeline(args.algebra, args.candidate, args.surgery,
                                            surgered_path=args.surgered, batches=args.batches)
    for entry in result['potentials']:
        print(f"W[{entry['stage']}] = {format_element(entry['W'])}")
    return EXIT_OK if result['success'] else EXIT_CHECK_FAILED


def cmd_cone(args: argparse.Namespace) -> int:
    ctx = Context(args)
    B = ctx.loader.load_bimodule(args.bimodule)
    cand, data = ctx.loader.load_morphism(args.morphism)
    try:
        x, xbar, area = data["x"], data["xbar"], data["area"]
    except KeyError as e:
        raise InputError(args.morphism, f"missing field {e}")
    caps = get_surgery_params(ctx.config)['caps']

    try:
        cone(B, cand.b, tol=ctx.tol)
        print_info("b is closed: Cone(b) is a curved algebra")
    except NotClosed as e:
        print_warning(f"b is not closed ({e}); comparing disk by disk only")

    report = compare_cone_surgery(B, x, xbar, area, cand.b, caps, ctx.tol)
    table = cone_table(report)
    print(table.to_string(index=False))
    writer = ctx.writer()
    if writer is not None:
        writer.add("cone", table, "cone")
        writer.write()
    if report["passed"]:
        print_success(f"Cone and surgery agree (max discrepancy {report['max_discrepancy']:.3e})")
        return EXIT_OK
    print_error(f"Cone and surgery differ by {report['max_discrepancy']:.3e} "
                f"(tail bound {report['tail_bound']:.3e})")
    return EXIT_CHECK_FAILED


def cmd_example(args: argparse.Namespace) -> int:
    out_dir = Path(args.out) if args.out is not None else Path(args.name)
    write_example(args.name, out_dir, verbose=not args.quiet)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, default=None, help='Config JSON or YAML file')
    common.add_argument('--trunc', type=parse_trunc, default=None,
                        help='Truncation p/q or inf (overrides input files)')
    common.add_argument('--caps', type=parse_caps, default=None, help='Multiplicity caps R,S')
    common.add_argument('--tol', type=float, default=None, help='Coefficient tolerance')
    common.add_argument('--branch', type=int, default=None, help='Branch k of the logarithm')
    common.add_argument('--sign-flags', type=parse_sign_flags, default=None,
                        help="Handle sign flags 'L,M' or 'longitude=L,meridian=M'")
    common.add_argument('--example-mode', action='store_true',
                        help='Dimension-one regime with b0(xbar) = 0')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('--quiet', action='store_true', help='Warnings only')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="surgery-pipeline",
        description="Surgery of immersed Lagrangians: potentials, surgered atlases and HF reports",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Write the worked example and run the full pipeline on it
  surgery-pipeline example immersed-circle --out inputs
  surgery-pipeline surger inputs/algebra.json inputs/candidate.json inputs/surgery.json \\
      --surgered inputs/surgered.json --out results

  # Validate every input file
  surgery-pipeline validate inputs/*.json
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser('validate', parents=[common], help='Structural checks on input files')
    p.add_argument('paths', nargs='+', type=Path)
    p.add_argument('--out', type=Path, default=None, help='Write violations.csv here')
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (('potential', cmd_potential, 'Potential W(b)'),
                                 ('mc-check', cmd_mc_check, 'Projective flatness of b'),
                                 ('hf', cmd_hf, 'HF dimension with rank certificate')):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument('algebra', type=Path)
        p.add_argument('candidate', type=Path)
        if name != 'mc-check':
            p.add_argument('--out', type=Path, default=None, help='Report directory')
        p.set_defaults(func=func)

    p = sub.add_parser('gauge-away', parents=[common], help='Gauge away a sphere coefficient')
    p.add_argument('algebra', type=Path)
    p.add_argument('candidate', type=Path)
    p.add_argument('--neck', required=True, help='Neck cell carrying the gauge')
    p.add_argument('--sphere', required=True, help='Sphere cell whose coefficient is removed')
    p.add_argument('--max-steps', type=int, default=20)
    p.add_argument('--output', type=Path, default=None, help='Write the gauged candidate here')
    p.set_defaults(func=cmd_gauge_away)

    p = sub.add_parser('surger', parents=[common], help='Run the full surgery pipeline')
    p.add_argument('algebra', type=Path)
    p.add_argument('candidate', type=Path)
    p.add_argument('surgery', type=Path)
    p.add_argument('--surgered', type=Path, default=None,
                   help='Hand-built surgered algebra (dimension one)')
    p.add_argument('--batches', action='store_true', help='Also run the seeded verification batches')
    p.add_argument('--out', type=Path, default=None, help='Report directory')
    p.set_defaults(func=cmd_surger)

    p = sub.add_parser('cone', parents=[common], help='Compare Cone(b) with the surgery')
    p.add_argument('bimodule', type=Path)
    p.add_argument('morphism', type=Path)
    p.add_argument('--out', type=Path, default=None, help='Report directory')
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser('example', parents=[common], help='Write a bundled input set')
    p.add_argument('name', help=f"One of {', '.join(EXAMPLE_NAMES)}")
    p.add_argument('--out', type=Path, default=None, help='Target directory (default: the name)')
    p.set_defaults(func=cmd_example)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and map its outcome to an exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else "WARNING" if args.quiet else "INFO")
    try:
        return args.func(args)
    except KeyboardInterrupt:
        print_error("Interrupted by user")
        return EXIT_INTERRUPTED
    except INPUT_ERRORS as e:
        print_error(str(e))
        return EXIT_INPUT
    except NotAdmissible as e:
        print_error(f"NotAdmissible: {e}")
        return EXIT_NOT_ADMISSIBLE
    except LIBRARY_ERRORS as e:
        print_error(f"{type(e).__name__}: {e}")
        logging.getLogger("pipeline").debug("library error", exc_info=True)
        return EXIT_LIBRARY


if __name__ == '__main__':
    sys.exit(main())
