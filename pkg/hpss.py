import sys
import argparse
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

from utils.algebra_model import AlgebraSpec, complexify, load_algebra, load_realframe, read_json, validate
from utils.config_manager import ConfigManager
from utils.errors import HpssError, ParseError, SpecError
from utils.operator_builder import Bivector, bivector_from_json, parse_lambda_tokens
from utils.report_generator import REPORT_FORMATS, ReportGenerator, save_report
from utils.spectral_analyzer import degeneracy_page, dolbeault_dims, poisson_cohomology_dims
from utils.template_manager import FAMILIES, TemplateManager, builtin_example, example_catalog, resolve_sizes

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

VERBS = ("validate", "cohomology", "spectral", "degeneracy", "example-list", "example-run")
SIZE_NAMES = ("n", "m", "k")


@dataclass(frozen=True)
class Command:
    verb: str
    spec_path: Optional[str] = None
    frame_path: Optional[str] = None
    example: Optional[str] = None
    sizes: Dict[str, Optional[int]] = field(default_factory=dict)
    lambda_tokens: Tuple[str, ...] = ()
    lambda_path: Optional[str] = None
    pages: Optional[int] = None
    output_format: str = "table"
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.verb not in VERBS:
            raise SpecError(f"Unknown verb '{self.verb}'. Expected one of {', '.join(VERBS)}.")
        if self.output_format not in REPORT_FORMATS:
            raise SpecError(f"Unknown format '{self.output_format}'. Expected one of {', '.join(REPORT_FORMATS)}.")


def load_spec(cmd: Command) -> AlgebraSpec:
    """Resolves the algebra named by exactly one of --spec, --frame or --example."""
    sources = [source for source in (cmd.spec_path, cmd.frame_path, cmd.example) if source]
    if len(sources) != 1:
        raise SpecError("Give exactly one of --spec, --frame or --example.")
    if cmd.spec_path:
        return load_algebra(cmd.spec_path)
    if cmd.frame_path:
        return complexify(load_realframe(cmd.frame_path))
    return builtin_example(cmd.example, **cmd.sizes)


def load_bivector(cmd: Command, spec: AlgebraSpec) -> Optional[Bivector]:
    """A --lambda-file takes precedence over --lambda tokens; None when neither is given."""
    if cmd.lambda_path:
        if cmd.lambda_tokens:
            logging.warning(f"Ignoring --lambda tokens in favour of {cmd.lambda_path}.")
        return bivector_from_json(spec, read_json(cmd.lambda_path))
    if cmd.lambda_tokens:
        return parse_lambda_tokens(spec, cmd.lambda_tokens)
    return None


def _execute(cmd: Command, reports: ReportGenerator) -> Dict[str, Any]:
    if cmd.verb == "example-list":
        return reports.catalog_report(example_catalog(TemplateManager()))

    if cmd.verb == "example-run" and not cmd.example:
        raise SpecError("example-run needs --example.")
    spec = load_spec(cmd)
    bivector = load_bivector(cmd, spec)

    if cmd.verb == "validate":
        return reports.validation_report(spec, validate(spec))
    if cmd.verb == "cohomology":
        if bivector is None:
            return reports.cohomology_report(spec, dolbeault_dims(spec))
        return reports.cohomology_report(spec, poisson_cohomology_dims(spec, bivector), bivector)

    if bivector is None:
        logging.warning("No Lambda given; using Lambda = 0.")
        bivector = Bivector.zero()
    if spec.m != 1:
        logging.warning(f"m = {spec.m}: the degeneracy theorems do not apply; their flags are reported as null.")
    report = degeneracy_page(spec, bivector, cmd.pages)
    example = None
    if cmd.verb == "example-run":
        example = {"name": cmd.example, "sizes": resolve_sizes(cmd.example, **cmd.sizes)}
    verb = "degeneracy" if cmd.verb == "example-run" else cmd.verb
    return reports.degeneracy_report(spec, bivector, report, verb=verb, example=example)


def run(cmd: Command) -> Tuple[int, Dict[str, Any]]:
    """
    Executes one command.

    Returns:
        (exit status, report). On failure the report holds an "error" entry
        and the status is the error's exit code (1, or 2 for a rejected Lambda);
        unexpected exceptions are reported the same way with status 1.
    """
    try:
        return 0, _execute(cmd, ReportGenerator())
    except HpssError as e:
        logging.error(f"{cmd.verb} failed: {e}")
        error: Dict[str, Any] = {"type": type(e).__name__, "message": str(e)}
        if isinstance(e, ParseError):
            error.update(line=e.line, column=e.column)
        return e.exit_code, {"verb": cmd.verb, "error": error}
    except Exception as e:
        logging.exception(f"{cmd.verb} failed unexpectedly: {e}")
        return 1, {"verb": cmd.verb, "error": {"type": type(e).__name__, "message": str(e)}}


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ParseError so they exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="hpss",
        description="Holomorphic Poisson cohomology and its spectral sequence on 2-step nilmanifolds with abelian complex structure.",
    )
    subparsers = parser.add_subparsers(dest="verb", required=True)

    common = _ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=REPORT_FORMATS, default="table", help="Output format.")
    common.add_argument("--output", dest="output_path", help="Write the report to this file instead of stdout.")
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr.")

    algebra = _ArgumentParser(add_help=False)
    algebra.add_argument("--spec", dest="spec_path", help="AlgebraSpec JSON file.")
    algebra.add_argument("--frame", dest="frame_path", help="Real-frame JSON file, complexified on load.")
    algebra.add_argument("--example", choices=sorted(FAMILIES), help="Built-in example family.")
    for size in SIZE_NAMES:
        algebra.add_argument(f"--{size}", type=int, help=f"Size parameter {size} of the example family.")

    bivector = _ArgumentParser(add_help=False)
    bivector.add_argument(
        "--lambda", dest="lambda_tokens", nargs="+", default=[], metavar="TOKEN",
        help="Terms wt:l,j=c (c W_l^T_j), tt:i,j=c (c T_i^T_j) or ww:l1,l2=c.",
    )
    bivector.add_argument("--lambda-file", dest="lambda_path", help="Bivector JSON file; overrides --lambda.")

    pages = _ArgumentParser(add_help=False)
    pages.add_argument("--pages", type=_positive_int, help="Maximum page to compute (overrides HPSS_MAX_PAGES).")

    subparsers.add_parser("validate", parents=[common, algebra], help="Validate an algebra.")
    subparsers.add_parser("cohomology", parents=[common, algebra, bivector], help="Dolbeault (and, with Lambda, Poisson) cohomology.")
    subparsers.add_parser("spectral", parents=[common, algebra, bivector, pages], help="All pages with their differentials.")
    subparsers.add_parser("degeneracy", parents=[common, algebra, bivector, pages], help="Degeneracy page and theorem checks.")
    subparsers.add_parser("example-list", parents=[common], help="List the built-in example families.")
    subparsers.add_parser("example-run", parents=[common, algebra, bivector, pages], help="Run degeneracy on a built-in example.")
    return parser


def command_from_args(args: argparse.Namespace) -> Command:
    return Command(
        verb=args.verb,
        spec_path=getattr(args, "spec_path", None),
        frame_path=getattr(args, "frame_path", None),
        example=getattr(args, "example", None),
        sizes={size: getattr(args, size, None) for size in SIZE_NAMES if getattr(args, size, None) is not None},
        lambda_tokens=tuple(getattr(args, "lambda_tokens", ())),
        lambda_path=getattr(args, "lambda_path", None),
        pages=getattr(args, "pages", None),
        output_format=args.output_format,
        output_path=args.output_path,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Command-line entry point; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ParseError as e:
        print(f"hpss: error: {e}", file=sys.stderr)
        return e.exit_code

    config_manager = ConfigManager()
    logging.getLogger().setLevel(logging.INFO if args.verbose else config_manager.get_log_level())

    status, report = run(command_from_args(args))
    if status:
        print(f"hpss: error: {report['error']['message']}", file=sys.stderr)
        return status

    text = ReportGenerator().render(report, args.output_format)
    if args.output_path:
        try:
            save_report(text, args.output_path)
        except HpssError as e:
            print(f"hpss: error: {e}", file=sys.stderr)
            return e.exit_code
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
