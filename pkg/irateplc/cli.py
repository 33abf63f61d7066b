"""
IRatePLC command line
--------------------------
Wires model and choice documents to the library:

    irateplc resolve   --model M --configs C [--rule R] [--format F] [--trace] [--out P]
    irateplc validate  --model M LITERALS
    irateplc enumerate --model M
    irateplc score     --model M --configs C FINAL

Exit status: 0 valid, 2 invalid outcome, 1 input error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path, PurePosixPath
from typing import Callable, List, Optional, Sequence, TypeVar
from urllib.parse import urlparse

from irateplc.engine import parse_manager_rule, resolve_session
from irateplc.errors import IRatePLCError
from irateplc.model import FeatureModel, parse_model
from irateplc.report import FORMATS, render, render_trace, score
from irateplc.stakeholder import (
    StakeholderConfig,
    ensure_unique_stakeholders,
    parse_literal_set,
    parse_stakeholder_config,
    parse_stakeholder_json,
)
from irateplc.validity import ValidityReport, check_validity, enumerate_valid, extend
from utils.network import read_document
from utils.settings import Settings
from utils.utils import is_url

logger = logging.getLogger("irateplc")

EXIT_VALID = 0
EXIT_ERROR = 1
EXIT_INVALID = 2

CHOICE_SUFFIX = ".txt"

T = TypeVar("T")


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1; status 2 is reserved for invalid outcomes."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"error: {message}\n")


def _parse(location: str, text: str, parser: Callable[[str], T]) -> T:
    try:
        return parser(text)
    except IRatePLCError as e:
        if e.source is None:
            e.located(location)
        raise


def load_model(location: str) -> FeatureModel:
    return _parse(location, read_document(location), parse_model)


def _stem(location: str) -> str:
    if is_url(location):
        return PurePosixPath(urlparse(location).path).stem
    return Path(location).stem


def load_configs(location: str, model: FeatureModel) -> List[StakeholderConfig]:
    """
    Load stakeholder choices from a directory of `.txt` choice files
    (lexicographic order, file stem as default id), a `.json` array, or a
    single choice file.
    """
    path = Path(location)
    if not is_url(location) and path.is_dir():
        files = sorted(p for p in path.iterdir() if _is_choice_file(p))
        configs = [
            _parse(str(p), read_document(str(p)), lambda text, p=p: parse_stakeholder_config(text, model, p.stem))
            for p in files
        ]
        try:
            ensure_unique_stakeholders(configs)
        except IRatePLCError as e:
            raise e.located(location)
        return configs
    text = read_document(location)
    if location.endswith(".json") or text.lstrip().startswith("["):
        return _parse(location, text, lambda t: parse_stakeholder_json(t, model))
    return [_parse(location, text, lambda t: parse_stakeholder_config(t, model, _stem(location)))]


def _is_choice_file(path: Path) -> bool:
    if path.name.startswith(".") or not path.is_file():
        return False
    if path.suffix != CHOICE_SUFFIX:
        logger.debug(f"Skipping {path}: not a {CHOICE_SUFFIX} choice file")
        return False
    return True


def _emit(document: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(document, encoding="utf-8")
    else:
        sys.stdout.write(document)


def _max_iterations() -> Optional[int]:
    cap = Settings().max_iterations
    if cap is not None:
        logger.warning(f"Iteration cap overridden by IRATEPLC_MAX_ITERS={cap}")
    return cap


def run_resolve(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    configs = load_configs(args.configs, model)
    rule = parse_manager_rule(args.rule or Settings().default_rule)
    outcome = resolve_session(model, configs, rule, max_iterations=_max_iterations())
    if args.trace:
        sys.stdout.write(render_trace(outcome))
    _emit(render(score(configs, outcome.final), outcome, args.format), args.out)
    return EXIT_VALID if outcome.valid else EXIT_INVALID


def _validity_document(report: ValidityReport, witness, model: FeatureModel, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({
            "valid": report.valid,
            "violations": [
                {
                    "kind": v.kind.value,
                    "detail": v.detail,
                    "literals": [str(l) for l in v.literals],
                    "constraint": v.constraint_id,
                }
                for v in report.violations
            ],
            "witness": witness.ordered(model) if witness is not None else None,
        }, indent=2, ensure_ascii=False) + "\n"
    lines = ["valid" if report.valid else "invalid"]
    lines.extend(f"  {v.kind.value}: {v.detail}" for v in report.violations)
    if witness is not None:
        lines.append(f"witness: {', '.join(witness.ordered(model))}")
    return "\n".join(lines) + "\n"


def run_validate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    literals = _parse(args.literals, read_document(args.literals), lambda t: parse_literal_set(t, model))
    report = check_validity(literals, model)
    witness = extend(literals, model) if report.valid else None
    _emit(_validity_document(report, witness, model, args.format), args.out)
    return EXIT_VALID if report.valid else EXIT_INVALID


def run_enumerate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    found = [c.ordered(model) for c in enumerate_valid(model)]
    if args.format == "json":
        document = json.dumps({"count": len(found), "configurations": found}, indent=2) + "\n"
    else:
        document = "".join([f"count: {len(found)}\n"] + [", ".join(c) + "\n" for c in found])
    _emit(document, args.out)
    return EXIT_VALID


def run_score(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    configs = load_configs(args.configs, model)
    final = _parse(args.final, read_document(args.final), lambda t: parse_literal_set(t, model))
    _emit(render(score(configs, final), None, args.format), args.out)
    return EXIT_VALID


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="irateplc",
        description="Resolve multi-stakeholder product line configurations",
    )
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler, help_text: str, configs: bool = False) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        sub.add_argument('--model', required=True, help='Feature model file or URL')
        if configs:
            sub.add_argument('--configs', required=True, help='Choice directory, JSON file, choice file or URL')
        sub.add_argument('--format', choices=FORMATS, default="json", help='Output format')
        sub.add_argument('--out', help='Write the document to this path instead of stdout')
        return sub

    resolve = command("resolve", run_resolve, "Resolve the stakeholders' choices", configs=True)
    resolve.add_argument('--rule', help='most-complete, simplest or priority:<stakeholder>')
    resolve.add_argument('--trace', action='store_true', help='Print one JSON line per iteration')

    validate = command("validate", run_validate, "Check a literal set against the model")
    validate.add_argument('literals', help='Literal-set file')

    command("enumerate", run_enumerate, "List every valid configuration of a small model")

    score_cmd = command("score", run_score, "Score a final configuration", configs=True)
    score_cmd.add_argument('final', help='Literal-set file holding the final configuration')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = Settings()
    logging.basicConfig(
        level=logging.DEBUG if args.debug else getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler()]
    )
    try:
        return args.handler(args)
    except IRatePLCError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e.filename or args.out}: {e.strerror}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
