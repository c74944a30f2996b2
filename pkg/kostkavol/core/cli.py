"""
Command-line front-end: `kostkavol {estimate,certify,bounds,oracle,batch} ...`.

Results go to stdout as JSON (or CSV); logs go to stderr. The exit status is the
record's exit code: 0 ok, 2 parse/input, 3 degenerate, 4 boundary, 5 resource,
6 certification failure.
"""
import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from .base.config import RunConfig
from .base.errors import KostkaVolError
from .base.log import GlobalLogger
from .factory.pipeline import EstimatorFactory, ResultRecord
from .registry.oracles import OracleRegistry
from .utils.utilities import Utils


def _rational(text: str):
    try:
        return Utils.parse_number(text, where="argument")
    except KostkaVolError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file (default: $KOSTKAVOL_CONFIG).")
    common.add_argument("--eps-opt", type=_rational, help="Optimizer accuracy, e.g. 1/1000.")
    common.add_argument("--delta", type=_rational, help="Evaluation accuracy of the Schur kernels.")
    common.add_argument("--bit-cap", type=_positive_int, help="Fixed-point precision cap in bits.")
    common.add_argument("--format", choices=("json", "csv"), help="Output format.")
    common.add_argument("--no-timings", action="store_true", help="Leave timings out of the output.")

    parser = argparse.ArgumentParser(
        prog="kostkavol",
        description="Certified bounds on volumes of Kostka polytopes, with exact small-case oracles.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("estimate", "Certified volume bracket."),
        ("certify", "Volume bracket checked against the exact volume."),
        ("bounds", "Conditioning record only."),
    ):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("instance", help="JSON instance file {\"lambda\": [...], \"mu\": [...]}.")

    oracle = commands.add_parser("oracle", parents=[common], help="Exact ground-truth oracles.")
    oracle.add_argument("instance")
    oracle.add_argument("--kind", default="kostka", choices=sorted(OracleRegistry.list_predefined()))
    oracle.add_argument("--N", type=_positive_int, default=1, help="Scale factor for --kind scaling.")
    oracle.add_argument("--mu-b", help="Instance file whose mu ends the segment for --kind logconcavity.")
    oracle.add_argument("--steps", type=_positive_int, default=4, help="Segment subdivisions for --kind logconcavity.")

    batch = commands.add_parser("batch", parents=[common], help="Run several instances; one JSON document per line.")
    batch.add_argument("instances", nargs="+")
    batch.add_argument("--command", dest="batch_command", default="estimate", choices=("estimate", "bounds", "certify"))
    batch.add_argument("--jobs", type=_positive_int, default=1)
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.load(
        args.config,
        eps_opt=args.eps_opt,
        delta_eval=args.delta,
        precision_bit_cap=args.bit_cap,
        output_format=args.format,
    )


def _run_one(command: str, path: str, config: RunConfig) -> ResultRecord:
    return EstimatorFactory.create(command, config).run_safely(path)


def _emit(records: List[ResultRecord], config: RunConfig, include_timings: bool, one_per_line: bool) -> None:
    documents = [record.as_dict(include_timings) for record in records]
    if config.output_format == "csv":
        sys.stdout.write(Utils().to_csv(documents))
        return
    for document in documents:
        if one_per_line:
            sys.stdout.write(json.dumps(document) + "\n")
        else:
            sys.stdout.write(json.dumps(document, indent=2) + "\n")


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        config = _load_config(args)
    except KostkaVolError as exc:
        _emit([ResultRecord.from_error(command, exc)], RunConfig(), False, False)
        return exc.exit_code
    GlobalLogger.initialize(level=config.log_level)

    if command == "batch":
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                futures = [pool.submit(_run_one, args.batch_command, path, config) for path in args.instances]
                records = [future.result() for future in futures]
        else:
            records = [_run_one(args.batch_command, path, config) for path in args.instances]
        _emit(records, config, not args.no_timings, True)
        return max(record.exit_code for record in records)

    if command == "oracle":
        pipeline = EstimatorFactory.create(command, config, oracle=args.kind, N=args.N, mu_b=args.mu_b, steps=args.steps)
    else:
        pipeline = EstimatorFactory.create(command, config)
    record = pipeline.run_safely(args.instance)
    _emit([record], config, not args.no_timings, False)
    return record.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
