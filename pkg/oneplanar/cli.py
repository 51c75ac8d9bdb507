import argparse
import sys
from typing import Any, Dict, List, Optional

from oneplanar.clients.graph_file_client import GraphFileClient, format_graph
from oneplanar.core.embedding import verify_witness
from oneplanar.core.engine import OnePlanarEngine, emit_report
from oneplanar.core.generators import Family, generate
from oneplanar.utils import logger, setup_logging
from oneplanar.utils.types import OutputFormat, RunConfig, Strategy

EXIT_DECIDED = 0
EXIT_INPUT_ERROR = 1
EXIT_BUDGET_EXCEEDED = 2


def _param(text: str) -> Dict[str, Any]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"parameters look like name=value, got {text!r}")
    try:
        parsed: Any = int(value)
    except ValueError:
        try:
            parsed = float(value)
        except ValueError:
            parsed = value
    return {key: parsed}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oneplanar", description="Decide 1-planarity of undirected graphs.")
    parser.add_argument("--log-level", default=None, help="log level for stderr/file logs (default WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    decide = sub.add_parser("decide", help="decide whether a graph is 1-planar")
    decide.add_argument("--input", "-i", required=True, help="graph file, or - for stdin")
    decide.add_argument("--constraints", help="constraints file (exact strategy only)")
    decide.add_argument("--strategy", choices=[s.value for s in Strategy])
    decide.add_argument("--budget", type=int, help="search-node budget per block")
    decide.add_argument("--c1", type=int, help="tree-depth rejection constant")
    decide.add_argument("--paranoid", "--no-td-reject", dest="paranoid", action="store_true",
                        help="solve large tree-depth attachment groups instead of rejecting them")
    decide.add_argument("--seed", type=int)
    decide.add_argument("--workers", type=int)
    decide.add_argument("--output", choices=[f.value for f in OutputFormat])
    decide.add_argument("--witness", action="store_true", help="emit the crossing witness")
    decide.add_argument("--timing", action="store_true", help="report elapsed milliseconds")

    verify = sub.add_parser("verify", help="check a crossing witness against a graph")
    verify.add_argument("--input", "-i", required=True)
    verify.add_argument("--witness-file", "-w", required=True, help="file with `cross u1 v1 u2 v2` lines")
    verify.add_argument("--constraints")

    kernel = sub.add_parser("kernel", help="print kernel pieces and reduction records")
    kernel.add_argument("--input", "-i", required=True)
    kernel.add_argument("--strategy", default=Strategy.AUTO.value,
                        choices=[Strategy.AUTO.value, Strategy.VC.value, Strategy.TREEDEPTH.value,
                                 Strategy.CYCLOMATIC.value])
    kernel.add_argument("--c1", type=int)
    kernel.add_argument("--paranoid", "--no-td-reject", dest="paranoid", action="store_true")

    gen = sub.add_parser("generate", help="print a fixture graph")
    gen.add_argument("family", choices=[f.value for f in Family])
    gen.add_argument("params", nargs="*", type=_param, help="family parameters as name=value")
    gen.add_argument("--seed", type=int, default=0)

    echo = sub.add_parser("echo", help="parse a graph and print it back")
    echo.add_argument("--input", "-i", required=True)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_env(
        strategy=getattr(args, "strategy", None),
        budget=getattr(args, "budget", None),
        c1=getattr(args, "c1", None),
        paranoid=getattr(args, "paranoid", False) or None,
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", None),
        output=getattr(args, "output", None),
        emit_witness=getattr(args, "witness", False) or None,
        report_timing=getattr(args, "timing", False) or None,
    )


def _decide(args: argparse.Namespace, client: GraphFileClient) -> int:
    config = _config(args)
    g = client.read_graph(args.input)
    constraints = client.read_constraints(args.constraints, g)
    report = OnePlanarEngine(config).run(g, constraints)
    client.write(None, emit_report(report, config.output) + "\n")
    return report.exit_code


def _verify(args: argparse.Namespace, client: GraphFileClient) -> int:
    g = client.read_graph(args.input)
    constraints = client.read_constraints(args.constraints, g)
    witness = client.read_witness(args.witness_file)
    valid = verify_witness(g, witness, constraints)
    client.write(None, f"valid: {str(valid).lower()}\ncrossings: {len(witness)}\n")
    return EXIT_DECIDED if valid else EXIT_INPUT_ERROR


def _kernel(args: argparse.Namespace, client: GraphFileClient) -> int:
    config = _config(args)
    g = client.read_graph(args.input)
    view = OnePlanarEngine(config).kernelize(g, Strategy(args.strategy))
    out: List[str] = [f"# strategy {view.strategy.value}\n"]
    if view.early_verdict is not None:
        out.append(f"# rejected {view.early_verdict}\n")
    for i, piece in enumerate(view.pieces):
        out.append(f"# piece {i}\n")
        out.append(format_graph(piece))
    out.extend(f"# plan {record}\n" for record in view.records)
    client.write(None, "".join(out))
    return EXIT_DECIDED


def _generate(args: argparse.Namespace, client: GraphFileClient) -> int:
    params: Dict[str, Any] = {}
    for p in args.params:
        params.update(p)
    client.write_graph(None, generate(args.family, params, seed=args.seed))
    return EXIT_DECIDED


def _echo(args: argparse.Namespace, client: GraphFileClient) -> int:
    client.write_graph(None, client.read_graph(args.input))
    return EXIT_DECIDED


COMMANDS = {
    "decide": _decide,
    "verify": _verify,
    "kernel": _kernel,
    "generate": _generate,
    "echo": _echo,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        setup_logging(args.log_level)
    try:
        return COMMANDS[args.command](args, GraphFileClient())
    except (ValueError, OSError) as e:
        logger.error("command_failed", command=args.command, error=str(e))
        sys.stderr.write(f"oneplanar: {e}\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
