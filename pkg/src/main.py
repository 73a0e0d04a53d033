"""secure-edm - command-line entry point.

Machine-readable `key=value` reports go to stdout, starting with a
`schema=` line; a human-readable table and logs go to stderr.

Exit codes: 0 success, 1 usage or input error, 2 configuration invariant
violated, 3 protocol or backend failure.
"""

import argparse
import logging
import sys
from typing import Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.config import ConfigError, RunConfig
from src.esp import EspError, build_esp_tree
from src.hashing import (
    HashConfig,
    HashConfigError,
    check_bound,
    conflict_probability,
    default_modulus,
    exact_conflict_probability,
    max_labels,
    min_modulus,
    min_modulus_exact,
)
from src.he2 import He2Error
from src.oracles import ORACLE_MODULUS, approximation_report
from src.pipeline import REPORT_SCHEMA, PipelineError, bench, load_text, run_edm
from src.protocol import MessageError, ProtocolError, tentative_label_set
from src.transport import TransportError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_PROTOCOL = 3

BENCH_SIZES = (100, 1000, 10000)

# flag dest -> RunConfig field
_CONFIG_FLAGS = (
    "backend",
    "modulus",
    "auto_m",
    "base",
    "security_bits",
    "sigma",
    "seed",
    "transport",
    "host",
    "port",
    "pad_queries",
    "n_cap",
    "message_bound",
    "fasta",
    "timeout",
    "log_level",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    group = common.add_argument_group("run configuration")
    group.add_argument("--backend", choices=("clear", "crypto"), default=None)
    group.add_argument("--modulus", type=int, default=None, help="Hash modulus m.")
    group.add_argument(
        "--auto-m", action="store_const", const=True, default=None,
        help="Choose m from the conflict bound at p=0.05.",
    )
    group.add_argument("--base", type=int, default=None, help="Rolling hash base b.")
    group.add_argument("--security-bits", type=int, default=None)
    group.add_argument("--sigma", type=int, default=None, help="Blind hiding bits.")
    group.add_argument("--seed", type=int, default=None, help="Overrides EDM_SEED.")
    group.add_argument("--transport", choices=("inproc", "socket"), default=None)
    group.add_argument("--host", default=None)
    group.add_argument("--port", type=int, default=None)
    group.add_argument("--pad-queries", action="store_const", const=True, default=None)
    group.add_argument("--n-cap", type=int, default=None)
    group.add_argument("--message-bound", type=int, default=None)
    group.add_argument(
        "--fasta", action="store_const", const=True, default=None,
        help="Strip FASTA header lines and whitespace from inputs.",
    )
    group.add_argument("--timeout", type=float, default=None)
    group.add_argument("--timings", action="store_true", help="Add phase timings to the report.")
    group.add_argument("--log-level", default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="secure-edm", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    hp = commands.add_parser("hash-params", parents=[common], help="Modulus for n labels.")
    hp.add_argument("--n", type=int, required=True, help="Number of distinct labels.")
    hp.add_argument("--p", type=float, default=0.05, help="Conflict probability threshold.")

    ps = commands.add_parser("parse", parents=[common], help="Dump the ESP tree of a file.")
    ps.add_argument("file")

    for name, help_text in (
        ("phase1", "Run the secure labeling."),
        ("edm", "Run labeling and L1 distance."),
    ):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("file_a")
        sub.add_argument("file_b")
        if name == "edm":
            sub.add_argument(
                "--naive", action="store_true", help="Skip labeling; L1 over all m labels."
            )

    oracle = commands.add_parser(
        "oracle-edm", parents=[common], help="Exact distances for short inputs."
    )
    oracle.add_argument("file_a")
    oracle.add_argument("file_b")
    oracle.add_argument("--cap", type=int, default=4, help="Cost cap of the exact search.")

    bn = commands.add_parser("bench", parents=[common], help="Time the labeling phase.")
    bn.add_argument("--n", type=int, choices=BENCH_SIZES, action="append", required=True)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        name: getattr(args, name) for name in _CONFIG_FLAGS if getattr(args, name) is not None
    }
    try:
        return RunConfig(**overrides)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(field, first["msg"]) from e


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def render_table(title: str, lines: Sequence[str]) -> None:
    table = Table(title=title)
    table.add_column("key", style="cyan")
    table.add_column("value", justify="right")
    for line in lines:
        key, _, value = line.partition("=")
        table.add_row(key, value)
    Console(stderr=True).print(table)


def emit(lines: Sequence[str], title: str) -> None:
    sys.stdout.write("".join(f"{line}\n" for line in lines))
    sys.stdout.flush()
    render_table(title, lines)


def cmd_hash_params(args: argparse.Namespace, config: RunConfig) -> list[str]:
    if args.n < 1:
        raise ConfigError("n", f"label count must be >= 1, got {args.n}")
    m = min_modulus(args.n, args.p)
    lines = [
        f"schema={REPORT_SCHEMA}",
        "command=hash-params",
        f"n={args.n}",
        f"p={args.p}",
        f"min_modulus={m}",
        f"conflict_probability={conflict_probability(args.n, m):.6f}",
        f"exact_conflict_probability={exact_conflict_probability(args.n, m):.6f}",
        f"min_modulus_exact={min_modulus_exact(args.n, args.p)}",
        f"default_modulus={default_modulus(args.n)}",
    ]
    if config.modulus is not None:
        lines += [
            f"modulus={config.modulus}",
            f"modulus_satisfies_bound={str(check_bound(args.n, args.p, config.modulus)).lower()}",
            f"modulus_max_labels={max_labels(args.p, config.modulus):.3f}",
            f"modulus_conflict_probability={conflict_probability(args.n, config.modulus):.6f}",
        ]
    return lines


def cmd_parse(args: argparse.Namespace, config: RunConfig) -> tuple[list[str], str]:
    text = load_text(args.file, config.fasta)
    estimate = len(tentative_label_set(build_esp_tree(text, HashConfig(m=ORACLE_MODULUS))))
    hash_config = HashConfig(m=config.select_modulus(estimate), b=config.base)
    tree = build_esp_tree(text, hash_config)
    return [
        f"schema={REPORT_SCHEMA}",
        "command=parse",
        f"m={hash_config.m}",
        f"base={hash_config.b}",
        f"length={len(text)}",
        f"height={tree.height}",
        f"nodes={tree.node_count}",
        f"labels={len(tentative_label_set(tree))}",
    ], tree.dump()


def cmd_run(args: argparse.Namespace, config: RunConfig) -> list[str]:
    text_a = load_text(args.file_a, config.fasta)
    text_b = load_text(args.file_b, config.fasta)
    if args.command == "phase1":
        mode = "phase1"
    else:
        mode = "naive" if args.naive else "secure"
    report = run_edm(text_a, text_b, config, mode=mode, command=args.command)
    return report.lines(include_timings=args.timings)


def cmd_oracle(args: argparse.Namespace, config: RunConfig) -> list[str]:
    text_a = load_text(args.file_a, config.fasta)
    text_b = load_text(args.file_b, config.fasta)
    if args.cap < 0:
        raise ConfigError("cap", f"cost cap must be >= 0, got {args.cap}")
    report = approximation_report(text_a, text_b, cap=args.cap)
    holds = report.lower_bound_holds
    return [
        f"schema={REPORT_SCHEMA}",
        "command=oracle-edm",
        f"cap={report.cap}",
        f"l1={report.l1}",
        f"edm={'exceeds_cap' if report.edm is None else report.edm}",
        f"levenshtein={report.levenshtein}",
        f"ratio={'na' if report.ratio is None else report.ratio}",
        f"lower_bound={'unknown' if holds is None else ('holds' if holds else 'violated')}",
    ]


def cmd_bench(args: argparse.Namespace, config: RunConfig) -> list[str]:
    lines: list[str] = []
    for n in args.n:
        lines.extend(bench(n, config).lines())
    return lines


def _fail(code: int, stage: str, reason: str) -> int:
    sys.stderr.write(f"error={code} stage={stage} reason={reason}\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for secure-edm."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(EXIT_USAGE, "usage", str(e))

    try:
        config = load_config(args)
        setup_logging(config.log_level)
        if args.command == "hash-params":
            lines = cmd_hash_params(args, config)
        elif args.command == "parse":
            lines, dump = cmd_parse(args, config)
            emit(lines, "parse")
            sys.stdout.write(dump + "\n")
            return EXIT_OK
        elif args.command == "oracle-edm":
            lines = cmd_oracle(args, config)
        elif args.command == "bench":
            lines = cmd_bench(args, config)
        else:
            lines = cmd_run(args, config)
    except PipelineError as e:
        return _fail(EXIT_USAGE, e.stage, e.message)
    except (ConfigError, HashConfigError) as e:
        return _fail(EXIT_CONFIG, e.stage, e.message)
    except ProtocolError as e:
        return _fail(EXIT_PROTOCOL, f"{e.party}:{e.stage}", e.message)
    except (He2Error, TransportError, EspError) as e:
        return _fail(EXIT_PROTOCOL, e.stage, e.message)
    except MessageError as e:
        return _fail(EXIT_PROTOCOL, e.tag.name, e.message)

    emit(lines, args.command)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
