"""
Command-line entry point.

    affine-vlab <command> [config.txt] [--set key=value ...] [--output-dir DIR] [--timestamp]

Exit codes: 0 ok, 2 parse, 3 validation, 4 numeric, 5 no-convergence,
6 verify-failure.
"""
import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from affine_vlab.cli.commands import run
from affine_vlab.cli.parser import parse_config
from affine_vlab.core.config import settings
from affine_vlab.core.errors import AffineVlabError, ConfigParseError
from affine_vlab.schemas.run_config import COMMANDS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.PROJECT_NAME, description="Affine L^p energy laboratory")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} command")
        cmd.add_argument("config", nargs="?", help="key = value config file")
        cmd.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                         help="override one config key (repeatable)")
        cmd.add_argument("--output-dir", "-o", help="output directory (config key output_dir)")
        cmd.add_argument("--timestamp", action="store_true", help="prepend a timestamp line to CSV files")
    return parser


def _overrides(args) -> dict:
    pairs = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigParseError(f"override {item!r} is not KEY=VALUE")
        key, value = item.split("=", 1)
        pairs[key.strip()] = value.strip()
    if args.output_dir:
        pairs["output_dir"] = args.output_dir
    if args.timestamp:
        pairs["timestamp"] = "true"
    return pairs


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose or settings.DEBUG:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        text = ""
        if args.config:
            path = Path(args.config)
            if not path.is_file():
                raise ConfigParseError(f"config file {path} not found")
            text = path.read_text()
        cfg = parse_config(text, command=args.command, overrides=_overrides(args))
        return run(cfg)
    except AffineVlabError as e:
        logger.error(f"[CLI] {e.__class__.__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"[CLI] invalid parameters: {e}")
        return EXIT_VALIDATION
