"""
Plain-text configuration parser.

Format: one ``key = value`` per line, ``#`` starts a comment, blank lines
are ignored. Keys may appear once and must be known to RunConfig.
"""
import logging
import re
from typing import Dict, Optional

from pydantic import ValidationError

from affine_vlab.core.errors import ConfigParseError, ConfigValidationError
from affine_vlab.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)

KEY_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")


def known_keys() -> set:
    keys = set()
    for name, info in RunConfig.model_fields.items():
        keys.add(info.alias or name)
    return keys


def parse_pairs(text: str) -> Dict[str, str]:
    """
    Split config text into raw key/value strings.

    Raises:
        ConfigParseError: malformed line, bad key, unknown or duplicate key
    """
    allowed = known_keys()
    pairs: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if not KEY_PATTERN.match(key):
            raise ConfigParseError(f"invalid key {key!r}", line=number)
        if key not in allowed:
            raise ConfigParseError(f"unknown key {key!r}", line=number)
        if key in pairs:
            raise ConfigParseError(f"duplicate key {key!r}", line=number)
        if value == "":
            raise ConfigParseError(f"missing value for {key!r}", line=number)
        pairs[key] = value
    return pairs


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        msg = err["msg"].removeprefix("Value error, ")
        loc = ".".join(str(x) for x in err["loc"])
        parts.append(f"{loc}: {msg}" if loc else msg)
    return "; ".join(parts)


def build_config(pairs: Dict[str, str]) -> RunConfig:
    """
    Validate raw pairs into a RunConfig.

    Raises:
        ConfigValidationError: naming the violated constraint
    """
    try:
        return RunConfig(**pairs)
    except ValidationError as e:
        raise ConfigValidationError(_validation_message(e))


def parse_config(text: str, command: Optional[str] = None, overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """
    Parse and validate config text.

    Args:
        text: Config file contents
        command: Subcommand from the command line; must agree with a
            ``command`` key in the text if both are given
        overrides: Extra key/value strings applied after the file

    Returns:
        Fully validated RunConfig

    Raises:
        ConfigParseError: line-level syntax problems
        ConfigValidationError: parameter constraint violations
    """
    pairs = parse_pairs(text)
    if overrides:
        allowed = known_keys()
        for key, value in overrides.items():
            key = key.replace("-", "_")
            if key not in allowed:
                raise ConfigParseError(f"unknown override key {key!r}")
            pairs[key] = value
    if command is not None:
        if "command" in pairs and pairs["command"] != command:
            raise ConfigValidationError(f"config is for {pairs['command']!r}, not {command!r}")
        pairs["command"] = command
    cfg = build_config(pairs)
    logger.debug(f"[Config] parsed {len(pairs)} key(s) for command={cfg.command}")
    return cfg
