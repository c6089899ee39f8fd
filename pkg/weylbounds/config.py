"""Plain ``key=value`` config files, merged below command-line flags."""

import argparse
import logging
from pathlib import Path
from typing import Dict, Union

from weylbounds.errors import InvalidParameterError

logger = logging.getLogger(__name__)

_BOOLEANS = {"true": True, "yes": True, "on": True, "1": True,
             "false": False, "no": False, "off": False, "0": False}


def load_config(path: Union[str, Path]) -> Dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise InvalidParameterError(f"cannot read config file {path}: {e}") from e
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def apply_config(parser: argparse.ArgumentParser, values: Dict[str, str]) -> None:
    """Install config values as parser defaults so explicit flags still win.

    Keys unknown to ``parser`` are ignored here; the caller checks that every
    key is known to at least one command.
    """
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, value in values.items():
        action = actions.get(key)
        if action is None:
            continue
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            if value.lower() not in _BOOLEANS:
                raise InvalidParameterError(f"config key {key} expects a boolean, got {value!r}")
            defaults[key] = _BOOLEANS[value.lower()]
        elif action.nargs in ("+", "*"):
            convert = action.type or str
            try:
                defaults[key] = [convert(v) for v in value.replace(",", " ").split()]
            except (ValueError, argparse.ArgumentTypeError) as e:
                raise InvalidParameterError(f"config key {key}: {e}") from e
        else:
            # string defaults pass through the action's type converter at parse time
            defaults[key] = value
    parser.set_defaults(**defaults)
    if defaults:
        logger.debug(f"config defaults for {parser.prog}: {sorted(defaults)}")
