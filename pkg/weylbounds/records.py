"""Run records: everything needed to re-run a command and compare outputs."""

import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional, Union

if sys.version_info >= (3, 11):
    from importlib.resources.abc import Traversable
else:
    from importlib.abc import Traversable

import jsonschema

from weylbounds import __version__
from weylbounds.errors import InvalidParameterError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "run_record.v1"
SCHEMA_DIR = "schemas"
# wall-clock fields that may differ between otherwise identical runs
TIMING_KEYS = frozenset({"elapsed_ms"})


def strip_timing(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: strip_timing(v) for k, v in value.items() if k not in TIMING_KEYS}
    if isinstance(value, list):
        return [strip_timing(v) for v in value]
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=False)


def outputs_match(a: Any, b: Any) -> bool:
    """Bitwise comparison of two outputs, timing fields aside."""
    return canonical_json(strip_timing(a)) == canonical_json(strip_timing(b))


def schema_resource(name: str) -> Traversable:
    """Packaged schema file for one output kind, e.g. ``schema_resource("boxes")``."""
    return resources.files("weylbounds") / SCHEMA_DIR / f"{name}.v1.json"


def load_schema(name: str) -> Dict[str, Any]:
    resource = schema_resource(name)
    try:
        return json.loads(resource.read_text(encoding="utf-8"))
    except OSError as e:
        raise InvalidParameterError(f"no schema for {name!r} at {resource}") from e


def validate_output(obj: Any, name: str) -> None:
    """Check ``obj`` against the packaged schema ``schemas/<name>.v1.json``."""
    try:
        jsonschema.validate(instance=obj, schema=load_schema(name))
    except jsonschema.ValidationError as e:
        raise InvalidParameterError(f"{name} output fails its schema: {e.message}") from e


@dataclass
class RunRecord:
    command: str
    params: Dict[str, Any]
    seed: Optional[int]
    outputs: Any
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    elapsed: float = 0.0
    version: str = __version__

    def digest(self) -> str:
        payload = {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "outputs": strip_timing(self.outputs),
        }
        return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()

    def filename(self) -> str:
        return f"{self.command}-{self.digest()[:16]}.json"

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["schema"] = SCHEMA_VERSION
        return out

    def write(self, out_dir: Union[str, Path]) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / self.filename()
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, allow_nan=False)
        logger.info(f"Run record saved to: {path}")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunRecord":
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidParameterError(f"cannot read run record {path}: {e}") from e
        validate_output(data, "run_record")
        data.pop("schema")
        try:
            return cls(**data)
        except TypeError as e:
            raise InvalidParameterError(f"malformed run record {path}: {e}") from e
