"""
JSON schema validation for documents the toolkit emits
"""
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import yaml
from jsonschema import Draft7Validator

from core.exceptions import ToolkitError


SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"

logger = logging.getLogger(__name__)


class SchemaViolation(ToolkitError):
    """An emitted document does not match its shipped schema"""


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    """Load ``schemas/<name>.yml``"""
    path = SCHEMA_DIR / f"{name}.yml"
    if not path.exists():
        raise SchemaViolation(f"No schema named {name!r} in {SCHEMA_DIR}")
    with open(path, "r", encoding="utf-8") as f:
        schema = yaml.safe_load(f)
    Draft7Validator.check_schema(schema)
    return schema


def validate_document(name: str, document: Any) -> None:
    """Raise SchemaViolation listing every error found in ``document``"""
    validator = Draft7Validator(load_schema(name))
    errors = sorted(validator.iter_errors(document), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        details = "; ".join(
            f"{'/'.join(str(p) for p in error.absolute_path) or '<root>'}: {error.message}"
            for error in errors[:5]
        )
        raise SchemaViolation(f"Document does not match schema {name!r}: {details}")
    logger.debug(f"Document validated against schema {name!r}")
