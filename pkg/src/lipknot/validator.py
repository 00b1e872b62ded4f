"""Document validation for germ files, certificates and corpus expectations.

Uses jsonschema for Draft-07 validation, PyYAML for YAML reading.
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import jsonschema
import yaml


SCHEMA_MAP = {
    "germ": "germ.schema.json",
    "certificate": "certificate.schema.json",
}


@dataclass
class ValidationResult:
    """Result of validating one document."""
    is_valid: bool
    errors: List[str] = field(default_factory=list)


def load_schema(name: str) -> dict:
    """Load a bundled JSON schema by short name ("germ" or "certificate")."""
    filename = SCHEMA_MAP.get(name)
    if filename is None:
        raise KeyError(f"No schema defined for {name!r}")
    text = resources.files("lipknot").joinpath("schemas").joinpath(filename).read_text()
    return json.loads(text)


def validate_schema(data: Any, schema: dict, filename: str) -> List[str]:
    """
    Validate data against a JSON schema, returning ALL errors (not just the first).

    Uses Draft7Validator.iter_errors() to collect every violation.
    """
    errors = []
    try:
        validator = jsonschema.Draft7Validator(schema)
        for error in sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path)):
            path = ".".join(str(p) for p in error.absolute_path) if error.absolute_path else "(root)"
            errors.append(f"{filename}: {error.message} at {path}")
    except jsonschema.SchemaError as e:
        errors.append(f"{filename}: Schema error - {e.message}")
    return errors


def validate_document(data: Any, kind: str, filename: str = "<document>") -> ValidationResult:
    errors = validate_schema(data, load_schema(kind), filename)
    return ValidationResult(is_valid=not errors, errors=errors)


def load_json_safe(file_path: Path) -> Tuple[Optional[Any], Optional[str]]:
    """
    Load a JSON file, reporting parse errors with position.

    Returns:
        (data, error) - data is None if loading failed
    """
    try:
        return json.loads(file_path.read_text()), None
    except FileNotFoundError:
        return None, f"File not found: {file_path}"
    except json.JSONDecodeError as e:
        return None, f"JSON parse error at line {e.lineno}, column {e.colno}: {e.msg}"
    except OSError as e:
        return None, f"Cannot read {file_path}: {e}"


def load_yaml_safe(text: str, source: str = "<yaml>") -> Tuple[Optional[dict], Optional[str]]:
    """
    Parse YAML text, handling empty documents and parse errors safely.

    Returns:
        (data, error) - data is None if parse failed, error contains details
    """
    try:
        data = yaml.safe_load(text)
        if data is None:
            return None, f"{source}: document is empty"
        if not isinstance(data, dict):
            return None, f"{source}: expected mapping, got {type(data).__name__}"
        return data, None
    except yaml.YAMLError as e:
        if hasattr(e, "problem_mark") and e.problem_mark:
            mark = e.problem_mark
            return None, f"{source}: YAML parse error at line {mark.line + 1}, column {mark.column + 1}: {e.problem or 'syntax error'}"
        return None, f"{source}: YAML parse error: {e}"


def load_expectations() -> Dict[str, Any]:
    """Bundled corpus expectations (data/expectations.yaml)."""
    text = resources.files("lipknot").joinpath("data").joinpath("expectations.yaml").read_text()
    data, error = load_yaml_safe(text, "expectations.yaml")
    if error:
        raise ValueError(error)
    return data
