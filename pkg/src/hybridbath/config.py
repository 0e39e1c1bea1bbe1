"""Run configuration: JSON schema, loading and output-directory resolution."""

import copy
import json
import os
from importlib import resources

import jsonschema

from .errors import ConfigError
from .models import MODEL_NAMES

OUTPUT_DIR_ENV = "HYBRIDBATH_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "hybridbath-output"
DEFAULT_ORACLE = {"boson_cutoff": 12, "tol": 1e-4}

_NUMBER = {"type": "number"}

KERNEL_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["single_mode", "ou", "sum", "zero"]}},
    "allOf": [
        {"if": {"properties": {"type": {"const": "single_mode"}}},
         "then": {"required": ["coupling", "frequency"],
                  "properties": {"coupling": {"type": "number", "minimum": 0},
                                 "frequency": _NUMBER}}},
        {"if": {"properties": {"type": {"const": "ou"}}},
         "then": {"required": ["Gamma", "gamma", "phi"],
                  "properties": {"Gamma": {"type": "number", "minimum": 0},
                                 "gamma": {"type": "number", "exclusiveMinimum": 0},
                                 "phi": _NUMBER}}},
        {"if": {"properties": {"type": {"const": "sum"}}},
         "then": {"required": ["terms"],
                  "properties": {"terms": {"type": "array",
                                           "items": {"$ref": "#/definitions/kernel"}}}}},
    ],
}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "hybridbath run configuration",
    "type": "object",
    "required": ["model", "parameters", "grid"],
    "additionalProperties": False,
    "definitions": {"kernel": KERNEL_SCHEMA},
    "properties": {
        "model": {"enum": list(MODEL_NAMES)},
        "parameters": {
            "type": "object",
            "required": ["kernels"],
            "properties": {
                "omega": _NUMBER,
                "epsilon": _NUMBER,
                "c_b": {"type": "number", "minimum": 0},
                "c_f": {"type": "number", "minimum": 0},
                "kappa_b": {"enum": [0, 1]},
                "a_term": {"enum": ["general", "as_printed"]},
                "initial_state": {
                    "oneOf": [
                        {"type": "string"},
                        {"type": "object", "required": ["amplitudes"],
                         "properties": {"amplitudes": {
                             "type": "array",
                             "items": {"type": "array", "items": _NUMBER,
                                       "minItems": 2, "maxItems": 2}}}},
                    ]},
                "kernels": {"type": "object",
                            "additionalProperties": {"$ref": "#/definitions/kernel"}},
            },
        },
        "grid": {
            "type": "object",
            "required": ["horizon", "dt"],
            "additionalProperties": False,
            "properties": {"horizon": {"type": "number", "exclusiveMinimum": 0},
                           "dt": {"type": "number", "exclusiveMinimum": 0}},
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "directory": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "svg"]},
                            "uniqueItems": True},
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"boson_cutoff": {"type": "integer", "minimum": 2},
                           "tol": {"type": "number", "exclusiveMinimum": 0}},
        },
    },
}


def _field_of(error):
    path = [str(p) for p in error.absolute_path]
    if error.validator == "required":
        missing = [k for k in error.validator_value if k not in error.instance]
        if missing:
            path.append(missing[0])
        return ".".join(path), "missing required field"
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        if extra:
            path.append(extra[0])
        return ".".join(path), "unknown field"
    return ".".join(path) or "<root>", error.message


def validate(cfg):
    """Raise :class:`ConfigError` for the first schema violation (deepest first)."""
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = list(validator.iter_errors(cfg))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise ConfigError(*_field_of(best))
    return cfg


def load_config(path):
    """Read and validate a JSON run configuration."""
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("<file>", f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return validate(cfg)


def output_directory(cfg, override=None):
    """``override`` first, then ``$HYBRIDBATH_OUTPUT_DIR``, then the config."""
    if override:
        return override
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return env
    return cfg.get("outputs", {}).get("directory", DEFAULT_OUTPUT_DIR)


def formats(cfg):
    return list(cfg.get("outputs", {}).get("formats", ["csv", "svg"]))


def oracle_settings(cfg):
    out = dict(DEFAULT_ORACLE)
    out.update(cfg.get("oracle", {}))
    return out


def shipped_configs():
    """Names and paths of the example configurations bundled with the package."""
    root = resources.files("hybridbath") / "configs"
    return {p.name[:-5]: str(p) for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".json")}


def schema():
    return copy.deepcopy(SCHEMA)
