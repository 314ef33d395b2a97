"""Experiment configuration documents: JSON schema validation and builders.

A configuration is a single JSON object naming a scheme ("pgr", "dist-pgr",
"pbr", or "bounds"), a game description, an optional communication graph,
and the solver parameters. Documents are validated against the published
schema for their scheme before anything is built; unknown keys are
rejected.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema
import numpy as np

from .errors import ConfigError
from .games import AggregativeGame, Game, QuadraticGame
from .graphs import (CommGraph, build_metropolis_weights, complete_graph,
                     erdos_renyi_graph, grid_graph, path_graph, ring_graph)
from .noise import GaussianNoise, NoiseModel, ZeroNoise
from .prox import BoxIndicator, L1, Zero

_NOISE_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["gaussian", "zero"]},
        "nu": {"type": "number", "minimum": 0.0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_REG_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"properties": {"kind": {"const": "zero"}},
         "required": ["kind"], "additionalProperties": False},
        {"properties": {"kind": {"const": "l1"},
                        "weight": {"type": "number", "minimum": 0.0}},
         "required": ["kind", "weight"], "additionalProperties": False},
        {"properties": {"kind": {"const": "box"},
                        "lo": {"type": ["number", "array"]},
                        "hi": {"type": ["number", "array"]}},
         "required": ["kind", "lo", "hi"], "additionalProperties": False},
    ],
}

_NUMBER_ARRAY = {"type": "array", "items": {"type": "number"}, "minItems": 1}

_GAME_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "kind": {"const": "quadratic"},
                "dims": {"type": "array", "minItems": 1,
                         "items": {"type": "integer", "minimum": 1}},
                "h": {"type": "array", "items": _NUMBER_ARRAY, "minItems": 1},
                "c": _NUMBER_ARRAY,
                "regularizers": {"type": "array", "items": _REG_SCHEMA},
                "noise": _NOISE_SCHEMA,
            },
            "required": ["kind", "h", "c"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "quadratic-random"},
                "players": {"type": "integer", "minimum": 1},
                "dim": {"type": "integer", "minimum": 1},
                "coupling": {"type": "number", "minimum": 0.0,
                             "exclusiveMaximum": 1.0},
                "noise": _NOISE_SCHEMA,
            },
            "required": ["kind", "players", "dim", "coupling"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "cournot"},
                "a": _NUMBER_ARRAY,
                "b": _NUMBER_ARRAY,
                "d": {"type": "number"},
                "c_price": {"type": "number", "minimum": 0.0},
                "lo": {"type": ["number", "array"]},
                "hi": {"type": ["number", "array"]},
                "nu": {"type": ["number", "array"]},
            },
            "required": ["kind", "a", "b", "d", "c_price", "lo", "hi"],
            "additionalProperties": False,
        },
    ],
}

_GRAPH_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "family": {"enum": ["complete", "ring", "path"]},
                "nodes": {"type": "integer", "minimum": 1},
            },
            "required": ["family", "nodes"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "family": {"const": "grid"},
                "rows": {"type": "integer", "minimum": 1},
                "cols": {"type": "integer", "minimum": 1},
            },
            "required": ["family", "rows", "cols"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "family": {"const": "erdos-renyi"},
                "nodes": {"type": "integer", "minimum": 2},
                "p": {"type": "number", "minimum": 0.0, "maximum": 1.0},
                "seed": {"type": "integer", "minimum": 0},
            },
            "required": ["family", "nodes", "p"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "edges": {"type": "array",
                          "items": {"type": "array", "minItems": 2,
                                    "maxItems": 2,
                                    "items": {"type": "integer",
                                              "minimum": 0}}},
                "nodes": {"type": "integer", "minimum": 1},
            },
            "required": ["edges", "nodes"],
            "additionalProperties": False,
        },
    ],
}

_FIT_SCHEMA = {
    "type": "object",
    "properties": {
        "skip": {"type": "integer", "minimum": 0},
        "window": {"type": "array", "minItems": 2, "maxItems": 2,
                   "items": {"type": "integer", "minimum": 0}},
    },
    "additionalProperties": False,
}


def _top_schema(scheme: str, solver_props: dict, solver_required: list[str],
                extra: dict | None = None,
                extra_required: list[str] | None = None) -> dict:
    properties = {
        "scheme": {"const": scheme},
        "seed": {"type": "integer", "minimum": 0},
        "replications": {"type": "integer", "minimum": 1},
        "solver": {
            "type": "object",
            "properties": solver_props,
            "required": solver_required,
            "additionalProperties": False,
        },
        "fit": _FIT_SCHEMA,
    }
    required = ["solver"]
    if extra:
        properties.update(extra)
        required += extra_required or []
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "properties": properties,
        "required": required,
        "additionalProperties": False,
    }


CONFIG_SCHEMAS: dict[str, dict] = {
    "pgr": _top_schema(
        "pgr",
        {
            "alpha": {"type": "number", "exclusiveMinimum": 0.0},
            "rho": {"type": "number", "exclusiveMinimum": 0.0,
                    "exclusiveMaximum": 1.0},
            "max_iter": {"type": "integer", "minimum": 1},
            "target_eps": {"type": "number", "exclusiveMinimum": 0.0},
        },
        ["alpha", "rho", "max_iter"],
        extra={"game": _GAME_SCHEMA, "x0": _NUMBER_ARRAY},
        extra_required=["game"],
    ),
    "dist-pgr": _top_schema(
        "dist-pgr",
        {
            "alpha": {"type": "number", "exclusiveMinimum": 0.0},
            "max_iter": {"type": "integer", "minimum": 1},
            "beta": {"type": "number", "exclusiveMinimum": 0.0,
                     "exclusiveMaximum": 1.0},
            "target_eps": {"type": "number", "exclusiveMinimum": 0.0},
        },
        ["alpha", "max_iter"],
        extra={"game": _GAME_SCHEMA, "graph": _GRAPH_SCHEMA,
               "x0": _NUMBER_ARRAY},
        extra_required=["game", "graph"],
    ),
    "pbr": _top_schema(
        "pbr",
        {
            "mu": {"type": "number", "exclusiveMinimum": 0.0},
            "eta_br": {"type": "number", "exclusiveMinimum": 0.0,
                       "exclusiveMaximum": 1.0},
            "max_iter": {"type": "integer", "minimum": 1},
            "eta_tilde": {"type": "number", "exclusiveMinimum": 0.0,
                          "exclusiveMaximum": 1.0},
            "m_max": {"type": "number", "minimum": 0.0},
            "c_r": {"type": "number", "exclusiveMinimum": 0.0},
            "inner_tol": {"type": "number", "exclusiveMinimum": 0.0},
            "allow_uncontractive": {"type": "boolean"},
            "target_eps": {"type": "number", "exclusiveMinimum": 0.0},
        },
        ["mu", "eta_br", "max_iter"],
        extra={"game": _GAME_SCHEMA, "x0": _NUMBER_ARRAY},
        extra_required=["game"],
    ),
    "bounds": _top_schema(
        "bounds",
        {
            "eta": {"type": "number", "exclusiveMinimum": 0.0},
            "lip": {"type": "number", "exclusiveMinimum": 0.0},
            "nu": {"type": "number", "minimum": 0.0},
            "alpha": {"type": "number", "exclusiveMinimum": 0.0},
            "rho": {"type": "number", "exclusiveMinimum": 0.0,
                    "exclusiveMaximum": 1.0},
            "c_start": {"type": "number", "minimum": 0.0},
            "eps": {"type": "number", "exclusiveMinimum": 0.0},
            "rho_tilde": {"type": "number", "exclusiveMinimum": 0.0,
                          "exclusiveMaximum": 1.0},
        },
        ["eta", "lip", "nu", "alpha", "rho", "c_start", "eps"],
    ),
}


def validate_config(doc: Any, scheme: str | None = None) -> dict:
    """Validate a configuration document against its scheme's schema.

    The scheme comes from the document's "scheme" key or the argument; when
    both are present they must agree. Returns the document unchanged.
    Raises ConfigError on any mismatch.
    """
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    doc_scheme = doc.get("scheme")
    if scheme is None:
        scheme = doc_scheme
    if scheme is None:
        raise ConfigError("no scheme given (config key 'scheme' or argument)")
    if doc_scheme is not None and doc_scheme != scheme:
        raise ConfigError(
            f"config names scheme '{doc_scheme}' but '{scheme}' was requested")
    if scheme not in CONFIG_SCHEMAS:
        raise ConfigError(
            f"unknown scheme '{scheme}'; expected one of "
            f"{sorted(CONFIG_SCHEMAS)}")
    try:
        jsonschema.validate(doc, CONFIG_SCHEMAS[scheme])
    except jsonschema.ValidationError as err:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {err.message}") from err
    return doc


def load_config(path: str, scheme: str | None = None) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    return validate_config(doc, scheme)


def _build_noise(doc: dict | None, seed: int) -> NoiseModel:
    if doc is None or doc["kind"] == "zero":
        return ZeroNoise(seed=seed)
    return GaussianNoise(nu=float(doc.get("nu", 1.0)), seed=seed)


def _build_regularizer(doc: dict, dim: int):
    kind = doc["kind"]
    if kind == "zero":
        return Zero()
    if kind == "l1":
        return L1(weight=float(doc["weight"]))
    lo = np.broadcast_to(np.asarray(doc["lo"], dtype=float), (dim,))
    hi = np.broadcast_to(np.asarray(doc["hi"], dtype=float), (dim,))
    return BoxIndicator(lo.copy(), hi.copy())


def build_game(doc: dict, seed: int = 0) -> Game:
    """Construct a validated game from its configuration object."""
    kind = doc["kind"]
    if kind == "quadratic":
        c = np.asarray(doc["c"], dtype=float)
        dims = tuple(doc.get("dims", (1,) * c.size))
        regs = doc.get("regularizers")
        built_regs = tuple(
            _build_regularizer(r, d) for r, d in zip(regs, dims)) if regs else ()
        return QuadraticGame(dims=dims, h=np.asarray(doc["h"], dtype=float),
                             c=c, regularizers=built_regs,
                             noise=_build_noise(doc.get("noise"), seed))
    if kind == "quadratic-random":
        from .experiments import generate_quadratic_game
        noise = doc.get("noise")
        nu = 0.0 if noise is None or noise["kind"] == "zero" \
            else float(noise.get("nu", 1.0))
        return generate_quadratic_game(
            n_players=int(doc["players"]), dim=int(doc["dim"]),
            coupling_strength=float(doc["coupling"]), seed=seed, nu=nu)
    if kind == "cournot":
        a = [float(v) for v in doc["a"]]
        n = len(a)
        lo = np.broadcast_to(np.asarray(doc["lo"], dtype=float), (n,))
        hi = np.broadcast_to(np.asarray(doc["hi"], dtype=float), (n,))
        nu = np.broadcast_to(np.asarray(doc.get("nu", 0.0), dtype=float), (n,))
        noises = tuple(
            GaussianNoise(nu=float(v), seed=seed) if v > 0.0
            else ZeroNoise(seed=seed) for v in nu)
        return AggregativeGame(a=tuple(a),
                               b=tuple(float(v) for v in doc["b"]),
                               d=float(doc["d"]),
                               c_price=float(doc["c_price"]),
                               lo=tuple(lo), hi=tuple(hi), noises=noises)
    raise ConfigError(f"unknown game kind '{kind}'")


def build_graph(doc: dict) -> CommGraph:
    """Construct a validated communication graph from its configuration."""
    if "edges" in doc:
        return build_metropolis_weights(int(doc["nodes"]),
                                        [tuple(e) for e in doc["edges"]])
    family = doc["family"]
    if family == "complete":
        return complete_graph(int(doc["nodes"]))
    if family == "ring":
        return ring_graph(int(doc["nodes"]))
    if family == "path":
        return path_graph(int(doc["nodes"]))
    if family == "grid":
        return grid_graph(int(doc["rows"]), int(doc["cols"]))
    if family == "erdos-renyi":
        return erdos_renyi_graph(int(doc["nodes"]), float(doc["p"]),
                                 seed=int(doc.get("seed", 0)))
    raise ConfigError(f"unknown graph family '{family}'")


def as_builtin(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays so json can serialize."""
    if isinstance(obj, dict):
        return {k: as_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [as_builtin(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj
