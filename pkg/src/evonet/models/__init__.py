"""Model-plugin contract: declarative metadata plus an init/step behavior.

A model declares its node/edge attributes and parameters in a metadata
JSON file (keys ``id``, ``version``, ``nodeAttrs``, ``edgeAttrs``,
``params``; ranges in the attrs grammar) and implements the Model
interface. Models resolve by id from a compile-time registry; the
built-in spatial prisoner's dilemma registers itself on import.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..attrs import AttributeRange, AttrValue, parse_attr_range
from ..errors import ModelError
from ..graph import Graph
from ..rng import Pcg32


@dataclass
class ModelMeta:
    """Declarative schema of one model: attributes and parameters."""

    id: str
    version: int
    node_attrs: dict[str, AttributeRange] = field(default_factory=dict)
    edge_attrs: dict[str, AttributeRange] = field(default_factory=dict)
    params: dict[str, AttributeRange] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ModelError("model id must be non-empty")


def meta_from_json(source) -> ModelMeta:
    """Load a ModelMeta from a metadata JSON file, path, or mapping."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = dict(source)
    try:
        model_id = data["id"]
        version = int(data["version"])
    except KeyError as exc:
        raise ModelError(f"metadata missing required key {exc}") from None

    def parse_block(key: str) -> dict[str, AttributeRange]:
        block = data.get(key, {})
        return {name: parse_attr_range(spec) for name, spec in block.items()}

    return ModelMeta(
        id=model_id,
        version=version,
        node_attrs=parse_block("nodeAttrs"),
        edge_attrs=parse_block("edgeAttrs"),
        params=parse_block("params"),
    )


@dataclass
class ModelContext:
    """Everything a model sees during a trial.

    The graph is readable from parallel workers during a model's
    compute phase; all writes belong to the single-writer phase. The rng
    is the trial's own PCG32 stream.
    """

    graph: Graph
    params: dict[str, AttrValue]
    rng: Pcg32
    step: int = 0
    error: str | None = None

    def fail(self, message: str) -> bool:
        """Record a diagnostic and return False; idiom for init bailouts."""
        self.error = message
        return False


class Model:
    """Behavior contract: validate/cache in init, update in step.

    init returns False (with ctx.error set) to abort the trial with a
    diagnostic. step performs one synchronous update and must be
    deterministic given (graph state, params, rng state). converged lets a
    model stop a trial early; the default never does.
    """

    def init(self, ctx: ModelContext) -> bool:
        return True

    def step(self, ctx: ModelContext) -> None:
        raise NotImplementedError

    def converged(self, ctx: ModelContext) -> bool:
        return False


@dataclass
class ModelPlugin:
    meta: ModelMeta
    factory: Callable[[], Model]


class ModelRegistry:
    """Id -> plugin table. Registration is append-only."""

    def __init__(self):
        self._plugins: dict[str, ModelPlugin] = {}

    def register(self, meta: ModelMeta, factory: Callable[[], Model]) -> None:
        if meta.id in self._plugins:
            raise ModelError(f"model id {meta.id!r} is already registered")
        self._plugins[meta.id] = ModelPlugin(meta, factory)

    def resolve(self, model_id: str) -> ModelPlugin:
        try:
            return self._plugins[model_id]
        except KeyError:
            raise ModelError(f"unknown model id {model_id!r}") from None

    def ids(self) -> list[str]:
        return list(self._plugins)


DEFAULT_REGISTRY = ModelRegistry()


def register_model(meta: ModelMeta, factory: Callable[[], Model], registry=None) -> None:
    (registry or DEFAULT_REGISTRY).register(meta, factory)


def resolve_model(model_id: str, registry=None) -> ModelPlugin:
    return (registry or DEFAULT_REGISTRY).resolve(model_id)


from .prisoners_dilemma import (  # noqa: E402  (self-registration below)
    PD_META,
    PDParams,
    PrisonersDilemma,
    pd_accumulate,
    pd_payoff,
)

DEFAULT_REGISTRY.register(PD_META, PrisonersDilemma)
