"""evonet: a multi-threaded agent-based simulation engine for models on
networks, driven by plain CSV project tables."""

from .attrs import AttributeRange, AttrKind, AttrValue, parse_attr_range
from .errors import (
    AttrError,
    ControlError,
    EvonetError,
    GeneratorError,
    GraphError,
    ModelError,
    ProjectError,
)
from .generators import GridSpec, Neighborhood, NodesSpec, generate_nodes, square_grid
from .graph import Graph, build_graph
from .rng import Pcg32

__version__ = "0.1.0"
