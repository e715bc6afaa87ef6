"""Exception hierarchy shared across the engine."""


class EvonetError(Exception):
    """Base class for all errors raised by evonet."""


class AttrError(EvonetError):
    """Malformed attribute-range spec or invalid attribute value."""


class GraphError(EvonetError):
    """Graph construction or lookup failure."""


class GeneratorError(EvonetError):
    """Bad grid/nodes spec or unreadable input file."""


class ModelError(EvonetError):
    """Model registry or model lifecycle failure."""


class ProjectError(EvonetError):
    """Project CSV parse or validation failure."""


class ControlError(EvonetError):
    """Invalid trial state transition or control command."""
