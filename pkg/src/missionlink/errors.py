"""Exception types distinguishing user-input problems from compute failures."""


class MissionLinkError(Exception):
    """Base class for all package errors."""


class CatalogError(MissionLinkError):
    """A reference to bundled data (preset, table) could not be resolved."""


class ScenarioError(MissionLinkError):
    """Scenario text failed to parse or validate; message names the field or line."""


class ComputeError(MissionLinkError):
    """An analysis stage failed on otherwise valid inputs."""
